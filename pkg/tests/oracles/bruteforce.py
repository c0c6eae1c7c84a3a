"""Independent brute-force answers for the derived test values.

Nothing here imports the package: each value is recomputed from scratch with
plain Python so that a bug in the machine or the checkers cannot leak into
its own oracle.  ``scripts/freeze_oracles.py`` writes the results to
``frozen.json``; the tests compare both against the package.
"""
from __future__ import annotations

from itertools import count


def cantor_table(limit: int) -> dict[tuple[int, int], int]:
    """Walk the diagonals a+b = 0, 1, 2, ... in order of increasing b."""
    out, n = {}, 0
    for s in range(2 * limit):
        for b in range(s + 1):
            a = s - b
            if a < limit and b < limit:
                out[(a, b)] = n
            n += 1
    return out


def factorial(n: int) -> int:
    r = 1
    for k in range(2, n + 1):
        r *= k
    return r


def least_witnesses(a: int, phi) -> list[int]:
    return [next(y for y in count() if phi(x, y)) for x in range(a)]


def minimal_collection_bound(a: int, phi) -> int:
    """Least b with: for every x < a some y < b has phi(x, y)."""
    for b in count():
        if all(any(phi(x, y) for y in range(b)) for x in range(a)):
            return b


def ac_choice(nums, phi) -> list[int]:
    """Least y for each x; the choice function the AC realizer should match."""
    return [next(y for y in count() if phi(x, y)) for x in nums]


def dc_sequence(n0: int, step, length: int) -> list[int]:
    out = [n0]
    while len(out) < length:
        out.append(step(out[-1]))
    return out


def lt(x, y):
    return 1 if x < y else 0


def sub(x, y):
    return max(x - y, 0)


def eq(x, y):
    return 1 if x == y else 0


def below(n):
    return range(n)


# the sentences of corpus/sentences.txt, in file order, as Python predicates
SENTENCES = [
    lambda: 0 == 0,
    lambda: any(x == 2 for x in range(100)),
    lambda: 0 == 1 or 0 == 0,
    lambda: any(x * x == 9 for x in below(5)),
    lambda: all(x == 0 or any(y + 1 == x for y in below(x)) for x in below(4)),
    lambda: any(y < 6 and x + y == 5 and x * y == 6 for x in range(50) for y in range(50)),
    lambda: (not 0 == 1) or any(y == 3 for y in range(100)),
    lambda: all(any(y == 2 * x for y in below(9)) for x in below(3)),
    lambda: any(x == 2 for x in range(100)) and (1 == 1 or 1 == 2),
    lambda: any((x == 1 or x == 3) and lt(1, x) for x in range(100)),
    lambda: all(eq(x, 1) == 1 or lt(0, sub(x, 1)) == 1 or x == 0 for x in below(3)),
    lambda: any(max(z, 3) == 3 and 2 < z for z in range(100)),
    lambda: ((not 0 == 0) or 1 == 1) or 0 == 1,
    lambda: all(any(2 * q == x or 2 * q + 1 == x for q in below(5)) for x in below(5)),
    lambda: 0 == 1,
    lambda: 0 == 1 or 1 == 0,
    lambda: any(x == 5 for x in below(3)),
    lambda: all(x == 0 for x in below(4)),
    lambda: any(x * x == 7 for x in below(6)),
    lambda: any(x == 2 for x in below(4)) and 1 == 0,
    lambda: all(any(y == 2 * x for y in below(3)) for x in below(3)),
    lambda: (not 0 == 0) or 1 == 2 or any(y == 5 for y in below(2)),
    lambda: any(any(x + y == 9 for y in below(4)) for x in below(4)),
    lambda: all(x == 1 or x == 2 for x in below(2)),
]


def compute() -> dict:
    table = cantor_table(200)
    return {
        "cantor_samples": {f"{a},{b}": table[(a, b)] for a, b in
                           [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (7, 9), (199, 199)]},
        "cantor_is_bijection_below_200": len(set(table.values())) == len(table) == 200 * 200,
        "factorial_4": factorial(4),
        "collection": {
            "double_a3": {"witnesses": least_witnesses(3, lambda x, y: y == x + x),
                          "minimal": minimal_collection_bound(3, lambda x, y: y == x + x)},
            "succ_a2": {"witnesses": least_witnesses(2, lambda x, y: y == x + 1),
                        "minimal": minimal_collection_bound(2, lambda x, y: y == x + 1)},
            "double_a0": {"witnesses": [], "minimal": minimal_collection_bound(0, lambda x, y: True)},
        },
        "ac_double_0_to_4": ac_choice(range(5), lambda x, y: y == x + x),
        "dc_succ_from": {str(n0): dc_sequence(n0, lambda n: n + 1, 6) for n0 in range(5)},
        "exists_two_witness": next(x for x in count() if x == 2),
        "sentence_truth": [bool(f()) for f in SENTENCES],
    }
