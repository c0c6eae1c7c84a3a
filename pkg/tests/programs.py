"""Random small programs for machine-law tests, as hypothesis strategies and
as a seeded generator (the acceptance suite wants exact sample counts)."""
import random

from hypothesis import strategies as st

from realizer.lam import Ask, Const, If0, Pj, Tup, V, ap, lam, number, op

UNARY = ["S", "pred"]
BINARY = ["add", "mul", "sub", "max"]


def random_body(rng: random.Random, names, depth=3, self_name=None):
    if depth == 0 or rng.random() < 0.25:
        return V(rng.choice(names)) if rng.random() < 0.6 else Const(rng.randint(0, 4))
    k = rng.randrange(8 if self_name else 7)
    sub = lambda: random_body(rng, names, depth - 1, self_name)  # noqa: E731
    if k == 0:
        return op(rng.choice(UNARY), sub())
    if k == 1:
        return op(rng.choice(BINARY), sub(), sub())
    if k == 2:
        return If0(sub(), sub(), sub())
    if k == 3:
        return Ask(sub())
    if k == 4:
        return Pj(rng.randrange(2), sub())
    if k == 5:
        return Tup(sub(), sub())
    if k == 6:
        return op("S", sub())
    # guarded recursive call on a smaller argument
    return If0(V(names[-1]), Const(0), ap(V(self_name), op("pred", V(names[-1]))))


def random_case(rng: random.Random):
    """(two-argument code, fixpoint functional, args, oracle)."""
    a = number(lam("x", "y", random_body(rng, ["x", "y"])))
    f = number(lam("e", "x", random_body(rng, ["x"], self_name="e")))
    args = [rng.randint(0, 6) for _ in range(2)]
    oracle = {rng.randint(0, 6): rng.randint(0, 6) for _ in range(rng.randint(0, 4))}
    return a, f, args, oracle


cases = st.randoms(use_true_random=False).map(random_case)
