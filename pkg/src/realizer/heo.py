"""Bounded universes of forcing conditions and the HEO equality relations.

Decision procedure
------------------
Inside a finite universe whose conditions are all finite functions with
domain in ``key_set`` and values admitted key by key by the condition set,
every relation built from the clauses "for all q >= p there is r >= q" is
equivalent to evaluating the clause *locally* at each maximal extension of
p (where the quantifier over extensions collapses) and requiring the local
check to hold at all of them.  The maximal extensions are explored lazily:
evaluation starts from p, and only when the machine asks the oracle for a
key in ``key_set`` that is still open is the search split on that key's
admissible values.  Codes that never consult the oracle are therefore
checked once, whatever the universe.

``force_eq_nested`` keeps the literal nested search over extensions as a
reference; tests compare the two on small universes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .codes import (EMPTY, FuelExhausted, Num, Oracle, OracleMiss, Value, apply,
                    build, pair, proj)
from .lam import Const, V, lam, number, op
from .syntax import Arrow, Nat, Prod, Type, show_type

# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Verdict:
    kind: str  # "Holds" | "Fails" | "Exhausted"
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.kind == "Holds"

    @property
    def fails(self) -> bool:
        return self.kind == "Fails"

    @property
    def exhausted(self) -> bool:
        return self.kind == "Exhausted"

    def __str__(self):
        return self.kind + (f" ({self.reason})" if self.reason else "")


HOLDS = Verdict("Holds")


def fails(reason: str = "") -> Verdict:
    return Verdict("Fails", reason)


def exhausted(reason: str) -> Verdict:
    return Verdict("Exhausted", reason)


def v_all(items: Iterable[Callable[[], Verdict]]) -> Verdict:
    """Kleene conjunction; stops at the first Fails."""
    pending = None
    for f in items:
        v = f()
        if v.fails:
            return v
        if v.exhausted and pending is None:
            pending = v
    return pending or HOLDS


def v_any(items: Iterable[Callable[[], Verdict]], none_reason: str = "no witness") -> Verdict:
    """Kleene disjunction; stops at the first Holds."""
    pending = None
    for f in items:
        v = f()
        if v.holds:
            return v
        if v.exhausted and pending is None:
            pending = v
    return pending or fails(none_reason)


def v_implies(premise: Verdict, conclusion: Callable[[], Verdict]) -> Verdict:
    if premise.fails:
        return HOLDS
    c = conclusion()
    if c.holds or premise.holds:
        return c
    return premise  # premise exhausted and conclusion not Holds


# ---------------------------------------------------------------- condition sets


class UniverseEmpty(ValueError):
    pass


class AllConditions:
    """Every finite function is a condition."""

    name = "all"

    def allowed(self, key: int, val_bound: int) -> tuple[int, ...]:
        return tuple(range(val_bound + 1))

    def contains(self, p: Mapping[int, int]) -> bool:
        return True


ALL = AllConditions()


@dataclass(frozen=True)
class ForcingUniverse:
    """Bounds relative to which the forcing relations are decided.

    ``tset`` must be product-shaped: membership is decided key by key
    through ``tset.allowed(key, val_bound)``.
    """
    key_set: tuple[int, ...] = (0, 1)
    val_bound: int = 2
    num_set: tuple[int, ...] = (0, 1, 2, 3, 4)
    fuel: int = 20_000
    tset: object = ALL
    registry: object = field(default=None, compare=False)
    cap: int = 8  # candidates per type / formula position
    fuel_out: str = "exhausted"  # or "undefined": running out of fuel reads as divergence

    def __post_init__(self):
        object.__setattr__(self, "key_set", tuple(sorted(set(self.key_set))))
        object.__setattr__(self, "num_set", tuple(sorted(set(self.num_set))))
        if self.fuel <= 0 or not self.num_set:
            raise ValueError("fuel and num_set must be non-empty/positive")
        if self.fuel_out not in ("exhausted", "undefined"):
            raise ValueError("fuel_out is 'exhausted' or 'undefined'")

    def allowed(self, key: int) -> tuple[int, ...]:
        if key not in self.key_set:
            return ()
        return tuple(self.tset.allowed(key, self.val_bound))

    def member(self, p: Mapping[int, int]) -> bool:
        return all(k in self.key_set and v in self.allowed(k) for k, v in p.items()) \
            and self.tset.contains(p)

    def conditions(self) -> list[Oracle]:
        return enumerate_extensions(self, EMPTY)

    def digest(self) -> str:
        return (f"keys={list(self.key_set)} vals<={self.val_bound} nums={list(self.num_set)} "
                f"fuel={self.fuel} T={getattr(self.tset, 'name', type(self.tset).__name__)}")


def enumerate_extensions(U: ForcingUniverse, p: Mapping[int, int]) -> list[Oracle]:
    """All q in the universe with p <= q, ordered by encoded oracle."""
    p = Oracle(p)
    if not U.member(p):
        raise UniverseEmpty(f"{p} is not a condition of the universe")
    free = [k for k in U.key_set if k not in p]
    choices = [(None,) + U.allowed(k) for k in free]
    out = []
    for combo in itertools.product(*choices):
        q = dict(p)
        q.update({k: v for k, v in zip(free, combo) if v is not None})
        q = Oracle(q)
        if U.tset.contains(q):
            out.append(q)
    out.sort(key=lambda o: o.encode())
    return out


# ---------------------------------------------------------------- canonical inhabitants


@lru_cache(maxsize=None)
def default_code(A: Type) -> int:
    """0^A."""
    if isinstance(A, Nat):
        return 0
    if isinstance(A, Prod):
        return pair(default_code(A.left), default_code(A.right))
    return build(Num(default_code(A.cod)))


@lru_cache(maxsize=None)
def _witnesses(A: Arrow, nums: tuple[int, ...]) -> tuple[int, ...]:
    """A few total elements of an arrow type used as numeral instances."""
    out = [default_code(A)]
    for c in _type_candidates(A.cod, nums, 3)[1:3]:
        out.append(number(lam("_", Const(c))))
    if A.dom == A.cod:
        out.append(number(lam("x", V("x"))))
        if isinstance(A.dom, Nat):
            out.append(number(lam("x", op("add", V("x"), Const(0)))))  # second identity
            out.append(number(lam("x", op("S", V("x")))))
    return tuple(dict.fromkeys(out))


@lru_cache(maxsize=None)
def _type_candidates(A: Type, nums: tuple[int, ...], cap: int) -> tuple[int, ...]:
    if isinstance(A, Nat):
        return nums
    if isinstance(A, Prod):
        left = _type_candidates(A.left, nums, cap)[:3]
        right = _type_candidates(A.right, nums, cap)[:3]
        return tuple(pair(x, y) for x in left for y in right)[:max(cap, 1)]
    return tuple(dict.fromkeys(_witnesses(A, nums) + nums))


def type_candidates(A: Type, num_set: Sequence[int], cap: int = 8) -> tuple[int, ...]:
    """Numbers tried at a quantifier over type A.

    At N this is num_set; at product types pairs of component candidates; at
    arrow types a few total witnesses followed by the raw numerals (which are
    usually not codes and get filtered by the membership test).
    """
    return _type_candidates(A, tuple(sorted(set(num_set))), cap)


# ---------------------------------------------------------------- local evaluation


class _Need(Exception):
    """The lazy oracle was asked for a key whose value is not chosen yet."""

    def __init__(self, key: int):
        self.key = key


class LazyOracle(Mapping):
    """A maximal extension of a condition, materialised on demand."""

    def __init__(self, U: ForcingUniverse, assign: Mapping[int, int]):
        self.U = U
        self.assign = dict(assign)
        self.log: dict[int, int | None] = {}

    def get(self, k, default=None):
        if k in self.assign:
            self.log[k] = self.assign[k]
            return self.assign[k]
        if self.U.allowed(k):
            raise _Need(k)
        self.log[k] = None
        return default

    def __getitem__(self, k):
        v = self.get(k)
        if v is None:
            raise KeyError(k)
        return v

    def __iter__(self):
        return iter(self.assign)

    def __len__(self):
        return len(self.assign)


class Local:
    """Relations evaluated at one (lazily materialised) maximal condition.

    With ``key_set=None`` this is the oracle-free relation: oracle queries
    are simply undefined.
    """

    def __init__(self, oracle, key_set, num_set, fuel, cap=8, fuel_out="exhausted"):
        self.fuel_out = fuel_out
        self.oracle = oracle
        self.key_set = key_set
        self.num_set = tuple(num_set)
        self.fuel = fuel
        self.cap = cap
        self.memo: dict = {}

    def cands(self, A: Type) -> tuple[int, ...]:
        return type_candidates(A, self.num_set, self.cap)

    def result(self, r, what: str):
        """(value, None) or (None, verdict explaining why it is undefined)."""
        if isinstance(r, Value):
            return r.n, None
        if isinstance(r, FuelExhausted):
            if self.fuel_out == "undefined":
                return None, fails(f"{what} undefined within {self.fuel} steps")
            return None, exhausted(f"fuel while computing {what}")
        if isinstance(r, OracleMiss):
            if self.key_set is not None and r.query not in self.key_set:
                return None, exhausted(f"oracle-miss outside universe at {r.query}")
            return None, fails(f"{what} undefined (oracle has no value at {r.query})")
        return None, fails(f"{what} undefined (invalid code)")

    def app(self, a: int, n: int):
        return self.result(apply(a, n, self.oracle, self.fuel), f"{a}.{n}" if a < 10**6 else f"a.{n}")

    def eq(self, A: Type, a: int, b: int) -> Verdict:
        if isinstance(A, Nat):
            return HOLDS if a == b else fails(f"{a} != {b}")
        if isinstance(A, Prod):
            return v_all([lambda: self.eq(A.left, proj(0, a), proj(0, b)),
                          lambda: self.eq(A.right, proj(1, a), proj(1, b))])
        key = ("eq", A, a, b)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._eq_arrow(A, a, b)
            self.memo[key] = hit
        return hit

    def _eq_arrow(self, A: Arrow, a: int, b: int) -> Verdict:
        def case(n, m):
            def concl():
                x, bad = self.app(a, n)
                if bad:
                    return bad
                y, bad = self.app(b, m)
                if bad:
                    return bad
                v = self.eq(A.cod, x, y)
                return v if not v.fails else fails(f"at arguments {n},{m}: {v.reason}")
            return lambda: v_implies(self.eq(A.dom, n, m), concl)

        cs = self.cands(A.dom)
        if isinstance(A.dom, Nat):
            pairs = [(n, n) for n in cs]
        else:
            pairs = [(n, m) for n in cs for m in cs]
        return v_all(case(n, m) for n, m in pairs)


def over_maximal(U: ForcingUniverse, p: Mapping[int, int], run: Callable[[Local], Verdict],
                 cache: dict | None = None, cache_key=None) -> Verdict:
    """Conjunction of run(...) over all maximal extensions of p in U.

    ``cache`` (optional) stores verdicts together with the oracle entries
    they actually read, so that later calls at other conditions can reuse
    them when those entries agree.
    """
    if not U.member(p):
        raise UniverseEmpty(f"{dict(p)} is not a condition of the universe")
    stack = [dict(p)]
    pending = None
    while stack:
        assign = stack.pop()
        v = None
        if cache is not None:
            for deps, got in cache.get(cache_key, ()):
                if all(assign.get(k) == val for k, val in deps):
                    v = got
                    break
        if v is None:
            oracle = LazyOracle(U, assign)
            local = Local(oracle, U.key_set, U.num_set, U.fuel, U.cap, U.fuel_out)
            try:
                v = run(local)
            except _Need as need:
                for val in reversed(U.allowed(need.key)):
                    stack.append({**assign, need.key: val})
                continue
            if cache is not None:
                cache.setdefault(cache_key, []).append((tuple(oracle.log.items()), v))
        if v.fails:
            where = {k: assign[k] for k in sorted(assign)}
            return fails(f"{v.reason} [at condition {where}]" if where else v.reason)
        if v.exhausted and pending is None:
            pending = v
    return pending or HOLDS


# ---------------------------------------------------------------- public relations


def force_eq(U: ForcingUniverse, p: Mapping[int, int], A: Type, a: int, b: int) -> Verdict:
    """p |- a =_A b decided in U."""
    return over_maximal(U, p, lambda loc: loc.eq(A, a, b))


def force_in(U: ForcingUniverse, p: Mapping[int, int], A: Type, a: int) -> Verdict:
    return force_eq(U, p, A, a, a)


def plain_eq(A: Type, a: int, b: int, num_set: Sequence[int] = (0, 1, 2, 3, 4),
             fuel: int = 20_000) -> Verdict:
    """Oracle-free HEO equality, numeral quantifiers over num_set."""
    return Local(EMPTY, None, num_set, fuel).eq(A, a, b)


def plain_in(A: Type, a: int, num_set: Sequence[int] = (0, 1, 2, 3, 4), fuel: int = 20_000):
    return plain_eq(A, a, a, num_set, fuel)


# ---------------------------------------------------------------- literal reference search


class Nested:
    """The relation by its defining clauses, quantifying over extensions.

    Exponentially slower; only for cross-checking on tiny universes.
    """

    def __init__(self, U: ForcingUniverse):
        self.U = U
        self.memo: dict = {}
        self._ext: dict = {}

    def ext(self, p: Oracle) -> list[Oracle]:
        hit = self._ext.get(p)
        if hit is None:
            hit = self._ext[p] = enumerate_extensions(self.U, p)
        return hit

    def app(self, r: Oracle, a: int, n: int):
        loc = Local(r, self.U.key_set, self.U.num_set, self.U.fuel, self.U.cap, self.U.fuel_out)
        return loc.app(a, n)

    def eq(self, p: Oracle, A: Type, a: int, b: int) -> Verdict:
        if isinstance(A, Nat):
            return HOLDS if a == b else fails(f"{a} != {b}")
        if isinstance(A, Prod):
            return v_all([lambda: self.eq(p, A.left, proj(0, a), proj(0, b)),
                          lambda: self.eq(p, A.right, proj(1, a), proj(1, b))])
        key = (p, A, a, b)
        if key not in self.memo:
            self.memo[key] = self._arrow(p, A, a, b)
        return self.memo[key]

    def _arrow(self, p, A, a, b):
        cs = type_candidates(A.dom, self.U.num_set, self.U.cap)

        def at(q, n, m):
            def witness(r):
                def go():
                    x, bad = self.app(r, a, n)
                    if bad:
                        return bad
                    y, bad = self.app(r, b, m)
                    if bad:
                        return bad
                    return self.eq(r, A.cod, x, y)
                return go
            return lambda: v_implies(self.eq(q, A.dom, n, m),
                                     lambda: v_any(witness(r) for r in self.ext(q)))

        return v_all(at(q, n, m) for q in self.ext(p) for n in cs for m in cs)


def force_eq_nested(U: ForcingUniverse, p: Mapping[int, int], A: Type, a: int, b: int) -> Verdict:
    return Nested(U).eq(Oracle(p), A, a, b)


__all__ = [
    "Verdict", "HOLDS", "fails", "exhausted", "v_all", "v_any", "v_implies",
    "UniverseEmpty", "AllConditions", "ALL", "ForcingUniverse", "enumerate_extensions",
    "default_code", "type_candidates", "LazyOracle", "Local", "over_maximal",
    "force_eq", "force_in", "plain_eq", "plain_in", "Nested", "force_eq_nested", "show_type",
]
