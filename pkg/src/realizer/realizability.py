"""Realizability relations: the forcing pair relation p |- (a,b): phi over a
bounded universe, and the oracle-free typed relation a: phi.

Hypothetical realizers ("if q |- (c,d): phi then ...") range over an explicit
candidate set: entries from a ``Registry`` (hand-written realizers and the
codes extracted from a proof corpus) followed by generic realizers built
from the formula's shape.  ``realizer_candidates`` returns that set so that
reports can show it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .codes import EMPTY, Oracle, pair, proj, tuple_, component
from .heo import (ForcingUniverse, Local, Nested, UniverseEmpty, Verdict, default_code,
                  fails, over_maximal, type_candidates, v_all, v_any, v_implies)
from .lam import Const, lam, number
from .syntax import (And, App, Arrow, Eq, Exists, Forall, HeoConst, Imp, N, Nat, Or, PrimFn, Prod,
                     Type, alpha_key, free_vars, numeral, show, substitute)
from .valuation import value


class MalformedFormula(ValueError):
    pass


# ---------------------------------------------------------------- formula types


@lru_cache(maxsize=None)
def formula_type(phi) -> Type:
    """Type of the realizers of phi in the oracle-free relation."""
    if isinstance(phi, Eq):
        return N
    if isinstance(phi, And):
        return Prod(formula_type(phi.left), formula_type(phi.right))
    if isinstance(phi, Or):
        return Prod(N, Prod(formula_type(phi.left), formula_type(phi.right)))
    if isinstance(phi, Imp):
        return Arrow(formula_type(phi.left), formula_type(phi.right))
    if isinstance(phi, Exists):
        return Prod(phi.var.type, formula_type(phi.body))
    return Arrow(phi.var.type, formula_type(phi.body))


# ---------------------------------------------------------------- candidates


def _numerals(t):
    if isinstance(t, HeoConst) and t.type == N:
        return numeral(t.index)
    if isinstance(t, App):
        return App(_numerals(t.fn), _numerals(t.arg))
    if isinstance(t, PrimFn):
        return PrimFn(t.symbol, tuple(_numerals(a) for a in t.args))
    return t


def _normal(phi):
    if isinstance(phi, Eq):
        return Eq(phi.type, _numerals(phi.lhs), _numerals(phi.rhs))
    if isinstance(phi, (And, Or, Imp)):
        return type(phi)(_normal(phi.left), _normal(phi.right))
    return type(phi)(phi.var, _normal(phi.body))


@dataclass
class Registry:
    """Known realizers by formula (up to renaming and F-constants at N)."""
    entries: dict = field(default_factory=dict)
    version: int = 0

    @staticmethod
    def key(phi, plain: bool):
        return (plain, alpha_key(_normal(phi)))

    def register(self, phi, code: int, plain: bool = False) -> None:
        bucket = self.entries.setdefault(self.key(phi, plain), [])
        if code not in bucket:
            bucket.append(code)
            self.version += 1

    def get(self, phi, plain: bool = False) -> list[int]:
        return self.entries.get(self.key(phi, plain), [])


def _const_fn(c: int) -> int:
    return number(lam("_", Const(c)))


@lru_cache(maxsize=50_000)
def _generic(phi, plain: bool, nums: tuple, cap: int) -> tuple[int, ...]:
    if isinstance(phi, Eq):
        return (0, 1)
    if isinstance(phi, And):
        ls = _generic(phi.left, plain, nums, cap)[:2]
        rs = _generic(phi.right, plain, nums, cap)[:2]
        return tuple(pair(x, y) for x in ls for y in rs)
    if isinstance(phi, Or):
        ls = _generic(phi.left, plain, nums, cap)[:2]
        rs = _generic(phi.right, plain, nums, cap)[:2]
        if plain:
            zl, zr = default_code(formula_type(phi.left)), default_code(formula_type(phi.right))
            return tuple([tuple_([0, c, zr]) for c in ls] + [tuple_([1, zl, c]) for c in rs])
        return tuple([pair(0, c) for c in ls] + [pair(1, c) for c in rs])
    if isinstance(phi, Imp):
        return tuple(_const_fn(c) for c in _generic(phi.right, plain, nums, cap)[:2])
    A = phi.var.type
    if isinstance(phi, Exists):
        out = []
        for n in type_candidates(A, nums, cap)[:2]:
            body = substitute(phi.body, phi.var, HeoConst(n, A))
            out += [pair(n, c) for c in _generic(body, plain, nums, cap)[:2]]
        return tuple(out)
    body = substitute(phi.body, phi.var, HeoConst(default_code(A), A))
    return tuple(_const_fn(c) for c in _generic(body, plain, nums, cap)[:2])


def realizer_candidates(phi, num_set: Sequence[int], registry: Registry | None = None,
                        plain: bool = False, cap: int = 8) -> tuple[int, ...]:
    """Realizers tried for a hypothesis phi: registered ones first, then generic."""
    known = registry.get(phi, plain) if registry is not None else []
    gen = _generic(phi, plain, tuple(sorted(set(num_set))), cap)
    return tuple(dict.fromkeys(list(known) + list(gen)))[:cap + len(known)]


@lru_cache(maxsize=200_000)
def _inst(body, var, n: int):
    return substitute(body, var, HeoConst(n, var.type))


# ---------------------------------------------------------------- local clauses


class _Clauses:
    def __init__(self, loc: Local, registry: Registry | None):
        self.loc = loc
        self.registry = registry
        self.memo: dict = {}

    def cands(self, phi, plain: bool):
        return realizer_candidates(phi, self.loc.num_set, self.registry, plain, self.loc.cap)

    def term(self, t):
        return self.loc.result(value(t, self.loc.oracle, self.loc.fuel), "a term value")

    def atom(self, phi: Eq) -> Verdict:
        x, bad = self.term(phi.lhs)
        if bad:
            return bad
        y, bad = self.term(phi.rhs)
        if bad:
            return bad
        v = self.loc.eq(phi.type, x, y)
        return v if not v.fails else fails(f"atom {show(phi)} is false: {v.reason}")

    # -------- forcing, pair form

    def pair(self, a: int, b: int, phi) -> Verdict:
        key = ("pair", a, b, phi)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._pair(a, b, phi)
        return hit

    def _pair(self, a, b, phi) -> Verdict:
        loc = self.loc
        if isinstance(phi, Eq):
            return self.atom(phi)
        if isinstance(phi, And):
            return v_all([lambda: self.pair(proj(0, a), proj(0, b), phi.left),
                          lambda: self.pair(proj(1, a), proj(1, b), phi.right)])
        if isinstance(phi, Or):
            ta, tb = proj(0, a), proj(0, b)
            if ta == tb == 0:
                return self.pair(proj(1, a), proj(1, b), phi.left)
            if ta == tb == 1:
                return self.pair(proj(1, a), proj(1, b), phi.right)
            return fails(f"disjunction tags {ta},{tb}")
        if isinstance(phi, Imp):
            cs = self.cands(phi.left, False)

            def case(c, d):
                def concl():
                    x, bad = loc.app(a, c)
                    if bad:
                        return bad
                    y, bad = loc.app(b, d)
                    if bad:
                        return bad
                    return self.pair(x, y, phi.right)
                return lambda: v_implies(self.pair(c, d, phi.left), concl)
            return v_all(case(c, d) for c in cs for d in cs)
        A = phi.var.type
        if isinstance(phi, Exists):
            a0, b0 = proj(0, a), proj(0, b)
            return v_all([lambda: loc.eq(A, a0, b0),
                          lambda: self.pair(proj(1, a), proj(1, b), _inst(phi.body, phi.var, a0))])
        ns = loc.cands(A)
        pairs = [(n, n) for n in ns] if isinstance(A, Nat) else [(n, m) for n in ns for m in ns]

        def inst(n, m):
            def concl():
                x, bad = loc.app(a, n)
                if bad:
                    return bad
                y, bad = loc.app(b, m)
                if bad:
                    return bad
                v = self.pair(x, y, _inst(phi.body, phi.var, n))
                return v if not v.fails else fails(f"instance {n}: {v.reason}")
            return lambda: v_implies(loc.eq(A, n, m), concl)
        return v_all(inst(n, m) for n, m in pairs)

    # -------- oracle-free, single realizer

    def single(self, a: int, phi) -> Verdict:
        key = ("single", a, phi)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._single(a, phi)
        return hit

    def _single(self, a, phi) -> Verdict:
        loc = self.loc
        if isinstance(phi, Eq):
            return self.atom(phi)
        if isinstance(phi, And):
            return v_all([lambda: self.single(proj(0, a), phi.left),
                          lambda: self.single(proj(1, a), phi.right)])
        if isinstance(phi, Or):
            def branch():
                tag = component(a, 0, 3)
                if tag == 0:
                    return self.single(component(a, 1, 3), phi.left)
                if tag == 1:
                    return self.single(component(a, 2, 3), phi.right)
                return fails(f"disjunction tag {tag}")
            return v_all([lambda: loc.eq(formula_type(phi), a, a), branch])
        if isinstance(phi, Imp):
            cs = self.cands(phi.left, True)

            def case(c):
                def concl():
                    x, bad = loc.app(a, c)
                    if bad:
                        return bad
                    return self.single(x, phi.right)
                return lambda: v_implies(self.single(c, phi.left), concl)
            return v_all([lambda: loc.eq(formula_type(phi), a, a)] + [case(c) for c in cs])
        A = phi.var.type
        if isinstance(phi, Exists):
            a0 = proj(0, a)
            return v_all([lambda: loc.eq(A, a0, a0),
                          lambda: self.single(proj(1, a), _inst(phi.body, phi.var, a0))])

        def inst(n):
            def concl():
                x, bad = loc.app(a, n)
                if bad:
                    return bad
                v = self.single(x, _inst(phi.body, phi.var, n))
                return v if not v.fails else fails(f"instance {n}: {v.reason}")
            return lambda: v_implies(loc.eq(A, n, n), concl)
        return v_all([lambda: loc.eq(formula_type(phi), a, a)] + [inst(n) for n in loc.cands(A)])


# ---------------------------------------------------------------- public API


def _closed(phi):
    fv = free_vars(phi)
    if fv:
        raise MalformedFormula(f"formula has free variables {[v.name for v in fv]}: {show(phi)}")


_CACHE: dict = {}


def _cache_for(U: ForcingUniverse) -> dict:
    reg = U.registry
    key = (U, id(reg), getattr(reg, "version", 0))
    c = _CACHE.get(key)
    if c is None:
        if len(_CACHE) > 64:
            _CACHE.clear()
        c = _CACHE[key] = {}
    return c


def check_pair(U: ForcingUniverse, p: Mapping[int, int], a: int, b: int, phi) -> Verdict:
    """p |- (a,b): phi decided in U."""
    _closed(phi)
    return over_maximal(U, p, lambda loc: _Clauses(loc, U.registry).pair(a, b, phi),
                        cache=_cache_for(U), cache_key=("pair", a, b, phi))


def check_single(U: ForcingUniverse, p: Mapping[int, int], a: int, phi) -> Verdict:
    return check_pair(U, p, a, a, phi)


def check_plain(a: int, phi, num_set: Sequence[int] = (0, 1, 2, 3, 4), fuel: int = 20_000,
                registry: Registry | None = None, cap: int = 8) -> Verdict:
    """a: phi in the oracle-free relation, bounded by num_set and fuel."""
    _closed(phi)
    loc = Local(EMPTY, None, num_set, fuel, cap)
    return _Clauses(loc, registry).single(a, phi)


def plain_candidates(phi, num_set=(0, 1, 2, 3, 4), registry=None, cap=8) -> dict:
    """The hypothetical-realizer sets used by check_plain, per implication."""
    out = {}
    for f in _implications(phi):
        out[show(f.left)] = list(realizer_candidates(f.left, num_set, registry, True, cap))
    return out


def _implications(phi):
    if isinstance(phi, Imp):
        yield phi
    if isinstance(phi, (And, Or, Imp)):
        yield from _implications(phi.left)
        yield from _implications(phi.right)
    elif isinstance(phi, (Exists, Forall)):
        yield from _implications(phi.body)


# ---------------------------------------------------------------- literal reference


class NestedRealize(Nested):
    """p |- (a,b): phi by its defining clauses, quantifying over extensions."""

    def __init__(self, U: ForcingUniverse):
        super().__init__(U)
        self.rmemo: dict = {}

    def local(self, r):
        return Local(r, self.U.key_set, self.U.num_set, self.U.fuel, self.U.cap, self.U.fuel_out)

    def pair(self, p: Oracle, a: int, b: int, phi) -> Verdict:
        key = (p, a, b, phi)
        if key not in self.rmemo:
            self.rmemo[key] = self._pair(p, a, b, phi)
        return self.rmemo[key]

    def _pair(self, p, a, b, phi):
        U = self.U
        if isinstance(phi, Eq):
            def at(r):
                def go():
                    c = _Clauses(self.local(r), U.registry)
                    x, bad = c.term(phi.lhs)
                    if bad:
                        return bad
                    y, bad = c.term(phi.rhs)
                    if bad:
                        return bad
                    return self.eq(r, phi.type, x, y)
                return go
            return v_all(lambda q=q: v_any(at(r) for r in self.ext(q)) for q in self.ext(p))
        if isinstance(phi, And):
            return v_all([lambda: self.pair(p, proj(0, a), proj(0, b), phi.left),
                          lambda: self.pair(p, proj(1, a), proj(1, b), phi.right)])
        if isinstance(phi, Or):
            ta, tb = proj(0, a), proj(0, b)
            if ta == tb and ta in (0, 1):
                return self.pair(p, proj(1, a), proj(1, b), phi.left if ta == 0 else phi.right)
            return fails(f"disjunction tags {ta},{tb}")
        if isinstance(phi, Exists):
            a0 = proj(0, a)
            return v_all([lambda: self.eq(p, phi.var.type, a0, proj(0, b)),
                          lambda: self.pair(p, proj(1, a), proj(1, b), _inst(phi.body, phi.var, a0))])
        if isinstance(phi, Imp):
            cs = realizer_candidates(phi.left, U.num_set, U.registry, False, U.cap)
            hyps = [(c, d, phi.left, phi.right) for c in cs for d in cs]
            premise = lambda q, c, d: self.pair(q, c, d, phi.left)
            target = lambda n: phi.right
        else:
            A = phi.var.type
            ns = type_candidates(A, U.num_set, U.cap)
            hyps = [(n, m, None, None) for n in ns for m in ns]
            premise = lambda q, n, m: self.eq(q, A, n, m)
            target = lambda n: _inst(phi.body, phi.var, n)

        def witness(r, c, d):
            def go():
                x, bad = self.app(r, a, c)
                if bad:
                    return bad
                y, bad = self.app(r, b, d)
                if bad:
                    return bad
                return self.pair(r, x, y, target(c))
            return go

        def case(q, c, d):
            return lambda: v_implies(premise(q, c, d),
                                     lambda: v_any(witness(r, c, d) for r in self.ext(q)))
        return v_all(case(q, c, d) for q in self.ext(p) for c, d, _, _ in hyps)


def check_pair_nested(U: ForcingUniverse, p: Mapping[int, int], a: int, b: int, phi) -> Verdict:
    _closed(phi)
    p = Oracle(p)
    if not U.member(p):
        raise UniverseEmpty(f"{dict(p)} is not a condition of the universe")
    return NestedRealize(U).pair(p, a, b, phi)


def verdict_record(relation: str, verdict: Verdict, U: ForcingUniverse | None = None,
                   **extra) -> dict:
    """Structured report of a verdict."""
    rec = {"relation": relation, "verdict": verdict.kind}
    if U is not None:
        rec["universe"] = U.digest()
    if verdict.fails:
        rec["counterexample"] = verdict.reason
    elif verdict.exhausted:
        rec["reason"] = verdict.reason
    rec.update(extra)
    return rec
