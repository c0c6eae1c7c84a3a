"""Numeric values of closed terms, with and without an oracle.

Constants are interpreted by fixed codes; a term is translated into one
machine expression so that nested applications share a single fuel budget.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Mapping, Sequence

from .codes import EMPTY, EvalResult, Value, build, fixpoint, run_expr, Arg, Prim
from .lam import Ap, Const, If0, Pj, V, compile_lam, lam, number, op, ap, tup
from .syntax import (App, CombK, CombS, HeoConst, PairC, PrimFn, Proj0, Proj1, Rec, Succ,
                     UnboundVariable, Var, Zero, show_term)


@dataclass(frozen=True)
class ConstantCodes:
    """Codes interpreting S, K (Pi), S-combinator (Sigma), R, D, D0, D1.

    None of them consults the oracle, so the same numbers serve the
    oracle-free valuation as well.
    """

    @cached_property
    def S(self) -> int:
        return build(Prim("S", (Arg(),)))

    @cached_property
    def Pi(self) -> int:
        return number(lam("a", "b", V("a")))

    @cached_property
    def Sigma(self) -> int:
        n = V("n")
        return number(lam("a", "b", "n", ap(V("a"), n, ap(V("b"), n))))

    @cached_property
    def R(self) -> int:
        # R a b 0 = a ; R a b (n+1) = b (R a b n) n
        e, a, b, n = V("e"), V("a"), V("b"), V("n")
        m = op("pred", n)
        body = lam("e", "a", "b", "n", If0(n, a, ap(b, ap(e, a, b, m), m)))
        return fixpoint(number(body))

    @cached_property
    def D(self) -> int:
        return number(lam("a", "b", tup(V("a"), V("b"))))

    @cached_property
    def D0(self) -> int:
        return number(lam("a", Pj(0, V("a"))))

    @cached_property
    def D1(self) -> int:
        return number(lam("a", Pj(1, V("a"))))

    def of(self, t) -> int:
        if isinstance(t, Succ):
            return self.S
        if isinstance(t, CombK):
            return self.Pi
        if isinstance(t, CombS):
            return self.Sigma
        if isinstance(t, Rec):
            return self.R
        if isinstance(t, PairC):
            return self.D
        if isinstance(t, Proj0):
            return self.D0
        if isinstance(t, Proj1):
            return self.D1
        raise TypeError(f"no code for {t!r}")


CONSTANTS = ConstantCodes()
PLAIN_CONSTANTS = CONSTANTS  # oracle-free; shared on purpose


def term_lam(t, env: Mapping[Var, object]):
    """Lambda-notation form of a term; variables are looked up in env."""
    if isinstance(t, Var):
        if t not in env:
            raise UnboundVariable(f"variable {t.name} is not in the given list")
        return env[t]
    if isinstance(t, Zero):
        return Const(0)
    if isinstance(t, HeoConst):
        return Const(t.index)
    if isinstance(t, PrimFn):
        return op(t.symbol, *(term_lam(a, env) for a in t.args))
    if isinstance(t, App):
        return Ap(term_lam(t.fn, env), term_lam(t.arg, env))
    return Const(CONSTANTS.of(t))


@lru_cache(maxsize=100_000)
def _compiled(t):
    return compile_lam(term_lam(t, {}))


def value(t, p: Mapping[int, int] | None = None, fuel: int = 100_000) -> EvalResult:
    """|t|_p for a closed term, as a machine result."""
    return run_expr(_compiled(t), p, fuel)


def value_plain(t, fuel: int = 100_000) -> EvalResult:
    return value(t, EMPTY, fuel)


def term_index(t, variables: Sequence[Var]) -> int:
    """Code d with d n1 ... nk ~ |t(F_n1, ..., F_nk)|.

    With no variables the value itself is returned; it cannot depend on the
    oracle because no constant code queries it.
    """
    names = [f"x{i}" for i in range(len(variables))]
    body = term_lam(t, {v: V(x) for v, x in zip(variables, names)})
    if not variables:
        r = value(t, EMPTY, 10_000_000)
        if not isinstance(r, Value):
            raise ValueError(f"closed term {show_term(t)} has no value: {r}")
        return r.n
    return number(lam(*names, body))


term_index_plain = term_index
