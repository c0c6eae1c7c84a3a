"""Named-variable lambda notation compiled to closures of the index machine.

Realizer recipes are easiest to state as ordinary lambda terms
(``lam("b", "d", ap(V("b"), V("d")))``).  ``compile_lam`` performs closure
conversion: each lambda becomes a ``Close`` whose captured list holds the
free variables of its body, the parameter becomes ``Arg`` and a recursive
binder becomes ``SelfRef``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .codes import (Apply, Arg, Close, Env, IfZero, Num, Pair, Prim, Proj, Query, SelfRef,
                    Value, run_expr)


@dataclass(frozen=True)
class V:
    name: str


@dataclass(frozen=True)
class Const:
    n: int


@dataclass(frozen=True)
class Lam:
    param: str
    body: object


@dataclass(frozen=True)
class Fix:
    """A one-argument function that may call itself through ``me``."""
    me: str
    param: str
    body: object


@dataclass(frozen=True)
class Ap:
    fn: object
    arg: object


@dataclass(frozen=True)
class Op:
    symbol: str
    args: tuple


@dataclass(frozen=True)
class Tup:
    left: object
    right: object


@dataclass(frozen=True)
class Pj:
    i: int
    e: object


@dataclass(frozen=True)
class If0:
    cond: object
    then: object
    orelse: object


@dataclass(frozen=True)
class Ask:
    """Oracle query at the value of e."""
    e: object


def lam(*params_and_body):
    *params, body = params_and_body
    for x in reversed(params):
        body = Lam(x, body)
    return body


def ap(f, *args):
    for a in args:
        f = Ap(f, a)
    return f


def op(symbol, *args):
    return Op(symbol, tuple(args))


def tup(*items):
    """Right-nested tuple; a single item is itself."""
    out = items[-1]
    for x in reversed(items[:-1]):
        out = Tup(x, out)
    return out


def comp(e, i: int, length: int):
    """Component i of a right-nested tuple of the given length."""
    for _ in range(i):
        e = Pj(1, e)
    return e if i == length - 1 else Pj(0, e)


def lift(x):
    return Const(x) if isinstance(x, int) else x


def free(e) -> list[str]:
    """Free names in order of first occurrence."""
    out: list[str] = []

    def go(x, bound):
        if isinstance(x, V):
            if x.name not in bound and x.name not in out:
                out.append(x.name)
        elif isinstance(x, Lam):
            go(x.body, bound | {x.param})
        elif isinstance(x, Fix):
            go(x.body, bound | {x.param, x.me})
        elif isinstance(x, (Ap,)):
            go(x.fn, bound)
            go(x.arg, bound)
        elif isinstance(x, Op):
            for a in x.args:
                go(a, bound)
        elif isinstance(x, Tup):
            go(x.left, bound)
            go(x.right, bound)
        elif isinstance(x, (Pj, Ask)):
            go(x.e, bound)
        elif isinstance(x, If0):
            go(x.cond, bound)
            go(x.then, bound)
            go(x.orelse, bound)
        elif not isinstance(x, Const):
            raise TypeError(f"not a lambda term: {x!r}")

    go(e, frozenset())
    return out


class Unbound(NameError):
    pass


def compile_lam(e, scope: dict | None = None):
    """Translate to a CodeExpr; ``scope`` maps names to CodeExprs."""
    scope = {} if scope is None else scope
    if isinstance(e, V):
        if e.name not in scope:
            raise Unbound(e.name)
        return scope[e.name]
    if isinstance(e, Const):
        return Num(e.n)
    if isinstance(e, (Lam, Fix)):
        bound = {e.param} | ({e.me} if isinstance(e, Fix) else set())
        fv = [x for x in free(e.body) if x not in bound]
        inner = {x: Env(i) for i, x in enumerate(fv)}
        inner[e.param] = Arg()
        if isinstance(e, Fix):
            inner[e.me] = SelfRef()
        return Close(compile_lam(e.body, inner), tuple(compile_lam(V(x), scope) for x in fv))
    if isinstance(e, Ap):
        return Apply(compile_lam(e.fn, scope), compile_lam(e.arg, scope))
    if isinstance(e, Op):
        return Prim(e.symbol, tuple(compile_lam(a, scope) for a in e.args))
    if isinstance(e, Tup):
        return Pair(compile_lam(e.left, scope), compile_lam(e.right, scope))
    if isinstance(e, Pj):
        return Proj(e.i, compile_lam(e.e, scope))
    if isinstance(e, If0):
        return IfZero(compile_lam(e.cond, scope), compile_lam(e.then, scope),
                      compile_lam(e.orelse, scope))
    if isinstance(e, Ask):
        return Query(compile_lam(e.e, scope))
    raise TypeError(f"not a lambda term: {e!r}")


class EvaluationFailed(RuntimeError):
    pass


def number(e, fuel: int = 10_000_000) -> int:
    """The number denoted by a closed term, evaluated under the empty oracle.

    A closed lambda yields its closure code without running anything.
    """
    free_names = free(e)
    if free_names:
        raise Unbound(", ".join(free_names))
    r = run_expr(compile_lam(e), None, fuel)
    if not isinstance(r, Value):
        raise EvaluationFailed(f"closed term did not evaluate: {r}")
    return r.n
