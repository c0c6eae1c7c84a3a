"""Small pools of codes, formulas and universes for randomized tests."""
from realizer.codes import Arg, Prim, Query, build, pair
from realizer.heo import ForcingUniverse
from realizer.lam import Ask, Const, Fix, If0, V, ap, lam, number, op
from realizer.realizability import realizer_candidates
from realizer.syntax import N, Arrow, Prod, parse_formula


def _f(*args):
    return number(lam(*args))


NAT_CODES = [0, 1, 2, 3, pair(1, 2)]
FN_CODES = {
    "id": build(Arg()),
    "id2": _f("n", op("add", V("n"), Const(0))),
    "succ": build(Prim("S", (Arg(),))),
    "succ2": _f("n", op("add", Const(1), V("n"))),
    "zero": _f("n", Const(0)),
    "five": _f("n", Const(5)),
    "ask": build(Query(Arg())),
    "ask0": _f("n", Ask(Const(0))),
    "ask0_then_5": _f("n", If0(Ask(Const(0)), Const(5), Const(5))),
    "double": _f("n", op("add", V("n"), V("n"))),
    "pred": _f("n", op("pred", V("n"))),
    "loop": number(Fix("me", "n", ap(V("me"), V("n")))),
}
PROD_CODES = [pair(a, b) for a in (0, 1) for b in (0, 2)] + [7]
HIGHER_CODES = [_f("f", ap(V("f"), Const(0))), _f("f", Const(0)), _f("f", ap(V("f"), Const(1)))]

TYPES = {
    "N": (N, NAT_CODES),
    "N->N": (Arrow(N, N), list(FN_CODES.values())),
    "NxN": (Prod(N, N), PROD_CODES),
    "(N->N)->N": (Arrow(Arrow(N, N), N), HIGHER_CODES),
}

SENTENCES = [parse_formula(s) for s in [
    "0 =N 0",
    "0 =N S(0)",
    "0 =N 0 | 0 =N S(0)",
    "0 =N S(0) | 0 =N 0",
    "exists x:N. x =N 2",
    "forall x:N. x =N x",
    "forall x:N. exists y:N. y =N S(x)",
    "0 =N 0 -> 0 =N 0",
    "(0 =N S(0)) -> 0 =N 0",
    "0 =N 0 & (exists x:N. x =N 1)",
    "exists x:N. x =N 0 | x =N 1",
]]


def realizer_pool(phi):
    """Codes worth trying as realizers of phi: generic shapes plus a few
    deliberately wrong ones."""
    extra = [0, 1, pair(0, 0), pair(1, 0), pair(2, 0), pair(0, 1)]
    extra += list(FN_CODES.values())[:6]
    out = list(realizer_candidates(phi, (0, 1, 2, 3)))
    return list(dict.fromkeys(out + extra))


UNIVERSES = [
    ForcingUniverse(key_set=(0,), val_bound=2, num_set=(0, 1, 2), fuel=2_000),
    ForcingUniverse(key_set=(0, 1), val_bound=1, num_set=(0, 1, 2), fuel=2_000),
    ForcingUniverse(key_set=(0, 1, 2), val_bound=1, num_set=(0, 1), fuel=2_000),
    ForcingUniverse(key_set=(1, 5), val_bound=5, num_set=(0, 1, 2), fuel=2_000),
]
