from hypothesis import given, settings, strategies as st

from realizer.codes import FuelExhausted, Value, apply, apply_many, build, Arg, Query
from realizer.lam import V, lam, number, op
from realizer.syntax import (N, App, Arrow, HeoConst, PrimFn, Rec, Succ, Var, Zero, arrows,
                             numeral, parse_term, subst_term)
from realizer.valuation import CONSTANTS, term_index, value, value_plain

x, y = Var("x"), Var("y")


def test_numeral_and_projection_examples():
    for p in ({}, {0: 3}):
        assert value(numeral(2), p) == Value(2)
    assert value(parse_term("app(D0[N,N], app(app(D[N,N], S(0)), 0))")) == Value(1)
    assert value_plain(Zero()) == Value(0)


def test_recursor_unfolds_once():
    g = HeoConst(number(lam("r", "n", V("r"))), arrows(N, N, N))
    t = App(App(App(Rec(N), HeoConst(5, N)), g), numeral(1))
    assert value(t) == Value(5)


def test_skk_is_identity():
    t = parse_term("app(app(app(Sig[N,N->N,N], K[N,N->N]), K[N,N]), 0)")
    assert value_plain(t) == Value(0)


def test_constant_laws():
    c = CONSTANTS
    assert apply(c.S, 4, {1: 1}) == Value(5)
    assert apply_many(c.Pi, [3, 9]) == Value(3)
    assert apply_many(c.D1, [apply_many(c.D, [3, 9]).n]) == Value(9)
    assert apply_many(c.R, [7, number(lam("r", "n", V("r"))), 0]) == Value(7)
    step = number(lam("r", "n", op("S", V("r"))))
    assert apply_many(c.R, [2, step, 3], fuel=100_000) == Value(5)


def test_term_index_examples():
    d = term_index(x, [x])
    assert all(apply(d, n) == Value(n) for n in range(5))
    assert apply(term_index(App(Succ(), x), [x]), 4, {9: 9}) == Value(5)
    f = Var("f", Arrow(N, N))
    d = term_index(App(f, y), [f, y])
    ask = build(Query(Arg()))
    for a in (CONSTANTS.S, ask):
        for b in range(4):
            p = {b: 10 + b}
            assert apply_many(d, [a, b], p) == apply(a, b, p)


prims = st.sampled_from(["add", "mul", "sub", "max", "lt", "eq"])
closed_terms = st.recursive(
    st.integers(0, 4).map(numeral),
    lambda t: st.one_of(t.map(lambda a: App(Succ(), a)),
                        st.builds(lambda s, a, b: PrimFn(s, (a, b)), prims, t, t)),
    max_leaves=5)
open_terms = st.recursive(
    st.one_of(st.sampled_from([x, y]), st.integers(0, 3).map(numeral)),
    lambda t: st.one_of(t.map(lambda a: App(Succ(), a)),
                        st.builds(lambda s, a, b: PrimFn(s, (a, b)), prims, t, t)),
    max_leaves=5)
oracles = st.dictionaries(st.integers(0, 5), st.integers(0, 5), max_size=3)


@settings(max_examples=200)
@given(closed_terms, oracles, oracles, st.integers(1, 200))
def test_value_monotone_in_oracle_and_fuel(t, p, extra, fuel):
    small = value(t, p, fuel)
    if isinstance(small, Value):
        assert value(t, {**extra, **p}, fuel * 3) == small
    assert isinstance(value_plain(t, 100_000), Value)


@settings(max_examples=200)
@given(open_terms, st.integers(0, 4), st.integers(0, 4))
def test_term_index_agrees_with_substitution(t, m, n):
    d = term_index(t, [x, y])
    closed = subst_term(t, {x: numeral(m), y: numeral(n)})
    got = apply_many(d, [m, n], fuel=100_000)
    assert not isinstance(got, FuelExhausted)
    assert got == value(closed)
