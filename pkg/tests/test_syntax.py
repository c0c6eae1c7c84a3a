import pytest
from hypothesis import given, strategies as st

from realizer.syntax import (N, And, App, Arrow, Eq, Exists, Forall, HeoConst, Imp, Or,
                             ParseError, SortError, Succ, Var, Zero, alpha_eq, free_vars,
                             is_L_formula, is_first_order, numeral, parse_formula,
                             show, subformula_table, substitute)

x, y, z = Var("x"), Var("y"), Var("z")


def test_parse_examples():
    assert parse_formula("forall x:N. x =N x") == Forall(x, Eq(N, x, x))
    assert parse_formula("0 =N S(0)") == Eq(N, Zero(), App(Succ(), Zero()))
    f = parse_formula("forall x:N->N. exists e:N. forall y:N. app(x,y) =N app(x,y)")
    assert f.var.type == Arrow(N, N)
    assert not is_first_order(f)


@pytest.mark.parametrize("text", ["", "forall x. x =N x", "0 =N", "(0 =N 0", "0 =N 0 &"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_formula(text)


def test_sort_error():
    with pytest.raises((SortError, ParseError)):
        parse_formula("forall f:N->N. f =N 0")


def test_show_round_trip_on_corpus_sentences():
    from conftest import sentence_lines
    for line in sentence_lines():
        f = parse_formula(line)
        assert parse_formula(show(f)) == f


def test_subformula_tables():
    t = subformula_table(parse_formula("0 =N 0 | 0 =N S(0)"))
    f = parse_formula("0 =N 0 | 0 =N S(0)")
    assert [e.formula for e in t] == [f, f.left, f.right]
    assert all(e.vars == () for e in t)
    t = subformula_table(parse_formula("exists x:N. x =N S(S(0))"))
    assert [e.vars for e in t] == [(), (x,)]
    t = subformula_table(parse_formula("forall x:N. exists y:N. y =N add(x,x)"))
    assert len(t) == 3 and t[2].vars == (x, y)


def test_substitution_examples():
    s1 = numeral(1)
    assert substitute(Eq(N, x, x), x, s1) == Eq(N, s1, s1)
    f = Forall(x, Eq(N, x, y))
    g = substitute(f, y, x)
    assert g.var != x and alpha_eq(g, Forall(z, Eq(N, z, x)))
    h = substitute(Eq(N, x, x), x, HeoConst(7, N))
    assert not is_L_formula(h) and free_vars(h) == []


def test_substitution_checks_sort():
    with pytest.raises(SortError):
        substitute(Eq(N, x, x), x, HeoConst(3, Arrow(N, N)))


names = st.sampled_from([x, y, z])
terms = st.recursive(st.one_of(names, st.integers(0, 3).map(numeral)),
                     lambda t: t.map(lambda a: App(Succ(), a)), max_leaves=3)
formulas = st.recursive(
    st.builds(lambda a, b: Eq(N, a, b), terms, terms),
    lambda f: st.one_of(st.builds(And, f, f), st.builds(Or, f, f), st.builds(Imp, f, f),
                        st.builds(Exists, names, f), st.builds(Forall, names, f)),
    max_leaves=6)


@given(formulas, names, terms)
def test_substitution_free_vars(f, v, t):
    g = substitute(f, v, t)
    want = [w for w in free_vars(f) if w != v]
    if v in free_vars(f):
        want += free_vars(Eq(N, t, t))
    assert set(free_vars(g)) == set(want)


@given(formulas, names)
def test_substituting_a_variable_for_itself_is_identity(f, v):
    assert alpha_eq(substitute(f, v, v), f)


@given(formulas)
def test_show_parse_round_trip(f):
    assert alpha_eq(parse_formula(show(f), {w.name: N for w in (x, y, z)}), f)
