import pytest
from hypothesis import assume, given, settings, strategies as st

from realizer.codes import EMPTY, pair, tuple_
from realizer.derivation import parse_proof
from realizer.extraction import closure, extract, extract_plain
from realizer.heo import ForcingUniverse, enumerate_extensions, plain_eq
from realizer.realizability import (MalformedFormula, Registry, check_pair, check_pair_nested,
                                    check_plain, check_single, formula_type, plain_candidates,
                                    verdict_record)
from realizer.syntax import (N, Arrow, Eq, Exists, Prod, Var, numeral, parse_formula,
                             parse_term, substitute)

from conftest import CORPUS
from pools import FN_CODES, SENTENCES, UNIVERSES, realizer_pool

f = parse_formula
U = ForcingUniverse(key_set=(0, 1), val_bound=2, num_set=(0, 1, 2), fuel=5_000)


def test_atomic_clause_ignores_codes():
    assert check_pair(U, EMPTY, 0, 0, f("0 =N 0")).holds
    assert check_pair(U, EMPTY, 3, 9, f("0 =N 0")).holds
    assert check_pair(U, EMPTY, 0, 0, f("0 =N S(0)")).fails
    assert check_single(U, EMPTY, 0, f("0 =N 0")).holds
    assert check_single(U, EMPTY, 0, f("0 =N S(0)")).fails


@pytest.mark.parametrize("ta,tb", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_disjunction_tags(ta, tb):
    phi = f("0 =N 0 | 0 =N S(0)")
    v = check_pair(U, EMPTY, pair(ta, 0), pair(tb, 0), phi)
    assert v.holds == (ta == tb == 0)


def test_identity_realizer_checks():
    r = extract(parse_proof((CORPUS / "identity.proof").read_text()))
    assert check_pair(U, EMPTY, r.code, r.code, f("0 =N 0 -> 0 =N 0")).holds


def test_open_formula_rejected():
    with pytest.raises(MalformedFormula):
        check_single(U, EMPTY, 0, f("x =N 0"))


def test_formula_types():
    assert formula_type(f("0 =N 0")) == N
    assert formula_type(f("0 =N 0 | 0 =N 0")) == Prod(N, Prod(N, N))
    assert formula_type(f("forall x:N. 0 =N 0")) == Arrow(N, N)
    x = Var("x")
    body = f("exists y:N. y =N S(x) & x =N x")
    assert formula_type(body) == formula_type(Exists(x, body).body)
    assert formula_type(substitute(body, x, numeral(3))) == formula_type(body)


def test_plain_examples():
    assert check_plain(0, f("0 =N 0")).holds
    v = check_plain(tuple_([0, 0, FN_CODES["id"]]), f("0 =N 0 | 0 =N S(0)"))
    assert v.holds
    d = parse_proof((CORPUS / "extensionality.proof").read_text())
    r = extract_plain(d)
    assert check_plain(r.code, closure(d.conclusion, r.closure_vars)).holds


def test_plain_candidates_reported():
    phi = f("(0 =N 0) -> 0 =N 0")
    reg = Registry()
    reg.register(f("0 =N 0"), 42, plain=True)
    cands = plain_candidates(phi, registry=reg)
    assert list(cands) == ["0 =N 0"] and cands["0 =N 0"][0] == 42


def test_verdict_record():
    v = check_single(U, EMPTY, 0, f("0 =N S(0)"))
    rec = verdict_record("realize", v, U, code=0)
    assert rec["verdict"] == "Fails" and "counterexample" in rec and rec["code"] == 0


@st.composite
def realize_case(draw):
    phi = draw(st.sampled_from(SENTENCES))
    V = draw(st.sampled_from(UNIVERSES))
    pool = realizer_pool(phi)
    conds = V.conditions()
    p = conds[draw(st.integers(0, len(conds) - 1))]
    a, b, c = (draw(st.sampled_from(pool)) for _ in range(3))
    return V, p, phi, a, b, c


@settings(max_examples=150)
@given(realize_case())
def test_R1_monotone(case):
    V, p, phi, a, b, _ = case
    v = check_pair(V, p, a, b, phi)
    assume(not v.exhausted)
    if v.holds:
        for q in enumerate_extensions(V, p):
            w = check_pair(V, q, a, b, phi)
            assert w.holds or w.exhausted


@settings(max_examples=150)
@given(realize_case())
def test_R3_partial_equivalence(case):
    V, p, phi, a, b, c = case
    if check_pair(V, p, a, b, phi).holds:
        for x, y in ((a, a), (b, b), (b, a)):
            w = check_pair(V, p, x, y, phi)
            assert w.holds or w.exhausted
        if check_pair(V, p, b, c, phi).holds:
            w = check_pair(V, p, a, c, phi)
            assert w.holds or w.exhausted


@settings(max_examples=100)
@given(st.sampled_from(SENTENCES), st.data())
def test_plain_realizers_are_self_equal(phi, data):
    a = data.draw(st.sampled_from(realizer_pool(phi)))
    if check_plain(a, phi, (0, 1, 2), 2_000).holds:
        assert not plain_eq(formula_type(phi), a, a, (0, 1, 2), 2_000).fails


@settings(max_examples=100)
@given(st.integers(0, 3), st.sampled_from(["add(1,1)", "S(S(0))", "mul(2,1)", "sub(3,1)", "add(2,0)"]),
       st.data())
def test_R2_equal_values_give_equal_verdicts(k, text, data):
    x = Var("x")
    template = Exists(Var("y"), Eq(N, Var("y"), x))
    phi_a = substitute(template, x, parse_term(text))
    phi_b = substitute(template, x, numeral(2))
    a = data.draw(st.sampled_from([pair(k, 0), pair(2, 0), 0]))
    V = UNIVERSES[0]
    assert check_single(V, EMPTY, a, phi_a).kind == check_single(V, EMPTY, a, phi_b).kind


TINY = ForcingUniverse(key_set=(0,), val_bound=1, num_set=(0, 1), fuel=500)


@settings(max_examples=80)
@given(st.sampled_from(SENTENCES), st.data())
def test_lazy_realizability_agrees_with_nested(phi, data):
    pool = realizer_pool(phi)
    a, b = data.draw(st.sampled_from(pool)), data.draw(st.sampled_from(pool))
    p = data.draw(st.sampled_from(TINY.conditions()))
    lazy, nested = check_pair(TINY, p, a, b, phi), check_pair_nested(TINY, p, a, b, phi)
    if not (lazy.exhausted or nested.exhausted):
        assert lazy.kind == nested.kind
