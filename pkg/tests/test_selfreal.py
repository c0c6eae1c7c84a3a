import time

import pytest
from hypothesis import given, settings, strategies as st

from realizer.codes import EMPTY, Value, apply, apply_many, pair, proj
from realizer.heo import ForcingUniverse
from realizer.proofkit import PremiseFalse
from realizer.realizability import check_pair
from realizer.selfreal import (OracleInconclusive, TDescription, auto_universe, key,
                               realize_true, realizer_under, refute, round_trip, self_index, seq,
                               sentence_keys, t_membership, truth_eval, truth_from_realizer, unseq)
from realizer.syntax import NotFirstOrder, parse_formula

from conftest import sentence_lines

f = parse_formula
SENTENCES = [f(s) for s in sentence_lines()]
TWO = f("exists x:N. x =N S(S(0))")


def test_key_encoding():
    assert seq([]) == 0
    for ns in ([], [0], [3, 1], [0, 0, 4]):
        assert unseq(seq(ns), len(ns)) == tuple(ns)
        assert key(2, ns) == pair(2, seq(ns))
    assert unseq(seq([1, 2]), 1) is None


def test_truth_examples():
    assert truth_eval(f("0 =N 0")).holds
    assert truth_eval(TWO, 2).holds
    assert truth_eval(f("forall x:N. mul(x,0) =N 0"), 5).exhausted
    assert truth_eval(f("forall x:N. lt(x,5) =N 1 -> mul(x,0) =N 0"), 5).holds
    with pytest.raises(NotFirstOrder):
        truth_eval(f("forall g:N->N. app(g,0) =N app(g,0)"))


def test_truth_matches_brute_force(frozen):
    assert [truth_eval(s).holds for s in SENTENCES] == frozen["sentence_truth"]
    assert all(not truth_eval(s).exhausted for s in SENTENCES)


def test_membership_examples():
    T = TDescription(TWO)
    assert t_membership({}, T)
    assert t_membership({key(0, ()): 2}, T)
    assert not t_membership({key(0, ()): 3}, T)
    conj = TDescription(f("0 =N 0 & (exists x:N. x =N 1)"))
    assert not t_membership({key(0, ()): 0}, conj)
    assert t_membership({key(2, ()): 1}, conj)
    # wrong tuple length: forbidden
    assert not t_membership({key(0, (5,)): 2}, T)


def test_membership_needs_decided_truth():
    T = TDescription(f("exists x:N. forall y:N. y =N y"), Q=3)
    with pytest.raises(OracleInconclusive):
        t_membership({key(0, ()): 1}, T)


def test_self_index_examples():
    atom = self_index(f("0 =N 0"))
    assert apply(atom, 0) == Value(0)
    disj = f("0 =N S(0) | 0 =N 0")
    got = realizer_under(self_index(disj), disj, {key(0, ()): 1})
    assert proj(0, got.n) == 1
    got = realizer_under(self_index(TWO), TWO, {key(0, ()): 2})
    assert proj(0, got.n) == 2
    # open formulas take their free variables as arguments
    code = self_index(f("exists y:N. y =N S(x)"))
    out = apply_many(code, [4], {key(0, (4,)): 5})
    assert proj(0, out.n) == 5


def test_realize_true_examples():
    q, r = realize_true(f("0 =N 0"))
    assert q == EMPTY and r == 0
    q, r = realize_true(TWO)
    assert dict(q) == {key(0, ()): 2} and proj(0, r) == 2
    q, _ = realize_true(f("0 =N S(0) | 0 =N 0"))
    assert dict(q) == {key(0, ()): 1}
    with pytest.raises(PremiseFalse):
        realize_true(f("0 =N S(0)"))
    with pytest.raises(ValueError):
        realize_true(TWO, {key(0, ()): 3})
    with pytest.raises(ValueError):
        realize_true(TWO, U=ForcingUniverse(key_set=(0,), val_bound=1))


def test_fabricated_left_tag_never_checks():
    phi = f("0 =N S(0) | 0 =N 0")
    U = auto_universe(phi)
    for p in U.conditions():
        for r in (0, 1, 5):
            assert check_pair(U, p, pair(0, r), pair(0, r), phi).fails
            assert truth_from_realizer(phi, p, pair(0, r), pair(0, r), U).holds


def test_agreement_at_true_atom():
    U = ForcingUniverse(key_set=(0,), val_bound=1)
    assert truth_from_realizer(f("0 =N 0"), EMPTY, 3, 3, U, Q=5).holds


def test_auto_universe_covers_needed_keys():
    phi = f("forall x:N. lt(x,3) =N 1 -> (exists y:N. y =N add(x,x))")
    U = auto_universe(phi, num_set=(0, 1, 2))
    assert U.val_bound == 4
    q, r = realize_true(phi, U=U)
    assert set(q) <= set(U.key_set)
    assert check_pair(U, q, r, r, phi).holds


@pytest.mark.parametrize("i", range(len(SENTENCES)))
def test_round_trip(i):
    phi = SENTENCES[i]
    rt = round_trip(phi)
    assert rt.ok, (rt.truth, rt.check, rt.back)


def test_refutation_search_on_false_sentences():
    t = time.perf_counter()
    for phi in SENTENCES:
        if truth_eval(phi).fails:
            r = refute(phi)
            assert r.ok and r.pairs > 0, r.found
    assert time.perf_counter() - t < 120
    with pytest.raises(ValueError):
        refute(f("0 =N 0"))


@st.composite
def condition_of(draw):
    phi = draw(st.sampled_from(SENTENCES))
    T = TDescription(phi)
    keys = sentence_keys(phi, range(4), 6)
    p = {}
    for k in keys:
        if draw(st.booleans()):
            allowed = T.allowed(k, 4)
            if allowed:
                p[k] = draw(st.sampled_from(allowed))
    return T, p


@settings(max_examples=200)
@given(condition_of(), st.data())
def test_T_contains_empty_and_is_closed_under_restriction(case, data):
    T, p = case
    assert t_membership({}, T)
    assert t_membership(p, T)
    sub = {k: v for k, v in p.items() if data.draw(st.booleans())}
    assert t_membership(sub, T)
