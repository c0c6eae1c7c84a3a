import time

import pytest

from realizer.codes import EMPTY, Value, apply, apply_many, component, proj, tuple_
from realizer.derivation import RULE_NAMES, parse_proof
from realizer.extraction import (closure, conservativity_demo, demo_collection, extract,
                                 extract_plain, trace_text, verify_demo)
from realizer.heo import ForcingUniverse, default_code
from realizer.lam import Const, V, lam, number, op, tup
from realizer.proofkit import PremiseFalse, node
from realizer.realizability import check_single
from realizer.syntax import N, Forall, Imp, Var, parse_formula

from conftest import CORPUS, proof_files

f = parse_formula
DOUBLE = number(lam("x", tup(op("add", V("x"), V("x")), Const(0))))
STEP = number(lam("x", "d", tup(op("S", V("x")), Const(0), Const(0))))


def load(name):
    return parse_proof((CORPUS / f"{name}.proof").read_text())


def test_identity_recipe():
    r = extract(load("identity"))
    assert r.closure_vars == []
    assert all(apply(r.code, b) == Value(b) for b in (0, 7, 123))
    assert [t.rule for t in r.case_trace] == [1]
    assert "rule 1" in trace_text(r)


def test_witness_of_exists_two():
    r = extract(load("exists_two"))
    assert proj(0, r.code) == 2


def test_choice_recipe_projects_the_premise_realizer(frozen):
    ac = next(n for n in load("ac_instance").nodes() if n.rule == 24)
    r = extract(ac)
    out = apply(r.code, DOUBLE)
    z = proj(0, out.n)
    got = [apply(z, n).n for n in range(5)]
    assert got == frozen["ac_double_0_to_4"]
    assert got == [proj(0, apply(DOUBLE, n).n) for n in range(5)]


def test_dependent_choice_sequence(frozen):
    r = extract(load("dc_instance"))
    assert {"h", "f", "g"} <= set(r.case_trace[0].recipe.replace(";", " ").split())
    for n0 in range(5):
        out = apply_many(r.code, [STEP, n0, 0], fuel=1_000_000)
        seq = proj(0, out.n)
        got = [apply(seq, i, fuel=1_000_000).n for i in range(6)]
        assert got == frozen["dc_succ_from"][str(n0)]


def test_plain_injections():
    left = node(5, f("0 =N 0 -> 0 =N 0 | 0 =N S(0)"), payload=0)
    assert apply(extract_plain(left).code, 7) == Value(tuple_([0, 7, default_code(N)]))
    right = extract_plain(load("or_intro"))
    assert apply(right.code, 7) == Value(tuple_([1, default_code(N), 7]))
    # the forcing recipe is a plain pair
    assert apply(extract(load("or_intro")).code, 7).n == tuple_([1, 7])


def test_plain_decidable_equality():
    r = extract_plain(load("decidable_eq"))
    same = apply_many(r.code, [2, 2]).n
    assert component(same, 0, 3) == 0 and component(same, 1, 3) == 0
    assert apply(component(same, 2, 3), 5) == Value(0)
    assert component(apply_many(r.code, [2, 3]).n, 0, 3) == 1


def test_plain_extensionality_is_constant_zero():
    r = extract_plain(load("extensionality"))
    assert len(r.closure_vars) == 2
    assert apply_many(r.code, [1, 2, 3]) == Value(0)


@pytest.mark.parametrize("path", proof_files(), ids=lambda p: p.stem)
def test_trace_covers_every_node(path):
    d = parse_proof(path.read_text())
    for r in (extract(d), extract_plain(d)):
        assert sorted(t.step for t in r.case_trace) == sorted(n.step for n in d.nodes())


def test_corpus_covers_all_rules_quickly():
    t = time.perf_counter()
    seen = set()
    for path in proof_files():
        d = parse_proof(path.read_text())
        seen |= extract(d).rules() | extract_plain(d).rules()
    assert seen == set(RULE_NAMES)
    assert time.perf_counter() - t < 1.0


def test_extraction_is_deterministic():
    d = load("induction")
    assert extract(d).code == extract(load("induction")).code


def test_closure_quantifies_in_order():
    x, y = Var("x"), Var("y")
    phi = f("x =N y")
    assert closure(phi, [x, y]) == Forall(x, Forall(y, phi))


def test_collection_demo_examples(frozen):
    for (phi, a), want in [(("y =N add(x,x)", 3), frozen["collection"]["double_a3"]),
                           (("y =N S(x)", 2), frozen["collection"]["succ_a2"]),
                           (("y =N add(x,x)", 0), frozen["collection"]["double_a0"])]:
        dm = conservativity_demo(a, f(phi))
        assert dm.witnesses == want["witnesses"]
        assert dm.minimal_bound == want["minimal"]
        assert dm.bound >= dm.minimal_bound
        assert dm.confirmed.holds
    assert conservativity_demo(2, f("y =N S(x)")).bound == 3


def test_collection_premise_must_hold():
    with pytest.raises(PremiseFalse):
        demo_collection(3, f("y =N add(x,x) & x =N 5"))


def test_collection_realizer_verifies():
    dm = conservativity_demo(2, f("y =N S(x)"))
    U = ForcingUniverse(key_set=(0, 1), val_bound=2, num_set=range(5), fuel=100_000)
    assert verify_demo(dm, U).holds
    assert isinstance(dm.derivation.conclusion, Imp)


def test_extracted_realizers_check_at_empty_condition(corpus):
    U = ForcingUniverse(key_set=(0,), val_bound=1, num_set=(0, 1, 2), fuel=50_000)
    for name in ("identity", "exists_two", "or_intro", "curry", "and_intro", "reflexivity"):
        d = corpus[name]
        r = extract(d)
        assert check_single(U, EMPTY, r.code, closure(d.conclusion, r.closure_vars)).holds, name
