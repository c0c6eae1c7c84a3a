from dataclasses import replace

import pytest

from realizer.derivation import (RULE_NAMES, Derivation, RuleShapeError, SideConditionError,
                                 check_derivation, check_node, parse_proof, to_text)
from realizer.syntax import And, Imp, ParseError, Var, parse_formula

from conftest import proof_files


def test_identity_node_reports_free_vars():
    d = Derivation(1, parse_formula("x =N y -> x =N y"))
    assert check_derivation(d) == [Var("x"), Var("y")]


def test_modus_ponens_mismatch():
    text = ("step 1: rule 1 |- 0 =N 0 -> 0 =N 0\n"
            "step 2: rule 1 |- 1 =N 1 -> 1 =N 1\n"
            "step 3: rule 2 premises: 2,1 |- 0 =N 0\n")
    with pytest.raises(RuleShapeError) as e:
        check_derivation(parse_proof(text))
    assert e.value.node.step == "3"
    assert "line 3" in str(e.value)


def test_forall_intro_side_condition():
    text = ("step 1: rule 1 |- x =N 0 -> x =N 0\n"
            "step 2: rule 10 premises: 1 |- x =N 0 -> forall x:N. x =N 0\n")
    with pytest.raises(SideConditionError):
        check_derivation(parse_proof(text))


@pytest.mark.parametrize("text", ["", "# only a comment\n", "step 1: rule 1 0 =N 0",
                                  "step 1: rule 2 premises: 9 |- 0 =N 0",
                                  "step 1: rule 1 |- 0 =N"])
def test_proof_parse_errors(text):
    with pytest.raises(ParseError):
        parse_proof(text)


def test_unknown_rule_and_premise_count():
    with pytest.raises(RuleShapeError):
        check_derivation(Derivation(26, parse_formula("0 =N 0")))
    with pytest.raises(RuleShapeError):
        check_derivation(Derivation(2, parse_formula("0 =N 0")))


@pytest.mark.parametrize("path", proof_files(), ids=lambda p: p.stem)
def test_corpus_accepted_and_serialises(path):
    d = parse_proof(path.read_text())
    check_derivation(d)
    again = parse_proof(to_text(d))
    assert again.conclusion == d.conclusion
    assert len(again.nodes()) == len(d.nodes())
    check_derivation(again)


def _mutants(corpus):
    """Every node of every corpus proof, with its conclusion replaced by a
    conjunction (no rule concludes a conjunction), and implications with a
    doubled consequent (ex falso, whose consequent is arbitrary, excepted)."""
    for name, d in corpus.items():
        for node in d.nodes():
            c = node.conclusion
            yield node.rule, name, replace(node, conclusion=And(c, c))
            if isinstance(c, Imp) and c.right != c.left and node.rule != 9:
                yield node.rule, name, replace(node, conclusion=Imp(c.left, And(c.right, c.right)))


def test_every_rule_rejects_mutated_conclusions(corpus):
    hit = set()
    for rule, name, bad in _mutants(corpus):
        with pytest.raises(RuleShapeError):
            check_node(bad)
        hit.add(rule)
    assert hit == set(RULE_NAMES)
