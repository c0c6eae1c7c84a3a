"""The frozen brute-force values are current and agree with the package."""
import bruteforce

from realizer.codes import pair


def test_frozen_values_are_current(frozen):
    import json
    assert json.loads(json.dumps(bruteforce.compute())) == frozen


def test_brute_force_pairing_matches_package():
    table = bruteforce.cantor_table(60)
    assert all(pair(a, b) == n for (a, b), n in table.items())


def test_sentence_oracle_matches_corpus_length(frozen):
    from conftest import sentence_lines
    assert len(frozen["sentence_truth"]) == len(sentence_lines())
    assert sum(frozen["sentence_truth"]) == 14
