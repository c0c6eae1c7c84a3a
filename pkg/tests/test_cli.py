import json

import pytest

from realizer.cli import (EXHAUSTED, FAIL, OK, USAGE, RunConfig, UsageError, main, parse_keys,
                          parse_numset)
from realizer.codes import code_to_json
from realizer.lam import Const, V, lam, number, op

from conftest import CORPUS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_check_accepts_corpus(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "ac_instance.proof")
    assert code == OK and out.strip() == "accepted, 6 steps"


def test_check_rejects_mutated_modus_ponens(tmp_path, capsys):
    p = write(tmp_path, "bad.proof",
              "step 1: rule 1 |- 0 =N 0 -> 0 =N 0\n"
              "step 2: rule 1 |- 1 =N 1 -> 1 =N 1\n"
              "step mp: rule 2 premises: 2,1 |- 0 =N 0\n")
    code, out, _ = run(capsys, "check", p)
    assert code == FAIL and "rejected" in out and "step mp" in out


def test_check_empty_and_missing(tmp_path, capsys):
    code, _, err = run(capsys, "check", write(tmp_path, "empty.proof", ""))
    assert code == FAIL and "parse error" in err
    code, _, _ = run(capsys, "check", tmp_path / "nope.proof")
    assert code == USAGE


def test_extract_trace_and_artifact(tmp_path, capsys):
    code, out, _ = run(capsys, "extract", CORPUS / "identity.proof")
    assert code == OK and "rule 1" in out
    code, out, _ = run(capsys, "extract", CORPUS / "dc_instance.proof")
    assert code == OK and all(w in out for w in ("h 0", "f i", "g i"))
    art = tmp_path / "or.json"
    code, _, _ = run(capsys, "extract", CORPUS / "or_intro.proof", "--mode", "plain",
                     "--emit", "json", "--out", art)
    rec = json.loads(art.read_text())
    assert code == OK and rec["mode"] == "plain"
    again = tmp_path / "or2.json"
    run(capsys, "extract", CORPUS / "or_intro.proof", "--mode", "plain", "--emit", "json",
        "--out", again)
    assert again.read_text() == art.read_text()


def test_verify_three_outcomes(tmp_path, capsys):
    art = tmp_path / "id.json"
    run(capsys, "extract", CORPUS / "identity.proof", "--emit", "json", "--out", art)
    phi = write(tmp_path, "id.formula", "0 =N 0 -> 0 =N 0\n")
    code, out, _ = run(capsys, "verify", art, phi, "--keys", "0,1", "--valbound", "1")
    assert code == OK and "Holds" in out
    slow = number(lam("x", op("add", V("x"), V("x"))))
    slow = write(tmp_path, "slow.json", json.dumps(code_to_json(slow)))
    ex = write(tmp_path, "ex.formula", "exists x:N. x =N S(0)\n")
    code, out, _ = run(capsys, "verify", write(tmp_path, "c0", "0"), ex)
    assert code == FAIL and "Fails" in out
    loop = write(tmp_path, "loop.formula", "forall x:N. 0 =N 0\n")
    code, out, _ = run(capsys, "verify", slow, loop, "--fuel", "1")
    assert code == EXHAUSTED and "Exhausted" in out


def test_verify_with_universe_file(tmp_path, capsys):
    art = tmp_path / "id.json"
    run(capsys, "extract", CORPUS / "identity.proof", "--emit", "json", "--out", art)
    phi = write(tmp_path, "id.formula", "0 =N 0 -> 0 =N 0")
    uni = write(tmp_path, "u.json", json.dumps({"key_set": [0, 3], "val_bound": 2,
                                                "num_set": [0, 1, 2], "fuel": 5000,
                                                "tset": "all"}))
    code, _, _ = run(capsys, "verify", art, phi, "--universe", uni)
    assert code == OK


def test_run_term_and_code(tmp_path, capsys):
    code, out, _ = run(capsys, "run", "--term", "add(2,3)")
    assert code == OK and "5" in out
    seven = write(tmp_path, "seven", str(number(lam("x", Const(7)))))
    code, out, _ = run(capsys, "run", "--code", seven, "--arg", 1)
    assert code == OK and "7" in out


def test_selfreal_command(tmp_path, capsys):
    phi = write(tmp_path, "two.formula", "exists x:N. x =N S(S(0))  # two\n")
    code, out, _ = run(capsys, "selfreal", phi, "--emit", "json")
    rec = json.loads(out)
    assert code == OK and rec["check"] == "Holds" and rec["truth_from_realizer"] == "Holds"
    bad = write(tmp_path, "false.formula", "0 =N S(0)")
    code, _, _ = run(capsys, "selfreal", bad)
    assert code == FAIL


def test_demo_command(capsys):
    code, out, _ = run(capsys, "demo", "--a", 3, "--phi", "y =N add(x,x)", "--no-verify")
    assert code == OK and "confirmed" in out and "minimal bound: 5" in out
    code, _, _ = run(capsys, "demo", "--a", -1)
    assert code == USAGE


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == USAGE
    assert run(capsys, "check")[0] == USAGE
    assert run(capsys, "check", CORPUS / "identity.proof", "--fuel", 0)[0] == USAGE


def test_option_parsers():
    assert parse_numset("0..3") == (0, 1, 2, 3)
    assert sorted(parse_numset("4,1")) == [1, 4]
    assert parse_keys("auto") == "auto"
    assert parse_keys("0, 5") == (0, 5)
    with pytest.raises(UsageError):
        RunConfig("check", [], val_bound=0)
    with pytest.raises(UsageError):
        RunConfig("check", [], mode="other")
