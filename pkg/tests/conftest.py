import json
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
ORACLES = ROOT / "tests" / "oracles"
sys.path.insert(0, str(ORACLES))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def proof_files():
    return sorted(CORPUS.glob("*.proof"))


def sentence_lines():
    out = []
    for line in (CORPUS / "sentences.txt").read_text().splitlines():
        text = line.split("#")[0].strip()
        if text:
            out.append(text)
    return out


@pytest.fixture(scope="session")
def frozen():
    return json.loads((ORACLES / "frozen.json").read_text())


@pytest.fixture(scope="session")
def corpus():
    from realizer.derivation import parse_proof
    return {p.stem: parse_proof(p.read_text()) for p in proof_files()}


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
