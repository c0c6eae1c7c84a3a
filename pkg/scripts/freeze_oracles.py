"""Recompute the brute-force oracle values and write tests/oracles/frozen.json."""
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests" / "oracles"))

import bruteforce  # noqa: E402

if __name__ == "__main__":
    out = ROOT / "tests" / "oracles" / "frozen.json"
    out.write_text(json.dumps(bruteforce.compute(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
