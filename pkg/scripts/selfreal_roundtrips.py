"""Truth -> realizer -> check -> truth for the sentence corpus, and a
refutation search for the false sentences."""
import argparse
from pathlib import Path

from realizer.selfreal import refute, round_trip, truth_eval
from realizer.syntax import parse_formula, show

SENTENCES = Path(__file__).resolve().parents[1] / "corpus" / "sentences.txt"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--Q", type=int, default=20)
    ap.add_argument("--max-keys", type=int, default=2)
    ap.add_argument("--val-bound", type=int, default=4)
    args = ap.parse_args()
    for line in SENTENCES.read_text().splitlines():
        text = line.split("#")[0].strip()
        if not text:
            continue
        phi = parse_formula(text)
        t = truth_eval(phi, args.Q)
        if t.holds:
            rt = round_trip(phi, args.Q)
            print(f"true   {show(phi)}\n       q={dict(rt.q)} check={rt.check.kind} "
                  f"back={rt.back.kind}")
        else:
            r = refute(phi, args.max_keys, args.val_bound, Q=args.Q)
            print(f"{t.kind.lower():6s} {show(phi)}\n       {r.universes} universes, {r.pairs} "
                  f"pairs, {r.exhausted} exhausted, {len(r.found)} checking")


if __name__ == "__main__":
    main()
