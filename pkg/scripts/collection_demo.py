"""Read a collection bound off the extracted proof of
∀x<a ∃y φ -> ∃b ∀x<a ∃y<b φ, and compare it with brute force."""
import argparse

from realizer.cli import SAMPLE_UNIVERSES
from realizer.extraction import conservativity_demo, verify_demo
from realizer.syntax import parse_formula, show

CASES = [("y =N add(x,x)", 3), ("y =N S(x)", 2), ("y =N add(x,x)", 0),
         ("lt(x,y) =N 1 & eq(mul(y,y), add(y,y)) =N 1", 2)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--verify", action="store_true", help="also check in the sample universes")
    args = ap.parse_args()
    for text, a in CASES:
        dm = conservativity_demo(a, parse_formula(text))
        print(f"a={a}  phi: {show(dm.phi)}")
        print(f"   bound {dm.bound}, least witnesses {dm.witnesses}, minimal bound "
              f"{dm.minimal_bound}, conclusion at bound: {dm.confirmed.kind}")
        if args.verify:
            print("   verify:", [verify_demo(dm, U).kind for U in SAMPLE_UNIVERSES])


if __name__ == "__main__":
    main()
