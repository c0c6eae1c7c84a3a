"""Check every corpus proof's extracted realizer at every condition of the
sample universes, and the oracle-free realizer against check_plain."""
import argparse
import collections
import time
from dataclasses import replace
from pathlib import Path

from realizer.cli import SAMPLE_UNIVERSES
from realizer.derivation import parse_proof
from realizer.extraction import closure, extract, extract_plain, register
from realizer.heo import plain_eq
from realizer.lam import Const, V, lam, number, op, tup
from realizer.realizability import Registry, check_plain, check_single, formula_type
from realizer.syntax import parse_formula

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


def registry():
    reg = Registry()
    reg.register(parse_formula("forall x:N. exists y:N. y =N add(x,x)"),
                 number(lam("x", tup(op("add", V("x"), V("x")), Const(0)))))
    reg.register(parse_formula("forall x:N. x =N x -> exists y:N. y =N y & y =N S(x)"),
                 number(lam("x", "d", tup(op("S", V("x")), Const(0), Const(0)))))
    return reg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fuel", type=int, default=100_000)
    args = ap.parse_args()
    reg = registry()
    proofs = {}
    for path in sorted(CORPUS.glob("*.proof")):
        d = parse_proof(path.read_text())
        r, rp = extract(d), extract_plain(d)
        register(r, reg)
        register(rp, reg)
        proofs[path.stem] = (r, rp, closure(d.conclusion, r.closure_vars))
    total = collections.Counter()
    for U in SAMPLE_UNIVERSES:
        U = replace(U, registry=reg, fuel=args.fuel)
        t = time.perf_counter()
        c = collections.Counter()
        for name, (r, _, phi) in proofs.items():
            for p in U.conditions():
                v = check_single(U, p, r.code, phi)
                c[v.kind] += 1
                if not v.holds:
                    print(f"  {name} at {dict(p)}: {v}")
        total += c
        print(f"{U.digest():60s} {dict(c)}  {time.perf_counter() - t:.1f}s")
    print("forcing total:", dict(total))
    for name, (_, rp, phi) in proofs.items():
        v = check_plain(rp.code, phi, registry=reg)
        w = plain_eq(formula_type(phi), rp.code, rp.code)
        print(f"plain {name:22s} {v.kind:9s} self-equal {w.kind}")


if __name__ == "__main__":
    main()
