"""Command-line front end: check, extract, run, verify, selfreal, demo.

Exit codes: 0 accepted/Holds, 1 rejected/Fails, 2 Exhausted or
inconclusive, 3 usage or I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from .codes import (EMPTY, FuelExhausted, OracleMiss, Oracle, Value, apply_many,
                    code_from_json, code_to_json, num_from_json, num_to_json)
from .derivation import RuleShapeError, analyze, parse_proof
from .extraction import (FORCING, PLAIN, closure, conservativity_demo, extract, extract_plain,
                         trace_text, verify_demo)
from .heo import ALL, ForcingUniverse, Verdict
from .proofkit import PremiseFalse
from .realizability import check_plain, check_single, verdict_record
from .selfreal import (OracleInconclusive, TDescription, auto_universe, realize_true,
                       truth_eval, truth_from_realizer)
from .syntax import ParseError, SortError, parse_formula, parse_term, show, show_type
from .valuation import value

OK, FAIL, EXHAUSTED, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    key_set: tuple | str | None = None  # None: from the universe file; "auto": derived
    val_bound: int | None = None
    num_set: tuple | None = None
    fuel: int | None = None
    Q: int = 20
    mode: str = FORCING
    emit: str = "text"
    out: str | None = None

    def __post_init__(self):
        for name in ("val_bound", "fuel"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise UsageError(f"--{name.replace('_', '')} must be positive")
        if self.Q <= 0:
            raise UsageError("--Q must be positive")
        if self.num_set is not None and not self.num_set:
            raise UsageError("--numset is empty")
        if self.mode not in (FORCING, PLAIN):
            raise UsageError("--mode is forcing or plain")


def exit_code(v: Verdict) -> int:
    return OK if v.holds else FAIL if v.fails else EXHAUSTED


# ---------------------------------------------------------------- parsing helpers


def parse_numset(text: str) -> tuple[int, ...]:
    """'0..4' or '0,1,3'."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad --numset {text!r}; use 0..k or a comma list") from None


def parse_keys(text: str):
    if text.strip() == "auto":
        return "auto"
    return parse_numset(text)


def read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def read_formula(path: str):
    lines = [ln.split("#", 1)[0] for ln in read_text(path).splitlines()]
    text = " ".join(ln.strip() for ln in lines if ln.strip())
    if not text:
        raise ParseError(f"{path}: no formula")
    return parse_formula(text)


def load_universe(path: str | None, cfg: RunConfig) -> ForcingUniverse:
    """Universe file (JSON) overridden by flags.

    {"key_set": [0, 1], "val_bound": 2, "num_set": [0, 1, 2, 3, 4],
     "fuel": 20000, "tset": "all" | "selfreal:<formula-file>"}
    """
    spec: dict = {}
    if path:
        try:
            spec = json.loads(read_text(path))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: not JSON ({exc})") from None
        if not isinstance(spec, dict):
            raise UsageError(f"{path}: expected an object")
        unknown = set(spec) - {"key_set", "val_bound", "num_set", "fuel", "tset", "fuel_out"}
        if unknown:
            raise UsageError(f"{path}: unknown fields {sorted(unknown)}")
    tset = ALL
    sel = spec.get("tset", "all")
    if sel != "all":
        if not (isinstance(sel, str) and sel.startswith("selfreal:")):
            raise UsageError("tset is 'all' or 'selfreal:<formula-file>'")
        fpath = sel.split(":", 1)[1]
        if path and not Path(fpath).is_absolute():
            fpath = str(Path(path).parent / fpath)
        tset = TDescription(read_formula(fpath), cfg.Q)
    keys = cfg.key_set if cfg.key_set not in (None, "auto") else spec.get("key_set", [0, 1])
    try:
        return ForcingUniverse(
            key_set=tuple(keys),
            val_bound=cfg.val_bound or int(spec.get("val_bound", 2)),
            num_set=cfg.num_set or tuple(spec.get("num_set", range(5))),
            fuel=cfg.fuel or int(spec.get("fuel", 20_000)),
            tset=tset,
            fuel_out=spec.get("fuel_out", "exhausted"),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad universe: {exc}") from None


def emit(cfg: RunConfig, text: str, record: dict) -> None:
    out = json.dumps(record, indent=2) if cfg.emit == "json" else text
    if cfg.out:
        try:
            Path(cfg.out).write_text(out + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {cfg.out}: {exc.strerror}") from None
    else:
        print(out)


def load_code(path: str) -> tuple[int, dict]:
    """An artifact written by `extract --emit json`, or a bare number."""
    text = read_text(path).strip()
    try:
        j = json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"{path}: not a code artifact") from None
    if isinstance(j, int):
        return j, {}
    if isinstance(j, dict) and "number" in j:
        return num_from_json(j["number"]), j
    if isinstance(j, dict) and "code" in j:
        return code_from_json(j["code"]), j
    if isinstance(j, dict) and j.get("tag") in ("Closure", "Number"):
        return code_from_json(j), {}
    raise UsageError(f"{path}: no code in artifact")


# ---------------------------------------------------------------- commands


def cmd_check(cfg: RunConfig) -> int:
    d = parse_proof(read_text(cfg.inputs[0]))
    try:
        analyze(d)
    except RuleShapeError as exc:
        emit(cfg, f"rejected: {exc}", {"accepted": False, "error": str(exc),
                                       "step": exc.node.step, "line": exc.node.line})
        return FAIL
    n = len(d.nodes())
    emit(cfg, f"accepted, {n} steps", {"accepted": True, "steps": n,
                                       "conclusion": show(d.conclusion)})
    return OK


def artifact(res, d) -> dict:
    return {
        "mode": res.mode,
        "formula": show(closure(d.conclusion, res.closure_vars)),
        "closure_vars": [{"name": v.name, "type": show_type(v.type)} for v in res.closure_vars],
        "number": num_to_json(res.code),
        "code": code_to_json(res.code),
        "case_trace": [{"step": t.step, "rule": t.rule, "recipe": t.recipe,
                        "codes": {k: num_to_json(n) for k, n in t.codes}}
                       for t in res.case_trace],
    }


def cmd_extract(cfg: RunConfig) -> int:
    d = parse_proof(read_text(cfg.inputs[0]))
    try:
        res = (extract_plain if cfg.mode == PLAIN else extract)(d)
    except RuleShapeError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return FAIL
    n = res.code
    head = f"code ({res.mode}): " + (str(n) if n.bit_length() < 200 else f"{n.bit_length()}-bit number")
    text = "\n".join([f"realizes: {show(closure(d.conclusion, res.closure_vars))}", head,
                      trace_text(res)])
    emit(cfg, text, artifact(res, d))
    return OK


def describe(r) -> str:
    if isinstance(r, Value):
        return f"Value({r.n})" if r.n.bit_length() < 200 else f"Value(<{r.n.bit_length()}-bit>)"
    if isinstance(r, OracleMiss):
        return f"OracleMiss({r.query})"
    if isinstance(r, FuelExhausted):
        return "FuelExhausted"
    return "InvalidCode"


def result_code(r) -> int:
    if isinstance(r, Value):
        return OK
    return EXHAUSTED if isinstance(r, FuelExhausted) else FAIL


def cmd_run(cfg: RunConfig, code_path, term, args, oracle_text) -> int:
    p = Oracle.parse(oracle_text) if oracle_text else EMPTY
    fuel = cfg.fuel or 100_000
    if term is not None:
        r = value(parse_term(term), p, fuel)
        if args:
            if not isinstance(r, Value):
                emit(cfg, describe(r), {"result": describe(r)})
                return result_code(r)
            r = apply_many(r.n, args, p, fuel)
    elif code_path is not None:
        a, _ = load_code(code_path)
        r = apply_many(a, args, p, fuel)
    else:
        raise UsageError("run needs --code or --term")
    rec = {"result": describe(r)}
    if isinstance(r, Value):
        rec["value"] = num_to_json(r.n)
    emit(cfg, describe(r), rec)
    return result_code(r)


def cmd_verify(cfg: RunConfig, universe_path) -> int:
    a, meta = load_code(cfg.inputs[0])
    phi = read_formula(cfg.inputs[1])
    if cfg.mode == PLAIN or meta.get("mode") == PLAIN:
        nums = cfg.num_set or (0, 1, 2, 3, 4)
        v = check_plain(a, phi, nums, cfg.fuel or 20_000)
        emit(cfg, f"{v}  [oracle-free, nums={list(nums)}]",
             verdict_record("plain", v, None, num_set=list(nums)))
        return exit_code(v)
    U = load_universe(universe_path, cfg)
    worst, count = None, 0
    for p in U.conditions():
        count += 1
        v = check_single(U, p, a, phi)
        if v.fails:
            worst = replace(v, reason=f"at p={p}: {v.reason}")
            break
        if v.exhausted and worst is None:
            worst = v
    v = worst or Verdict("Holds")
    emit(cfg, f"{v}  [{U.digest()}; {count} conditions]",
         verdict_record("forcing", v, U, conditions=count))
    return exit_code(v)


def cmd_selfreal(cfg: RunConfig, universe_path) -> int:
    phi = read_formula(cfg.inputs[0])
    t = truth_eval(phi, cfg.Q)
    rec = {"formula": show(phi), "Q": cfg.Q, "truth": t.kind}
    lines = [f"formula: {show(phi)}", f"truth (Q={cfg.Q}): {t}"]
    if not t.holds:
        emit(cfg, "\n".join(lines + ["no realizer: sentence is not known true"]), rec)
        return exit_code(t)
    if universe_path is None or cfg.key_set == "auto":
        U = auto_universe(phi, cfg.num_set or (0, 1, 2, 3), cfg.Q, cfg.fuel or 100_000,
                          cfg.val_bound)
    else:
        U = load_universe(universe_path, cfg)
        if not isinstance(U.tset, TDescription):
            U = replace(U, tset=TDescription(phi, cfg.Q))
    try:
        q, r = realize_true(phi, EMPTY, U, cfg.Q)
    except (PremiseFalse, OracleInconclusive, ValueError) as exc:
        emit(cfg, "\n".join(lines + [f"realize_true failed: {exc}"]), {**rec, "error": str(exc)})
        return EXHAUSTED
    check = check_single(U, q, r, phi)
    back = truth_from_realizer(phi, q, r, r, U, cfg.Q)
    lines += [f"q = {q}", f"realizer = {r}", f"universe: {U.digest()}",
              f"realizer check at q: {check}", f"truth from realizer: {back}"]
    rec.update({"q": dict(q), "realizer": num_to_json(r), "universe": U.digest(),
                "check": check.kind, "truth_from_realizer": back.kind})
    emit(cfg, "\n".join(lines), rec)
    worst = check if not check.holds else back
    return exit_code(worst)


# small universes for demo verification and soundness sweeps
SAMPLE_UNIVERSES = (
    ForcingUniverse(key_set=(0, 1), val_bound=2, num_set=range(5), fuel=100_000),
    ForcingUniverse(key_set=(0, 5, 9, 17), val_bound=1, num_set=range(5), fuel=100_000),
    ForcingUniverse(key_set=(3,), val_bound=8, num_set=range(5), fuel=100_000),
    ForcingUniverse(key_set=(0, 1, 2), val_bound=1, num_set=range(5), fuel=100_000),
)


def cmd_demo(cfg: RunConfig, a_bound: int, phi_text: str, verify: bool) -> int:
    phi = parse_formula(phi_text)
    try:
        dm = conservativity_demo(a_bound, phi, cfg.Q)
    except PremiseFalse as exc:
        emit(cfg, f"premise false: {exc}", {"error": str(exc)})
        return FAIL
    res = dm.extraction
    lines = [f"collection instance: {show(dm.derivation.conclusion)}",
             f"derivation: {len(dm.derivation.nodes())} nodes, "
             f"rules used {sorted(res.rules())}",
             f"extracted realizer: {res.code.bit_length()}-bit code",
             f"premise realizer: self-realizer under p = {dm.condition}",
             f"bound b = {dm.bound}",
             f"least witnesses for x < {a_bound}: {dm.witnesses}",
             f"brute-force minimal bound: {dm.minimal_bound}",
             f"conclusion at b (bounded truth): {dm.confirmed}"]
    ok = dm.confirmed.holds and dm.bound >= dm.minimal_bound
    rec = {"a": a_bound, "phi": show(phi), "bound": dm.bound, "minimal_bound": dm.minimal_bound,
           "witnesses": dm.witnesses, "confirmed": dm.confirmed.kind}
    verdicts = []
    if verify:
        for U in SAMPLE_UNIVERSES:
            v = verify_demo(dm, U)
            verdicts.append(v)
            lines.append(f"verify [{U.digest()}]: {v}")
        rec["verify"] = [v.kind for v in verdicts]
    lines.append("confirmed" if ok else "NOT confirmed")
    emit(cfg, "\n".join(lines), rec)
    if not ok or any(v.fails for v in verdicts):
        return FAIL
    return EXHAUSTED if any(v.exhausted for v in verdicts) else OK


# ---------------------------------------------------------------- argparse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[FORCING, PLAIN], default=FORCING)
    common.add_argument("--fuel", type=int)
    common.add_argument("--numset", type=parse_numset)
    common.add_argument("--keys", type=parse_keys)
    common.add_argument("--valbound", type=int)
    common.add_argument("--Q", type=int, default=20)
    common.add_argument("--emit", choices=["json", "text"], default="text")
    common.add_argument("--out")

    ap = argparse.ArgumentParser(prog="realizer", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("check", parents=[common], help="check a proof file")
    s.add_argument("proof")
    s = sub.add_parser("extract", parents=[common], help="extract a realizer from a proof")
    s.add_argument("proof")
    s = sub.add_parser("run", parents=[common], help="run a code or evaluate a term")
    s.add_argument("--code")
    s.add_argument("--term")
    s.add_argument("--arg", type=int, action="append", default=[])
    s.add_argument("--oracle")
    s = sub.add_parser("verify", parents=[common], help="check a code against a formula")
    s.add_argument("code")
    s.add_argument("formula")
    s.add_argument("--universe")
    s = sub.add_parser("selfreal", parents=[common], help="self-realize a true sentence")
    s.add_argument("formula")
    s.add_argument("--universe")
    s = sub.add_parser("demo", parents=[common], help="collection bound from a proof")
    s.add_argument("--a", type=int, default=3)
    s.add_argument("--phi", default="y =N add(x,x)")
    s.add_argument("--no-verify", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    try:
        inputs = [getattr(ns, k) for k in ("proof", "code", "formula")
                  if isinstance(getattr(ns, k, None), str) and ns.command != "run"]
        cfg = RunConfig(ns.command, inputs, ns.keys, ns.valbound, ns.numset, ns.fuel, ns.Q,
                        ns.mode, ns.emit, ns.out)
        if ns.command == "check":
            return cmd_check(cfg)
        if ns.command == "extract":
            return cmd_extract(cfg)
        if ns.command == "run":
            return cmd_run(cfg, ns.code, ns.term, ns.arg, ns.oracle)
        if ns.command == "verify":
            return cmd_verify(cfg, ns.universe)
        if ns.command == "selfreal":
            return cmd_selfreal(cfg, ns.universe)
        if ns.command == "demo":
            if ns.a < 0:
                raise UsageError("--a must be a natural number")
            return cmd_demo(cfg, ns.a, ns.phi, not ns.no_verify)
    except (ParseError, SortError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return FAIL
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except OracleInconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXHAUSTED
    return USAGE  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
