"""Derivations to realizer codes, in forcing mode and in oracle-free mode.

A node is compiled relative to the free variables of its conclusion, in
canonical order: the code first takes one numeral per variable, then
whatever the formula's realizer takes.  With no variables the code is the
realizer itself (no dummy argument).  A premise is called with the numerals
of the variables it shares with the conclusion (or those bound by the rule)
and the canonical inhabitant 0^A for each variable of its own.  Compiling
every node once, against its own variables, keeps shared subderivations
from being recompiled in each context they are used in.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .codes import EMPTY, Value, apply, apply_many, fixpoint, proj
from .derivation import Derivation, NodeInfo, analyze, RULE_NAMES
from .heo import HOLDS, ForcingUniverse, Verdict, default_code
from .lam import Const, If0, Pj, V, ap, comp, lam, number, op, tup
from .proofkit import PremiseFalse, collection_derivation, collection_formulas
from .realizability import Registry, check_single, formula_type
from .selfreal import OracleInconclusive, saturate, self_index, truth_eval
from .syntax import Arrow, Forall, Imp, N, Var, free_vars, show, term_vars
from .valuation import term_lam

FORCING, PLAIN = "forcing", "plain"


@dataclass(frozen=True)
class TraceEntry:
    step: str
    rule: int
    recipe: str
    codes: tuple = ()  # (label, number) pairs for intermediate codes


@dataclass
class ExtractionResult:
    code: int
    closure_vars: list
    mode: str
    case_trace: list = field(default_factory=list)
    node_codes: list = field(default_factory=list)  # (conclusion, vars, code)

    def rules(self) -> set[int]:
        return {t.rule for t in self.case_trace}


def closure(phi, variables: Sequence[Var]):
    """The universal closure over the given variables (outermost first)."""
    for v in reversed(list(variables)):
        phi = Forall(v, phi)
    return phi


class _Extractor:
    def __init__(self, d: Derivation, mode: str):
        if mode not in (FORCING, PLAIN):
            raise ValueError(f"mode is {FORCING!r} or {PLAIN!r}")
        self.mode = mode
        self.plain = mode == PLAIN
        self.infos = analyze(d)
        self.memo: dict = {}
        self.trace: list[TraceEntry] = []
        self.traced: set[int] = set()
        self.node_codes: list = []

    def note(self, node: Derivation, recipe: str, codes: tuple = ()):
        if id(node) not in self.traced:
            self.traced.add(id(node))
            self.trace.append(TraceEntry(node.step or f"#{len(self.trace)}", node.rule, recipe, codes))

    # ---- premise calls

    def call(self, premise: Derivation, variables: tuple, env: dict):
        """Lambda expression for the premise's code applied to numerals for
        `variables` (plus defaults for its other free variables)."""
        vs = tuple(free_vars(premise.conclusion))
        code = self.code(premise, vs)
        args = [env[v] if v in env else Const(default_code(v.type)) for v in vs]
        return ap(Const(code), *args)

    # ---- nodes

    def code(self, node: Derivation, variables: tuple) -> int:
        key = (id(node), variables)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        names = [f"#n{i}" for i in range(len(variables))]
        env = {v: V(x) for v, x in zip(variables, names)}
        kind, got = self.recipe(node, self.infos[id(node)], variables, env)
        if kind == "code":
            code = got
        else:
            code = number(lam(*names, got)) if names else number(got)
        self.memo[key] = code
        self.node_codes.append((node.conclusion, variables, code))
        return code

    def recipe(self, node: Derivation, info: NodeInfo, vs: tuple, env: dict):
        r, c, ps = node.rule, node.conclusion, node.premises
        b, d, e = V("b"), V("d"), V("e")
        pl = self.plain

        if r == 1:
            self.note(node, "a n b = b")
            return "body", lam("b", b)
        if r == 2:
            minor, major = ps[info.roles[0]], ps[info.roles[1]]
            self.note(node, "a n = b n 0^B (c n 0^B)")
            return "body", ap(self.call(major, vs, env), self.call(minor, vs, env))
        if r == 3:
            first, second = ps[info.roles[0]], ps[info.roles[1]]
            self.note(node, "a n d = b n 0^B (c n 0^B d)")
            return "body", lam("d", ap(self.call(second, vs, env), ap(self.call(first, vs, env), d)))
        if r == 4:
            self.note(node, f"a n b = (b)_{info.index}")
            return "body", lam("b", Pj(info.index, b))
        if r == 5:
            i = info.index
            if pl:
                o = c.right
                z = [Const(default_code(formula_type(o.left))), Const(default_code(formula_type(o.right)))]
                z[i] = b
                self.note(node, f"a n b = <{i},{'b,0^B1' if i == 0 else '0^B0,b'}>")
                return "body", lam("b", tup(Const(i), *z))
            self.note(node, f"a n b = <{i},b>")
            return "body", lam("b", tup(Const(i), b))
        if r == 6:
            first, second = ps[info.roles[0]], ps[info.roles[1]]
            self.note(node, "a n d = <b n d, c n d>")
            return "body", lam("d", tup(ap(self.call(first, vs, env), d), ap(self.call(second, vs, env), d)))
        if r == 7:
            first, second = ps[info.roles[0]], ps[info.roles[1]]
            if pl:
                xl, xr = comp(d, 1, 3), comp(d, 2, 3)
                self.note(node, "a n d = b n (d)_1 if (d)_0 = 0 else c n (d)_2")
            else:
                xl = xr = Pj(1, d)
                self.note(node, "a n d = b n (d)_1 if (d)_0 = 0 else c n (d)_1")
            return "body", lam("d", If0(Pj(0, d), ap(self.call(first, vs, env), xl),
                                        ap(self.call(second, vs, env), xr)))
        if r == 8:
            if info.index == 0:
                self.note(node, "a n c e = b n <c,e>")
                return "body", lam("c", "e", ap(self.call(ps[0], vs, env), tup(V("c"), e)))
            self.note(node, "a n c = b n (c)_0 (c)_1")
            return "body", lam("c", ap(self.call(ps[0], vs, env), Pj(0, V("c")), Pj(1, V("c"))))
        if r == 9:
            if pl:
                self.note(node, "a n b = 0^B")
                return "body", lam("b", Const(default_code(formula_type(c.right))))
            self.note(node, "a n b = 0")
            return "body", lam("b", Const(0))
        if r == 10:
            x = info.var
            inner = {**env, x: e}
            pv = vs if x in vs else vs + (x,)
            self.note(node, "a n c e = b n[x:=e] c" if x in vs else "a n c e = b n e c")
            return "body", lam("c", "e", ap(self.call(ps[0], pv, inner), V("c")))
        if r == 11:
            x = info.var
            cc = V("c")
            inner = {**env, x: Pj(0, cc)}
            pv = vs if x in vs else vs + (x,)
            self.note(node, "a n c = b n[x:=(c)_0] (c)_1" if x in vs else "a n c = b n (c)_0 (c)_1")
            return "body", lam("c", ap(self.call(ps[0], pv, inner), Pj(1, cc)))
        if r == 12:
            t = info.term
            tenv = {v: env.get(v, Const(default_code(v.type))) for v in term_vars(t)}
            dn = term_lam(t, tenv)
            if info.variant == 0:
                self.note(node, "a n b = b (d n)")
                return "body", lam("b", ap(b, dn))
            self.note(node, "a n b = <d n, b>")
            return "body", lam("b", tup(dn, b))
        if r in (13, 14, 15, 16, 17, 18, 20, 23):
            if isinstance(c, Imp):
                self.note(node, "a n b = 0")
                return "body", lam("b", Const(0))
            self.note(node, "a n = 0")
            return "body", Const(0)
        if r == 19:
            return self.induction(node, info, vs, env)
        if r == 21:
            x, y = c.left.lhs, c.left.rhs
            same = op("eq", env[x], env[y])
            if pl:
                zc = Const(default_code(Arrow(N, N)))
                self.note(node, "a n = <0,0,zc> if n1 = n2 else <1,0,zc>")
                return "body", If0(same, tup(Const(1), Const(0), zc), tup(Const(0), Const(0), zc))
            self.note(node, "a n = <0,0> if n1 = n2 else <1,0>")
            return "body", If0(same, tup(Const(1), Const(0)), tup(Const(0), Const(0)))
        if r == 22:
            self.note(node, "a n b = (b)_1")
            return "body", lam("b", Pj(1, b))
        if r == 24:
            self.note(node, "a n b = <a0 n b, a1 n b>, a_i n b d = (b d)_i")
            return "body", lam("b", tup(lam("d", Pj(0, ap(b, d))), lam("d", Pj(1, ap(b, d)))))
        if r == 25:
            return self.dependent_choice(node, vs, env)
        raise AssertionError(f"no recipe for rule {r}")  # pragma: no cover

    def induction(self, node, info, vs, env):
        base, step = node.premises[info.roles[0]], node.premises[info.roles[1]]
        x = info.var
        if x not in vs:
            self.note(node, "a n = b n (induction variable not free)")
            return "body", self.call(base, vs, env)
        names = [f"#n{i}" for i in range(len(vs))]
        me = V("#self")
        prev = op("pred", env[x])
        down = {**env, x: prev}
        body = If0(env[x], self.call(base, vs, env),
                   ap(self.call(step, vs, down), ap(me, *[down[v] for v in vs])))
        t = number(lam("#self", *names, body))
        a = fixpoint(t)
        self.note(node, "a n 0 = b n; a n (i+1) = c n i (a n i)", (("step functional", t), ("fixpoint", a)))
        return "code", a

    def dependent_choice(self, node, vs, env):
        b, x, d, i, me = V("b"), V("x"), V("d"), V("i"), V("#self")
        prev = ap(me, b, x, d, op("pred", i))
        h_fun = lam("#self", "b", "x", "d", "i",
                    If0(i, tup(x, d, Const(0)), ap(b, comp(prev, 0, 3), comp(prev, 1, 3))))
        h = fixpoint(number(h_fun))
        f = number(lam("b", "x", "d", "i", comp(ap(Const(h), b, x, d, i), 0, 3)))
        g = number(lam("b", "x", "d", "i", comp(ap(Const(h), b, x, d, op("S", i)), 2, 3)))
        self.note(node, "a n b x d = <f,0,g>; f i = (h i)_0; g i = (h (i+1))_2; "
                        "h 0 = <x,d,0>; h (i+1) = b (h i)_0 (h i)_1",
                  (("h", h), ("f", f), ("g", g)))
        return "body", lam("b", "x", "d", tup(ap(Const(f), b, x, d), Const(0), ap(Const(g), b, x, d)))


def _extract(d: Derivation, mode: str) -> ExtractionResult:
    ex = _Extractor(d, mode)
    vs = tuple(free_vars(d.conclusion))
    code = ex.code(d, vs)
    return ExtractionResult(code, list(vs), mode, ex.trace, ex.node_codes)


def extract(d: Derivation) -> ExtractionResult:
    """Realizer of the universal closure of d's conclusion (forcing mode)."""
    return _extract(d, FORCING)


def extract_plain(d: Derivation) -> ExtractionResult:
    """Realizer in the oracle-free typed relation."""
    return _extract(d, PLAIN)


def register(result: ExtractionResult, registry: Registry) -> None:
    """Record every node code whose variable list is exactly its free variables."""
    plain = result.mode == PLAIN
    for phi, vs, code in result.node_codes:
        if set(vs) == set(free_vars(phi)):
            registry.register(closure(phi, vs), code, plain)


def trace_text(result: ExtractionResult) -> str:
    lines = []
    for t in result.case_trace:
        lines.append(f"step {t.step}: rule {t.rule} ({RULE_NAMES[t.rule]}): {t.recipe}")
        for label, n in t.codes:
            lines.append(f"    {label} = {n}")
    return "\n".join(lines)


# ---------------------------------------------------------------- collection demo


def demo_collection(a_bound: int, phi, Q: int = 20, x: Var | None = None,
                    y: Var | None = None) -> Derivation:
    """Derivation of  ∀x<a ∃y φ  ->  ∃b ∀x<a ∃y<b φ  for a numeral a, after
    checking the premise by bounded truth."""
    x, y = x or Var("x", N), y or Var("y", N)
    P, _, _ = collection_formulas(a_bound, phi, x, y)
    v = truth_eval(P, Q)
    if v.fails:
        raise PremiseFalse(f"{show(P)} is false: {v.reason}")
    if v.exhausted:
        raise OracleInconclusive(f"{show(P)} undecided at Q={Q}: {v.reason}")
    return collection_derivation(a_bound, phi, x, y)


@dataclass
class CollectionDemo:
    a: int
    phi: object
    derivation: Derivation
    extraction: ExtractionResult
    condition: object  # oracle answering the premise realizer's queries
    premise_realizer: int
    output: int  # code applied to the premise realizer
    bound: int
    witnesses: list  # least y for each x < a
    minimal_bound: int
    confirmed: Verdict  # bounded truth of the conclusion's matrix at the bound
    plain_premise_realizer: int | None = None  # oracle-free, for registration

    @property
    def premise(self):
        return self.derivation.conclusion.left

    @property
    def conclusion(self):
        return self.derivation.conclusion.right


def _table_fn(values: list, arg):
    """lam body returning values[arg] for arg < len(values), else 0."""
    out, cur = Const(0), arg
    conds = []
    for v in values:
        conds.append((cur, v))
        cur = op("pred", cur)
    for cond, v in reversed(conds):
        out = If0(cond, Const(v), out)
    return out


def conservativity_demo(a_bound: int, phi, Q: int = 20, fuel: int = 2_000_000) -> CollectionDemo:
    """Extract the collection proof, feed it the self-realizer of the
    premise and read off the bound; confirm by brute force."""
    x, y = Var("x", N), Var("y", N)
    d = demo_collection(a_bound, phi, Q, x, y)
    res = extract(d)
    P, C = d.conclusion.left, d.conclusion.right
    q = saturate(P, nums=range(a_bound), Q=Q)
    r = apply(self_index(P), 0, q)
    if not isinstance(r, Value):
        raise OracleInconclusive(f"premise realizer did not evaluate: {r}")
    out = apply(res.code, r.n, q, fuel)
    if not isinstance(out, Value):
        raise RuntimeError(f"extracted code did not return a value: {out}")
    b = proj(0, out.n)
    wits = []
    for k in range(a_bound):
        ws = [w for w in range(Q + 1) if truth_eval(phi, Q, {x: k, y: w}).holds]
        wits.append(ws[0])
    minimal = 0
    while not all(any(truth_eval(phi, Q, {x: k, y: w}).holds for w in range(minimal))
                  for k in range(a_bound)):
        minimal += 1
    confirmed = truth_eval(C.body, Q, {C.var: b})

    # an oracle-free premise realizer: lam x g. <W x, R x>
    plain = None
    a_phi = self_index(phi)
    order = free_vars(phi)
    rs = []
    for k, w in enumerate(wits):
        env = {x: k, y: w}
        got = apply_many(a_phi, [env[v] for v in order] or [0], EMPTY, 100_000)
        if not isinstance(got, Value):
            break
        rs.append(got.n)
    else:
        xv = V("x")
        plain = number(lam("x", "g", tup(_table_fn(wits, xv), _table_fn(rs, xv))))
    return CollectionDemo(a_bound, phi, d, res, q, r.n, out.n, b, wits, minimal, confirmed, plain)


def verify_demo(demo: CollectionDemo, U: ForcingUniverse,
                conditions: Sequence | None = None) -> Verdict:
    """check_single of the extracted code at premise -> conclusion, for every
    condition of U, with the oracle-free premise realizer registered so the
    implication clause has a realizer to try."""
    reg = Registry()
    if demo.plain_premise_realizer is not None:
        reg.register(demo.premise, demo.plain_premise_realizer)
    U = replace(U, registry=reg)
    worst = None
    for p in (U.conditions() if conditions is None else conditions):
        v = check_single(U, p, demo.extraction.code, demo.derivation.conclusion)
        if v.fails:
            return v
        if v.exhausted and worst is None:
            worst = v
    return worst or HOLDS
