"""Hilbert-style derivations: rule checking (axioms and rules 1-25) and the
line-oriented proof file format."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .syntax import (
    FALSE, N, And, App, Arrow, Prod, CombK, CombS, Eq, Exists, Forall, Imp, Or, PairC,
    ParseError, PrimFn, Proj0, Proj1, Rec, SortError, Succ, Var, Zero, alpha_eq,
    app, defining_equations, free_for, free_vars, naive_subst, parse_formula,
    parse_term, parse_type, show, show_term, show_type, sort_of, subst, succ,
    term_vars, BINARY, QUANT,
)

RULE_NAMES = {
    1: "identity", 2: "modus ponens", 3: "syllogism", 4: "and-elim", 5: "or-intro",
    6: "and-intro", 7: "or-elim", 8: "curry/uncurry", 9: "ex falso", 10: "forall-intro",
    11: "exists-elim", 12: "instantiation", 13: "successor axioms",
    14: "defining equations", 15: "combinators", 16: "recursors", 17: "projections",
    18: "surjective pairing", 19: "induction", 20: "reflexivity",
    21: "decidable equality", 22: "Leibniz", 23: "extensionality", 24: "choice",
    25: "dependent choice",
}
PREMISE_COUNT = {2: 2, 3: 2, 6: 2, 7: 2, 8: 1, 10: 1, 11: 1, 19: 2}


class RuleShapeError(ValueError):
    def __init__(self, node: "Derivation", reason: str):
        self.node, self.reason = node, reason
        super().__init__(f"{node.where()}: rule {node.rule}: {reason}")


class SideConditionError(RuleShapeError):
    pass


@dataclass(frozen=True, eq=False)
class Derivation:
    rule: int
    conclusion: object
    premises: tuple = ()
    payload: object = None
    step: str = ""
    line: int = 0

    def where(self) -> str:
        s = f"step {self.step}" if self.step else "node"
        return s + (f" (line {self.line})" if self.line else "")

    def nodes(self) -> list["Derivation"]:
        """Distinct nodes, premises before conclusions."""
        seen, order = set(), []
        stack = [(self, False)]
        while stack:
            d, done = stack.pop()
            if done:
                order.append(d)
                continue
            if id(d) in seen:
                continue
            seen.add(id(d))
            stack.append((d, True))
            stack.extend((p, False) for p in reversed(d.premises) if id(p) not in seen)
        return order


@dataclass
class NodeInfo:
    """What the checker learned about a node; extraction reads it."""
    roles: tuple = ()          # premise indices in canonical role order
    index: int = 0             # rules 4, 5: which side; 8: 0 = curry, 1 = uncurry
    var: Var | None = None     # rules 10, 11, 19: the quantified / induction variable
    term: object = None        # rule 12: the instantiating term
    variant: int = 0           # rule 12: 0 = forall-elim, 1 = exists-intro; 13: which axiom
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------- helpers


def _is_var(t, ty=None) -> bool:
    return isinstance(t, Var) and (ty is None or t.type == ty)


def _imp(node, f, what="conclusion") -> Imp:
    if not isinstance(f, Imp):
        raise RuleShapeError(node, f"{what} must be an implication, got {show(f)}")
    return f


def _match_term(s, t, x, bound, acc):
    if isinstance(s, Var) and s == x and x not in bound:
        if acc.get("t") is None:
            if set(term_vars(t)) & bound:
                return False
            acc["t"] = t
            return True
        return acc["t"] == t
    if type(s) is not type(t):
        return False
    if isinstance(s, App):
        return _match_term(s.fn, t.fn, x, bound, acc) and _match_term(s.arg, t.arg, x, bound, acc)
    if isinstance(s, PrimFn):
        return s.symbol == t.symbol and len(s.args) == len(t.args) and all(
            _match_term(a, b, x, bound, acc) for a, b in zip(s.args, t.args))
    return s == t


def match_instance(phi, psi, x: Var):
    """Find alpha with psi == phi[alpha/x] literally; returns (ok, alpha)."""
    acc: dict = {}

    def go(f, g, bound):
        if type(f) is not type(g):
            return False
        if isinstance(f, Eq):
            return f.type == g.type and _match_term(f.lhs, g.lhs, x, bound, acc) and \
                _match_term(f.rhs, g.rhs, x, bound, acc)
        if isinstance(f, BINARY):
            return go(f.left, g.left, bound) and go(f.right, g.right, bound)
        if f.var != g.var:
            return False
        if f.var == x:
            return f == g
        return go(f.body, g.body, bound | {f.var})

    if not go(phi, psi, frozenset()):
        return False, None
    return True, acc.get("t")


def leibniz_match(f1, f2, x: Var, y: Var) -> bool:
    """f2 arises from f1 by replacing some free occurrences of x with y,
    and y is free at every replaced position."""

    def term(s, t, bound):
        if s == t:
            return True
        if s == x and t == y and x not in bound and y not in bound:
            return True
        if type(s) is not type(t):
            return False
        if isinstance(s, App):
            return term(s.fn, t.fn, bound) and term(s.arg, t.arg, bound)
        if isinstance(s, PrimFn):
            return s.symbol == t.symbol and all(term(a, b, bound) for a, b in zip(s.args, t.args))
        return False

    def go(f, g, bound):
        if type(f) is not type(g):
            return False
        if isinstance(f, Eq):
            return f.type == g.type and term(f.lhs, g.lhs, bound) and term(f.rhs, g.rhs, bound)
        if isinstance(f, BINARY):
            return go(f.left, g.left, bound) and go(f.right, g.right, bound)
        if f.var != g.var:
            return False
        return go(f.body, g.body, bound | {f.var})

    return go(f1, f2, frozenset())


def _rename_match(pattern, target, m: dict) -> bool:
    """Injective variable renaming from pattern vars to target vars."""
    if isinstance(pattern, Var):
        if not isinstance(target, Var) or target.type != pattern.type:
            return False
        if pattern in m:
            return m[pattern] == target
        if target in m.values():
            return False
        m[pattern] = target
        return True
    if type(pattern) is not type(target):
        return False
    if isinstance(pattern, App):
        return _rename_match(pattern.fn, target.fn, m) and _rename_match(pattern.arg, target.arg, m)
    if isinstance(pattern, PrimFn):
        return pattern.symbol == target.symbol and all(
            _rename_match(a, b, m) for a, b in zip(pattern.args, target.args))
    return pattern == target


def _unapp(t, k: int):
    """Split t into head and k arguments, or None."""
    args = []
    for _ in range(k):
        if not isinstance(t, App):
            return None
        args.append(t.arg)
        t = t.fn
    return t, list(reversed(args))


# ---------------------------------------------------------------- per-rule checks


def _two(node, a, b, test):
    """Try premise orders (a,b) then (b,a); return roles."""
    if test(a, b):
        return (0, 1)
    if test(b, a):
        return (1, 0)
    return None


def check_node(node: Derivation) -> NodeInfo:
    r, c, ps = node.rule, node.conclusion, node.premises
    if r not in RULE_NAMES:
        raise RuleShapeError(node, "unknown rule number")
    want = PREMISE_COUNT.get(r, 0)
    if len(ps) != want:
        raise RuleShapeError(node, f"expects {want} premises, got {len(ps)}")
    P = [p.conclusion for p in ps]
    info = NodeInfo()

    if r == 1:
        f = _imp(node, c)
        if not alpha_eq(f.left, f.right):
            raise RuleShapeError(node, "antecedent and consequent differ")

    elif r == 2:
        def mp(minor, major):
            return isinstance(major, Imp) and alpha_eq(major.left, minor) and alpha_eq(major.right, c)
        roles = _two(node, P[0], P[1], mp)
        if roles is None:
            raise RuleShapeError(node, "minor premise does not match the antecedent of the major premise")
        info.roles = roles

    elif r == 3:
        f = _imp(node, c)

        def syl(a, b):
            return isinstance(a, Imp) and isinstance(b, Imp) and alpha_eq(a.right, b.left) and \
                alpha_eq(a.left, f.left) and alpha_eq(b.right, f.right)
        roles = _two(node, P[0], P[1], syl)
        if roles is None:
            raise RuleShapeError(node, "premises do not chain into the conclusion")
        info.roles = roles

    elif r == 4:
        f = _imp(node, c)
        if not isinstance(f.left, And):
            raise RuleShapeError(node, "antecedent must be a conjunction")
        sides = [i for i, s in enumerate((f.left.left, f.left.right)) if alpha_eq(s, f.right)]
        if not sides:
            raise RuleShapeError(node, "consequent is neither conjunct")
        info.index = node.payload if node.payload in sides else sides[0]

    elif r == 5:
        f = _imp(node, c)
        if not isinstance(f.right, Or):
            raise RuleShapeError(node, "consequent must be a disjunction")
        sides = [i for i, s in enumerate((f.right.left, f.right.right)) if alpha_eq(s, f.left)]
        if not sides:
            raise RuleShapeError(node, "antecedent is neither disjunct")
        info.index = node.payload if node.payload in sides else sides[0]

    elif r == 6:
        f = _imp(node, c)
        if not isinstance(f.right, And):
            raise RuleShapeError(node, "consequent must be a conjunction")

        def ok(a, b):
            return isinstance(a, Imp) and isinstance(b, Imp) and alpha_eq(a.left, f.left) and \
                alpha_eq(b.left, f.left) and alpha_eq(a.right, f.right.left) and alpha_eq(b.right, f.right.right)
        roles = _two(node, P[0], P[1], ok)
        if roles is None:
            raise RuleShapeError(node, "premises do not match the conjunction")
        info.roles = roles

    elif r == 7:
        f = _imp(node, c)
        if not isinstance(f.left, Or):
            raise RuleShapeError(node, "antecedent must be a disjunction")

        def ok(a, b):
            return isinstance(a, Imp) and isinstance(b, Imp) and alpha_eq(a.left, f.left.left) and \
                alpha_eq(b.left, f.left.right) and alpha_eq(a.right, f.right) and alpha_eq(b.right, f.right)
        roles = _two(node, P[0], P[1], ok)
        if roles is None:
            raise RuleShapeError(node, "premises do not match the disjunction")
        info.roles = roles

    elif r == 8:
        f, p = _imp(node, c), _imp(node, P[0], "premise")
        if isinstance(p.left, And) and isinstance(f.right, Imp) and alpha_eq(f.left, p.left.left) \
                and alpha_eq(f.right.left, p.left.right) and alpha_eq(f.right.right, p.right):
            info.index = 0
        elif isinstance(f.left, And) and isinstance(p.right, Imp) and alpha_eq(p.left, f.left.left) \
                and alpha_eq(p.right.left, f.left.right) and alpha_eq(p.right.right, f.right):
            info.index = 1
        else:
            raise RuleShapeError(node, "neither currying nor uncurrying of the premise")

    elif r == 9:
        f = _imp(node, c)
        if f.left != FALSE:
            raise RuleShapeError(node, "antecedent must be 0 =N S(0)")

    elif r == 10:
        f, p = _imp(node, c), _imp(node, P[0], "premise")
        if not isinstance(f.right, Forall):
            raise RuleShapeError(node, "consequent must be universally quantified")
        x = f.right.var
        if not (alpha_eq(f.left, p.left) and alpha_eq(f.right.body, p.right)):
            raise RuleShapeError(node, "conclusion does not generalise the premise")
        if x in free_vars(f.left):
            raise SideConditionError(node, f"{x.name} is free in the antecedent")
        info.var = x

    elif r == 11:
        f, p = _imp(node, c), _imp(node, P[0], "premise")
        if not isinstance(f.left, Exists):
            raise RuleShapeError(node, "antecedent must be existentially quantified")
        x = f.left.var
        if not (alpha_eq(f.left.body, p.left) and alpha_eq(f.right, p.right)):
            raise RuleShapeError(node, "conclusion does not match the premise")
        if x in free_vars(f.right):
            raise SideConditionError(node, f"{x.name} is free in the consequent")
        info.var = x

    elif r == 12:
        f = _imp(node, c)
        if isinstance(f.left, Forall):
            q, inst, info.variant = f.left, f.right, 0
        elif isinstance(f.right, Exists):
            q, inst, info.variant = f.right, f.left, 1
        else:
            raise RuleShapeError(node, "needs forall x.phi -> phi(t) or phi(t) -> exists x.phi")
        if isinstance(f.left, Forall) and isinstance(f.right, Exists):
            # both shapes fit; prefer whichever matches
            ok0, _ = match_instance(f.left.body, f.right, f.left.var)
            if not ok0 and node.payload is None:
                q, inst, info.variant = f.right, f.left, 1
        x = q.var
        t = node.payload
        if t is None:
            ok, t = match_instance(q.body, inst, x)
            if not ok:
                raise RuleShapeError(node, "instance does not match the quantified formula")
            if t is None:
                t = x
        if sort_of(t) != x.type:
            raise SortError(f"{node.where()}: instantiating term has the wrong sort")
        if not free_for(t, x, q.body):
            raise SideConditionError(node, f"{show_term(t)} is not free for {x.name}")
        if not alpha_eq(naive_subst(q.body, x, t), inst):
            raise RuleShapeError(node, "instance does not match the quantified formula")
        info.var, info.term = x, t

    elif r == 13:
        f = _imp(node, c)
        if f.right == FALSE and isinstance(f.left, Eq) and f.left.type == N and f.left.lhs == Zero() \
                and isinstance(f.left.rhs, App) and isinstance(f.left.rhs.fn, Succ) and _is_var(f.left.rhs.arg, N):
            info.variant = 0
        elif isinstance(f.left, Eq) and isinstance(f.right, Eq) and f.left.type == N and f.right.type == N \
                and all(isinstance(s, App) and isinstance(s.fn, Succ) for s in (f.left.lhs, f.left.rhs)) \
                and _is_var(f.left.lhs.arg, N) and _is_var(f.left.rhs.arg, N) \
                and f.right.lhs == f.left.lhs.arg and f.right.rhs == f.left.rhs.arg:
            info.variant = 1
        else:
            raise RuleShapeError(node, "not ~(0 = S x) or S x = S y -> x = y over variables")

    elif r == 14:
        if not isinstance(c, Eq):
            raise RuleShapeError(node, "must be an equation")
        for e in defining_equations():
            m: dict = {}
            if _rename_match(e.lhs, c.lhs, m) and _rename_match(e.rhs, c.rhs, m):
                break
        else:
            raise RuleShapeError(node, "not a defining equation of a function symbol")

    elif r == 15:
        _check_combinator(node, c)

    elif r == 16:
        _check_recursor(node, c)

    elif r == 17:
        _check_projection(node, c)

    elif r == 18:
        ok = isinstance(c, Eq) and isinstance(c.type, Prod) and _is_var(c.lhs)
        if ok:
            x, t = c.lhs, c.type
            ok = c.rhs == app(PairC(t.left, t.right), App(Proj0(t.left, t.right), x),
                              App(Proj1(t.left, t.right), x))
        if not ok:
            raise RuleShapeError(node, "not x = D(D0 x)(D1 x) for a variable x")

    elif r == 19:
        info.var, info.roles = _check_induction(node, c, P)

    elif r == 20:
        if not (isinstance(c, Eq) and _is_var(c.lhs) and c.lhs == c.rhs):
            raise RuleShapeError(node, "not x = x for a variable x")

    elif r == 21:
        ok = isinstance(c, Or) and isinstance(c.left, Eq) and c.left.type == N and \
            _is_var(c.left.lhs, N) and _is_var(c.left.rhs, N) and c.right == Imp(c.left, FALSE)
        if not ok:
            raise RuleShapeError(node, "not x = y | ~(x = y) over variables of sort N")

    elif r == 22:
        f = _imp(node, c)
        ok = isinstance(f.left, And) and isinstance(f.left.left, Eq) and _is_var(f.left.left.lhs) \
            and _is_var(f.left.left.rhs)
        if not ok:
            raise RuleShapeError(node, "not x = y & phi(x) -> phi(y) over variables")
        x, y = f.left.left.lhs, f.left.left.rhs
        if not leibniz_match(f.left.right, f.right, x, y):
            raise RuleShapeError(node, "consequent is not the antecedent with x replaced by y")

    elif r == 23:
        _check_ext(node, c)

    elif r == 24:
        _check_ac(node, c)

    elif r == 25:
        _check_dc(node, c)
    return info


def _check_combinator(node, c):
    if not isinstance(c, Eq):
        raise RuleShapeError(node, "must be an equation")
    k = _unapp(c.lhs, 2)
    if k and isinstance(k[0], CombK):
        x, y = k[1]
        if _is_var(x) and _is_var(y) and c.rhs == x:
            return
    s = _unapp(c.lhs, 3)
    if s and isinstance(s[0], CombS):
        x, y, z = s[1]
        if all(_is_var(v) for v in (x, y, z)) and c.rhs == App(App(x, z), App(y, z)):
            return
    raise RuleShapeError(node, "not K x y = x or Sig x y z = (x z)(y z) over variables")


def _check_recursor(node, c):
    if isinstance(c, Eq):
        r = _unapp(c.lhs, 3)
        if r and isinstance(r[0], Rec):
            x, y, n = r[1]
            if _is_var(x) and _is_var(y):
                if n == Zero() and c.rhs == x:
                    return
                if isinstance(n, App) and isinstance(n.fn, Succ) and _is_var(n.arg, N) and \
                        c.rhs == app(y, app(r[0], x, y, n.arg), n.arg):
                    return
    raise RuleShapeError(node, "not R x y 0 = x or R x y (S z) = y (R x y z) z over variables")


def _check_projection(node, c):
    if isinstance(c, Eq) and isinstance(c.lhs, App) and isinstance(c.lhs.fn, (Proj0, Proj1)):
        pr = c.lhs.fn
        inner = _unapp(c.lhs.arg, 2)
        if inner and inner[0] == PairC(pr.a, pr.b):
            x, y = inner[1]
            if _is_var(x) and _is_var(y) and c.rhs == (x if isinstance(pr, Proj0) else y):
                return
    raise RuleShapeError(node, "not D0(D x y) = x or D1(D x y) = y over variables")


def _check_induction(node, c, P):
    def works(x, base, step):
        want_base = subst(c, {x: Zero()})
        want_step = Imp(c, subst(c, {x: succ(x)}))
        return alpha_eq(base, want_base) and alpha_eq(step, want_step)

    cands = []
    if node.payload is not None:
        cands = [node.payload]
    else:
        cands = [v for v in free_vars(c) if v.type == N]
        cands += [v for v in free_vars(P[1]) if v.type == N and v not in cands]
    for x in cands:
        if not isinstance(x, Var) or x.type != N:
            raise RuleShapeError(node, "induction variable must have sort N")
        for roles in ((0, 1), (1, 0)):
            if works(x, P[roles[0]], P[roles[1]]):
                return x, roles
    # x not free: premises phi and phi -> phi
    for roles in ((0, 1), (1, 0)):
        if alpha_eq(P[roles[0]], c) and alpha_eq(P[roles[1]], Imp(c, c)):
            x = node.payload if node.payload is not None else Var("x", N)
            return x, roles
    raise RuleShapeError(node, "premises are not phi(0) and phi(x) -> phi(S x)")


def _check_ext(node, c):
    f = _imp(node, c)
    if isinstance(f.left, Forall) and isinstance(f.right, Eq) and _is_var(f.right.lhs) and \
            _is_var(f.right.rhs) and isinstance(f.right.type, Arrow):
        x, y, z = f.right.lhs, f.right.rhs, f.left.var
        B, C = f.right.type.dom, f.right.type.cod
        if z.type == B and z not in (x, y) and f.left.body == Eq(C, App(x, z), App(y, z)):
            return
    raise RuleShapeError(node, "not forall z. x z = y z -> x = y")


def _check_ac(node, c):
    f = _imp(node, c)
    a, k = f.left, f.right
    if not (isinstance(a, Forall) and isinstance(a.body, Exists) and isinstance(k, Exists)):
        raise RuleShapeError(node, "not forall x. exists y. phi -> exists z. forall x. phi(x, z x)")
    x, y, z, phi = a.var, a.body.var, k.var, a.body.body
    if z.type != Arrow(x.type, y.type):
        raise RuleShapeError(node, f"choice function {z.name} must have sort {show_type(Arrow(x.type, y.type))}")
    if z in free_vars(a) or z == x:
        raise SideConditionError(node, f"{z.name} must be fresh")
    want = Exists(z, Forall(x, subst(phi, {y: App(z, x)})))
    if not alpha_eq(want, k):
        raise RuleShapeError(node, "consequent is not the choice form of the antecedent")


def dc_parts(c):
    """Split a dependent-choice instance into (x, y, phi, psi, z, v)."""
    a, k = c.left, c.right
    x = a.var
    inner = a.body
    phi = inner.left
    ex = inner.right
    y = ex.var
    psi = ex.body.right
    kz = k.body.right
    z = kz.var
    v = kz.body.right.var
    return x, y, phi, psi, z, v


def _check_dc(node, c):
    f = _imp(node, c)
    try:
        a, k = f.left, f.right
        assert isinstance(a, Forall) and isinstance(a.body, Imp)
        assert isinstance(a.body.right, Exists) and isinstance(a.body.right.body, And)
        assert isinstance(k, Forall) and isinstance(k.body, Imp) and isinstance(k.body.right, Exists)
        assert isinstance(k.body.right.body, And) and isinstance(k.body.right.body.right, Forall)
        x, y, phi, psi, z, v = dc_parts(f)
    except AssertionError:
        raise RuleShapeError(node, "not a dependent choice instance") from None
    B = x.type
    if y.type != B or z.type != Arrow(N, B) or v.type != N:
        raise RuleShapeError(node, "dependent choice sorts: x,y:B, z:N->B, v:N")
    if y != x and y in free_vars(phi):
        raise SideConditionError(node, f"{y.name} is free in phi(x)")
    if not alpha_eq(a.body.right.body.left, subst(phi, {x: y})):
        raise RuleShapeError(node, "phi(y) is not phi(x) with y for x")
    fv_psi = set(free_vars(psi))
    if z in set(free_vars(phi)) | fv_psi or z == x:
        raise SideConditionError(node, f"{z.name} must be fresh")
    if v in (fv_psi - {x, y}) or v == z:
        raise SideConditionError(node, f"{v.name} must be fresh")
    step = subst(psi, {x: App(z, v), y: App(z, succ(v))})
    want = Forall(x, Imp(phi, Exists(z, And(Eq(B, App(z, Zero()), x), Forall(v, step)))))
    if not alpha_eq(want, k):
        raise RuleShapeError(node, "consequent is not the dependent choice form of the antecedent")


# ---------------------------------------------------------------- whole derivations


def analyze(d: Derivation) -> dict[int, NodeInfo]:
    """Check every node once; map id(node) -> NodeInfo."""
    infos: dict[int, NodeInfo] = {}
    for node in d.nodes():
        if not isinstance(node.conclusion, (Eq, And, Or, Imp, Exists, Forall)):
            raise RuleShapeError(node, "conclusion is not a formula")
        infos[id(node)] = check_node(node)
    return infos


def check_derivation(d: Derivation) -> list[Var]:
    """Validate every node; return the conclusion's free variables in
    canonical (first-occurrence) order."""
    analyze(d)
    return free_vars(d.conclusion)


# ---------------------------------------------------------------- proof files

_STEP = re.compile(
    r"step\s+(?P<id>[^\s:]+)\s*:\s*rule\s+(?P<rule>\d+)"
    r"(?:\s+premises\s*:\s*(?P<prem>[^\s].*?))?"
    r"(?:\s+with\s*:\s*(?P<with>.*?))?\s*$")


def _parse_vars(spec: str) -> dict:
    out = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, ty = part.partition(":")
        if not ty:
            raise ParseError(f"variable declaration needs name:type, got {part!r}")
        out[name.strip()] = parse_type(ty.strip())
    return out


def parse_proof(text: str) -> Derivation:
    """Parse a proof file; the last step is the root."""
    env: dict = {}
    steps: dict[str, Derivation] = {}
    last = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vars:"):
            env.update(_parse_vars(line[5:]))
            continue
        head, sep, body = line.partition("|-")
        if not sep:
            raise ParseError(f"line {lineno}: missing '|-'")
        m = _STEP.match(head.strip())
        if not m:
            raise ParseError(f"line {lineno}: expected 'step <id>: rule <n> ...'")
        sid, rule = m["id"], int(m["rule"])
        if sid in steps:
            raise ParseError(f"line {lineno}: duplicate step id {sid}")
        try:
            phi = parse_formula(body.strip(), env)
        except (ParseError, SortError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        prem = []
        if m["prem"]:
            for pid in m["prem"].split(","):
                pid = pid.strip()
                if pid not in steps:
                    raise ParseError(f"line {lineno}: unknown premise {pid}")
                prem.append(steps[pid])
        payload = _parse_payload(rule, m["with"], phi, env, lineno)
        node = Derivation(rule, phi, tuple(prem), payload, sid, lineno)
        steps[sid] = node
        last = node
    if last is None:
        raise ParseError("empty proof file")
    return last


def _parse_payload(rule, text, phi, env, lineno):
    if text is None or not text.strip():
        return None
    text = text.strip()
    local = dict(env)
    for v in free_vars(phi):
        local.setdefault(v.name, v.type)
    try:
        if rule in (4, 5):
            return int(text)
        if rule in (10, 11, 19):
            name, _, ty = text.partition(":")
            ty = parse_type(ty) if ty else local.get(name.strip(), N)
            return Var(name.strip(), ty)
        if rule == 12:
            # the quantified variable's sort constrains the term; bound names are visible
            for f in _quantified(phi):
                local.setdefault(f.var.name, f.var.type)
            return parse_term(text, local)
    except (ValueError, SortError) as exc:
        raise ParseError(f"line {lineno}: bad payload: {exc}") from exc
    raise ParseError(f"line {lineno}: rule {rule} takes no payload")


def _quantified(phi):
    from .syntax import walk
    return [f for f in walk(phi) if isinstance(f, QUANT)]


def _show_payload(d: Derivation) -> str:
    p = d.payload
    if p is None:
        return ""
    if isinstance(p, Var) and d.rule in (10, 11, 19):
        return f" with: {p.name}:{show_type(p.type)}"
    if isinstance(p, int):
        return f" with: {p}"
    return f" with: {show_term(p)}"


def to_text(d: Derivation) -> str:
    """Serialise a derivation (a DAG) to the proof file format."""
    names: dict[int, str] = {}
    lines = []
    decl: dict = {}
    for node in d.nodes():
        for v in free_vars(node.conclusion):
            if v.type != N:
                decl[v.name] = v.type
    if decl:
        lines.append("vars: " + ", ".join(f"{k}:{show_type(t)}" for k, t in decl.items()))
    for i, node in enumerate(d.nodes(), 1):
        names[id(node)] = str(i)
        prem = ""
        if node.premises:
            prem = " premises: " + ",".join(names[id(p)] for p in node.premises)
        lines.append(f"step {i}: rule {node.rule}{prem}{_show_payload(node)} |- {show(node.conclusion)}")
    return "\n".join(lines) + "\n"
