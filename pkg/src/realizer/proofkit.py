"""Derived rules for building derivations programmatically.

Everything here produces ordinary ``Derivation`` trees made of the 25
primitive rules; each node is checked as it is built, so a mistake surfaces
at the line that made it.  Most reasoning happens "in a context": a
derivation of ``H -> X`` is manipulated as a proof of X under hypothesis H.

The module ends with a derivation of the collection instance

    forall x (x < a -> exists y phi)  ->  exists b forall x (x < a -> exists y (y < b & phi))

for a numeral a, obtained from choice, a bound 1 + max f(k) and a handful of
arithmetic lemmas proved by quantifier-free induction.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

from .derivation import Derivation, check_node
from .syntax import (FALSE, And, App, Arrow, Eq, Exists, Forall, Imp, N, Or, PrimFn,
                     Var, Zero, free_for, free_vars, naive_subst, neg, numeral, parse_formula,
                     rename_apart, sort_of, subst_term, succ, term_vars)

# ---------------------------------------------------------------- primitive nodes


def node(rule: int, conclusion, *premises, payload=None) -> Derivation:
    d = Derivation(rule, conclusion, tuple(premises), payload)
    check_node(d)
    return d


def ident(A):
    return node(1, Imp(A, A))


def mp(minor, major):
    return node(2, major.conclusion.right, minor, major)


def syl(d1, d2):
    return node(3, Imp(d1.conclusion.left, d2.conclusion.right), d1, d2)


def proj_ax(A, B, i: int):
    return node(4, Imp(And(A, B), (A, B)[i]), payload=i)


def inj_ax(A, B, i: int):
    return node(5, Imp((A, B)[i], Or(A, B)), payload=i)


def pair_r(d1, d2):
    return node(6, Imp(d1.conclusion.left, And(d1.conclusion.right, d2.conclusion.right)), d1, d2)


def cases_r(d1, d2):
    return node(7, Imp(Or(d1.conclusion.left, d2.conclusion.left), d1.conclusion.right), d1, d2)


def curry(d):
    f = d.conclusion
    return node(8, Imp(f.left.left, Imp(f.left.right, f.right)), d)


def uncurry(d):
    f = d.conclusion
    return node(8, Imp(And(f.left, f.right.left), f.right.right), d)


def efq(C):
    return node(9, Imp(FALSE, C))


def gen(d, x: Var):
    f = d.conclusion
    return node(10, Imp(f.left, Forall(x, f.right)), d, payload=x)


def exelim(d, x: Var):
    f = d.conclusion
    return node(11, Imp(Exists(x, f.left), f.right), d, payload=x)


def _instance(q, t):
    if not free_for(t, q.var, q.body):
        raise ValueError(f"term is not free for {q.var.name}")
    return naive_subst(q.body, q.var, t)


def inst_ax(q: Forall, t):
    return node(12, Imp(q, _instance(q, t)), payload=t)


def exintro_ax(q: Exists, t):
    inst = _instance(q, t)
    # with a universal instance the checker infers the term itself
    return node(12, Imp(inst, q), payload=None if isinstance(inst, Forall) else t)


def defeq(text: str):
    return node(14, parse_formula(text))


# ---------------------------------------------------------------- fresh names and terms

_fresh = itertools.count(1)


def fresh(ty=N, stem="z") -> Var:
    return Var(f"{stem}_{next(_fresh)}", ty)


def num(n: int):
    return numeral(n)


def prim(sym, *args):
    return PrimFn(sym, tuple(args))


def replace_term(t, s, z):
    """t with every occurrence of the subterm s replaced by z."""
    if t == s:
        return z
    if isinstance(t, App):
        return App(replace_term(t.fn, s, z), replace_term(t.arg, s, z))
    if isinstance(t, PrimFn):
        return PrimFn(t.symbol, tuple(replace_term(a, s, z) for a in t.args))
    return t


def replace_formula(phi, s, z):
    if isinstance(phi, Eq):
        return Eq(phi.type, replace_term(phi.lhs, s, z), replace_term(phi.rhs, s, z))
    if isinstance(phi, (And, Or, Imp)):
        return type(phi)(replace_formula(phi.left, s, z), replace_formula(phi.right, s, z))
    return type(phi)(phi.var, replace_formula(phi.body, s, z))


# ---------------------------------------------------------------- theorems without context

TOP = Imp(Eq(N, Zero(), Zero()), Eq(N, Zero(), Zero()))


@lru_cache(maxsize=None)
def top():
    return ident(TOP.left)


def weaken(d, H):
    """From |- X obtain |- H -> X."""
    X = d.conclusion
    return mp(d, curry(proj_ax(X, H, 0)))


def close(d):
    """From |- TOP -> X obtain |- X."""
    return mp(top(), d)


def inst_thm(d, mapping: dict):
    """Instantiate free variables of a theorem by terms (simultaneously)."""
    mapping = {v: t for v, t in mapping.items() if v != t}
    if not mapping:
        return d
    vs = list(mapping)
    # a term mentioning a later variable would be caught by its quantifier:
    # go through fresh names first
    if any(set(term_vars(mapping[v])) & set(vs[i + 1:]) for i, v in enumerate(vs)):
        tmp = {v: fresh(v.type) for v in vs}
        return inst_thm(inst_thm(d, tmp), {tmp[v]: mapping[v] for v in vs})
    e = weaken(d, TOP)
    for v in reversed(vs):
        e = gen(e, v)
    for v in vs:
        e = syl(e, inst_ax(e.conclusion.right, mapping[v]))
    return close(e)


# ---------------------------------------------------------------- reasoning under a hypothesis


def hyp_of(d):
    return d.conclusion.left


def lift(d, H2):
    """Move H -> X to a context H2 of the form (...((H & A) & B)...)."""
    H = hyp_of(d)
    if H2 == H:
        return d
    if not isinstance(H2, And):
        raise ValueError("context does not extend the derivation's hypothesis")
    return syl(proj_ax(H2.left, H2.right, 0), lift(d, H2.left))


def assume(H, A):
    """(H & A) -> A."""
    return proj_ax(H, A, 1)


def c_mp(dA, dAB):
    H = hyp_of(dA)
    return syl(pair_r(ident(H), dA), uncurry(dAB))


def c_use(d, thm):
    """H -> A and |- A -> B give H -> B."""
    return syl(d, thm)


def c_proj(d, i: int):
    f = d.conclusion.right
    return syl(d, proj_ax(f.left, f.right, i))


def c_inst(d, t):
    return syl(d, inst_ax(d.conclusion.right, t))


def c_exintro(d, q: Exists, t):
    return syl(d, exintro_ax(q, t))


def permute(d):
    """H -> (A -> C) to A -> (H -> C)."""
    H, A = hyp_of(d), d.conclusion.right.left
    swap = pair_r(proj_ax(A, H, 1), proj_ax(A, H, 0))
    return curry(syl(swap, uncurry(d)))


def contract(d):
    """H -> (H -> C) to H -> C."""
    H = hyp_of(d)
    return syl(pair_r(ident(H), ident(H)), uncurry(d))


def c_cases(d, on_left, on_right):
    """Case split on H -> A | B; the handlers map a context H' (H & side)
    together with H' -> side to a derivation of H' -> C."""
    H, f = hyp_of(d), d.conclusion.right
    dA = on_left(And(H, f.left), assume(H, f.left))
    dB = on_right(And(H, f.right), assume(H, f.right))
    both = cases_r(permute(curry(dA)), permute(curry(dB)))
    return contract(syl(d, both))


def c_or_map(d, handler):
    """Case split on a right-nested disjunction E0 | (E1 | ... ); handler(i, H', H' -> Ei)."""
    def go(d, i):
        f = d.conclusion.right
        if not isinstance(f, Or):
            return handler(i, hyp_of(d), d)
        return c_cases(d, lambda H, e: handler(i, H, e), lambda H, e: go(e, i + 1))
    return go(d, 0)


def c_exelim(d, handler, x: Var):
    """From H -> exists x A and a derivation (H & A) -> C (x fresh) get H -> C."""
    H, A = hyp_of(d), d.conclusion.right.body
    dA = handler(And(H, A), assume(H, A))
    return contract(syl(d, exelim(permute(curry(dA)), x)))


# ---------------------------------------------------------------- equality


def refl_thm(t):
    u = fresh(sort_of(t), "r")
    return inst_thm(node(20, Eq(u.type, u, u)), {u: t})


def c_refl(H, t):
    return weaken(refl_thm(t), H)


def c_rewrite(d_eq, d_phi, template, z: Var):
    """H -> s = t and H -> template[s/z] give H -> template[t/z]."""
    e = d_eq.conclusion.right
    u, v = fresh(e.type, "u"), fresh(e.type, "v")
    lz = node(22, Imp(And(Eq(e.type, u, v), naive_subst(template, z, u)), naive_subst(template, z, v)))
    return syl(pair_r(d_eq, d_phi), inst_thm(lz, {u: e.lhs, v: e.rhs}))


def c_sym(d):
    H, e = hyp_of(d), d.conclusion.right
    z = fresh(e.type)
    return c_rewrite(d, c_refl(H, e.lhs), Eq(e.type, z, e.lhs), z)


def c_trans(d1, d2):
    e1 = d1.conclusion.right
    z = fresh(e1.type)
    return c_rewrite(d2, d1, Eq(e1.type, e1.lhs, z), z)


def c_chain(*ds):
    out = ds[0]
    for d in ds[1:]:
        out = c_trans(out, d)
    return out


def c_rw(d, t):
    """H -> s = s' and a term t containing s give H -> t = t[s'/s]."""
    H, e = hyp_of(d), d.conclusion.right
    z = fresh(e.type)
    ctx = replace_term(t, e.lhs, z)
    if z not in term_vars(ctx):
        raise ValueError("term does not contain the rewritten subterm")
    lhs = naive_subst_term(ctx, z, e.lhs)
    return c_rewrite(d, c_refl(H, lhs), Eq(sort_of(t), lhs, ctx), z)


def naive_subst_term(t, z, s):
    return subst_term(t, {z: s})


class Calc:
    """Equational reasoning under a fixed hypothesis H."""

    def __init__(self, H):
        self.H = H

    def thm(self, d, mapping=None):
        return weaken(inst_thm(d, mapping or {}), self.H)

    def step(self, t, d):
        """t = t' where d : H -> s = s' rewrites a subterm of t."""
        return c_rw(d, t)

    def calc(self, t, *ds):
        """Chain rewrites starting from t; returns H -> t = (final term)."""
        out, cur = None, t
        for d in ds:
            e = self.step(cur, d)
            cur = e.conclusion.right.rhs
            out = e if out is None else c_trans(out, e)
        return out


# ---------------------------------------------------------------- arithmetic lemmas


def _v(name):
    return Var(name, N)


X, Y, Zv, W, U, M = (_v(n) for n in ("x", "y", "z", "w", "u", "m"))
ONE = succ(Zero())


@lru_cache(maxsize=None)
def DEF():
    return {
        "sub0": defeq("sub(x,0) =N x"),
        "subS": defeq("sub(x,S(y)) =N pred(sub(x,y))"),
        "pred0": defeq("pred(0) =N 0"),
        "predS": defeq("pred(S(x)) =N x"),
        "add0": defeq("add(x,0) =N x"),
        "addS": defeq("add(x,S(y)) =N S(add(x,y))"),
        "max": defeq("max(x,y) =N add(x,sub(y,x))"),
        "lt": defeq("lt(x,y) =N sub(1,sub(S(x),y))"),
    }


def induct(x: Var, psi, base, step_fn):
    """psi(x) by induction; base : |- psi(0); step_fn(C) : C -> psi(S x) under C = psi(x)."""
    step = step_fn(Calc(psi))
    return node(19, psi, base, step, payload=x)


def _sym_thm(d):
    return close(c_sym(weaken(d, TOP)))


def _th(key, **m):
    return inst_thm(DEF()[key], {_v(k): v for k, v in m.items()})


@lru_cache(maxsize=None)
def lemma_sub_zero_left():
    """sub(0, y) = 0."""
    psi = Eq(N, prim("sub", Zero(), Y), Zero())

    def step(C):
        h = ident(C.H)
        return C.calc(prim("sub", Zero(), succ(Y)),
                      C.thm(DEF()["subS"], {X: Zero()}),
                      h,
                      C.thm(DEF()["pred0"]))
    return induct(Y, psi, _th("sub0", x=Zero()), step)


@lru_cache(maxsize=None)
def lemma_sub_succ():
    """sub(S x, S y) = sub(x, y)."""
    psi = Eq(N, prim("sub", succ(X), succ(Y)), prim("sub", X, Y))
    C0 = Calc(TOP)
    base = close(c_chain(
        C0.calc(prim("sub", succ(X), succ(Zero())),
                C0.thm(DEF()["subS"], {X: succ(X), Y: Zero()}),
                C0.thm(DEF()["sub0"], {X: succ(X)}),
                C0.thm(DEF()["predS"])),
        c_sym(C0.thm(DEF()["sub0"]))))

    def step(C):
        h = ident(C.H)
        return c_chain(
            C.calc(prim("sub", succ(X), succ(succ(Y))),
                   C.thm(DEF()["subS"], {X: succ(X), Y: succ(Y)}),
                   h),
            c_sym(C.thm(DEF()["subS"])))
    return induct(Y, psi, base, step)


@lru_cache(maxsize=None)
def lemma_sub_add():
    """sub(y, add(x, z)) = sub(sub(y, x), z)."""
    psi = Eq(N, prim("sub", Y, prim("add", X, Zv)), prim("sub", prim("sub", Y, X), Zv))
    C0 = Calc(TOP)
    base = close(c_chain(
        C0.calc(prim("sub", Y, prim("add", X, Zero())), C0.thm(DEF()["add0"])),
        c_sym(C0.thm(DEF()["sub0"], {X: prim("sub", Y, X)}))))

    def step(C):
        h = ident(C.H)
        return c_chain(
            C.calc(prim("sub", Y, prim("add", X, succ(Zv))),
                   C.thm(DEF()["addS"], {Y: Zv}),
                   C.thm(DEF()["subS"], {X: Y, Y: prim("add", X, Zv)}),
                   h),
            c_sym(C.thm(DEF()["subS"], {X: prim("sub", Y, X), Y: Zv})))
    return induct(Zv, psi, base, step)


@lru_cache(maxsize=None)
def lemma_sub_self():
    """sub(w, w) = 0."""
    psi = Eq(N, prim("sub", W, W), Zero())

    def step(C):
        return C.calc(prim("sub", succ(W), succ(W)),
                      C.thm(lemma_sub_succ(), {X: W, Y: W}),
                      ident(C.H))
    return induct(W, psi, _th("sub0", x=Zero()), step)


@lru_cache(maxsize=None)
def lemma_le_max_right():
    """sub(y, max(x, y)) = 0."""
    C = Calc(TOP)
    return close(C.calc(prim("sub", Y, prim("max", X, Y)),
                        C.thm(DEF()["max"]),
                        C.thm(lemma_sub_add(), {Zv: prim("sub", Y, X)}),
                        C.thm(lemma_sub_self(), {W: prim("sub", Y, X)})))


@lru_cache(maxsize=None)
def lemma_le_max_left():
    """sub(u, x) = 0 -> sub(u, max(x, y)) = 0."""
    H = Eq(N, prim("sub", U, X), Zero())
    C = Calc(H)
    d = C.calc(prim("sub", U, prim("max", X, Y)),
               C.thm(DEF()["max"]),
               C.thm(lemma_sub_add(), {Y: U, Zv: prim("sub", Y, X)}),
               ident(H),
               C.thm(lemma_sub_zero_left(), {Y: prim("sub", Y, X)}))
    return d


@lru_cache(maxsize=None)
def lemma_lt_succ_succ():
    """lt(S u, S m) = lt(u, m)."""
    C = Calc(TOP)
    return close(c_chain(
        C.calc(prim("lt", succ(U), succ(M)),
               C.thm(DEF()["lt"], {X: succ(U), Y: succ(M)}),
               C.thm(lemma_sub_succ(), {X: succ(U), Y: M})),
        c_sym(C.thm(DEF()["lt"], {X: U, Y: M}))))


@lru_cache(maxsize=None)
def lemma_lt_of_le():
    """sub(u, m) = 0 -> lt(u, S m) = 1."""
    H = Eq(N, prim("sub", U, M), Zero())
    C = Calc(H)
    return C.calc(prim("lt", U, succ(M)),
                  C.thm(DEF()["lt"], {X: U, Y: succ(M)}),
                  C.thm(lemma_sub_succ(), {X: U, Y: M}),
                  ident(H),
                  C.thm(DEF()["sub0"], {X: ONE}))


@lru_cache(maxsize=None)
def lemma_lt_zero():
    """lt(u, 0) = 0."""
    C = Calc(TOP)
    return close(C.calc(prim("lt", U, Zero()),
                        C.thm(DEF()["lt"], {X: U, Y: Zero()}),
                        C.thm(DEF()["sub0"], {X: succ(U)}),
                        C.thm(lemma_sub_succ(), {X: Zero(), Y: U}),
                        C.thm(lemma_sub_zero_left(), {Y: U})))


@lru_cache(maxsize=None)
def lemma_zero_lt_succ():
    """lt(0, S m) = 1."""
    C = Calc(TOP)
    return close(C.calc(prim("lt", Zero(), succ(M)),
                        C.thm(DEF()["lt"], {X: Zero(), Y: succ(M)}),
                        C.thm(lemma_sub_succ(), {X: Zero(), Y: M}),
                        C.thm(lemma_sub_zero_left(), {Y: M}),
                        C.thm(DEF()["sub0"], {X: ONE})))


@lru_cache(maxsize=None)
def lemma_zero_or_succ():
    """x = 0 | x = S(pred x)."""
    def Z(t):
        return Or(Eq(N, t, Zero()), Eq(N, t, succ(prim("pred", t))))
    base = mp(refl_thm(Zero()), inj_ax(Eq(N, Zero(), Zero()), Z(Zero()).right, 0))

    def step(C):
        e = C.calc(succ(prim("pred", succ(X))), C.thm(DEF()["predS"]))
        right = c_sym(e)
        return c_use(right, inj_ax(Z(succ(X)).left, Z(succ(X)).right, 1))
    return induct(X, Z(X), base, step)


# ---------------------------------------------------------------- bounded quantifier helpers


def below(t, a):
    """lt(t, a) = 1."""
    return Eq(N, prim("lt", t, a), ONE)


def disj_upto(t, a: int):
    """t = 0 | t = 1 | ... | t = a-1, right nested; FALSE when a = 0."""
    if a == 0:
        return FALSE
    out = Eq(N, t, num(a - 1))
    for k in range(a - 2, -1, -1):
        out = Or(Eq(N, t, num(k)), out)
    return out


def inject(D, k: int):
    """|- E_k -> D for a right-nested disjunction D."""
    if k == 0:
        return inj_ax(D.left, D.right, 0) if isinstance(D, Or) else ident(D)
    return syl(inject(D.right, k - 1), inj_ax(D.left, D.right, 1))


@lru_cache(maxsize=None)
def lemma_below_cases(a: int):
    """lt(x, a) = 1 -> x = 0 | ... | x = a-1."""
    H = below(X, num(a))
    if a == 0:
        return c_trans(c_sym(weaken(inst_thm(lemma_lt_zero(), {U: X}), H)), ident(H))
    D = disj_upto(X, a)
    split = weaken(inst_thm(lemma_zero_or_succ(), {}), H)

    def zero_case(H2, e):
        return c_use(e, inject(D, 0))

    def succ_case(H2, e):
        p = prim("pred", X)
        z = fresh()
        g = c_rewrite(e, lift(ident(H), H2), below(z, num(a)), z)
        shift = weaken(inst_thm(lemma_lt_succ_succ(), {U: p, M: num(a - 1)}), H2)
        g2 = c_trans(c_sym(shift), g)
        prev = c_mp(g2, weaken(inst_thm(lemma_below_cases(a - 1), {X: p}), H2))
        if a == 1:
            return c_use(prev, efq(D))

        def each(k, H3, ek):
            to_k = c_trans(lift(e, H3), c_rw(ek, succ(p)))
            return c_use(to_k, inject(D, k + 1))
        return c_or_map(prev, each)
    return c_cases(split, zero_case, succ_case)


@lru_cache(maxsize=None)
def lemma_below_numeral(k: int, a: int):
    """lt(k, a) = 1 for numerals k < a."""
    if not k < a:
        raise ValueError("needs k < a")
    C = Calc(TOP)
    steps = [C.thm(lemma_lt_succ_succ(), {U: num(j - 1), M: num(a - k + j - 1)}) for j in range(k, 0, -1)]
    steps.append(C.thm(lemma_zero_lt_succ(), {M: num(a - k - 1)}))
    return close(C.calc(prim("lt", num(k), num(a)), *steps))


# ---------------------------------------------------------------- collection


class PremiseFalse(ValueError):
    pass


def collection_formulas(a: int, phi, x: Var, y: Var):
    """(premise, conclusion, bound variable) of the collection instance."""
    b = Var("b", N)
    while b in (x, y) or b in free_vars(phi):
        b = Var(b.name + "'", N)
    P = Forall(x, Imp(below(x, num(a)), Exists(y, phi)))
    C = Exists(b, Forall(x, Imp(below(x, num(a)), Exists(y, And(below(y, b), phi)))))
    return P, C, b


def collection_derivation(a: int, phi, x: Var | None = None, y: Var | None = None) -> Derivation:
    """Derivation of premise -> conclusion for the collection instance at numeral a."""
    x = x or Var("x", N)
    y = y or Var("y", N)
    extra = [v for v in free_vars(phi) if v not in (x, y)]
    if extra or x.type != N or y.type != N:
        raise ValueError("phi may only mention the variables x and y of sort N")
    f = Var("f", Arrow(N, N))
    phi = rename_apart(phi, reserved=[x.name, y.name, f.name, "b"])
    P, C, b = collection_formulas(a, phi, x, y)
    G = below(x, num(a))
    phi_at = lambda s, t: naive_subst(naive_subst(phi, y, t), x, s) if s != x else naive_subst(phi, y, t)

    # P -> forall x exists y (G -> phi)
    AX = Forall(x, Exists(y, Imp(G, phi)))
    dec = weaken(inst_thm(node(21, Or(Eq(N, U, M), neg(Eq(N, U, M)))),
                          {U: prim("lt", x, num(a)), M: ONE}), P)

    def yes(H2, g):
        ex = c_mp(g, c_inst(lift(ident(P), H2), x))
        to = syl(curry(proj_ax(phi, G, 0)), exintro_ax(Exists(y, Imp(G, phi)), y))
        return c_use(ex, exelim(to, y))

    def no(H2, ng):
        at0 = curry(syl(uncurry(ng), efq(phi_at(x, Zero()))))
        return c_exintro(at0, Exists(y, Imp(G, phi)), Zero())
    d_ax = gen(c_cases(dec, yes, no), x)

    ac = node(24, Imp(AX, Exists(f, Forall(x, Imp(G, phi_at(x, App(f, x)))))))
    Hf = ac.conclusion.right.body

    # the bound 1 + max(f 0, ..., f (a-1))
    Ms = [Zero()]
    for k in range(a):
        Ms.append(prim("max", Ms[-1], App(f, num(k))))
    bound = succ(Ms[a])
    goal = lambda s: Exists(y, And(below(y, bound), phi_at(s, y)))

    def witness(k):
        fk = App(f, num(k))
        got = c_mp(weaken(lemma_below_numeral(k, a), Hf), c_inst(ident(Hf), num(k)))
        le = inst_thm(lemma_le_max_right(), {X: Ms[k], Y: fk})
        for j in range(k + 1, a):
            le = mp(le, inst_thm(lemma_le_max_left(), {U: fk, X: Ms[j], Y: App(f, num(j))}))
        lt = mp(le, inst_thm(lemma_lt_of_le(), {U: fk, M: Ms[a]}))
        both = pair_r(weaken(lt, Hf), got)
        return c_exintro(both, goal(num(k)), fk)

    K = And(Hf, G)
    cases = c_mp(assume(Hf, G), weaken(inst_thm(lemma_below_cases(a), {X: x}), K))
    if a == 0:
        body = c_use(cases, efq(goal(x)))
    else:
        wits = [witness(k) for k in range(a)]

        def each(k, H3, ek):
            z = fresh()
            back = c_sym(ek)
            return c_rewrite(back, lift(wits[k], H3), goal(z), z)
        body = c_or_map(cases, each)
    d_c = c_exintro(gen(curry(body), x), C, bound)
    return syl(syl(d_ax, ac), exelim(d_c, f))
