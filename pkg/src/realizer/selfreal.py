"""First-order formulas realize themselves over a condition set keyed by
subformulas.

Every ∨- and ∃-subformula φ_j with variables n_1..n_k owns the oracle keys
⟨j, n_1, ..., n_k⟩ (see ``key``).  A condition belongs to T when each key
it defines names a true disjunct (value 0 or 1) or a true witness.  The
self-realizing index reads tags and witnesses off the oracle; everything
else in the realizer is forced by the shape of the formula.

Truth is decided by a bounded evaluator: quantifiers range over 0..Q, and
answers that the bound could have changed come back as Exhausted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from functools import lru_cache
from typing import Mapping, Sequence

from .codes import EMPTY, Oracle, Value, apply_many, pair, unpair
from .heo import ALL, HOLDS, ForcingUniverse, Verdict, exhausted, fails
from .proofkit import PremiseFalse  # noqa: F401  (re-exported)
from .lam import Ask, Const, If0, V, ap, lam, number, op, tup
from .realizability import check_pair, check_single, realizer_candidates
from .syntax import (And, App, Eq, Exists, Forall, HeoConst, Imp, NotFirstOrder, Or, PrimFn,
                     Succ, Var, Zero, free_vars, is_first_order, show, subformula_table)
from .syntax import SIGNATURE


class OracleInconclusive(RuntimeError):
    """Bounded truth could not decide an instance that the construction needs."""


# ---------------------------------------------------------------- keys


def seq(ns: Sequence[int]) -> int:
    """Length-free list code: [] -> 0, [n, *rest] -> 1 + <n, rest>."""
    out = 0
    for n in reversed(list(ns)):
        out = 1 + pair(n, out)
    return out


def unseq(s: int, limit: int) -> tuple[int, ...] | None:
    """Inverse of seq; None when the list is longer than ``limit``."""
    out = []
    while s:
        if len(out) == limit:
            return None
        n, s = unpair(s - 1)
        out.append(n)
    return tuple(out)


def key(j: int, ns: Sequence[int]) -> int:
    """Oracle key of subformula j at the numerals ns."""
    return pair(j, seq(ns))


def _seq_expr(args: list):
    out = Const(0)
    for a in reversed(args):
        out = op("S", tup(a, out))
    return out


def _key_expr(j: int, args: list):
    return tup(Const(j), _seq_expr(args))


# ---------------------------------------------------------------- bounded truth


def _term(t, env: Mapping[Var, int]) -> int:
    if isinstance(t, Var):
        return env[t]
    if isinstance(t, Zero):
        return 0
    if isinstance(t, HeoConst):
        return t.index
    if isinstance(t, App) and isinstance(t.fn, Succ):
        return _term(t.arg, env) + 1
    if isinstance(t, PrimFn):
        return SIGNATURE[t.symbol][1](*(_term(a, env) for a in t.args))
    raise NotFirstOrder(f"not a first-order term: {t!r}")


def _guard_bound(x: Var, g, env) -> int | None:
    """If g is lt(x,t)=1 (either side) or x=t with x not in t, the number of
    values of x that can satisfy g starts at 0 and stops below the returned
    bound.  Otherwise None."""
    if not isinstance(g, Eq):
        return None
    for lhs, rhs in ((g.lhs, g.rhs), (g.rhs, g.lhs)):
        if isinstance(lhs, PrimFn) and lhs.symbol == "lt" and lhs.args[0] == x \
                and _closed_in(lhs.args[1], x) and _closed_in(rhs, x) and _term(rhs, env) == 1:
            return _term(lhs.args[1], env)
        if lhs == x and _closed_in(rhs, x):
            return _term(rhs, env) + 1
    return None


def _closed_in(t, x: Var) -> bool:
    """t does not mention x."""
    if t == x:
        return False
    if isinstance(t, App):
        return _closed_in(t.fn, x) and _closed_in(t.arg, x)
    if isinstance(t, PrimFn):
        return all(_closed_in(a, x) for a in t.args)
    return True


def _env_key(f, env: Mapping[Var, int]) -> tuple:
    return tuple((v, env[v]) for v in _fv(f))


@lru_cache(maxsize=None)
def _fv(f) -> tuple:
    return tuple(free_vars(f))


def _kleene_and(a: Verdict, b: Verdict) -> Verdict:
    if a.fails:
        return a
    if b.fails:
        return b
    return a if a.exhausted else b


def _kleene_or(a: Verdict, b: Verdict) -> Verdict:
    if a.holds or b.holds:
        return HOLDS
    if a.exhausted:
        return a
    if b.exhausted:
        return b
    return fails(f"{a.reason}; {b.reason}")


@lru_cache(maxsize=500_000)
def _truth(f, env_items: tuple, Q: int) -> Verdict:
    env = dict(env_items)
    if isinstance(f, Eq):
        x, y = _term(f.lhs, env), _term(f.rhs, env)
        return HOLDS if x == y else fails(f"{x} != {y}")
    if isinstance(f, And):
        a = _sub(f.left, env, Q)
        return a if a.fails else _kleene_and(a, _sub(f.right, env, Q))
    if isinstance(f, Or):
        a = _sub(f.left, env, Q)
        return HOLDS if a.holds else _kleene_or(a, _sub(f.right, env, Q))
    if isinstance(f, Imp):
        a = _sub(f.left, env, Q)
        if a.fails:
            return HOLDS
        b = _sub(f.right, env, Q)
        if b.holds:
            return HOLDS
        if a.holds and b.fails:
            return fails(f"premise true, conclusion false: {b.reason}")
        return exhausted(a.reason if a.exhausted else b.reason)
    x, body = f.var, f.body
    guard = None
    if isinstance(f, Forall) and isinstance(body, Imp):
        guard = _guard_bound(x, body.left, env)
    if isinstance(f, Exists) and isinstance(body, And):
        guard = _guard_bound(x, body.left, env)
        if guard is None:
            guard = _guard_bound(x, body.right, env)
    top = Q + 1 if guard is None else min(guard, Q + 1)
    exact = guard is not None and guard <= Q + 1
    pending = None
    for n in range(top):
        v = _sub(body, {**env, x: n}, Q)
        if isinstance(f, Exists) and v.holds:
            return HOLDS
        if isinstance(f, Forall) and v.fails:
            return fails(f"{x.name}={n}: {v.reason}")
        if v.exhausted and pending is None:
            pending = v
    if pending is not None:
        return pending
    if exact:
        return HOLDS if isinstance(f, Forall) else fails(f"no {x.name} below {guard}")
    if isinstance(f, Forall):
        return exhausted(f"holds up to {Q}")
    return exhausted(f"no witness up to {Q}")


def _sub(f, env, Q) -> Verdict:
    return _truth(f, _env_key(f, env), Q)


def truth_eval(phi, Q: int = 20, env: Mapping[Var, int] | None = None) -> Verdict:
    """Bounded truth of a first-order formula (closed, or closed by env).

    Quantifiers range over 0..Q.  A quantifier guarded by lt(x,t)=1 or
    x=t is searched exactly below its bound; an unguarded ∀ with no
    counterexample or ∃ with no witness is Exhausted.
    """
    if not is_first_order(phi):
        raise NotFirstOrder(f"not first-order: {show(phi)}")
    env = dict(env or {})
    missing = [v.name for v in free_vars(phi) if v not in env]
    if missing:
        raise ValueError(f"free variables without values: {missing}")
    return _sub(phi, env, Q)


# ---------------------------------------------------------------- the condition set T


@dataclass(frozen=True)
class Entry:
    index: int
    formula: object
    vars: tuple
    children: tuple  # table indices of immediate subformulas


def _table(phi) -> tuple[Entry, ...]:
    raw = subformula_table(phi)
    sizes = [0] * len(raw)
    for e in reversed(raw):
        f = e.formula
        if isinstance(f, (And, Or, Imp)):
            left = e.index + 1
            sizes[e.index] = 1 + sizes[left] + sizes[left + sizes[left]]
        elif isinstance(f, (Exists, Forall)):
            sizes[e.index] = 1 + sizes[e.index + 1]
        else:
            sizes[e.index] = 1
    out = []
    for e in raw:
        f, j = e.formula, e.index
        if isinstance(f, (And, Or, Imp)):
            kids = (j + 1, j + 1 + sizes[j + 1])
        elif isinstance(f, (Exists, Forall)):
            kids = (j + 1,)
        else:
            kids = ()
        out.append(Entry(j, f, e.vars, kids))
    return tuple(out)


@dataclass(frozen=True)
class TDescription:
    """The condition set T of a closed first-order sentence, product-shaped
    so that it can serve as a universe's ``tset``."""
    phi: object
    Q: int = 20
    table: tuple = field(init=False, compare=False, repr=False)

    name = "selfreal"

    def __post_init__(self):
        if free_vars(self.phi):
            raise ValueError("T is defined for sentences")
        if not is_first_order(self.phi):
            raise NotFirstOrder(f"not first-order: {show(self.phi)}")
        object.__setattr__(self, "table", _table(self.phi))

    def entry_of(self, k: int) -> tuple[Entry, tuple[int, ...]] | None:
        """The subformula and numerals a key stands for, if it is a
        well-formed ∨/∃ key."""
        j, s = unpair(k)
        if j >= len(self.table):
            return None
        e = self.table[j]
        if not isinstance(e.formula, (Or, Exists)):
            return None
        ns = unseq(s, len(e.vars))
        if ns is None or len(ns) != len(e.vars):
            return None  # wrong tuple length: forbidden
        return e, ns

    def truth(self, f, vars_, ns) -> Verdict:
        return _sub(f, dict(zip(vars_, ns)), self.Q)

    def _decided(self, v: Verdict, what) -> bool:
        if v.exhausted:
            raise OracleInconclusive(f"truth of {what} undecided at Q={self.Q}: {v.reason}")
        return v.holds

    def allowed(self, k: int, val_bound: int) -> tuple[int, ...]:
        got = self.entry_of(k)
        if got is None:
            return ()
        e, ns = got
        f = e.formula
        if isinstance(f, Or):
            return tuple(i for i, side in enumerate((f.left, f.right))
                         if self._decided(self.truth(side, e.vars, ns), show(side)))
        return tuple(w for w in range(val_bound + 1)
                     if self._decided(self.truth(f.body, e.vars + (f.var,), ns + (w,)), show(f.body)))

    def admits(self, k: int, v: int) -> bool:
        got = self.entry_of(k)
        if got is None:
            return False
        e, ns = got
        f = e.formula
        if isinstance(f, Or):
            if v not in (0, 1):
                return False
            side = f.right if v else f.left
            return self._decided(self.truth(side, e.vars, ns), show(side))
        return self._decided(self.truth(f.body, e.vars + (f.var,), ns + (v,)), show(f.body))

    def contains(self, p: Mapping[int, int]) -> bool:
        return all(self.admits(k, v) for k, v in p.items())


def t_membership(p: Mapping[int, int], T: TDescription) -> bool:
    """p ∈ T; raises OracleInconclusive when a needed instance is undecided."""
    return T.contains(p)


# ---------------------------------------------------------------- the self-realizing index


def _body(table, j: int, args: list):
    e = table[j]
    f = e.formula
    if isinstance(f, Eq):
        return Const(0)
    if isinstance(f, And):
        return tup(_body(table, e.children[0], args), _body(table, e.children[1], args))
    if isinstance(f, Or):
        t = f"#t{j}"
        return ap(lam(t, tup(V(t), If0(V(t), _body(table, e.children[0], args),
                                        _body(table, e.children[1], args)))),
                  Ask(_key_expr(j, args)))
    if isinstance(f, Imp):
        return lam(f"#b{j}", _body(table, e.children[1], args))
    w = f"#w{j}"
    if isinstance(f, Exists):
        return ap(lam(w, tup(V(w), _body(table, e.children[0], args + [V(w)]))),
                  Ask(_key_expr(j, args)))
    return lam(w, _body(table, e.children[0], args + [V(w)]))


def _index(table, j: int) -> int:
    k = len(table[j].vars)
    names = [f"#n{i}" for i in range(k)] or ["#dummy"]
    return number(lam(*names, _body(table, j, [V(x) for x in names[:k]])))


def self_indices(phi) -> list[int]:
    """Sub-index a_j for every table entry; a_j takes max(k_j, 1) numerals."""
    if not is_first_order(phi):
        raise NotFirstOrder(f"not first-order: {show(phi)}")
    table = _table(phi)
    return [_index(table, j) for j in range(len(table))]


def self_index(phi) -> int:
    """The index a with a^p n_1..n_k realizing phi(n̄) whenever p ∈ T has
    the ∨/∃ keys the construction asks for; a sentence takes a dummy 0."""
    if not is_first_order(phi):
        raise NotFirstOrder(f"not first-order: {show(phi)}")
    return _index(_table(phi), 0)


def table_of(phi) -> tuple[Entry, ...]:
    return _table(phi)


def realizer_under(a: int, phi, q: Mapping[int, int], args: Sequence[int] = (),
                   fuel: int = 100_000):
    """a^q applied to the numerals (or the dummy 0 for a sentence)."""
    return apply_many(a, list(args) or [0], q, fuel)


# ---------------------------------------------------------------- realize true sentences


def _fill(T: TDescription, j: int, ns: tuple, q: dict) -> None:
    e = T.table[j]
    f = e.formula
    if isinstance(f, And):
        _fill(T, e.children[0], ns, q)
        _fill(T, e.children[1], ns, q)
    elif isinstance(f, Or):
        k = key(j, ns)
        if k not in q:
            tags = [i for i, side in enumerate((f.left, f.right))
                    if T.truth(side, e.vars, ns).holds]
            if not tags:
                raise OracleInconclusive(f"neither disjunct of {show(f)} is known true at {ns}")
            q[k] = tags[0]
        _fill(T, e.children[q[k]], ns, q)
    elif isinstance(f, Exists):
        k = key(j, ns)
        if k not in q:
            ws = [w for w in range(T.Q + 1)
                  if T.truth(f.body, e.vars + (f.var,), ns + (w,)).holds]
            if not ws:
                raise OracleInconclusive(f"no witness up to {T.Q} for {show(f)} at {ns}")
            q[k] = ws[0]
        _fill(T, e.children[0], ns + (q[k],), q)


def saturate(phi, p: Mapping[int, int] | None = None, nums: Sequence[int] = (0, 1, 2, 3, 4),
             Q: int = 20) -> Oracle:
    """Like the filling done by realize_true, but also under ∀ (for each n in
    nums) and in the conclusion of an implication whose premise is true, so
    that the realizer's later queries at those numerals are answered too."""
    T = TDescription(phi, Q)
    q = dict(p or {})

    def go(j, ns):
        e = T.table[j]
        f = e.formula
        if isinstance(f, And):
            go(e.children[0], ns)
            go(e.children[1], ns)
        elif isinstance(f, Imp):
            if T.truth(f.left, e.vars, ns).holds:
                go(e.children[1], ns)
        elif isinstance(f, Forall):
            for n in nums:
                go(e.children[0], ns + (n,))
        elif isinstance(f, Or):
            k = key(j, ns)
            if k not in q:
                tags = [i for i, side in enumerate((f.left, f.right))
                        if T.truth(side, e.vars, ns).holds]
                if not tags:
                    return
                q[k] = tags[0]
            go(e.children[q[k]], ns)
        elif isinstance(f, Exists):
            k = key(j, ns)
            if k not in q:
                ws = [w for w in range(Q + 1) if T.truth(f.body, e.vars + (f.var,), ns + (w,)).holds]
                if not ws:
                    return
                q[k] = ws[0]
            go(e.children[0], ns + (q[k],))

    go(0, ())
    return Oracle(q)


def realize_true(phi, p: Mapping[int, int] | None = None, U: ForcingUniverse | None = None,
                 Q: int = 20) -> tuple[Oracle, int]:
    """Extend p to q ∈ T holding the tags and least witnesses a true sentence
    needs, and return q with the realizer a^q 0.

    ``U`` is only consulted for its val_bound: a witness above it is an error
    because q would not be a condition of U.
    """
    p = Oracle(p or {})
    T = TDescription(phi, Q)
    v = truth_eval(phi, Q)
    if v.fails:
        raise PremiseFalse(f"{show(phi)} is false: {v.reason}")
    if v.exhausted:
        raise OracleInconclusive(f"truth of {show(phi)} undecided at Q={Q}: {v.reason}")
    if not T.contains(p):
        raise ValueError(f"{p} is not in T")
    q = dict(p)
    _fill(T, 0, (), q)
    q = Oracle(q)
    if U is not None:
        over = {k: w for k, w in q.items() if w > U.val_bound}
        if over:
            raise ValueError(f"witnesses {over} exceed val_bound {U.val_bound}")
    r = realizer_under(self_index(phi), phi, q)
    if not isinstance(r, Value):
        raise OracleInconclusive(f"self-realizer did not evaluate under {q}: {r}")
    return q, r.n


def auto_universe(phi, num_set: Sequence[int] = (0, 1, 2, 3), Q: int = 20,
                  fuel: int = 100_000, val_bound: int | None = None,
                  max_keys: int = 20_000) -> ForcingUniverse:
    """A universe for checking the self-realizer of a sentence.

    ∀-bound variables range over num_set and ∃-bound ones over 0..val_bound;
    the key set holds every ∨/∃ key the realizer can ask for under those
    ranges (antecedents of implications are never consulted).  With
    val_bound=None the least bound is found that leaves every reachable true
    ∃-instance a witness.
    """
    T = TDescription(phi, Q)
    nums = tuple(sorted(set(num_set)))

    def reach(vb: int):
        keys, need = set(), 0
        stack = [(0, ())]
        seen = set()
        while stack:
            j, ns = stack.pop()
            if (j, ns) in seen:
                continue
            seen.add((j, ns))
            e = T.table[j]
            f = e.formula
            if isinstance(f, (And, Or)):
                kids = e.children
                if isinstance(f, Or):
                    keys.add(key(j, ns))
                    kids = [c for i, c in enumerate(e.children)
                            if T.truth((f.left, f.right)[i], e.vars, ns).holds]
                stack += [(c, ns) for c in kids]
            elif isinstance(f, Imp):
                stack.append((e.children[1], ns))
            elif isinstance(f, Forall):
                stack += [(e.children[0], ns + (n,)) for n in nums]
            elif isinstance(f, Exists):
                keys.add(key(j, ns))
                ws = [w for w in range(Q + 1)
                      if T.truth(f.body, e.vars + (f.var,), ns + (w,)).holds]
                if ws:
                    need = max(need, ws[0])
                stack += [(e.children[0], ns + (w,)) for w in ws if w <= vb]
            if len(keys) > max_keys:
                raise ValueError(f"more than {max_keys} keys; shrink num_set")
        return keys, need

    vb = max(nums) if val_bound is None else val_bound
    for _ in range(Q + 2):
        keys, need = reach(vb)
        if val_bound is not None or need <= vb:
            break
        vb = need
    else:  # pragma: no cover - bounded by Q
        raise ValueError("no stable val_bound")
    return ForcingUniverse(key_set=tuple(sorted(keys)), val_bound=vb, num_set=nums,
                           fuel=fuel, tset=T)


def check_self_realization(phi, q: Mapping[int, int], realizer: int,
                           U: ForcingUniverse | None = None) -> Verdict:
    """check_single of the realizer at q, in U or in the automatic universe."""
    U = U or auto_universe(phi)
    return check_single(U, q, realizer, phi)


def truth_from_realizer(phi, p: Mapping[int, int], a: int, b: int, U: ForcingUniverse,
                        Q: int | None = None) -> Verdict:
    """Run check_pair and bounded truth side by side.

    Holds: they agree (the pair does not check, or it checks and the
    sentence is true).  Fails: the pair checks but the sentence is false.
    Exhausted: the check itself was inconclusive.
    """
    if Q is None:
        Q = U.tset.Q if isinstance(U.tset, TDescription) else 20
    if isinstance(U.tset, TDescription) and not U.tset.contains(p):
        raise ValueError(f"{dict(p)} is not in T")
    r = check_pair(U, p, a, b, phi)
    if not r.holds:
        return r if r.exhausted else HOLDS
    t = truth_eval(phi, Q)
    if t.exhausted:
        raise OracleInconclusive(f"pair checks but truth is undecided: {t.reason}")
    if t.fails:
        return fails(f"pair checks at {dict(p)} yet {show(phi)} is false ({t.reason})")
    return HOLDS


@dataclass
class RoundTrip:
    phi: object
    truth: Verdict
    q: Oracle | None = None
    realizer: int | None = None
    check: Verdict | None = None  # realizer verified at q
    back: Verdict | None = None  # truth_from_realizer at q

    @property
    def ok(self) -> bool:
        if self.truth.holds:
            return bool(self.check and self.check.holds and self.back and self.back.holds)
        return self.truth.fails and self.q is None


def round_trip(phi, Q: int = 20, U: ForcingUniverse | None = None,
               num_set: Sequence[int] = (0, 1, 2, 3)) -> RoundTrip:
    """Truth -> realizer -> check -> truth, for one sentence."""
    t = truth_eval(phi, Q)
    out = RoundTrip(phi, t)
    if not t.holds:
        return out
    U = U or auto_universe(phi, num_set, Q)
    q, r = realize_true(phi, EMPTY, U, Q)
    out.q, out.realizer = q, r
    out.check = check_single(U, q, r, phi)
    out.back = truth_from_realizer(phi, q, r, r, U, Q)
    return out


# ---------------------------------------------------------------- refutation


def sentence_keys(phi, nums: Sequence[int] = (0, 1, 2, 3, 4), limit: int = 8) -> list[int]:
    """The ∨/∃ keys of a sentence with numerals drawn from nums, shallowest
    subformulas first, at most ``limit`` of them."""
    out = []
    for e in _table(phi):
        if isinstance(e.formula, (Or, Exists)):
            out += [key(e.index, ns) for ns in product(nums, repeat=len(e.vars))]
    return list(dict.fromkeys(out))[:limit]


@dataclass
class Refutation:
    phi: object
    universes: int = 0
    pairs: int = 0  # (condition, realizer) pairs checked
    exhausted: int = 0
    found: list = field(default_factory=list)  # (keys, p, a) whose check Holds

    @property
    def ok(self) -> bool:
        return not self.found


def refute(phi, max_keys: int = 2, val_bound: int = 4, key_limit: int = 6,
           num_set: Sequence[int] = (0, 1, 2, 3, 4), fuel: int = 20_000, cap: int = 8,
           Q: int = 20) -> Refutation:
    """Search for a realizer of a false sentence and report any that checks.

    Universes: every set of at most ``max_keys`` keys among the sentence's own
    ∨/∃ keys, values up to val_bound, all conditions allowed.  Realizers:
    the generic candidates plus the self-index run under each condition.
    """
    if not truth_eval(phi, Q).fails:
        raise ValueError(f"{show(phi)} is not false at Q={Q}")
    keys = sentence_keys(phi, range(val_bound + 1), key_limit)
    generic = realizer_candidates(phi, num_set, cap=cap)
    a_phi = self_index(phi)
    out = Refutation(phi)
    for size in range(max_keys + 1):
        for ks in combinations(keys, size):
            U = ForcingUniverse(key_set=ks, val_bound=val_bound, num_set=num_set,
                                fuel=fuel, tset=ALL, cap=cap)
            out.universes += 1
            for p in U.conditions():
                cands = list(generic)
                r = realizer_under(a_phi, phi, p)
                if isinstance(r, Value) and r.n not in cands:
                    cands.append(r.n)
                for a in cands:
                    out.pairs += 1
                    v = truth_from_realizer(phi, p, a, a, U, Q)
                    if v.exhausted:
                        out.exhausted += 1
                    elif v.fails:
                        out.found.append((ks, dict(p), a))
    return out
