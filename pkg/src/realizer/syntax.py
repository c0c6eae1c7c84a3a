"""Object language: finite types, terms, formulas and their concrete syntax."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

# ---------------------------------------------------------------- errors


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int = -1, text: str = ""):
        self.pos = pos
        where = f" at position {pos}" if pos >= 0 else ""
        super().__init__(f"{msg}{where}" + (f": {text!r}" if text else ""))


class SortError(ValueError):
    pass


class NotFirstOrder(ValueError):
    pass


class UnboundVariable(ValueError):
    pass


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class Nat:
    def __str__(self):
        return "N"


@dataclass(frozen=True)
class Prod:
    left: "Type"
    right: "Type"

    def __str__(self):
        return show_type(self)


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __str__(self):
        return show_type(self)


@dataclass(frozen=True)
class TVar:
    """Inference placeholder; never survives parsing."""
    id: int


Type = Union[Nat, Prod, Arrow]
N = Nat()


def arrows(*ts: Type) -> Type:
    """arrows(A, B, C) = A -> B -> C."""
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Arrow(t, out)
    return out


def prods(*ts: Type) -> Type:
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Prod(t, out)
    return out


def show_type(t) -> str:
    if isinstance(t, Nat):
        return "N"
    if isinstance(t, TVar):
        return f"?{t.id}"
    if isinstance(t, Prod):
        left = show_type(t.left)
        if isinstance(t.left, (Prod, Arrow)):
            left = f"({left})"
        right = show_type(t.right)
        if isinstance(t.right, Arrow):
            right = f"({right})"
        return f"{left}*{right}"
    left = show_type(t.dom)
    if isinstance(t.dom, Arrow):
        left = f"({left})"
    return f"{left}->{show_type(t.cod)}"


def type_depth(t: Type) -> int:
    if isinstance(t, Nat):
        return 0
    if isinstance(t, Prod):
        return max(type_depth(t.left), type_depth(t.right))
    return 1 + max(type_depth(t.dom), type_depth(t.cod))


# ---------------------------------------------------------------- signature
# Primitive recursive function symbols: built-in evaluators plus the
# defining equations accepted as axiom instances.


def _sub(x, y):
    return x - y if x > y else 0


PRIM_EVAL: dict[str, tuple[int, Callable[..., int]]] = {
    "S": (1, lambda x: x + 1),
    "succ": (1, lambda x: x + 1),
    "pred": (1, lambda x: x - 1 if x else 0),
    "add": (2, lambda x, y: x + y),
    "mul": (2, lambda x, y: x * y),
    "sub": (2, _sub),
    "eq": (2, lambda x, y: 1 if x == y else 0),
    "lt": (2, lambda x, y: 1 if x < y else 0),
    "max": (2, lambda x, y: x if x > y else y),
}

# term-level function symbols (S is the type N->N constant, not a symbol)
SIGNATURE = {k: v for k, v in PRIM_EVAL.items() if k != "S"}

DEFINING_EQUATIONS: dict[str, tuple[str, ...]] = {
    "succ": ("succ(x) =N S(x)",),
    "pred": ("pred(0) =N 0", "pred(S(x)) =N x"),
    "add": ("add(x,0) =N x", "add(x,S(y)) =N S(add(x,y))"),
    "mul": ("mul(x,0) =N 0", "mul(x,S(y)) =N add(mul(x,y),x)"),
    "sub": ("sub(x,0) =N x", "sub(x,S(y)) =N pred(sub(x,y))"),
    "eq": ("eq(x,y) =N sub(1,add(sub(x,y),sub(y,x)))",),
    "lt": ("lt(x,y) =N sub(1,sub(S(x),y))",),
    "max": ("max(x,y) =N add(x,sub(y,x))",),
}

# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str
    type: Type = N

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Succ:
    """The constant S : N -> N."""


@dataclass(frozen=True)
class PrimFn:
    symbol: str
    args: tuple

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class CombK:
    a: Type
    b: Type


@dataclass(frozen=True)
class CombS:
    a: Type
    b: Type
    c: Type


@dataclass(frozen=True)
class Rec:
    a: Type


@dataclass(frozen=True)
class PairC:
    a: Type
    b: Type


@dataclass(frozen=True)
class Proj0:
    a: Type
    b: Type


@dataclass(frozen=True)
class Proj1:
    a: Type
    b: Type


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class HeoConst:
    index: int
    type: Type


Term = Union[Var, Zero, Succ, PrimFn, CombK, CombS, Rec, PairC, Proj0, Proj1, App, HeoConst]
CONSTANTS = (Zero, Succ, CombK, CombS, Rec, PairC, Proj0, Proj1)


def const_type(t) -> Type:
    if isinstance(t, Zero):
        return N
    if isinstance(t, Succ):
        return Arrow(N, N)
    if isinstance(t, CombK):
        return arrows(t.a, t.b, t.a)
    if isinstance(t, CombS):
        a, b, c = t.a, t.b, t.c
        return arrows(arrows(a, b, c), arrows(a, b), a, c)
    if isinstance(t, Rec):
        return arrows(t.a, arrows(t.a, N, t.a), N, t.a)
    if isinstance(t, PairC):
        return arrows(t.a, t.b, Prod(t.a, t.b))
    if isinstance(t, Proj0):
        return Arrow(Prod(t.a, t.b), t.a)
    if isinstance(t, Proj1):
        return Arrow(Prod(t.a, t.b), t.b)
    raise TypeError(t)


@lru_cache(maxsize=None)
def sort_of(t) -> Type:
    """The unique sort of a well-formed term; SortError otherwise."""
    if isinstance(t, Var):
        return t.type
    if isinstance(t, HeoConst):
        return t.type
    if isinstance(t, PrimFn):
        if t.symbol not in SIGNATURE:
            raise SortError(f"unknown function symbol {t.symbol}")
        if len(t.args) != SIGNATURE[t.symbol][0]:
            raise SortError(f"{t.symbol} takes {SIGNATURE[t.symbol][0]} arguments")
        for a in t.args:
            if sort_of(a) != N:
                raise SortError(f"argument of {t.symbol} must have sort N")
        return N
    if isinstance(t, App):
        f = sort_of(t.fn)
        if not isinstance(f, Arrow):
            raise SortError(f"applying a term of sort {show_type(f)}")
        if sort_of(t.arg) != f.dom:
            raise SortError(f"argument sort {show_type(sort_of(t.arg))} does not match {show_type(f.dom)}")
        return f.cod
    return const_type(t)


def app(f, *args):
    for a in args:
        f = App(f, a)
    return f


def succ(t):
    return App(Succ(), t)


def numeral(n: int):
    t = Zero()
    for _ in range(n):
        t = succ(t)
    return t


def numeral_value(t) -> int | None:
    n = 0
    while isinstance(t, App) and isinstance(t.fn, Succ):
        t, n = t.arg, n + 1
    return n if isinstance(t, Zero) else None


def term_children(t) -> tuple:
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, PrimFn):
        return t.args
    return ()


def term_vars(t, out: list | None = None) -> list:
    """Variables of t in order of first occurrence."""
    out = [] if out is None else out
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            if x not in out:
                out.append(x)
        else:
            stack.extend(reversed(term_children(x)))
    return out


def has_heo(t) -> bool:
    if isinstance(t, HeoConst):
        return True
    return any(has_heo(c) for c in term_children(t))


def is_first_order_term(t) -> bool:
    if isinstance(t, Var):
        return t.type == N
    if isinstance(t, Zero):
        return True
    if isinstance(t, HeoConst):
        return t.type == N
    if isinstance(t, App):
        return isinstance(t.fn, Succ) and is_first_order_term(t.arg)
    if isinstance(t, PrimFn):
        return all(is_first_order_term(a) for a in t.args)
    return False


def subst_term(t, mapping: Mapping):
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, App):
        return App(subst_term(t.fn, mapping), subst_term(t.arg, mapping))
    if isinstance(t, PrimFn):
        return PrimFn(t.symbol, tuple(subst_term(a, mapping) for a in t.args))
    return t


def eval_first_order(t) -> int:
    """Standard-model value of a closed first-order term."""
    stack, out = [(t, False)], []
    while stack:
        x, done = stack.pop()
        if isinstance(x, Zero):
            out.append(0)
        elif isinstance(x, HeoConst):
            out.append(x.index)
        elif isinstance(x, Var):
            raise UnboundVariable(f"free variable {x.name} in a closed term")
        elif isinstance(x, App) and isinstance(x.fn, Succ):
            if done:
                out.append(out.pop() + 1)
            else:
                stack += [(x, True), (x.arg, False)]
        elif isinstance(x, PrimFn):
            if done:
                k = len(x.args)
                vals = out[len(out) - k:]
                del out[len(out) - k:]
                out.append(SIGNATURE[x.symbol][1](*vals))
            else:
                stack.append((x, True))
                stack.extend((a, False) for a in reversed(x.args))
        else:
            raise NotFirstOrder(f"not a first-order term: {show_term(x)}")
    return out[0]


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Eq:
    type: Type
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"

    @property
    def type(self) -> Type:
        return self.var.type


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"

    @property
    def type(self) -> Type:
        return self.var.type


Formula = Union[Eq, And, Or, Imp, Exists, Forall]
BINARY = (And, Or, Imp)
QUANT = (Exists, Forall)

FALSE = Eq(N, Zero(), succ(Zero()))


def neg(phi):
    return Imp(phi, FALSE)


def check_formula(phi) -> None:
    """Sort-check every atom; raise SortError on mismatch."""
    for f in walk(phi):
        if isinstance(f, Eq):
            for side in (f.lhs, f.rhs):
                if sort_of(side) != f.type:
                    raise SortError(f"{show_term(side)} has sort {show_type(sort_of(side))}, "
                                    f"expected {show_type(f.type)}")


def walk(phi) -> Iterator:
    """Subformulas in preorder."""
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        if isinstance(f, BINARY):
            stack += [f.right, f.left]
        elif isinstance(f, QUANT):
            stack.append(f.body)


def free_vars(phi) -> list:
    """Free variables in order of first occurrence (the canonical order)."""
    out: list = []

    def go(f, bound):
        if isinstance(f, Eq):
            for v in term_vars(f.lhs) + term_vars(f.rhs):
                if v not in bound and v not in out:
                    out.append(v)
        elif isinstance(f, BINARY):
            go(f.left, bound)
            go(f.right, bound)
        else:
            go(f.body, bound | {f.var})

    go(phi, frozenset())
    return out


def is_free(v: Var, phi) -> bool:
    return v in free_vars(phi)


def all_names(phi) -> set:
    names = set()
    for f in walk(phi):
        if isinstance(f, Eq):
            names.update(v.name for v in term_vars(f.lhs) + term_vars(f.rhs))
        elif isinstance(f, QUANT):
            names.add(f.var.name)
    return names


def is_first_order(phi) -> bool:
    for f in walk(phi):
        if isinstance(f, Eq):
            if f.type != N or not (is_first_order_term(f.lhs) and is_first_order_term(f.rhs)):
                return False
        elif isinstance(f, QUANT) and f.var.type != N:
            return False
    return True


first_order = is_first_order


def is_L_formula(phi) -> bool:
    """True iff phi contains no F-constants."""
    return not any(isinstance(f, Eq) and (has_heo(f.lhs) or has_heo(f.rhs)) for f in walk(phi))


def fresh_name(base: str, avoid: set) -> str:
    """base itself if unused, else base with the minimal numeric suffix."""
    stem = base.rstrip("0123456789") or base
    if base not in avoid:
        return base
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def subst(phi, mapping: Mapping):
    """Capture-avoiding simultaneous substitution of terms for variables."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return phi
    return _subst(phi, mapping)


def _subst(f, mapping):
    if isinstance(f, Eq):
        return Eq(f.type, subst_term(f.lhs, mapping), subst_term(f.rhs, mapping))
    if isinstance(f, BINARY):
        return type(f)(_subst(f.left, mapping), _subst(f.right, mapping))
    v = f.var
    inner = {k: t for k, t in mapping.items() if k != v}
    fv_body = free_vars(f.body)
    inner = {k: t for k, t in inner.items() if k in fv_body}
    if not inner:
        return f
    incoming = set()
    for t in inner.values():
        incoming.update(x.name for x in term_vars(t))
    if v.name in incoming:
        avoid = all_names(f.body) | incoming | {k.name for k in inner}
        nv = Var(fresh_name(v.name, avoid), v.type)
        body = _subst(f.body, {v: nv})
        return type(f)(nv, _subst(body, inner))
    return type(f)(v, _subst(f.body, inner))


def substitute(phi, var: Var, t):
    """phi[t/var]; SortError if t's sort differs from var's."""
    if sort_of(t) != var.type:
        raise SortError(f"cannot substitute a term of sort {show_type(sort_of(t))} "
                        f"for {var.name}:{show_type(var.type)}")
    return subst(phi, {var: t})


def naive_subst(f, var: Var, t):
    """Replace free occurrences of var by t without renaming binders."""
    if isinstance(f, Eq):
        m = {var: t}
        return Eq(f.type, subst_term(f.lhs, m), subst_term(f.rhs, m))
    if isinstance(f, BINARY):
        return type(f)(naive_subst(f.left, var, t), naive_subst(f.right, var, t))
    if f.var == var:
        return f
    return type(f)(f.var, naive_subst(f.body, var, t))


def free_for(t, var: Var, phi) -> bool:
    """No free occurrence of var in phi lies under a binder of a variable of t."""
    tv = set(term_vars(t))

    def go(f, bound):
        if isinstance(f, Eq):
            if var in term_vars(f.lhs) or var in term_vars(f.rhs):
                return not (bound & tv)
            return True
        if isinstance(f, BINARY):
            return go(f.left, bound) and go(f.right, bound)
        if f.var == var:
            return True
        return go(f.body, bound | {f.var})

    return go(phi, frozenset())


def rename_apart(phi, reserved: Iterable[str] = ()):
    """Rename bound variables so every binder is distinct from each other and
    from the free variables (minimal numeric suffix)."""
    used = {v.name for v in free_vars(phi)} | set(reserved)

    def go(f):
        if isinstance(f, Eq):
            return f
        if isinstance(f, BINARY):
            return type(f)(go(f.left), go(f.right))
        v = f.var
        if v.name in used:
            nv = Var(fresh_name(v.name, used | all_names(f.body)), v.type)
            used.add(nv.name)
            return type(f)(nv, go(naive_subst(f.body, v, nv)))
        used.add(v.name)
        return type(f)(v, go(f.body))

    return go(phi)


# ---------------------------------------------------------------- alpha equivalence


def _key_term(t, env):
    if isinstance(t, Var):
        return ("b", env[t], t.type) if t in env else ("v", t.name, t.type)
    if isinstance(t, App):
        return ("@", _key_term(t.fn, env), _key_term(t.arg, env))
    if isinstance(t, PrimFn):
        return ("f", t.symbol) + tuple(_key_term(a, env) for a in t.args)
    return t


def alpha_key(phi, env=None, depth=0):
    """Hashable key equal for alpha-equivalent formulas."""
    env = {} if env is None else env
    if isinstance(phi, Eq):
        return ("=", phi.type, _key_term(phi.lhs, env), _key_term(phi.rhs, env))
    if isinstance(phi, BINARY):
        return (type(phi).__name__, alpha_key(phi.left, env, depth), alpha_key(phi.right, env, depth))
    inner = dict(env)
    inner[phi.var] = depth
    return (type(phi).__name__, phi.var.type, alpha_key(phi.body, inner, depth + 1))


def alpha_eq(f, g) -> bool:
    return f == g or alpha_key(f) == alpha_key(g)


# ---------------------------------------------------------------- subformula table


@dataclass(frozen=True)
class TableEntry:
    index: int
    formula: Formula
    vars: tuple


def subformula_table(phi, variables: Sequence[Var] | None = None) -> list[TableEntry]:
    """Preorder enumeration; connective children share the parent's variable
    list, quantifier children append the bound variable."""
    if not is_first_order(phi):
        raise NotFirstOrder("subformula table needs a first-order formula")
    if variables is None:
        variables = free_vars(phi)
    phi = rename_apart(phi, reserved=[v.name for v in variables])
    out: list[TableEntry] = []
    stack = [(phi, tuple(variables))]
    while stack:
        f, vs = stack.pop()
        out.append(TableEntry(len(out), f, vs))
        if isinstance(f, BINARY):
            stack += [(f.right, vs), (f.left, vs)]
        elif isinstance(f, QUANT):
            stack.append((f.body, vs + (f.var,)))
    return out


# ---------------------------------------------------------------- printing


def show_term(t) -> str:
    n = numeral_value(t)
    if n is not None:
        return str(n)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Succ):
        return "S"
    if isinstance(t, App):
        if isinstance(t.fn, Succ):
            return f"S({show_term(t.arg)})"
        return f"app({show_term(t.fn)},{show_term(t.arg)})"
    if isinstance(t, PrimFn):
        return f"{t.symbol}({','.join(show_term(a) for a in t.args)})"
    if isinstance(t, CombK):
        return f"K[{show_type(t.a)},{show_type(t.b)}]"
    if isinstance(t, CombS):
        return f"Sig[{show_type(t.a)},{show_type(t.b)},{show_type(t.c)}]"
    if isinstance(t, Rec):
        return f"R[{show_type(t.a)}]"
    if isinstance(t, PairC):
        return f"D[{show_type(t.a)},{show_type(t.b)}]"
    if isinstance(t, Proj0):
        return f"D0[{show_type(t.a)},{show_type(t.b)}]"
    if isinstance(t, Proj1):
        return f"D1[{show_type(t.a)},{show_type(t.b)}]"
    if isinstance(t, HeoConst):
        return f"F[{t.index}:{show_type(t.type)}]"
    raise TypeError(t)


_PREC = {Imp: 1, Or: 2, And: 3, Eq: 4, Exists: 0, Forall: 0}


def show(phi, prec: int = 0) -> str:
    if isinstance(phi, Eq):
        s = f"{show_term(phi.lhs)} ={show_type(phi.type)} {show_term(phi.rhs)}"
    elif isinstance(phi, Imp) and phi.right == FALSE:
        inner = show(phi.left, 4)
        s = f"~{inner}"
        return s
    elif isinstance(phi, Imp):
        s = f"{show(phi.left, 2)} -> {show(phi.right, 1)}"
    elif isinstance(phi, Or):
        s = f"{show(phi.left, 3)} | {show(phi.right, 2)}"
    elif isinstance(phi, And):
        s = f"{show(phi.left, 4)} & {show(phi.right, 3)}"
    else:
        q = "forall" if isinstance(phi, Forall) else "exists"
        s = f"{q} {phi.var.name}:{show_type(phi.var.type)}. {show(phi.body, 0)}"
    mine = _PREC[type(phi)]
    if mine < prec or (isinstance(phi, QUANT) and prec > 0):
        return f"({s})"
    return s


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(->)|(\|-)|([()\[\],:.&|~*=])|(\d+)|([A-Za-z_][A-Za-z0-9_']*))")
KEYWORDS = {"forall", "exists", "N", "K", "Sig", "R", "D", "D0", "D1", "app", "F", "S"}


def tokenize(text: str) -> list[tuple[str, int]]:
    out, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        tok = next(g for g in m.groups() if g is not None)
        out.append((tok, m.start(m.lastindex)))
        pos = m.end()
    out.append(("<eof>", len(text)))
    return out


class _Infer:
    def __init__(self):
        self.sub: dict[int, object] = {}
        self.n = 0

    def fresh(self):
        self.n += 1
        return TVar(self.n)

    def find(self, t):
        while isinstance(t, TVar) and t.id in self.sub:
            t = self.sub[t.id]
        return t

    def resolve(self, t):
        t = self.find(t)
        if isinstance(t, TVar):
            return N
        if isinstance(t, Prod):
            return Prod(self.resolve(t.left), self.resolve(t.right))
        if isinstance(t, Arrow):
            return Arrow(self.resolve(t.dom), self.resolve(t.cod))
        return t

    def occurs(self, v, t):
        t = self.find(t)
        if t == v:
            return True
        if isinstance(t, Prod):
            return self.occurs(v, t.left) or self.occurs(v, t.right)
        if isinstance(t, Arrow):
            return self.occurs(v, t.dom) or self.occurs(v, t.cod)
        return False

    def unify(self, a, b, where: str = ""):
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if isinstance(a, TVar):
            if self.occurs(a, b):
                raise SortError(f"infinite sort {where}")
            self.sub[a.id] = b
            return
        if isinstance(b, TVar):
            return self.unify(b, a, where)
        if isinstance(a, Prod) and isinstance(b, Prod):
            self.unify(a.left, b.left, where)
            self.unify(a.right, b.right, where)
            return
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.dom, b.dom, where)
            self.unify(a.cod, b.cod, where)
            return
        raise SortError(f"sort mismatch {where}: {show_type(self.resolve(a))} vs {show_type(self.resolve(b))}")


class Parser:
    """Recursive descent over the concrete grammar with sort inference."""

    def __init__(self, text: str, env: Mapping[str, Type] | None = None):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.inf = _Infer()
        self.free: dict[str, object] = dict(env or {})

    # token helpers
    def peek(self, k: int = 0) -> str:
        return self.toks[min(self.i + k, len(self.toks) - 1)][0]

    def pos(self) -> int:
        return self.toks[self.i][1]

    def next(self) -> str:
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}, found {self.peek()!r}", self.pos(), self.text)
        self.i += 1

    def ident(self) -> str:
        tok = self.peek()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok) or tok in KEYWORDS or tok in SIGNATURE:
            raise ParseError(f"expected a variable name, found {tok!r}", self.pos(), self.text)
        self.i += 1
        return tok

    # types
    def type_(self):
        left = self.prod_type()
        if self.peek() == "->" and self.peek(1) in ("N", "("):
            self.next()
            return Arrow(left, self.type_())
        return left

    def prod_type(self):
        left = self.atom_type()
        if self.peek() == "*":
            self.next()
            return Prod(left, self.prod_type())
        return left

    def atom_type(self):
        tok = self.peek()
        if tok == "N":
            self.next()
            return N
        if tok == "(":
            self.next()
            t = self.type_()
            self.expect(")")
            return t
        raise ParseError(f"expected a type, found {tok!r}", self.pos(), self.text)

    def full_type(self):
        # inside brackets '->' is unambiguous
        left = self.prod_type()
        if self.peek() == "->":
            self.next()
            return Arrow(left, self.full_type())
        return left

    def opt_types(self, k: int):
        if self.peek() != "[":
            return [self.inf.fresh() for _ in range(k)]
        self.next()
        ts = [self.full_type()]
        for _ in range(k - 1):
            self.expect(",")
            ts.append(self.full_type())
        self.expect("]")
        return ts

    # terms: return (term, sort)
    def term(self, scope):
        p = self.pos()
        tok = self.peek()
        if tok.isdigit():
            self.next()
            return numeral(int(tok)), N
        if tok == "S":
            self.next()
            if self.peek() == "(":
                self.next()
                t, s = self.term(scope)
                self.inf.unify(s, N, f"in S(...) at {p}")
                self.expect(")")
                return succ(t), N
            return Succ(), Arrow(N, N)
        if tok in SIGNATURE:
            self.next()
            self.expect("(")
            args = []
            if self.peek() != ")":
                while True:
                    t, s = self.term(scope)
                    self.inf.unify(s, N, f"argument of {tok} at {p}")
                    args.append(t)
                    if self.peek() != ",":
                        break
                    self.next()
            self.expect(")")
            if len(args) != SIGNATURE[tok][0]:
                raise SortError(f"{tok} takes {SIGNATURE[tok][0]} arguments (position {p})")
            return PrimFn(tok, tuple(args)), N
        if tok == "app":
            self.next()
            self.expect("(")
            f, fs = self.term(scope)
            self.expect(",")
            a, as_ = self.term(scope)
            self.expect(")")
            cod = self.inf.fresh()
            self.inf.unify(fs, Arrow(as_, cod), f"in application at {p}")
            return App(f, a), cod
        if tok == "K":
            self.next()
            a, b = self.opt_types(2)
            c = CombK(a, b)
            return c, const_type(c)
        if tok == "Sig":
            self.next()
            a, b, cc = self.opt_types(3)
            c = CombS(a, b, cc)
            return c, const_type(c)
        if tok == "R":
            self.next()
            (a,) = self.opt_types(1)
            c = Rec(a)
            return c, const_type(c)
        if tok in ("D", "D0", "D1"):
            self.next()
            a, b = self.opt_types(2)
            c = {"D": PairC, "D0": Proj0, "D1": Proj1}[tok](a, b)
            return c, const_type(c)
        if tok == "F":
            self.next()
            self.expect("[")
            idx = self.next()
            if not idx.isdigit():
                raise ParseError("F[...] needs a numeric index", self.pos(), self.text)
            self.expect(":")
            t = self.full_type()
            self.expect("]")
            return HeoConst(int(idx), t), t
        name = self.ident()
        if name in scope:
            ty = scope[name]
        else:
            if name not in self.free:
                self.free[name] = self.inf.fresh()
            ty = self.free[name]
        return ("var", name, ty), ty

    # formulas
    def formula(self, scope):
        left = self.disj(scope)
        if self.peek() == "->":
            self.next()
            return Imp(left, self.formula(scope))
        return left

    def disj(self, scope):
        left = self.conj(scope)
        if self.peek() == "|":
            self.next()
            return Or(left, self.disj(scope))
        return left

    def conj(self, scope):
        left = self.unary(scope)
        if self.peek() == "&":
            self.next()
            return And(left, self.conj(scope))
        return left

    def unary(self, scope):
        tok = self.peek()
        if tok == "~":
            self.next()
            return Imp(self.unary(scope), FALSE)
        if tok in ("forall", "exists"):
            self.next()
            name = self.ident()
            self.expect(":")
            ty = self.full_type()
            self.expect(".")
            inner = dict(scope)
            inner[name] = ty
            body = self.formula(inner)
            q = Forall if tok == "forall" else Exists
            return q(Var(name, ty), body)
        if tok == "(":
            self.next()
            f = self.formula(scope)
            self.expect(")")
            return f
        return self.atom(scope)

    def atom(self, scope):
        p = self.pos()
        lhs, ls = self.term(scope)
        self.expect("=")
        if self.peek() in ("N", "("):
            ty = self.type_()
        else:
            ty = self.inf.fresh()
        rhs, rs = self.term(scope)
        self.inf.unify(ls, ty, f"left side of equation at {p}")
        self.inf.unify(rs, ty, f"right side of equation at {p}")
        return ("eq", ty, lhs, rhs)

    # resolution of inference placeholders
    def fix_term(self, t):
        if isinstance(t, tuple):
            return Var(t[1], self.inf.resolve(t[2]))
        if isinstance(t, App):
            return App(self.fix_term(t.fn), self.fix_term(t.arg))
        if isinstance(t, PrimFn):
            return PrimFn(t.symbol, tuple(self.fix_term(a) for a in t.args))
        if isinstance(t, CombK):
            return CombK(self.inf.resolve(t.a), self.inf.resolve(t.b))
        if isinstance(t, CombS):
            return CombS(self.inf.resolve(t.a), self.inf.resolve(t.b), self.inf.resolve(t.c))
        if isinstance(t, Rec):
            return Rec(self.inf.resolve(t.a))
        if isinstance(t, (PairC, Proj0, Proj1)):
            return type(t)(self.inf.resolve(t.a), self.inf.resolve(t.b))
        return t

    def fix(self, f):
        if isinstance(f, tuple):
            _, ty, lhs, rhs = f
            return Eq(self.inf.resolve(ty), self.fix_term(lhs), self.fix_term(rhs))
        if isinstance(f, Eq):
            return f
        if isinstance(f, BINARY):
            return type(f)(self.fix(f.left), self.fix(f.right))
        return type(f)(f.var, self.fix(f.body))

    def done(self):
        if self.peek() != "<eof>":
            raise ParseError(f"unexpected {self.peek()!r}", self.pos(), self.text)


def parse_type(text: str) -> Type:
    p = Parser(text)
    t = p.full_type()
    p.done()
    return t


def parse_formula(text: str, env: Mapping[str, Type] | None = None):
    """Parse and sort-check a formula; free variables default to sort N
    unless declared in env or forced by their use."""
    p = Parser(text, env)
    f = p.formula({})
    p.done()
    f = p.fix(f)
    check_formula(f)
    return f


def parse_term(text: str, env: Mapping[str, Type] | None = None):
    p = Parser(text, env)
    t, _ = p.term({})
    p.done()
    t = p.fix_term(t)
    sort_of(t)
    return t


@lru_cache(maxsize=None)
def defining_equations() -> tuple:
    out = []
    for sym, eqs in DEFINING_EQUATIONS.items():
        out.extend(parse_formula(e) for e in eqs)
    return tuple(out)
