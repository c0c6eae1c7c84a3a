"""Index machine: Goedel-numbered closures, Kleene application with an oracle.

A code is a natural number that decodes to a one-argument closure
``(body, captured)``.  ``apply(a, n, p, fuel)`` runs the closure numbered
``a`` on ``n`` with oracle ``p`` and a global small-step budget.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Iterable, Mapping, Sequence, Union

try:  # GMP arithmetic for megabit pairs; plain ints otherwise
    from gmpy2 import isqrt as _isqrt, mpz as _mpz
except ImportError:  # pragma: no cover
    _isqrt, _mpz = isqrt, int

_LARGE = 4096

from .syntax import PRIM_EVAL

# ---------------------------------------------------------------- pairing


def pair(a: int, b: int) -> int:
    s = a + b
    if s >> _LARGE:
        g = _mpz(s)
        return int(g * (g + 1) // 2) + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    if n >> _LARGE:
        return _unpair_big(n)
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


@lru_cache(maxsize=4096)
def _unpair_big(n: int) -> tuple[int, int]:
    # pairs holding embedded codes run to megabits; realizers project the same ones repeatedly
    g = _mpz(n)
    w = (_isqrt(8 * g + 1) - 1) // 2
    b = int(g - w * (w + 1) // 2)
    w = int(w)
    return w - b, b


def proj(i: int, n: int) -> int:
    if i not in (0, 1):
        raise ValueError("proj index must be 0 or 1")
    return unpair(n)[i]


def tuple_(items: Sequence[int]) -> int:
    """Right-nested tuple: <a,b,c> = <a,<b,c>>; <a> = a; <> = 0."""
    if not items:
        return 0
    acc = items[-1]
    for x in reversed(items[:-1]):
        acc = pair(x, acc)
    return acc


def component(n: int, i: int, length: int) -> int:
    """i-th entry of a right-nested tuple of the given length."""
    if not 0 <= i < length:
        raise IndexError(f"component {i} of a {length}-tuple")
    for _ in range(i):
        n = unpair(n)[1]
    return n if i == length - 1 else unpair(n)[0]


# ---------------------------------------------------------------- oracles


class Oracle(Mapping[int, int]):
    """A finite partial function N -> N, immutable and hashable."""

    __slots__ = ("_items", "_d", "_hash")

    def __init__(self, data: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        d = dict(data)
        for k, v in d.items():
            if not (isinstance(k, int) and isinstance(v, int)) or k < 0 or v < 0:
                raise ValueError(f"oracle entries must be naturals: {k}->{v}")
        self._d = d
        self._items = tuple(sorted(d.items()))
        self._hash = hash(self._items)

    def __getitem__(self, k: int) -> int:
        return self._d[k]

    def __iter__(self):
        return iter(k for k, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, Oracle) and self._items == other._items

    def __repr__(self) -> str:
        return "{" + ",".join(f"{k}:{v}" for k, v in self._items) + "}"

    def items_sorted(self) -> tuple[tuple[int, int], ...]:
        return self._items

    def issubset(self, other: Mapping[int, int]) -> bool:
        return all(k in other and other[k] == v for k, v in self._items)

    def extend(self, more: Mapping[int, int]) -> "Oracle":
        for k, v in more.items():
            if k in self._d and self._d[k] != v:
                raise ValueError(f"conflicting value at key {k}")
        return Oracle({**self._d, **dict(more)})

    def encode(self) -> int:
        # sequence of (key-gap, value) with length prefix; injective and total on decode
        out, prev = [], -1
        for k, v in self._items:
            out.append(pair(k - prev - 1, v))
            prev = k
        return pair(len(out), tuple_(out)) if out else 0

    @staticmethod
    def decode(n: int) -> "Oracle":
        if n == 0:
            return Oracle()
        length, body = unpair(n)
        if length == 0:
            raise ValueError(f"{n} does not encode an oracle")
        entries, key = {}, -1
        for i in range(length):
            gap, v = unpair(component(body, i, length))
            key += gap + 1
            entries[key] = v
        o = Oracle(entries)
        if o.encode() != n:
            raise ValueError(f"{n} does not encode an oracle")
        return o

    @staticmethod
    def parse(text: str) -> "Oracle":
        """Inline syntax ``{k1:v1,k2:v2}``."""
        t = text.strip()
        if not (t.startswith("{") and t.endswith("}")):
            raise ValueError(f"oracle must look like {{k:v,...}}: {text!r}")
        inner = t[1:-1].strip()
        d: dict[int, int] = {}
        if inner:
            for part in inner.split(","):
                k, _, v = part.partition(":")
                k, v = int(k), int(v)
                if k in d:
                    raise ValueError(f"duplicate key {k}")
                d[k] = v
        return Oracle(d)


EMPTY = Oracle()

# ---------------------------------------------------------------- results


@dataclass(frozen=True)
class Value:
    n: int


@dataclass(frozen=True)
class OracleMiss:
    query: int


@dataclass(frozen=True)
class InvalidCode:
    code: int = -1


@dataclass(frozen=True)
class FuelExhausted:
    pass


EvalResult = Union[Value, OracleMiss, InvalidCode, FuelExhausted]

# ---------------------------------------------------------------- expressions


class MalformedExpr(ValueError):
    pass


@dataclass(frozen=True)
class Arg:
    pass


@dataclass(frozen=True)
class Env:
    i: int


@dataclass(frozen=True)
class Num:
    n: int


@dataclass(frozen=True)
class Prim:
    symbol: str
    args: tuple


@dataclass(frozen=True)
class Pair:
    left: object
    right: object


@dataclass(frozen=True)
class Proj:
    i: int
    e: object


@dataclass(frozen=True)
class IfZero:
    cond: object
    then: object
    orelse: object


@dataclass(frozen=True)
class Apply:
    fn: object
    arg: object


@dataclass(frozen=True)
class Query:
    """Oracle(e): look the value of e up in the current oracle."""
    e: object


@dataclass(frozen=True)
class Close:
    body: object
    captured: tuple


@dataclass(frozen=True)
class SelfRef:
    pass


CodeExpr = Union[Arg, Env, Num, Prim, Pair, Proj, IfZero, Apply, Query, Close, SelfRef]
Oracle_ = Query  # alias matching the node name used in documentation

_PRIMS = sorted(PRIM_EVAL)
_PRIM_ID = {s: i for i, s in enumerate(_PRIMS)}


def validate(e, env_size: int) -> None:
    """Check Env indices stay inside the closure's capture list."""
    stack = [(e, env_size)]
    while stack:
        x, k = stack.pop()
        if isinstance(x, Env):
            if not 0 <= x.i < k:
                raise MalformedExpr(f"Env({x.i}) outside capture list of size {k}")
        elif isinstance(x, (Arg, SelfRef)):
            pass
        elif isinstance(x, Num):
            if not isinstance(x.n, int) or x.n < 0:
                raise MalformedExpr(f"Num needs a natural, got {x.n!r}")
        elif isinstance(x, Prim):
            if x.symbol not in PRIM_EVAL:
                raise MalformedExpr(f"unknown primitive {x.symbol}")
            if len(x.args) != PRIM_EVAL[x.symbol][0]:
                raise MalformedExpr(f"{x.symbol} expects {PRIM_EVAL[x.symbol][0]} args")
            stack.extend((a, k) for a in x.args)
        elif isinstance(x, Pair):
            stack += [(x.left, k), (x.right, k)]
        elif isinstance(x, Proj):
            if x.i not in (0, 1):
                raise MalformedExpr("Proj index must be 0 or 1")
            stack.append((x.e, k))
        elif isinstance(x, IfZero):
            stack += [(x.cond, k), (x.then, k), (x.orelse, k)]
        elif isinstance(x, Apply):
            stack += [(x.fn, k), (x.arg, k)]
        elif isinstance(x, Query):
            stack.append((x.e, k))
        elif isinstance(x, Close):
            stack.extend((c, k) for c in x.captured)
            stack.append((x.body, len(x.captured)))
        else:
            raise MalformedExpr(f"not a code expression: {x!r}")


# ---------------------------------------------------------------- numbering
# A closure is serialised to a token list, the tokens are written as LEB128
# varints behind a 0x01 marker byte, and the bytes are read as a big-endian
# integer.  The decoder parses back and re-encodes, so decode is total and
# enc is injective.

_TAGS = {Arg: 0, Env: 1, Num: 2, Prim: 3, Pair: 4, Proj: 5, IfZero: 6,
         Apply: 7, Query: 8, Close: 9, SelfRef: 10}


def _tokens(e, out: list) -> None:
    stack = [e]
    while stack:
        x = stack.pop()
        t = _TAGS[type(x)]
        out.append(t)
        if t == 1:
            out.append(x.i)
        elif t == 2:
            out.append(x.n)
        elif t == 3:
            out.append(_PRIM_ID[x.symbol])
            stack.extend(reversed(x.args))
        elif t == 4:
            stack += [x.right, x.left]
        elif t == 5:
            out.append(x.i)
            stack.append(x.e)
        elif t == 6:
            stack += [x.orelse, x.then, x.cond]
        elif t == 7:
            stack += [x.arg, x.fn]
        elif t == 8:
            stack.append(x.e)
        elif t == 9:
            out.append(len(x.captured))
            stack.append(x.body)
            stack.extend(reversed(x.captured))


_BIG = 1 << 63
_ESCAPE = b"\x80\x00"  # a non-canonical varint, never produced otherwise


def _varint(n: int, out: bytearray) -> None:
    if n >= _BIG:
        # large literals (embedded codes) are stored as raw bytes behind an
        # escape; LEB128 would add 1/7 per level of nesting
        raw = n.to_bytes((n.bit_length() + 7) // 8, "big")
        out += _ESCAPE
        _varint(len(raw), out)
        out += raw
        return
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


_BODY_BYTES: dict[int, tuple] = {}


def _body_bytes(body) -> bytes:
    hit = _BODY_BYTES.get(id(body))
    if hit is not None and hit[0] is body:
        return hit[1]
    toks: list = []
    _tokens(body, toks)
    buf = bytearray()
    for t in toks:
        _varint(t, buf)
    data = bytes(buf)
    if len(_BODY_BYTES) > 500_000:
        _BODY_BYTES.clear()
    _BODY_BYTES[id(body)] = (body, data)
    return data


def enc(body, captured: Sequence[int] = ()) -> int:
    """Number of the closure (body, captured values)."""
    validate(body, len(captured))
    return _enc_unchecked(body, captured)


def _enc_unchecked(body, captured: Sequence[int]) -> int:
    buf = bytearray(b"\x01")
    _varint(len(captured), buf)
    for c in captured:
        _varint(c, buf)
    buf += _body_bytes(body)
    return int.from_bytes(bytes(buf), "big")


class _Bad(Exception):
    pass


def _read_tokens(n: int) -> list[int]:
    if n <= 0:
        raise _Bad
    raw = n.to_bytes((n.bit_length() + 7) // 8, "big")
    if raw[0] != 1:
        raise _Bad
    toks, cur, shift, i, end = [], 0, 0, 1, len(raw)
    while i < end:
        b = raw[i]
        i += 1
        if b == 0x80 and shift == 0 and i < end and raw[i] == 0:
            # escaped large literal: length, then big-endian bytes
            i += 1
            length, sh = 0, 0
            while True:
                if i >= end or sh > 56:
                    raise _Bad
                c = raw[i]
                i += 1
                length |= (c & 0x7F) << sh
                if not c & 0x80:
                    if sh and c == 0:
                        raise _Bad
                    break
                sh += 7
            if i + length > end or length == 0 or raw[i] == 0:
                raise _Bad
            n = int.from_bytes(raw[i:i + length], "big")
            if n < _BIG:
                raise _Bad  # must have been a plain varint
            toks.append(n)
            i += length
            continue
        cur |= (b & 0x7F) << shift
        if b & 0x80:
            shift += 7
            if shift > 63:
                raise _Bad  # plain varints stay below 2**63
        else:
            if shift and b == 0:
                raise _Bad  # non-canonical varint
            if cur >= _BIG:
                raise _Bad
            toks.append(cur)
            cur, shift = 0, 0
    if shift:
        raise _Bad
    return toks


def _parse(toks: list[int], pos: int):
    # iterative parse to avoid deep recursion on long bodies
    def need(k):
        if pos_[0] + k > len(toks):
            raise _Bad

    pos_ = [pos]
    # each work item: ("node",) to parse, or ("build", tag, payload, nchildren)
    work: list = [("node",)]
    vals: list = []
    while work:
        item = work.pop()
        if item[0] == "node":
            need(1)
            t = toks[pos_[0]]
            pos_[0] += 1
            if t == 0:
                vals.append(Arg())
            elif t == 10:
                vals.append(SelfRef())
            elif t in (1, 2):
                need(1)
                v = toks[pos_[0]]
                pos_[0] += 1
                vals.append(Env(v) if t == 1 else Num(v))
            elif t == 3:
                need(1)
                pid = toks[pos_[0]]
                pos_[0] += 1
                if pid >= len(_PRIMS):
                    raise _Bad
                sym = _PRIMS[pid]
                k = PRIM_EVAL[sym][0]
                work.append(("build", 3, sym, k))
                work.extend([("node",)] * k)
            elif t == 4:
                work.append(("build", 4, None, 2))
                work.extend([("node",)] * 2)
            elif t == 5:
                need(1)
                i = toks[pos_[0]]
                pos_[0] += 1
                if i > 1:
                    raise _Bad
                work.append(("build", 5, i, 1))
                work.append(("node",))
            elif t == 6:
                work.append(("build", 6, None, 3))
                work.extend([("node",)] * 3)
            elif t == 7:
                work.append(("build", 7, None, 2))
                work.extend([("node",)] * 2)
            elif t == 8:
                work.append(("build", 8, None, 1))
                work.append(("node",))
            elif t == 9:
                need(1)
                k = toks[pos_[0]]
                pos_[0] += 1
                if k > len(toks):
                    raise _Bad
                work.append(("build", 9, None, k + 1))
                work.extend([("node",)] * (k + 1))
            else:
                raise _Bad
        else:
            _, t, payload, k = item
            kids = vals[len(vals) - k:] if k else []
            del vals[len(vals) - k:]
            # children were pushed so that the first one is parsed first
            if t == 3:
                vals.append(Prim(payload, tuple(kids)))
            elif t == 4:
                vals.append(Pair(kids[0], kids[1]))
            elif t == 5:
                vals.append(Proj(payload, kids[0]))
            elif t == 6:
                vals.append(IfZero(kids[0], kids[1], kids[2]))
            elif t == 7:
                vals.append(Apply(kids[0], kids[1]))
            elif t == 8:
                vals.append(Query(kids[0]))
            elif t == 9:
                vals.append(Close(kids[-1], tuple(kids[:-1])))
    if len(vals) != 1:
        raise _Bad
    return vals[0], pos_[0]


@lru_cache(maxsize=200_000)
def decode(n: int):
    """Return (body, captured) for a valid closure number, else None."""
    try:
        toks = _read_tokens(n)
        if not toks:
            return None
        k = toks[0]
        if k + 1 > len(toks):
            return None
        captured = tuple(toks[1:k + 1])
        body, end = _parse(toks, k + 1)
        if end != len(toks):
            return None
        validate(body, len(captured))
    except (_Bad, MalformedExpr, RecursionError):
        return None
    return body, captured


def is_code(n: int) -> bool:
    return decode(n) is not None


# ---------------------------------------------------------------- machine


class _Stop(Exception):
    def __init__(self, result):
        self.result = result


class Machine:
    """Explicit-stack evaluator; fuel is one global budget of small steps."""

    def __init__(self, oracle: Mapping[int, int], fuel: int):
        self.oracle = oracle
        self.fuel = fuel

    def _tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise _Stop(FuelExhausted())

    def _enter(self, f: int, x: int):
        d = decode(f)
        if d is None:
            raise _Stop(InvalidCode(f))
        body, env = d
        return body, (x, env, f)

    def run(self, expr, ctx) -> int:
        # ctx = (arg, env, self_number)
        kont: list = []
        mode_eval, cur, val = True, expr, 0
        oracle = self.oracle
        while True:
            if mode_eval:
                self._tick()
                e = cur
                t = type(e)
                if t is Num:
                    val, mode_eval = e.n, False
                elif t is Arg:
                    val, mode_eval = ctx[0], False
                elif t is Env:
                    val, mode_eval = ctx[1][e.i], False
                elif t is SelfRef:
                    val, mode_eval = ctx[2], False
                elif t is Apply:
                    kont.append(("af", e.arg, ctx))
                    cur = e.fn
                elif t is IfZero:
                    kont.append(("if", e, ctx))
                    cur = e.cond
                elif t is Pair:
                    kont.append(("pl", e.right, ctx))
                    cur = e.left
                elif t is Proj:
                    kont.append(("pj", e.i))
                    cur = e.e
                elif t is Prim:
                    if not e.args:
                        val, mode_eval = PRIM_EVAL[e.symbol][1](), False
                    else:
                        kont.append(("pr", e, 0, (), ctx))
                        cur = e.args[0]
                elif t is Query:
                    kont.append(("q",))
                    cur = e.e
                elif t is Close:
                    if not e.captured:
                        val, mode_eval = _enc_cached(e.body, ()), False
                    else:
                        kont.append(("cl", e, 0, (), ctx))
                        cur = e.captured[0]
                else:
                    raise _Stop(InvalidCode())
            else:
                if not kont:
                    return val
                k = kont.pop()
                tag = k[0]
                if tag == "af":
                    kont.append(("aa", val))
                    cur, ctx, mode_eval = k[1], k[2], True
                elif tag == "aa":
                    cur, ctx = self._enter(k[1], val)
                    mode_eval = True
                elif tag == "if":
                    e, ctx = k[1], k[2]
                    cur = e.then if val == 0 else e.orelse
                    mode_eval = True
                elif tag == "pl":
                    kont.append(("pr2", val))
                    cur, ctx, mode_eval = k[1], k[2], True
                elif tag == "pr2":
                    val = pair(k[1], val)
                elif tag == "pj":
                    val = unpair(val)[k[1]]
                elif tag == "pr":
                    e, i, got, ctx = k[1], k[2], k[3] + (val,), k[4]
                    if i + 1 < len(e.args):
                        kont.append(("pr", e, i + 1, got, ctx))
                        cur, mode_eval = e.args[i + 1], True
                    else:
                        val = PRIM_EVAL[e.symbol][1](*got)
                elif tag == "q":
                    got = oracle.get(val)
                    if got is None:
                        raise _Stop(OracleMiss(val))
                    val = got
                elif tag == "cl":
                    e, i, got, ctx = k[1], k[2], k[3] + (val,), k[4]
                    if i + 1 < len(e.captured):
                        kont.append(("cl", e, i + 1, got, ctx))
                        cur, mode_eval = e.captured[i + 1], True
                    else:
                        val = _enc_cached(e.body, got)


def _enc_cached(body, captured: tuple) -> int:
    return _enc_unchecked(body, captured)


def _as_oracle(p) -> Mapping[int, int]:
    return EMPTY if p is None else p


def apply(a: int, n: int, p: Mapping[int, int] | None = None, fuel: int = 10_000) -> EvalResult:
    """Kleene application {a}^p(n) under a step budget."""
    return apply_many(a, [n], p, fuel)


def apply_many(a: int, args: Sequence[int], p: Mapping[int, int] | None = None,
               fuel: int = 10_000) -> EvalResult:
    """a^p n1 ... nk with one shared budget; k = 0 returns Value(a)."""
    m = Machine(_as_oracle(p), fuel)
    try:
        v = a
        for x in args:  # entering a closure is free; its body pays per node
            body, ctx = m._enter(v, x)
            v = m.run(body, ctx)
        return Value(v)
    except _Stop as s:
        return s.result


def run_expr(expr, p: Mapping[int, int] | None = None, fuel: int = 10_000,
             arg: int = 0, env: Sequence[int] = ()) -> EvalResult:
    """Evaluate a bare expression (no enclosing closure)."""
    validate(expr, len(env))
    m = Machine(_as_oracle(p), fuel)
    try:
        return Value(m.run(expr, (arg, tuple(env), 0)))
    except _Stop as s:
        return s.result


# ---------------------------------------------------------------- s-m-n, recursion, build


def build(body) -> int:
    """Canonical index of the closed one-argument closure with this body."""
    if isinstance(body, Close):
        raise MalformedExpr("build takes a body; wrap in Close yourself for nested closures")
    try:
        return enc(body, ())
    except MalformedExpr:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        raise MalformedExpr(str(exc)) from exc


class InvalidCodeError(ValueError):
    pass


def smn(a: int, fixed: Sequence[int]) -> int:
    """Code s with {s}(y) ~ {a}(fixed..., y)."""
    if decode(a) is None:
        raise InvalidCodeError(f"{a} is not a code")
    call = Env(0)
    for i in range(len(fixed)):
        call = Apply(call, Env(i + 1))
    return enc(Apply(call, Arg()), (a, *fixed))


def fixpoint(a: int) -> int:
    """Code e with {a}(e, x...) ~ {e}(x...)."""
    if decode(a) is None:
        raise InvalidCodeError(f"{a} is not a code")
    return enc(Apply(Apply(Env(0), SelfRef()), Arg()), (a,))


# ---------------------------------------------------------------- serialisation

_NAMES = {v: k.__name__ for k, v in _TAGS.items()}


def num_to_json(n: int) -> dict:
    """Decimal for ordinary numbers, hex past the interpreter's str limit."""
    return {"n": str(n)} if n.bit_length() < 10_000 else {"hex": format(n, "x")}


def num_from_json(j) -> int:
    if "hex" in j:
        return int(j["hex"], 16)
    return int(j["n"])


def expr_to_json(e):
    """Stable tagged tree for CodeExpr values."""
    if isinstance(e, Arg):
        return {"tag": "Arg"}
    if isinstance(e, SelfRef):
        return {"tag": "SelfRef"}
    if isinstance(e, Env):
        return {"tag": "Env", "i": e.i}
    if isinstance(e, Num):
        return {"tag": "Num", **num_to_json(e.n)}
    if isinstance(e, Prim):
        return {"tag": "Prim", "symbol": e.symbol, "args": [expr_to_json(x) for x in e.args]}
    if isinstance(e, Pair):
        return {"tag": "Pair", "left": expr_to_json(e.left), "right": expr_to_json(e.right)}
    if isinstance(e, Proj):
        return {"tag": "Proj", "i": e.i, "e": expr_to_json(e.e)}
    if isinstance(e, IfZero):
        return {"tag": "IfZero", "cond": expr_to_json(e.cond), "then": expr_to_json(e.then),
                "else": expr_to_json(e.orelse)}
    if isinstance(e, Apply):
        return {"tag": "Apply", "fn": expr_to_json(e.fn), "arg": expr_to_json(e.arg)}
    if isinstance(e, Query):
        return {"tag": "Oracle", "e": expr_to_json(e.e)}
    if isinstance(e, Close):
        return {"tag": "Close", "body": expr_to_json(e.body),
                "captured": [expr_to_json(c) for c in e.captured]}
    raise MalformedExpr(f"not a code expression: {e!r}")


def expr_from_json(j):
    try:
        tag = j["tag"]
        if tag == "Arg":
            return Arg()
        if tag == "SelfRef":
            return SelfRef()
        if tag == "Env":
            return Env(int(j["i"]))
        if tag == "Num":
            return Num(num_from_json(j))
        if tag == "Prim":
            return Prim(j["symbol"], tuple(expr_from_json(x) for x in j["args"]))
        if tag == "Pair":
            return Pair(expr_from_json(j["left"]), expr_from_json(j["right"]))
        if tag == "Proj":
            return Proj(int(j["i"]), expr_from_json(j["e"]))
        if tag == "IfZero":
            return IfZero(expr_from_json(j["cond"]), expr_from_json(j["then"]),
                          expr_from_json(j["else"]))
        if tag == "Apply":
            return Apply(expr_from_json(j["fn"]), expr_from_json(j["arg"]))
        if tag == "Oracle":
            return Query(expr_from_json(j["e"]))
        if tag == "Close":
            return Close(expr_from_json(j["body"]),
                         tuple(expr_from_json(c) for c in j["captured"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedExpr(f"bad code tree: {exc}") from exc
    raise MalformedExpr(f"unknown tag {j.get('tag')!r}")


def code_to_json(a: int):
    """A code number as a closure tree; non-closures are emitted as plain numbers."""
    d = decode(a)
    if d is None:
        return {"tag": "Number", **num_to_json(a)}
    body, captured = d
    return {"tag": "Closure", "body": expr_to_json(body),
            "captured": [code_to_json(c) for c in captured]}


def code_from_json(j) -> int:
    if j.get("tag") == "Number":
        return num_from_json(j)
    if j.get("tag") == "Closure":
        captured = [code_from_json(c) for c in j["captured"]]
        return enc(expr_from_json(j["body"]), captured)
    raise MalformedExpr(f"unknown code tag {j.get('tag')!r}")
