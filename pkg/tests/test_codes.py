import pytest

from realizer.codes import (EMPTY, Arg, Close, Env, FuelExhausted, IfZero, InvalidCode,
                            InvalidCodeError, Num, Oracle, OracleMiss, Pair, Prim, Query, Value,
                            apply, apply_many, build, code_from_json, code_to_json, component,
                            decode, enc, fixpoint, is_code, num_from_json, num_to_json, pair,
                            proj, smn, tuple_, unpair)
from realizer.lam import Const, If0, V, ap, lam, number, op

import bruteforce

SUCC = build(Prim("S", (Arg(),)))
ADD = number(lam("x", "y", op("add", V("x"), V("y"))))
K = number(lam("x", "y", V("x")))


def test_pairing_matches_oracle(frozen):
    for k, v in frozen["cantor_samples"].items():
        a, b = map(int, k.split(","))
        assert pair(a, b) == v
        assert unpair(v) == (a, b)


def test_pairing_huge():
    a, b = 3 ** 5000, 7 ** 4000
    assert unpair(pair(a, b)) == (a, b)


def test_projection_and_tuple():
    assert pair(0, 0) == 0
    assert proj(0, pair(7, 9)) == 7
    assert proj(1, pair(7, 9)) == 9
    assert component(tuple_([4, 5, 6]), 2, 3) == 6
    assert [component(tuple_([4, 5, 6]), i, 3) for i in range(3)] == [4, 5, 6]


def test_identity_and_oracle_codes():
    assert apply(enc(Arg()), 5) == Value(5)
    q = enc(Query(Arg()))
    assert apply(q, 3, {3: 8}, fuel=2) == Value(8)
    assert apply(q, 3, EMPTY) == OracleMiss(3)


def test_successor_code():
    assert apply(SUCC, 4) == Value(5)
    assert apply(SUCC, 4, {0: 1}) == Value(5)


def test_non_code_is_invalid():
    assert not is_code(0)
    assert isinstance(apply(0, 1), InvalidCode)
    assert decode(0) is None
    with pytest.raises(InvalidCodeError):
        smn(0, [1])


def test_fuel_exhaustion():
    loop = fixpoint(number(lam("e", "x", ap(V("e"), V("x")))))
    for fuel in (1, 10, 1000, 10_000):
        assert isinstance(apply(loop, 3, fuel=fuel), FuelExhausted)


def test_smn_examples():
    assert apply(smn(ADD, [3]), 4) == Value(7)
    ident = build(Arg())
    s = smn(ident, [])
    for n in range(5):
        assert apply(s, n) == apply(ident, n)
    for n in range(3):
        assert apply(smn(K, [n]), 99) == Value(n)


def test_factorial_by_fixpoint(frozen):
    fact = lam("e", "x", If0(V("x"), Const(1),
                            op("mul", V("x"), ap(V("e"), op("pred", V("x"))))))
    e = fixpoint(number(fact))
    assert apply(e, 4, fuel=100_000) == Value(frozen["factorial_4"])
    assert apply(e, 4, fuel=100_000) == Value(bruteforce.factorial(4))


def test_fixpoint_of_constant_functional():
    a = number(lam("e", "x", op("S", V("x"))))
    e = fixpoint(a)
    for n in range(5):
        assert apply(e, n) == apply_many(a, [0, n])


def test_build_examples():
    ident = build(Arg())
    assert ident == enc(Arg(), ())
    assert apply(ident, 12) == Value(12)
    assert apply(build(Pair(Num(1), Arg())), 9) == Value(pair(1, 9))


def test_env_and_if():
    c = enc(IfZero(Arg(), Env(0), Env(1)), (10, 20))
    assert apply(c, 0) == Value(10)
    assert apply(c, 3) == Value(20)
    assert apply(enc(Close(Arg(), ())), 0).n == enc(Arg(), ())


def test_oracle_encoding_round_trip():
    p = Oracle({3: 8, 0: 1})
    assert Oracle.decode(p.encode()) == p
    assert Oracle.decode(EMPTY.encode()) == EMPTY
    assert p.issubset(p.extend({5: 2}))


def test_json_round_trips():
    for n in (0, 5, 2 ** 70, 3 ** 40000):
        assert num_from_json(num_to_json(n)) == n
    for c in (SUCC, ADD, K, build(Pair(Num(2 ** 80), Arg()))):
        assert code_from_json(code_to_json(c)) == c


def test_big_literals_stay_compact():
    big = 2 ** 4000
    c = build(Pair(Num(big), Arg()))
    assert apply(c, 1) == Value(pair(big, 1))
    assert c.bit_length() < big.bit_length() + 200
