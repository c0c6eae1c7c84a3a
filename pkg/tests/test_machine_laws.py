from hypothesis import given, settings, strategies as st

from realizer.codes import (FuelExhausted, InvalidCode, OracleMiss, Value, apply, apply_many, decode,
                            fixpoint, pair, smn, unpair)

from programs import cases

FUEL = 10_000
SLACK = 64  # steps spent by the wrapper closures


def agree(direct, wrapped):
    """Same result whenever the direct run finished within its budget."""
    if isinstance(direct, FuelExhausted):
        return True
    return direct == wrapped


@settings(max_examples=300)
@given(cases)
def test_smn_law(case):
    a, _, (m, n), p = case
    direct = apply_many(a, [m, n], p, FUEL)
    assert agree(direct, apply(smn(a, [m]), n, p, FUEL + SLACK))
    assert agree(direct, apply_many(smn(a, []), [m, n], p, FUEL + SLACK))
    assert agree(direct, apply_many(smn(smn(a, [m]), []), [n], p, FUEL + SLACK))


@settings(max_examples=300)
@given(cases)
def test_recursion_theorem(case):
    _, f, (n, _), p = case
    e = fixpoint(f)
    direct = apply_many(f, [e, n], p, FUEL)
    assert agree(direct, apply(e, n, p, FUEL + SLACK))


@settings(max_examples=200)
@given(cases, st.integers(1, 400))
def test_fuel_monotone(case, fuel):
    a, _, args, p = case
    small = apply_many(a, args, p, fuel)
    if not isinstance(small, FuelExhausted):
        assert apply_many(a, args, p, fuel * 2 + 10) == small


@settings(max_examples=200)
@given(cases, st.dictionaries(st.integers(0, 9), st.integers(0, 9), max_size=3))
def test_oracle_monotone(case, extra):
    a, _, args, p = case
    small = apply_many(a, args, p, FUEL)
    if isinstance(small, Value):
        assert apply_many(a, args, {**extra, **p}, FUEL) == small


def test_pairing_exhaustive():
    seen = set()
    for a in range(200):
        for b in range(200):
            n = pair(a, b)
            assert unpair(n) == (a, b)
            seen.add(n)
    assert len(seen) == 200 * 200


@given(st.integers(0, 2 ** 200))
def test_unpair_then_pair(n):
    assert pair(*unpair(n)) == n


@settings(max_examples=500)
@given(st.one_of(st.integers(0, 2 ** 64), st.binary(max_size=40).map(
    lambda b: int.from_bytes(b"\x01" + b, "big"))))
def test_decoding_never_crashes(n):
    decode(n)
    r = apply(n, 3, {}, 200)
    assert isinstance(r, (Value, InvalidCode, FuelExhausted, OracleMiss))
