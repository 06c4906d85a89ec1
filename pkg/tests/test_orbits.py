from math import gcd

import pytest
from hypothesis import given, strategies as st
from sympy import isprime, primerange

import oracles
from legendre_sha.errors import DomainError, InvalidContextError
from legendre_sha.orbits import (
    HalfPlane,
    OrbitContext,
    OrbitFilter,
    decompose,
    halfplane_class,
    is_balanced_modulus,
    is_balanced_orbit,
    multiplicative_order,
    orbit_through,
)

PRIMES = list(primerange(2, 30))


@st.composite
def contexts(draw, max_d=400):
    p = draw(st.sampled_from(PRIMES))
    d = draw(st.integers(1, max_d).filter(lambda d: d % p))
    return OrbitContext(d, p)


def test_halfplane_examples():
    assert halfplane_class(22, 28) is HalfPlane.UPPER
    assert halfplane_class(0, 28) is HalfPlane.BOUNDARY
    assert halfplane_class(14, 28) is HalfPlane.BOUNDARY
    assert halfplane_class(13, 28) is HalfPlane.LOWER
    with pytest.raises(DomainError):
        halfplane_class(28, 28)
    with pytest.raises(DomainError):
        halfplane_class(-1, 28)


@given(st.integers(1, 500), st.data())
def test_halfplane_matches_fraction_oracle(d, data):
    i = data.draw(st.integers(0, d - 1))
    expected = {None: HalfPlane.BOUNDARY, "A": HalfPlane.LOWER, "B": HalfPlane.UPPER}
    assert halfplane_class(i, d) is expected[oracles.side(i, d)]


def test_orbit_through_examples():
    o = orbit_through(OrbitContext(28, 3), 6)
    assert o.elements == (2, 6, 10, 18, 22, 26)
    assert o.size == 6 and o.gcd_class == 2
    assert orbit_through(OrbitContext(28, 3), 0).elements == (0,)
    assert orbit_through(OrbitContext(364, 3), 7).elements == (7, 21, 63, 189, 203, 245)


def test_invalid_contexts():
    with pytest.raises(InvalidContextError):
        OrbitContext(6, 3)
    with pytest.raises(InvalidContextError):
        OrbitContext(10, 4)
    with pytest.raises(InvalidContextError):
        OrbitContext(0, 3)


def test_decompose_examples():
    ctx = OrbitContext(28, 3)
    sizes = [o.size for o in decompose(ctx, OrbitFilter.O)]
    assert sorted(sizes) == [2, 6, 6, 6, 6]
    covered = sorted(x for o in decompose(ctx, OrbitFilter.O) for x in o)
    assert covered == [i for i in range(28) if i not in (0, 14)]
    assert [o.elements for o in decompose(OrbitContext(4, 3))] == [(0,), (1, 3), (2,)]
    assert [o.elements for o in decompose(OrbitContext(10, 3), OrbitFilter.O_PRIME)] == [(1, 3, 7, 9)]
    assert decompose(OrbitContext(2, 3), OrbitFilter.O) == []
    assert decompose(OrbitContext(1, 3), OrbitFilter.O_PRIME) == []


@given(contexts())
def test_decompose_matches_closure_oracle(ctx):
    ours = [frozenset(o.elements) for o in decompose(ctx)]
    assert ours == oracles.orbits(ctx.d, ctx.p)
    mins = [o.least for o in decompose(ctx)]
    assert mins == sorted(mins)


@given(contexts())
def test_orbit_invariants(ctx):
    d, p = ctx.d, ctx.p
    for o in decompose(ctx):
        assert list(o.elements) == sorted(set(o.elements))
        assert all(x * p % d in o for x in o)
        assert {gcd(x, d) for x in o} == {o.gcd_class}
        assert multiplicative_order(p, d // o.gcd_class) % o.size == 0
        for i in o.elements[:3]:
            assert orbit_through(ctx, i) == o


def test_partition_up_to_large_d():
    for d in range(1, 10001, 97):
        for p in (2, 3, 5, 7):
            if d % p == 0:
                continue
            elems = [x for o in decompose(OrbitContext(d, p)) for x in o]
            assert sorted(elems) == list(range(d))


@given(contexts())
def test_fixed_points(ctx):
    orbits = {o.least: o for o in decompose(ctx)}
    assert orbits[0].elements == (0,)
    if ctx.d % 2 == 0:
        assert orbit_through(ctx, ctx.d // 2).elements == (ctx.d // 2,)


def test_balanced_examples():
    assert is_balanced_orbit(orbit_through(OrbitContext(28, 3), 6))
    assert is_balanced_orbit(orbit_through(OrbitContext(10, 3), 1))
    assert not is_balanced_orbit(orbit_through(OrbitContext(7, 2), 1))
    with pytest.raises(DomainError):
        is_balanced_orbit(orbit_through(OrbitContext(28, 3), 14))
    assert is_balanced_modulus(OrbitContext(28, 3))
    assert not is_balanced_modulus(OrbitContext(7, 2))
    assert is_balanced_modulus(OrbitContext(4, 3))
    with pytest.raises(DomainError):
        is_balanced_modulus(OrbitContext(2, 3))


@given(contexts())
def test_balanced_orbit_matches_count(ctx):
    for o in decompose(ctx, OrbitFilter.O):
        sides = [oracles.side(i, ctx.d) for i in o]
        assert is_balanced_orbit(o) == (sides.count("A") == sides.count("B"))


def _divisors(n):
    return [x for x in range(1, n + 1) if n % x == 0]


def test_balanced_for_divisors_of_power_plus_one():
    for p in (2, 3, 5, 7):
        for f in range(1, 7):
            for d in _divisors(p**f + 1):
                if d > 2 and d <= 200000:
                    assert is_balanced_modulus(OrbitContext(d, p)), (d, p)


def test_balanced_for_odd_cofactor_of_twice_power_minus_one():
    for p in (3, 5, 7):
        for f in range(1, 6):
            n = 2 * (p**f - 1)
            for d in _divisors(n):
                if d > 2 and (n // d) % 2 == 1:
                    assert is_balanced_modulus(OrbitContext(d, p)), (d, p)


def test_bijection_with_smaller_modulus():
    for p, f in [(3, 3), (3, 4), (5, 3), (7, 2)]:
        d = p**f + 1
        ctx = OrbitContext(d, p)
        for e in _divisors(d):
            if 2 * e >= d:
                continue
            small = decompose(OrbitContext(d // e, p), OrbitFilter.O_PRIME)
            mapped = sorted(tuple(sorted(x * e for x in o)) for o in small)
            ours = sorted(o.elements for o in decompose(ctx, OrbitFilter.O) if o.gcd_class == e)
            assert mapped == ours


def test_contexts_accept_only_primes():
    for p in range(2, 40):
        if isprime(p):
            OrbitContext(p + 1 if (p + 1) % p else p + 2, p)
        else:
            with pytest.raises(InvalidContextError):
                OrbitContext(1, p)
