from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

import oracles
from legendre_sha.errors import DomainError, InvalidContextError
from legendre_sha.orbits import HalfPlane, OrbitContext, OrbitFilter, decompose, halfplane_class
from legendre_sha.rays import (
    Ray,
    RayContext,
    RayConvention,
    in_S,
    is_balanced_ray,
    ray_class,
    ray_decompose,
    ray_orbit,
    ray_report,
    ray_word,
)
from legendre_sha.words import word_at


def _sum(ctx, ray):
    return Fraction(ray.i % ctx.d, ctx.d) + Fraction(ray.j % ctx.r, ctx.r)


def test_context_validation():
    with pytest.raises(InvalidContextError):
        RayContext(10, 3, 3)
    with pytest.raises(InvalidContextError):
        RayContext(1, 3, 5)
    with pytest.raises(InvalidContextError):
        RayContext(10, 1, 3)
    assert RayContext(4, 6, 5).modulus == 12


def test_class_examples():
    ctx = RayContext(5, 3, 2)
    assert ray_class(ctx, Ray(4, 2)) is HalfPlane.UPPER
    assert ray_class(RayContext(5, 3, 2, RayConvention.GT1), Ray(4, 2)) is HalfPlane.LOWER
    wall = RayContext(6, 3, 5)
    assert not in_S(wall, Ray(4, 1))
    with pytest.raises(DomainError):
        ray_class(wall, Ray(4, 1))
    with pytest.raises(DomainError):
        ray_class(ctx, Ray(0, 1))


@given(st.integers(2, 60), st.integers(2, 12), st.data())
def test_class_matches_fractions(d, r, data):
    p = data.draw(st.sampled_from([q for q in (3, 5, 7, 11, 13) if (d * r) % q]))
    ctx = RayContext(d, r, p)
    ray = Ray(data.draw(st.integers(0, d - 1)), data.draw(st.integers(0, r - 1)))
    s = _sum(ctx, ray)
    if ray.i == 0 or ray.j == 0 or s == 1:
        assert not in_S(ctx, ray)
        return
    assert ray_class(ctx, ray) is (HalfPlane.LOWER if s < 1 else HalfPlane.UPPER)
    flipped = RayContext(d, r, p, RayConvention.GT1)
    assert ray_class(flipped, ray) is not ray_class(ctx, ray)


def test_orbit_examples():
    assert ray_orbit(RayContext(4, 4, 3), Ray(1, 1)) == (Ray(1, 1), Ray(3, 3))


@given(st.integers(2, 50), st.integers(2, 10), st.data())
def test_orbits_partition_S_and_avoid_wall(d, r, data):
    p = data.draw(st.sampled_from([q for q in (3, 5, 7, 11) if (d * r) % q]))
    ctx = RayContext(d, r, p)
    orbits = ray_decompose(ctx)
    members = [x for o in orbits for x in o]
    expected = [Ray(i, j) for i in range(1, d) for j in range(1, r) if in_S(ctx, Ray(i, j))]
    assert sorted(members) == expected
    for o in orbits:
        assert all(in_S(ctx, x) for x in o)
        assert all(Ray(x.i * p % d, x.j * p % r) in o for x in o)


@given(st.integers(2, 40), st.integers(2, 8), st.data())
def test_balanced_is_unit_equivariant(d, r, data):
    p = data.draw(st.sampled_from([q for q in (3, 5, 7, 11) if (d * r) % q]))
    ctx = RayContext(d, r, p)
    rays_ = [x for o in ray_decompose(ctx) for x in o]
    assume(rays_)
    ray = data.draw(st.sampled_from(rays_))
    t = data.draw(st.sampled_from(oracles.units(ctx.modulus)))
    assert is_balanced_ray(ctx, ray) == is_balanced_ray(ctx, ray.scaled(t, ctx))


def test_r2_reduction_exhaustive():
    for p in (3, 5):
        for d in range(3, 101):
            if d % p == 0 or d % 2 == 0 and p == 2:
                continue
            ctx = RayContext(d, 2, p)
            octx = OrbitContext(d, p)
            for i in range(1, d):
                if 2 * i == d:
                    assert not in_S(ctx, Ray(i, 1))
                    continue
                assert ray_class(ctx, Ray(i, 1)) is halfplane_class(i, d)
            for o in decompose(octx, OrbitFilter.O):
                rorb = ray_orbit(ctx, Ray(o.least, 1))
                assert [x.i for x in rorb] == list(o.elements)
                assert ray_word(ctx, rorb, Ray(o.least, 1)) == word_at(o, o.least)
                assert is_balanced_ray(ctx, Ray(o.least, 1)) == _all_balanced(octx, o.least)


def _all_balanced(octx, i):
    d = octx.d
    for t in oracles.units(d):
        orb = {i * t * pow(octx.p, n, d) % d for n in range(d)}
        sides = [oracles.side(x, d) for x in orb]
        if sides.count("A") != sides.count("B"):
            return False
    return True


def test_r2_reduction_with_flipped_convention():
    ctx = RayContext(28, 2, 3, RayConvention.GT1)
    o = decompose(OrbitContext(28, 3), OrbitFilter.O)[0]
    rorb = ray_orbit(ctx, Ray(o.least, 1))
    assert ray_word(ctx, rorb, Ray(o.least, 1)) == word_at(o, o.least).complement()


def test_balanced_examples():
    for f in range(1, 5):
        d = 3**f + 1
        ctx = RayContext(d, 2, 3)
        assert all(is_balanced_ray(ctx, Ray(i, 1)) for i in range(1, d) if 2 * i != d)
    ctx = RayContext(10, 5, 3)
    assert all(is_balanced_ray(ctx, o[0]) for o in ray_decompose(ctx))
    ctx = RayContext(7, 3, 2)
    assert not all(is_balanced_ray(ctx, o[0]) for o in ray_decompose(ctx))


def test_balanced_when_r_divides_d_dividing_power_plus_one():
    for p in (3, 5, 7):
        for f in range(1, 4):
            n = p**f + 1
            for d in range(2, n + 1):
                if n % d or d > 130:
                    continue
                for r in range(2, d + 1):
                    if d % r:
                        continue
                    ctx = RayContext(d, r, p)
                    assert all(is_balanced_ray(ctx, o[0]) for o in ray_decompose(ctx)), (p, d, r)


def test_ray_word_errors_and_shape():
    ctx = RayContext(10, 5, 3)
    orbits = ray_decompose(ctx)
    with pytest.raises(DomainError):
        ray_word(ctx, orbits[0], orbits[1][0])
    for o in orbits:
        w = ray_word(ctx, o, o[0])
        assert len(w) == len(o) and w.is_balanced()


def test_ray_report_base_points_are_good():
    for summary in ray_report(RayContext(10, 5, 3)):
        assert summary.balanced
        assert oracles.is_good(summary.word.letters)
        assert summary.d_list[-1] == summary.height
