"""Rays (i, j) in Z/dZ x Z/rZ for the higher-genus family z^d = x^r - 1.

A pair with i, j nonzero is sorted by whether <i/d> + <j/r> lies below or
above 1 (the wall = 1 is excluded). Multiplication by p acts diagonally and
preserves the wall, so the orbit, word and invariant-factor machinery for
residues carries over once the two sides are named.

Which side plays the part of the residues in (0, d/2) is a convention. With
``RayConvention.LT1`` (the default) a sum below 1 is ``HalfPlane.LOWER``; for
r = 2 and j = 1 this is exactly ``halfplane_class``. ``RayConvention.GT1``
swaps the two sides.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Sequence

from sympy import isprime

from .errors import DomainError, InvalidContextError
from .invariant_factors import invariant_factors
from .orbits import HalfPlane
from .words import U, L, Word, exponential_form, good_rotations, height_profile


class RayConvention(enum.Enum):
    LT1 = "lt1"  # <i/d> + <j/r> < 1 is LOWER
    GT1 = "gt1"  # <i/d> + <j/r> > 1 is LOWER


@dataclass(frozen=True)
class RayContext:
    d: int
    r: int
    p: int
    convention: RayConvention = RayConvention.LT1

    def __post_init__(self):
        if not isinstance(self.d, int) or not isinstance(self.r, int) or self.d < 2 or self.r < 2:
            raise InvalidContextError(f"need integers d, r > 1, got d={self.d!r}, r={self.r!r}")
        if not isinstance(self.p, int) or not isprime(self.p):
            raise InvalidContextError(f"p must be prime, got {self.p!r}")
        if gcd(self.p, self.d * self.r) != 1:
            raise InvalidContextError(f"p={self.p} divides d*r={self.d * self.r}")

    @property
    def modulus(self) -> int:
        """lcm(d, r); units modulo it act on rays."""
        return self.d * self.r // gcd(self.d, self.r)


@dataclass(frozen=True, order=True)
class Ray:
    i: int
    j: int

    def scaled(self, t: int, ctx: RayContext) -> Ray:
        return Ray(self.i * t % ctx.d, self.j * t % ctx.r)

    def as_pair(self) -> list[int]:
        return [self.i, self.j]


def _wall_position(ctx: RayContext, ray: Ray) -> int:
    """Sign of <i/d> + <j/r> - 1 scaled by d*r, in exact integers."""
    i, j = ray.i % ctx.d, ray.j % ctx.r
    return i * ctx.r + j * ctx.d - ctx.d * ctx.r


def in_S(ctx: RayContext, ray: Ray) -> bool:
    return ray.i % ctx.d != 0 and ray.j % ctx.r != 0 and _wall_position(ctx, ray) != 0


def ray_class(ctx: RayContext, ray: Ray) -> HalfPlane:
    if not in_S(ctx, ray):
        raise DomainError(f"ray {ray.as_pair()} is not in S for d={ctx.d}, r={ctx.r}")
    below = _wall_position(ctx, ray) < 0
    if ctx.convention is RayConvention.GT1:
        below = not below
    return HalfPlane.LOWER if below else HalfPlane.UPPER


def ray_orbit(ctx: RayContext, ray: Ray) -> tuple[Ray, ...]:
    """The orbit of (i, j) under (i, j) -> (p i, p j), sorted."""
    start = Ray(ray.i % ctx.d, ray.j % ctx.r)
    out, x = [start], start.scaled(ctx.p, ctx)
    while x != start:
        out.append(x)
        x = x.scaled(ctx.p, ctx)
    return tuple(sorted(out))


def ray_decompose(ctx: RayContext) -> list[tuple[Ray, ...]]:
    """Orbits partitioning S, sorted by least ray."""
    seen: set[Ray] = set()
    out = []
    for i in range(1, ctx.d):
        for j in range(1, ctx.r):
            ray = Ray(i, j)
            if ray in seen or not in_S(ctx, ray):
                continue
            orbit = ray_orbit(ctx, ray)
            seen.update(orbit)
            out.append(orbit)
    return out


def _orbit_split(ctx: RayContext, orbit: Sequence[Ray]) -> tuple[int, int]:
    lower = sum(1 for x in orbit if ray_class(ctx, x) is HalfPlane.LOWER)
    return lower, len(orbit) - lower


@lru_cache(maxsize=32)
def _even_split(ctx: RayContext) -> dict[Ray, bool]:
    """Ray -> whether its own orbit meets both sides equally."""
    out: dict[Ray, bool] = {}
    for orbit in ray_decompose(ctx):
        lower, upper = _orbit_split(ctx, orbit)
        out.update(dict.fromkeys(orbit, lower == upper))
    return out


def is_balanced_ray(ctx: RayContext, ray: Ray) -> bool:
    """Every orbit <p> t (i, j), t a unit modulo lcm(d, r), meets both sides equally."""
    if not in_S(ctx, ray):
        raise DomainError(f"ray {ray.as_pair()} is not in S")
    n = ctx.modulus
    split = _even_split(ctx)
    return all(split[ray.scaled(t, ctx)] for t in range(1, n) if gcd(t, n) == 1)


def ray_cycle(ctx: RayContext, base: Ray) -> tuple[Ray, ...]:
    """The orbit listed as (base, p base, p^2 base, ...)."""
    out, x = [base], base.scaled(ctx.p, ctx)
    while x != base:
        out.append(x)
        x = x.scaled(ctx.p, ctx)
    return tuple(out)


def ray_word(ctx: RayContext, orbit: Sequence[Ray], base: Ray) -> Word:
    """w_j = u when -p^(j-1) base is UPPER, l when it is LOWER."""
    base = Ray(base.i % ctx.d, base.j % ctx.r)
    if base not in set(orbit):
        raise DomainError(f"ray {base.as_pair()} is not in the given orbit")
    letters = []
    for x in ray_cycle(ctx, base):
        neg = x.scaled(-1, ctx)
        letters.append(U if ray_class(ctx, neg) is HalfPlane.UPPER else L)
    return Word("".join(letters))


@dataclass(frozen=True)
class RayOrbitSummary:
    orbit: tuple[Ray, ...]
    balanced: bool
    base: Ray | None
    word: Word | None
    height: int | None
    d_list: tuple[int, ...] | None

    def to_dict(self) -> dict:
        return {
            "orbit_min": self.orbit[0].as_pair(),
            "orbit_size": len(self.orbit),
            "balanced": self.balanced,
            "base": None if self.base is None else self.base.as_pair(),
            "word": None if self.word is None else self.word.letters,
            "height": self.height,
            "d_list": None if self.d_list is None else list(self.d_list),
        }


def ray_report(ctx: RayContext) -> list[RayOrbitSummary]:
    """Word data for every ray orbit, taken at the least good base point.

    Experimental: nothing here is checked against closed forms.
    """
    out = []
    for orbit in ray_decompose(ctx):
        balanced = is_balanced_ray(ctx, orbit[0])
        lower, upper = _orbit_split(ctx, orbit)
        if lower != upper:
            out.append(RayOrbitSummary(orbit, balanced, None, None, None, None))
            continue
        cyc = ray_cycle(ctx, orbit[0])
        w0 = ray_word(ctx, orbit, orbit[0])
        base = min(cyc[n] for n in good_rotations(w0))
        w = ray_word(ctx, orbit, base)
        d_list = invariant_factors(exponential_form(w).exponents[:-1]).d
        out.append(RayOrbitSummary(orbit, balanced, base, w, height_profile(w).height, d_list))
    return out
