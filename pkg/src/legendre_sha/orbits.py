"""Orbits of the cyclic group <p> acting on Z/dZ by multiplication."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterator

from sympy import isprime

from .errors import DomainError, InvalidContextError


class HalfPlane(enum.Enum):
    LOWER = "lower"  # least residue in (0, d/2)
    UPPER = "upper"  # least residue in (d/2, d)
    BOUNDARY = "boundary"  # 0, or d/2 when d is even


class OrbitFilter(enum.Enum):
    ALL = "all"
    O = "O"  # drop {0} and {d/2}
    O_PRIME = "O'"  # orbits of units only


@dataclass(frozen=True)
class OrbitContext:
    d: int
    p: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise InvalidContextError(f"d must be a positive integer, got {self.d!r}")
        if not isinstance(self.p, int) or not isprime(self.p):
            raise InvalidContextError(f"p must be prime, got {self.p!r}")
        if gcd(self.p, self.d) != 1:
            raise InvalidContextError(f"p={self.p} divides d={self.d}")

    @property
    def order(self) -> int:
        """Multiplicative order of p modulo d (1 when d = 1)."""
        return multiplicative_order(self.p, self.d)


@dataclass(frozen=True)
class Orbit:
    context: OrbitContext
    elements: tuple[int, ...]
    gcd_class: int

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def least(self) -> int:
        return self.elements[0]

    def __contains__(self, i: int) -> bool:
        return i % self.context.d in self._members

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    @cached_property
    def _members(self) -> frozenset[int]:
        return frozenset(self.elements)

    def cycle(self, base: int) -> tuple[int, ...]:
        """The orbit listed as (base, p*base, p^2*base, ...)."""
        d, p = self.context.d, self.context.p
        base %= d
        if base not in self:
            raise DomainError(f"{base} is not in the orbit of {self.least}")
        out = [base]
        x = base * p % d
        while x != base:
            out.append(x)
            x = x * p % d
        return tuple(out)

    def is_boundary(self) -> bool:
        return halfplane_class(self.least, self.context.d) is HalfPlane.BOUNDARY


def multiplicative_order(a: int, n: int) -> int:
    if n == 1:
        return 1
    if gcd(a, n) != 1:
        raise DomainError(f"{a} is not a unit modulo {n}")
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


def halfplane_class(i: int, d: int) -> HalfPlane:
    if not 0 <= i < d:
        raise DomainError(f"residue {i} not in [0, {d})")
    if i == 0 or 2 * i == d:
        return HalfPlane.BOUNDARY
    return HalfPlane.LOWER if 2 * i < d else HalfPlane.UPPER


def orbit_through(ctx: OrbitContext, i: int) -> Orbit:
    d, p = ctx.d, ctx.p
    i %= d
    elems = [i]
    x = i * p % d
    while x != i:
        elems.append(x)
        x = x * p % d
    return Orbit(ctx, tuple(sorted(elems)), gcd(i, d))


@lru_cache(maxsize=64)
def _all_orbits(d: int, p: int) -> tuple[Orbit, ...]:
    ctx = OrbitContext(d, p)
    seen = bytearray(d)
    out = []
    for i in range(d):
        if seen[i]:
            continue
        elems = [i]
        seen[i] = 1
        x = i * p % d
        while x != i:
            elems.append(x)
            seen[x] = 1
            x = x * p % d
        elems.sort()
        out.append(Orbit(ctx, tuple(elems), gcd(i, d)))
    return tuple(out)


def decompose(ctx: OrbitContext, filter: OrbitFilter = OrbitFilter.ALL) -> list[Orbit]:
    """Partition of Z/dZ (or the subset selected by ``filter``) into orbits.

    Orbits come sorted by least element. For d <= 2 the ``O`` and ``O_PRIME``
    filters give an empty list.
    """
    orbits = _all_orbits(ctx.d, ctx.p)
    if filter is OrbitFilter.ALL:
        return list(orbits)
    if ctx.d <= 2:
        return []
    out = [o for o in orbits if not o.is_boundary()]
    if filter is OrbitFilter.O_PRIME:
        out = [o for o in out if o.gcd_class == 1]
    return out


def _side_counts(o: Orbit) -> tuple[int, int]:
    lower = upper = 0
    for i in o.elements:
        side = halfplane_class(i, o.context.d)
        if side is HalfPlane.BOUNDARY:
            raise DomainError(f"orbit of {o.least} contains the boundary residue {i}")
        if side is HalfPlane.LOWER:
            lower += 1
        else:
            upper += 1
    return lower, upper


def is_balanced_orbit(o: Orbit) -> bool:
    lower, upper = _side_counts(o)
    return lower == upper


@lru_cache(maxsize=1024)
def _balanced_modulus(d: int, p: int) -> bool:
    ctx = OrbitContext(d, p)
    return all(is_balanced_orbit(o) for o in decompose(ctx, OrbitFilter.O_PRIME))


def is_balanced_modulus(ctx: OrbitContext) -> bool:
    """True when every orbit of units modulo d is balanced."""
    if ctx.d <= 2:
        raise DomainError("balance is defined for d > 2")
    return _balanced_modulus(ctx.d, ctx.p)


def least_f_with_minus_one(ctx: OrbitContext) -> int | None:
    """Least f >= 1 with p^f = -1 mod d, or None if -1 is not a power of p."""
    d, p = ctx.d, ctx.p
    if d <= 2:
        return None
    x = p % d
    for f in range(1, ctx.order + 1):
        if x == d - 1:
            return f
        x = x * p % d
    return None
