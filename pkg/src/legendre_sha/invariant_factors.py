"""Invariant factors of the bidiagonal matrices B(e_1, ..., e_{2k-1}).

B is the k x k upper bidiagonal matrix with p^{e_1}, p^{e_3}, ... on the
diagonal and -p^{e_2}, -p^{e_4}, ... above it. Its invariant factors are
p^{d_1}, ..., p^{d_k} with d_1 <= ... <= d_k. The exponents do not depend on
p, so everything here works with exponent lists.

Two elimination algorithms are provided (one peels off the smallest factor,
the other the largest) together with an oracle that takes determinantal
divisors over every minor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import CapacityError, ConsistencyError, DomainError

MAX_ORACLE_K = 10


@dataclass(frozen=True)
class BidiagonalSpec:
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if len(self.exponents) % 2 == 0:
            raise DomainError(f"need an odd number of exponents, got {len(self.exponents)}")
        if any(e < 1 for e in self.exponents):
            raise DomainError("exponents must be positive")

    @property
    def k(self) -> int:
        return (len(self.exponents) + 1) // 2

    def matrix(self, p: int = 2) -> list[list[int]]:
        k, e = self.k, self.exponents
        m = [[0] * k for _ in range(k)]
        for r in range(k):
            m[r][r] = p ** e[2 * r]
            if r + 1 < k:
                m[r][r + 1] = -(p ** e[2 * r + 1])
        return m


@dataclass(frozen=True)
class InvariantFactors:
    d: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(sorted(self.d)))

    @property
    def k(self) -> int:
        return len(self.d)

    @property
    def total(self) -> int:
        return sum(self.d)


def _spec(spec) -> BidiagonalSpec:
    return spec if isinstance(spec, BidiagonalSpec) else BidiagonalSpec(tuple(spec))


def _exponents(spec) -> tuple[int, ...]:
    if isinstance(spec, BidiagonalSpec):
        return spec.exponents
    e = tuple(spec)
    if len(e) % 2 == 0 or min(e) < 1:
        return BidiagonalSpec(e).exponents  # raises with a precise message
    return e


def alternating_sum(spec: BidiagonalSpec | Sequence[int], i: int, j: int) -> int:
    """e_i - e_{i+1} + ... +- e_j, 1-based and inclusive."""
    e = _spec(spec).exponents
    if not 1 <= i <= j <= len(e):
        raise DomainError(f"need 1 <= i <= j <= {len(e)}, got ({i}, {j})")
    return sum(x if n % 2 == 0 else -x for n, x in enumerate(e[i - 1 : j]))


# Elimination by the smallest entry


def _min_step(e: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    m = min(e)
    i = e.index(m)
    if i == 0:
        return m, e[2:]
    if i == len(e) - 1:
        return m, e[:-2]
    return m, e[: i - 1] + (e[i - 1] - e[i] + e[i + 1],) + e[i + 2 :]


@lru_cache(maxsize=1 << 16)
def _min_pivot_cached(e: tuple[int, ...]) -> tuple[int, ...]:
    if len(e) == 1:
        return e
    m, rest = _min_step(e)
    return (m,) + _min_pivot_cached(rest)


def _min_pivot(e: tuple[int, ...]) -> tuple[int, ...]:
    # top level stays uncached so sweeps over many specs do not fill the cache
    if len(e) == 1:
        return e
    m, rest = _min_step(e)
    return (m,) + _min_pivot_cached(rest)


def invariants_by_min_pivot(spec: BidiagonalSpec | Sequence[int]) -> InvariantFactors:
    """Peel off d_1 = min e_i and recurse on the reduced matrix.

    With i the (first) position of the minimum, B is equivalent to
    (p^{e_i}) + B' where B' drops e_1, e_2 (i = 1), drops the last two entries
    (i = 2k-1), or replaces e_{i-1}, e_i, e_{i+1} by e_{i-1} - e_i + e_{i+1}.
    """
    return InvariantFactors(_min_pivot(_exponents(spec)))


# Elimination by the largest odd alternating sum


def _max_odd_alternating(e: tuple[int, ...]) -> tuple[int, int, int]:
    """(max e_ij, i, j) over even 0-based i <= j; ties go to the smallest (i, j)."""
    best = bi = bj = None
    low = li = None  # least even-position prefix so far, earliest on ties
    s = 0  # alternating prefix sum before position t
    for t in range(0, len(e), 2):
        if low is None or s < low:
            low, li = s, t
        s += e[t]
        v = s - low
        if best is None or v > best or (v == best and li < bi):
            best, bi, bj = v, li, t
        if t + 1 < len(e):
            s -= e[t + 1]
    return best, bi, bj


def _max_split(e: tuple[int, ...], recurse) -> tuple[int, ...]:
    top, i, j = _max_odd_alternating(e)
    out = (top,)
    if i > 0:
        out += recurse(e[: i - 1])
    if i < j:
        # B(e_{i+1}, ..., e_{j-1}) enters transposed; transposition keeps the factors
        out += recurse(e[i + 1 : j])
    if j < len(e) - 1:
        out += recurse(e[j + 2 :])
    return out


@lru_cache(maxsize=1 << 16)
def _max_pivot_cached(e: tuple[int, ...]) -> tuple[int, ...]:
    if len(e) == 1:
        return e
    return _max_split(e, _max_pivot_cached)


def _max_pivot(e: tuple[int, ...]) -> tuple[int, ...]:
    if len(e) == 1:
        return e
    return _max_split(e, _max_pivot_cached)


def invariants_by_max_pivot(spec: BidiagonalSpec | Sequence[int]) -> InvariantFactors:
    """Peel off d_k = max e_ij (i <= j odd) and split into up to three blocks."""
    return InvariantFactors(_max_pivot(_exponents(spec)))


# Determinantal-divisor oracle


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def _minor_terms(k: int) -> tuple[tuple[tuple[tuple[int, int], ...], ...], ...]:
    """Leibniz terms of every i x i minor of a k x k upper bidiagonal pattern.

    Result[i-1] lists, for each minor (row set R, column set C) that is not
    identically zero, its terms as tuples of signed cell codes. A minor is
    identically zero unless some bijection R -> C sends each row r to r or
    r+1; those bijections are exactly the non-vanishing Leibniz terms. Cell
    code 2r means the diagonal cell (r, r), 2r+1 the superdiagonal (r, r+1);
    the sign of a term is folded into a leading +1 / -1.
    """
    by_size: list[list] = [[] for _ in range(k)]
    for size in range(1, k + 1):
        groups: dict[tuple, list] = {}
        for rows in combinations(range(k), size):
            for shifts in _shift_choices(size):
                cols = tuple(r + s for r, s in zip(rows, shifts))
                if cols[-1] >= k or len(set(cols)) < size:
                    continue
                # permutation sign of rows -> cols relative to sorted cols
                order = sorted(range(size), key=lambda t: cols[t])
                sign = _perm_sign(order)
                cells = tuple(2 * r + s for r, s in zip(rows, shifts))
                # the superdiagonal carries -p^e
                sign *= (-1) ** sum(shifts)
                groups.setdefault((rows, tuple(sorted(cols))), []).append((sign,) + cells)
        by_size[size - 1] = [tuple(v) for _, v in sorted(groups.items())]
    return tuple(tuple(x) for x in by_size)


def _shift_choices(size: int):
    for mask in range(1 << size):
        yield tuple((mask >> t) & 1 for t in range(size))


def _perm_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(perm)
    for s in range(len(perm)):
        if seen[s]:
            continue
        length, t = 0, s
        while not seen[t]:
            seen[t] = True
            t = perm[t]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def minors_oracle(spec: BidiagonalSpec | Sequence[int], p: int = 2) -> InvariantFactors:
    """d_1 + ... + d_i = min v_p of the i x i minors of B, with exact integers."""
    s = _spec(spec)
    if s.k > MAX_ORACLE_K:
        raise CapacityError(f"minor enumeration capped at k = {MAX_ORACLE_K}, got {s.k}")
    e = s.exponents
    entry = [p ** x for x in e]  # magnitudes; signs live in the term
    prev, out = 0, []
    for minors in _minor_terms(s.k):
        best = None
        for terms in minors:
            value = 0
            for sign, *cells in terms:
                t = sign
                for c in cells:
                    t *= entry[c]
                value += t
            if value:
                v = valuation(value, p)
                best = v if best is None else min(best, v)
        if best is None:
            raise ConsistencyError("all minors of a nonsingular matrix vanish")
        out.append(best - prev)
        prev = best
    return InvariantFactors(tuple(out))


def minors_oracle_batch(exponents: np.ndarray) -> np.ndarray:
    """Vectorised ``minors_oracle`` at p = 2 for an (N, 2k-1) array of specs.

    Returns an (N, k) array of sorted invariant-factor exponents. Raises
    CapacityError when a minor could overflow int64.
    """
    e = np.asarray(exponents, dtype=np.int64)
    n, width = e.shape
    if width % 2 == 0:
        raise DomainError("need an odd number of exponents")
    k = (width + 1) // 2
    if k > MAX_ORACLE_K:
        raise CapacityError(f"minor enumeration capped at k = {MAX_ORACLE_K}")
    if n == 0:
        return np.zeros((0, k), dtype=np.int64)
    if e.min() < 1:
        raise DomainError("exponents must be positive")
    minors = _minor_terms(k)
    worst = max(len(terms) for level in minors for terms in level)
    if worst > 1 and k * int(e.max()) + worst.bit_length() >= 62:
        raise CapacityError("minors would overflow int64; use minors_oracle")
    prev = np.zeros(n, dtype=np.int64)
    out = np.empty((n, k), dtype=np.int64)
    big = np.int64(1 << 62)
    for size, level in enumerate(minors):
        best = np.full(n, big, dtype=np.int64)
        for terms in level:
            if len(terms) == 1:
                # a single Leibniz term +-2^s has valuation s
                cells = terms[0][1:]
                v = e[:, cells[0]].copy()
                for c in cells[1:]:
                    v += e[:, c]
            else:
                value = np.zeros(n, dtype=np.int64)
                for sign, *cells in terms:
                    value += sign * np.left_shift(np.int64(1), e[:, list(cells)].sum(axis=1))
                nz = value != 0
                low = np.abs(value & -value)
                v = np.where(nz, np.log2(np.where(nz, low, 1)).astype(np.int64), big)
            np.minimum(best, v, out=best)
        if (best == big).any():
            raise ConsistencyError("all minors of a nonsingular matrix vanish")
        out[:, size] = best - prev
        prev = best
    return np.sort(out, axis=1)


# Complementary words and equivalent matrices


def invariants_complementary(half_exponents: Sequence[int]) -> InvariantFactors:
    """Factors of B(e_1, ..., e_k, e_1, ..., e_{k-1}) for a complementary word.

    The word is u^{e_1} ... u^{e_k} l^{e_1} ... l^{e_k} with k odd, read from
    a good base point (its profile never drops below 0). Checks
    d_k = e_1 - e_2 + ... + e_k, that d_1..d_{k-1} pair up, and that
    d_{k-1} is the largest alternating sum between even positions 2..k-1.
    """
    half = tuple(int(x) for x in half_exponents)
    k = len(half)
    if k % 2 == 0:
        raise DomainError(f"complementary half must have odd length, got {k}")
    if any(x < 1 for x in half):
        raise DomainError("exponents must be positive")
    level = 0
    for n, x in enumerate(half + half):
        level += x if n % 2 == 0 else -x
        if level < 0:
            raise DomainError(f"word with runs {half} is not read from a good base point")
    full = half + half[:-1]
    factors = invariants_by_max_pivot(full)
    d = factors.d
    checks = [d[-1] == alternating_sum(full, 1, k)]
    checks += [d[t] == d[t + 1] for t in range(0, k - 1, 2)]
    if k > 1:
        inner = max(
            alternating_sum(full, i, j)
            for i in range(2, k, 2)
            for j in range(i, k, 2)
        )
        checks.append(d[k - 2] == inner)
    if not all(checks):
        raise ConsistencyError(f"complementary structure fails for {half}: {d}")
    return factors


def rotation_equivalents(full_exponents: Sequence[int]) -> list[BidiagonalSpec]:
    """The four matrices with the same invariant factors for a good-base-point word.

    For exponents e_1..e_{2k} with every prefix alternating sum e_{1,l} >= 0,
    and 2j+1 the first position maximising e_{1,l}: B(e_1..e_{2k-1}),
    B(e_2..e_{2k}), B(e_{2j+2}..e_{2k}, e_1..e_{2j}) and
    B(e_{2j+3}..e_{2k}, e_1..e_{2j+1}).
    """
    e = tuple(int(x) for x in full_exponents)
    if not e or len(e) % 2 or any(x < 1 for x in e):
        raise DomainError("need an even number of positive exponents")
    prefix, s = [], 0
    for n, x in enumerate(e):
        s += x if n % 2 == 0 else -x
        prefix.append(s)
    if min(prefix) < 0:
        raise DomainError("exponents do not come from a good base point")
    top = max(prefix)
    ell = prefix.index(top)  # 0-based; a maximum sits after a u-run, so ell is even
    if ell % 2:
        raise DomainError("maximum alternating prefix sum is not at an odd position")
    j = ell // 2
    return [
        BidiagonalSpec(e[:-1]),
        BidiagonalSpec(e[1:]),
        BidiagonalSpec(e[2 * j + 1 :] + e[: 2 * j]),
        BidiagonalSpec(e[2 * j + 2 :] + e[: 2 * j + 1]),
    ]


def invariant_factors(spec: BidiagonalSpec | Sequence[int]) -> InvariantFactors:
    """Default route (smallest-entry elimination)."""
    return invariants_by_min_pivot(spec)
