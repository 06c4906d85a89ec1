"""Patterns of residues modulo p^f + 1, closed-form counts and F_f(T).

For d = p^f + 1 write S = Z/dZ minus {0, d/2}. The pattern of i in S is the
first f letters of its word; since p^f acts as -1, the second f letters are
the complement, so the pattern determines the word. Residues i = 1 + sum
i_j p^(j-1) correspond to digit tuples, and patterns can be read off the
digits without any modular arithmetic.

F_f(T) is the polynomial with |Sha| = p^(F_f(p)) for every odd p. It is
assembled from pattern counts, each a product of powers of (T-1)/2 and
(T+1)/2.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import groupby, product
from typing import Iterable, Sequence

from .errors import DomainError, UnsupportedConfigurationError
from .orbits import HalfPlane, OrbitContext, OrbitFilter, decompose, halfplane_class
from .words import L, U, Word, good_rotations, height_profile, standard_word, word_at

# Patterns


@dataclass(frozen=True)
class Pattern:
    letters: str

    def __post_init__(self):
        if not self.letters or set(self.letters) - {U, L}:
            raise DomainError(f"not a non-empty pattern on {{u, l}}: {self.letters!r}")

    def __str__(self) -> str:
        return self.letters

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def runs(self) -> tuple[int, ...]:
        return tuple(len(list(g)) for _, g in groupby(self.letters))

    @property
    def k(self) -> int:
        """Number of maximal runs."""
        return len(self.runs)

    def full_word(self) -> Word:
        """The length-2f word: the pattern followed by its complement."""
        return Word(self.letters + Word(self.letters).complement().letters)


def _check_odd(p: int) -> None:
    if p % 2 == 0:
        raise DomainError("pattern counting needs an odd prime")


def _modulus(p: int, f: int) -> int:
    if f < 1:
        raise DomainError(f"f must be positive, got {f}")
    return p**f + 1


def pattern_of(i: int, p: int, f: int) -> Pattern:
    """Letters w_1..w_f with w_j = u when -p^(j-1) i lies in (d/2, d)."""
    d = _modulus(p, f)
    if not 0 <= i < d or halfplane_class(i, d) is HalfPlane.BOUNDARY:
        raise DomainError(f"{i} is not in S for d = {d}")
    letters, x = [], i
    for _ in range(f):
        letters.append(U if halfplane_class(-x % d, d) is HalfPlane.UPPER else L)
        x = x * p % d
    return Pattern("".join(letters))


def residue_from_digits(digits: Sequence[int], p: int) -> int:
    """1 + i_1 + i_2 p + ... + i_f p^(f-1)."""
    if any(not 0 <= x < p for x in digits):
        raise DomainError(f"digits must lie in [0, {p - 1}]")
    return 1 + sum(x * p**j for j, x in enumerate(digits))


def digits_from_residue(i: int, p: int, f: int) -> tuple[int, ...]:
    if not 1 <= i <= p**f:
        raise DomainError(f"{i} is not in [1, {p}^{f}]")
    n, out = i - 1, []
    for _ in range(f):
        n, r = divmod(n, p)
        out.append(r)
    return tuple(out)


def _first_letter(digits: Sequence[int], half: int) -> str:
    for x in reversed(digits):
        if x != half:
            return U if x < half else L
    raise DomainError("the all-middle digit tuple corresponds to d/2")


def pattern_of_digits(digits: Sequence[int], p: int) -> Pattern:
    """Pattern of 1 + sum i_j p^(j-1), read off the digits.

    The first letter is u exactly when, scanning i_f, i_(f-1), ..., the first
    digit different from (p-1)/2 is smaller than it. Multiplying by p sends
    (i_1, ..., i_f) to (p-1-i_f, i_1, ..., i_(f-1)), which gives the rest.
    """
    _check_odd(p)
    digits = tuple(digits)
    if not digits or any(not 0 <= x < p for x in digits):
        raise DomainError(f"need a non-empty tuple of digits in [0, {p - 1}]")
    half = (p - 1) // 2
    letters = []
    for _ in range(len(digits)):
        letters.append(_first_letter(digits, half))
        digits = (p - 1 - digits[-1],) + digits[:-1]
    return Pattern("".join(letters))


def _validate_counting_pattern(pattern: Pattern | str) -> Pattern:
    pat = pattern if isinstance(pattern, Pattern) else Pattern(pattern)
    if pat.letters[0] != U or pat.letters[-1] != U:
        raise DomainError(f"pattern {pat} must start and end with u")
    return pat


def count_by_pattern(pattern: Pattern | str, p: int, characteristic_two: bool = False) -> int:
    """Number of i in S with the given pattern u^e1 l^e2 ... u^ek (k odd).

    Equals ((p-1)/2)^k ((p+1)/2)^(f-k). For p = 2 every pattern is realised
    exactly once; that case needs ``characteristic_two=True``.
    """
    pat = _validate_counting_pattern(pattern)
    if p == 2:
        if not characteristic_two:
            raise DomainError("p = 2 counts need characteristic_two=True")
        return 1
    _check_odd(p)
    k, f = pat.k, len(pat)
    return ((p - 1) // 2) ** k * ((p + 1) // 2) ** (f - k)


def count_prefix(prefix: str, p: int, f: int) -> int:
    """Number of i in S whose pattern starts with ``prefix`` ("lu" or "ll")."""
    _check_odd(p)
    if f < 2:
        raise DomainError("prefix counts need f >= 2")
    if prefix == "lu":
        return (p - 1) // 2 * ((p ** (f - 1) + 1) // 2)
    if prefix == "ll":
        return (p + 1) // 2 * ((p ** (f - 1) - 1) // 2)
    raise DomainError(f"prefix must be 'lu' or 'll', got {prefix!r}")


def scan_pattern_counts(p: int, f: int) -> Counter:
    """Pattern -> number of i in S, by direct enumeration."""
    d = _modulus(p, f)
    return Counter(pattern_of(i, p, f).letters for i in range(1, d) if 2 * i != d)


def pattern_compositions(f: int) -> list[tuple[int, ...]]:
    """Run lengths (e_1, ..., e_k) of all patterns u...u of length f, k odd."""
    out = []
    for cuts in product((0, 1), repeat=f - 1):
        runs, n = [], 1
        for c in cuts:
            if c:
                runs.append(n)
                n = 1
            else:
                n += 1
        runs.append(n)
        if len(runs) % 2:
            out.append(tuple(runs))
    return sorted(out)


def pattern_from_runs(runs: Iterable[int]) -> Pattern:
    return Pattern("".join((U if n % 2 == 0 else L) * e for n, e in enumerate(runs)))


# Dimensions


def h1_dimension(p: int, f: int) -> int:
    """((p-1)/2)((p^(f-1)+1)/2)."""
    _check_odd(p)
    if f < 1:
        raise DomainError("f must be positive")
    return (p - 1) // 2 * ((p ** (f - 1) + 1) // 2)


def selmer_dimension(p: int, f: int) -> int:
    """(p-1)(p^(f-1)+1) f / 2."""
    _check_odd(p)
    if f < 1:
        raise DomainError("f must be positive")
    return (p - 1) * (p ** (f - 1) + 1) * f // 2


def h1_dimension_by_orbits(p: int, f: int) -> int:
    """Number of i in S whose word (from base point i) has the form u...l."""
    _check_odd(p)
    ctx = OrbitContext(_modulus(p, f), p)
    total = 0
    for o in decompose(ctx, OrbitFilter.O):
        w = word_at(o, o.least).letters
        n = len(w)
        # rotating the base point by p rotates the word, so count rotations
        total += sum(1 for r in range(n) if w[r] == U and w[r - 1] == L)
    return total


def selmer_dimension_by_orbits(p: int, f: int) -> int:
    """(p^f - 1) + sum over O of |o| (k_o - 1), k_o the u-runs of the length-2f word."""
    _check_odd(p)
    d = _modulus(p, f)
    total = d - 2
    for o in decompose(OrbitContext(d, p), OrbitFilter.O):
        w = standard_word(o).letters
        runs = sum(1 for c, _ in groupby(w) if c == U) * (2 * f // len(w))
        total += o.size * (runs - 1)
    return total


def sha_order_exponent(ctx: OrbitContext, f: int | None = None) -> int:
    """I = sum over O of |o| (f - ht(o)), so that |Sha| = p^I."""
    if f is None:
        from .structures import infer_f

        f = infer_f(ctx)
    if f is None or ctx.d != ctx.p**f + 1:
        raise UnsupportedConfigurationError(f"d = {ctx.d} is not p^f + 1 for p = {ctx.p}")
    total = 0
    for o in decompose(ctx, OrbitFilter.O):
        total += o.size * (f - height_profile(standard_word(o)).height)
    return total


# Exact polynomials


@dataclass(frozen=True)
class RationalPoly:
    """Univariate polynomial with Fraction coefficients, ascending degree.

    Trailing zeros are stripped, so the zero polynomial has no coefficients.
    """

    coefficients: tuple[Fraction, ...] = ()

    def __post_init__(self):
        c = [Fraction(x) for x in self.coefficients]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(c))

    @classmethod
    def constant(cls, c) -> RationalPoly:
        return cls((Fraction(c),))

    @classmethod
    def variable(cls) -> RationalPoly:
        return cls((Fraction(0), Fraction(1)))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __add__(self, other: RationalPoly) -> RationalPoly:
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        a = a + (Fraction(0),) * (n - len(a))
        b = b + (Fraction(0),) * (n - len(b))
        return RationalPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> RationalPoly:
        return RationalPoly(tuple(-x for x in self.coefficients))

    def __sub__(self, other: RationalPoly) -> RationalPoly:
        return self + (-other)

    def __mul__(self, other: RationalPoly | int | Fraction) -> RationalPoly:
        if not isinstance(other, RationalPoly):
            return RationalPoly(tuple(x * other for x in self.coefficients))
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return RationalPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return RationalPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> RationalPoly:
        if n < 0:
            raise DomainError("negative powers are not polynomials")
        out, base = RationalPoly.constant(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def denominators_are_powers_of_two(self) -> bool:
        return all(c.denominator & (c.denominator - 1) == 0 for c in self.coefficients)

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coefficients]

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for n, c in reversed(list(enumerate(self.coefficients))):
            if c == 0:
                continue
            mono = "" if n == 0 else ("T" if n == 1 else f"T^{n}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
            else:
                coef = str(c) + ("*" if mono else "")
            terms.append(coef + mono)
        return " + ".join(terms).replace("+ -", "- ")


def _good_positions(w: Word) -> int:
    return len(good_rotations(w))


@dataclass(frozen=True)
class InterpolationTerm:
    runs: tuple[int, ...]
    word: Word
    height: int
    good_positions: int
    weight: Fraction  # 2f (f - ht) / good_positions


@lru_cache(maxsize=64)
def interpolation_terms(f: int) -> tuple[InterpolationTerm, ...]:
    """One term per pattern whose full word is read from a good base point.

    Each orbit of length 2f holds as many good base points as its word has
    good positions, and every good base point carries a distinct residue
    with that pattern. Weighting by 2f (f - ht) / (good positions) therefore
    recovers |o| (f - ht) per orbit; shorter orbits work out the same way
    because their good positions shrink in proportion.
    """
    if f < 1:
        raise DomainError("f must be positive")
    out = []
    for runs in pattern_compositions(f):
        w = pattern_from_runs(runs).full_word()
        if 0 not in good_rotations(w):
            continue
        ht = height_profile(w).height
        g = _good_positions(w)
        out.append(InterpolationTerm(runs, w, ht, g, Fraction(2 * f * (f - ht), g)))
    return tuple(out)


@lru_cache(maxsize=64)
def interpolation_poly(f: int) -> RationalPoly:
    """F_f(T) with |Sha(E/K_d)| = p^(F_f(p)) for d = p^f + 1 and odd p."""
    minus = RationalPoly((Fraction(-1, 2), Fraction(1, 2)))  # (T - 1)/2
    plus = RationalPoly((Fraction(1, 2), Fraction(1, 2)))  # (T + 1)/2
    total = RationalPoly()
    for term in interpolation_terms(f):
        k = len(term.runs)
        total = total + (minus**k * plus ** (f - k)) * term.weight
    return total


def verify_interpolation(f: int, primes: Iterable[int]) -> bool:
    """F_f(p) == sha_order_exponent(p^f + 1) for every listed prime."""
    poly = interpolation_poly(f)
    for p in primes:
        _check_odd(p)
        if poly(p) != sha_order_exponent(OrbitContext(p**f + 1, p), f):
            return False
    return True
