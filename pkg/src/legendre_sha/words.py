"""Words on {u, l} attached to orbits, base points, heights and diagrams.

A base point i of an orbit determines the word w_1...w_n with w_j = u when
-p^(j-1) i lies in the upper half (d/2, d) and w_j = l when it lies in the
lower half (0, d/2). Moving the base point from i to p*i rotates the word
left by one letter.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import groupby
from typing import Iterable

from .errors import DomainError
from .orbits import HalfPlane, Orbit, halfplane_class

U, L = "u", "l"
_FLIP = str.maketrans("ul", "lu")


@dataclass(frozen=True, order=True)
class Word:
    letters: str

    def __post_init__(self):
        if not self.letters or set(self.letters) - {U, L}:
            raise DomainError(f"not a non-empty word on {{u, l}}: {self.letters!r}")

    def __str__(self) -> str:
        return self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def rotate(self, n: int = 1) -> Word:
        """Rotate left by n letters."""
        n %= len(self.letters)
        return Word(self.letters[n:] + self.letters[:n])

    def complement(self) -> Word:
        return Word(self.letters.translate(_FLIP))

    def rotations(self) -> list[Word]:
        return [self.rotate(n) for n in range(len(self))]

    def is_balanced(self) -> bool:
        return self.letters.count(U) == self.letters.count(L)

    def period(self) -> int:
        """Length of the primitive cyclic period."""
        n = len(self.letters)
        for t in range(1, n + 1):
            if n % t == 0 and self.letters[t:] + self.letters[:t] == self.letters:
                return t
        return n  # unreachable


@dataclass(frozen=True)
class ExponentialForm:
    exponents: tuple[int, ...]

    def __post_init__(self):
        if not self.exponents or len(self.exponents) % 2:
            raise DomainError("an exponential form has an even, positive number of runs")
        if any(e < 1 for e in self.exponents):
            raise DomainError("run lengths must be positive")

    @property
    def k(self) -> int:
        return len(self.exponents) // 2

    def to_word(self) -> Word:
        return Word("".join((U if n % 2 == 0 else L) * e for n, e in enumerate(self.exponents)))


@dataclass(frozen=True)
class HeightProfile:
    a_seq: tuple[int, ...]
    height: int


def word_from_sides(sides: Iterable[HalfPlane]) -> Word:
    letters = []
    for side in sides:
        if side is HalfPlane.BOUNDARY:
            raise DomainError("boundary residue met while reading a word")
        letters.append(U if side is HalfPlane.UPPER else L)
    return Word("".join(letters))


def word_at(o: Orbit, i: int) -> Word:
    d = o.context.d
    return word_from_sides(halfplane_class(-x % d, d) for x in o.cycle(i))


def height_profile(w: Word) -> HeightProfile:
    a = [0]
    for c in w.letters:
        a.append(a[-1] + (1 if c == U else -1))
    return HeightProfile(tuple(a), max(a))


def good_rotations(w: Word) -> list[int]:
    """Offsets n such that the word rotated left by n has a profile >= 0."""
    a = height_profile(w).a_seq
    n = len(w)
    if a[-1] == 0:
        low = min(a)
        return [r for r in range(n) if a[r] == low]
    out = []
    for r in range(n):
        base = a[r]
        # a_{r+j} for j past the end wraps with an offset of a_n
        if all(a[r + j] - base >= 0 for j in range(n - r + 1)) and all(
            a[-1] + a[j] - base >= 0 for j in range(r + 1)
        ):
            out.append(r)
    return out


def good_base_points(o: Orbit) -> list[int]:
    cyc = o.cycle(o.least)
    w = word_at(o, o.least)
    return sorted(cyc[r] for r in good_rotations(w))


def standard_base_point(o: Orbit) -> int:
    w = word_at(o, o.least)
    if not w.is_balanced():
        raise DomainError(f"orbit of {o.least} is not balanced")
    return good_base_points(o)[0]


def standard_word(o: Orbit) -> Word:
    return word_at(o, standard_base_point(o))


def exponential_form(w: Word) -> ExponentialForm:
    s = w.letters
    if s[0] != U or s[-1] != L:
        raise DomainError(f"word {s!r} does not start with u and end with l")
    return ExponentialForm(tuple(len(list(g)) for _, g in groupby(s)))


def is_complementary(w: Word) -> bool:
    n = len(w)
    if n % 2:
        raise DomainError("complementarity needs a word of even length")
    h = n // 2
    return w.letters[h:] == w.letters[:h].translate(_FLIP)


def string_diagram(w: Word) -> str:
    """Dummigan string diagram s_1...s_f of a complementary word of length 2f.

    s_j is O when w_j = w_{j+1} and X otherwise. The successor index is taken
    cyclically, although for j <= f it never runs past the end of the word.
    """
    if not is_complementary(w):
        raise DomainError(f"word {w} is not complementary")
    s, n = w.letters, len(w)
    return "".join("O" if s[j] == s[(j + 1) % n] else "X" for j in range(n // 2))


def canonical_rotation(w: Word) -> Word:
    """Base-point-free key: least good rotation in lexicographic order."""
    offsets = good_rotations(w) or range(len(w))
    return min(w.rotate(r) for r in offsets)


@lru_cache(maxsize=None)
def _alt_prefix_max(exponents: tuple[int, ...]) -> int:
    best = s = 0
    for n, e in enumerate(exponents):
        s += e if n % 2 == 0 else -e
        best = max(best, s)
    return best


def height_from_exponents(exponents: Iterable[int]) -> int:
    """max{e_1, e_1 - e_2 + e_3, ...}: the height of u^e1 l^e2 ... l^e2k."""
    return _alt_prefix_max(tuple(exponents))
