"""Galois-module structure of Mordell-Weil quotients and Sha, orbit by orbit.

Every orbit o contributes a lattice Gamma_o (free of rank |o| over Z_p) and
its quotients Gamma_o/p^m, whose underlying group is (Z/p^m)^{|o|}. The
combinatorics of the orbit word decides which of these appear:

* the new part of the Mordell-Weil group is Gamma_o when o is balanced;
* the index quotient E/V at o is Gamma_o/p^e with e = (f - ht)/2;
* Sha at o is a product of Gamma_o/p^{d_j}, j < k, over the invariant
  factors of the word's bidiagonal matrix.

``full_report`` evaluates all of this for d = p^f + 1 and checks the
aggregate identities that tie the pieces together.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Mapping

from .errors import ConsistencyError, DomainError, UnsupportedConfigurationError
from .invariant_factors import InvariantFactors, invariant_factors
from .orbits import (
    Orbit,
    OrbitContext,
    OrbitFilter,
    decompose,
    is_balanced_modulus,
    is_balanced_orbit,
    least_f_with_minus_one,
)
from .words import (
    U,
    Word,
    exponential_form,
    height_profile,
    is_complementary,
    standard_word,
)


class QuotientKind(enum.Enum):
    FREE = "free"
    TORSION = "torsion"


@dataclass(frozen=True)
class AbelianPGroup:
    """Finite abelian p-group stored as sorted (exponent, multiplicity) pairs.

    The pair (m, n) stands for (Z/p^m)^n. Zero exponents and multiplicities
    are dropped and repeated exponents merged, so equal groups compare equal.
    """

    prime: int
    content: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        items = self.content.items() if isinstance(self.content, Mapping) else self.content
        merged: dict[int, int] = {}
        for m, n in items:
            if m < 0 or n < 0:
                raise DomainError(f"negative exponent or multiplicity: ({m}, {n})")
            if m and n:
                merged[m] = merged.get(m, 0) + n
        object.__setattr__(self, "content", tuple(sorted(merged.items())))

    @classmethod
    def trivial(cls, prime: int) -> AbelianPGroup:
        return cls(prime, ())

    def as_dict(self) -> dict[int, int]:
        return dict(self.content)

    @property
    def order_exponent(self) -> int:
        """log_p of the order."""
        return sum(m * n for m, n in self.content)

    @property
    def exponent(self) -> int:
        """log_p of the group exponent, 0 for the trivial group."""
        return self.content[-1][0] if self.content else 0

    @property
    def rank(self) -> int:
        """Dimension of the p-torsion over F_p."""
        return sum(n for _, n in self.content)

    def is_trivial(self) -> bool:
        return not self.content

    def __add__(self, other: AbelianPGroup) -> AbelianPGroup:
        if self.prime != other.prime:
            raise DomainError("direct sum of groups for different primes")
        return AbelianPGroup(self.prime, self.content + other.content)

    def scale(self, times: int) -> AbelianPGroup:
        """Direct sum of ``times`` copies."""
        return AbelianPGroup(self.prime, tuple((m, n * times) for m, n in self.content))

    def __str__(self) -> str:
        if not self.content:
            return "0"
        p = self.prime
        parts = []
        for m, n in self.content:
            base = f"Z/{p}" if m == 1 else f"Z/{p}^{m}"
            parts.append(base if n == 1 else f"({base})^{n}")
        return " + ".join(parts)


@dataclass(frozen=True)
class GammaQuotient:
    """Gamma_o (FREE) or Gamma_o/p^exponent (TORSION), with a multiplicity.

    Torsion of exponent 0 is the zero module and is normalised to
    multiplicity 0.
    """

    orbit: Orbit
    kind: QuotientKind
    exponent: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        if self.exponent < 0 or self.multiplicity < 0:
            raise DomainError("exponent and multiplicity must be nonnegative")
        if self.kind is QuotientKind.FREE and self.exponent:
            raise DomainError("a free module carries no exponent")
        if self.kind is QuotientKind.TORSION and self.exponent == 0:
            object.__setattr__(self, "multiplicity", 0)

    @classmethod
    def zero(cls, o: Orbit) -> GammaQuotient:
        return cls(o, QuotientKind.TORSION, 0, 0)

    def is_zero(self) -> bool:
        return self.multiplicity == 0

    @property
    def rank(self) -> int:
        """Z_p-rank for FREE, F_p-rank of the group for TORSION."""
        return self.orbit.size * self.multiplicity

    def group(self) -> AbelianPGroup:
        if self.kind is QuotientKind.FREE and not self.is_zero():
            raise DomainError("a free Z_p-module has no finite underlying group")
        p = self.orbit.context.p
        return AbelianPGroup(p, ((self.exponent, self.rank),))

    def label(self) -> str:
        if self.is_zero():
            return "0"
        base = "Gamma" if self.kind is QuotientKind.FREE else f"Gamma/p^{self.exponent}"
        return base if self.multiplicity == 1 else f"({base})^{self.multiplicity}"


# Per-orbit combinatorics


def _require_in_O(o: Orbit) -> None:
    if o.is_boundary():
        raise DomainError(f"orbit of {o.least} is a boundary singleton")


def orbit_invariants(o: Orbit) -> InvariantFactors:
    """Invariant factors of B(e_1, ..., e_{2k-1}) for the standard word of o."""
    _require_in_O(o)
    exps = exponential_form(standard_word(o)).exponents
    return invariant_factors(exps[:-1])


def _gamma_condition(o: Orbit) -> bool:
    d, g = o.context.d, o.gcd_class
    return 2 * g < d and is_balanced_modulus(OrbitContext(d // g, o.context.p))


def mw_new_part(o: Orbit) -> GammaQuotient:
    """Gamma_o when gcd(o, d) < d/2 and p is balanced modulo d/gcd(o, d), else 0."""
    _require_in_O(o)
    if _gamma_condition(o):
        return GammaQuotient(o, QuotientKind.FREE)
    return GammaQuotient.zero(o)


def disc_exponent(o: Orbit) -> int:
    """p-exponent 2 * (a_1 + ... + a_n) of the discriminant of the new part."""
    if mw_new_part(o).is_zero():
        raise DomainError(f"orbit of {o.least} has no new Mordell-Weil part")
    w = standard_word(o)
    prof = height_profile(w)
    total = 2 * sum(prof.a_seq[1:])
    if is_complementary(w) and total != len(w) * prof.height:
        raise ConsistencyError(f"complementary orbit {o.least}: 2*sum(a) = {total} != |o| * ht")
    return total


def _index_hypothesis(o: Orbit, f: int) -> bool:
    d, p = o.context.d, o.context.p
    if d == p**f + 1:
        return True
    return d == 2 * (p**f - 1) and o.gcd_class % 2 == 1


def index_quotient(o: Orbit, f: int) -> GammaQuotient:
    """(E/V)^o = Gamma_o/p^e with e = (f - ht(o))/2.

    Needs d = p^f + 1, or d = 2(p^f - 1) with gcd(o, d) odd.
    """
    _require_in_O(o)
    if f < 1 or not _index_hypothesis(o, f):
        raise UnsupportedConfigurationError(
            f"index formula needs d = p^f+1 or d = 2(p^f-1) with odd gcd; "
            f"got d={o.context.d}, p={o.context.p}, f={f}, gcd={o.gcd_class}"
        )
    w = standard_word(o)
    gap = f - height_profile(w).height
    if gap < 0 or gap % 2:
        raise ConsistencyError(f"f - ht = {gap} for orbit {o.least} is not even and nonnegative")
    e = gap // 2
    if o.gcd_class == 1 and len(w) == 2 * f and is_complementary(w):
        exps = exponential_form(w).exponents
        even_runs = sum(exps[1 : len(exps) // 2 : 2])  # e_2 + e_4 + ... + e_{k-1}
        if even_runs != e:
            raise ConsistencyError(f"orbit {o.least}: e = {e} but even-run sum is {even_runs}")
    return GammaQuotient(o, QuotientKind.TORSION, e)


def sha_structure_Kd(o: Orbit) -> list[GammaQuotient]:
    """Sha over K_d at o: Gamma_o/p^{d_1}, ..., Gamma_o/p^{d_{k-1}}.

    Applies to orbits of units when p is balanced modulo d, so that the
    constant field F_p(mu_d) has degree |o| over F_p.
    """
    _require_in_O(o)
    ctx = o.context
    if o.gcd_class != 1 or ctx.d <= 2 or not is_balanced_modulus(ctx):
        raise UnsupportedConfigurationError(
            f"Sha over K_d needs gcd(o, d) = 1 and p balanced modulo d; orbit {o.least}, d={ctx.d}"
        )
    factors = orbit_invariants(o).d
    out = [GammaQuotient(o, QuotientKind.TORSION, dj) for dj in factors[:-1]]
    return [q for q in out if not q.is_zero()]


def sha_structure_Fq(o: Orbit, m: int) -> AbelianPGroup:
    """Sha at o over F_q(u), q = p^m: sum_{j<k} (Z/p^{d_j})^m + (Z/p^{d_k})^{m - |o|}."""
    _require_in_O(o)
    if m < 1 or m % o.size:
        raise DomainError(f"|o| = {o.size} must divide m = {m}")
    if not _gamma_condition(o):
        raise UnsupportedConfigurationError(
            f"orbit {o.least} needs gcd(o, d) < d/2 and p balanced modulo d/gcd(o, d)"
        )
    factors = orbit_invariants(o).d
    content = [(dj, m) for dj in factors[:-1]] + [(factors[-1], m - o.size)]
    return AbelianPGroup(o.context.p, tuple(content))


def _run_count(w: Word) -> int:
    """Number of maximal u-runs of w read cyclically."""
    s = w.letters
    runs = sum(1 for c, _ in groupby(s) if c == U)
    if len(s) > 1 and s[0] == s[-1] == U:
        runs -= 1
    return max(runs, 1 if U in s else 0)


# Reports


@dataclass(frozen=True)
class OrbitRecord:
    orbit: Orbit
    word: Word | None
    height: int | None
    d_list: tuple[int, ...] | None
    mw: GammaQuotient
    disc_exponent: int | None
    index: GammaQuotient | None
    sha: AbelianPGroup | None
    inv: int | None
    pattern_runs: int | None = None  # u-runs of the word extended to length 2f

    def to_dict(self) -> dict:
        return {
            "orbit_min": self.orbit.least,
            "orbit_size": self.orbit.size,
            "gcd_class": self.orbit.gcd_class,
            "elements": list(self.orbit.elements),
            "balanced": self.word is not None,
            "word": None if self.word is None else self.word.letters,
            "height": self.height,
            "d_list": None if self.d_list is None else list(self.d_list),
            "mw": self.mw.label(),
            "disc_exp": self.disc_exponent,
            "index_exp": None if self.index is None else self.index.exponent,
            "sha": None if self.sha is None else [[m, n] for m, n in self.sha.content],
            "inv": self.inv,
        }


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool | None  # None when the identity does not apply
    detail: str = ""


@dataclass(frozen=True)
class StructureReport:
    context: OrbitContext
    f: int | None
    records: tuple[OrbitRecord, ...]
    index_order_exponent: int = 0
    index_exponent: int = 0
    sha_order_exponent: int = 0
    sha_exponent: int = 0
    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def all_ok(self) -> bool:
        return all(c.ok is not False for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "context": {"d": self.context.d, "p": self.context.p, "f": self.f},
            "orbits": [r.to_dict() for r in self.records],
            "aggregates": {
                "index_order_exponent": self.index_order_exponent,
                "index_exponent": self.index_exponent,
                "sha_order_exponent": self.sha_order_exponent,
                "sha_exponent": self.sha_exponent,
                "checks": {c.name: {"ok": c.ok, "detail": c.detail} for c in self.checks},
                "all_ok": self.all_ok,
            },
        }

    def csv_rows(self) -> list[dict]:
        rows = []
        for r in self.records:
            rows.append(
                {
                    "d": self.context.d,
                    "p": self.context.p,
                    "f": "" if self.f is None else self.f,
                    "orbit_min": r.orbit.least,
                    "orbit_size": r.orbit.size,
                    "gcd_class": r.orbit.gcd_class,
                    "word": "" if r.word is None else r.word.letters,
                    "height": "" if r.height is None else r.height,
                    "d_list": "" if r.d_list is None else " ".join(map(str, r.d_list)),
                    "disc_exp": "" if r.disc_exponent is None else r.disc_exponent,
                    "index_exp": "" if r.index is None else r.index.exponent,
                    "sha_exps": "" if r.sha is None else " ".join(f"{m}^{n}" for m, n in r.sha.content),
                    "inv": "" if r.inv is None else r.inv,
                }
            )
        return rows


CSV_COLUMNS = (
    "d", "p", "f", "orbit_min", "orbit_size", "gcd_class", "word",
    "height", "d_list", "disc_exp", "index_exp", "sha_exps", "inv",
)


def orbit_record(o: Orbit, f: int | None = None) -> OrbitRecord:
    """Everything computable for one orbit; fields that do not apply are None."""
    _require_in_O(o)
    mw = mw_new_part(o)
    if not is_balanced_orbit(o):
        return OrbitRecord(o, None, None, None, mw, None, None, None, None)
    w = standard_word(o)
    ht = height_profile(w).height
    d_list = orbit_invariants(o).d
    disc = None if mw.is_zero() else disc_exponent(o)
    index = sha = inv = runs = None
    if f is not None and _index_hypothesis(o, f):
        index = index_quotient(o, f)
    if f is not None and o.context.d == o.context.p**f + 1:
        sha = sha_structure_Fq(o, 2 * f)
        inv = o.size * (f - ht)
        runs = (2 * f // o.size) * _run_count(w)
    return OrbitRecord(o, w, ht, d_list, mw, disc, index, sha, inv, runs)


def _records_chunk(args: tuple[int, int, int | None, list[int]]) -> list[OrbitRecord]:
    d, p, f, leasts = args
    by_least = {o.least: o for o in decompose(OrbitContext(d, p), OrbitFilter.O)}
    return [orbit_record(by_least[i], f) for i in leasts]


def orbit_records(ctx: OrbitContext, f: int | None = None, parallel: int = 0) -> list[OrbitRecord]:
    """Records for every orbit in O, ordered by least element.

    ``parallel`` is the number of worker processes (0 picks one per CPU,
    1 runs in-process).
    """
    orbits = decompose(ctx, OrbitFilter.O)
    workers = parallel or os.cpu_count() or 1
    if workers <= 1 or len(orbits) < 64:
        return [orbit_record(o, f) for o in orbits]
    leasts = [o.least for o in orbits]
    size = -(-len(leasts) // workers)
    jobs = [(ctx.d, ctx.p, f, leasts[s : s + size]) for s in range(0, len(leasts), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [r for chunk in pool.map(_records_chunk, jobs) for r in chunk]


def infer_f(ctx: OrbitContext) -> int | None:
    """f with d = p^f + 1, or None."""
    f = least_f_with_minus_one(ctx)
    if f is None or ctx.d != ctx.p**f + 1:
        return None
    return f


def _identity(name: str, failures: Iterable[str]) -> Check:
    bad = list(failures)
    return Check(name, not bad, "; ".join(bad[:5]) + (" ..." if len(bad) > 5 else ""))


def full_report(ctx: OrbitContext, f: int | None = None, parallel: int = 0) -> StructureReport:
    """Per-orbit structures for d = p^f + 1 together with the aggregate checks.

    Checks (each a ``Check`` with a diagnostic string on failure):

    * trivial_iff_f_le_2, index_exponent, sha_exponent, iso_iff_f_le_4:
      the shape of E/V and Sha as f varies;
    * class_number: |Sha| = |E/V|^2;
    * jh_doubling: Gamma_o/p occurs twice as often in Sha^o as in (E/V)^o;
    * sum_d_equals_f, top_d_equals_height: identities for orbits of units;
    * interpolation: |Sha| = p^{F_f(p)};
    * selmer, h1: dimension counts against orbit scans;
    * sha_p_rank: Gamma_o/p occurs k - 1 times in Sha[p];
    * index_p_torsion: (E/V)^o is nonzero exactly when the word is not u^f l^f.
    """
    from . import counting  # counting builds on this module's orbit scans

    if ctx.p == 2:
        raise UnsupportedConfigurationError("structure results are stated for odd p")
    if f is None:
        f = infer_f(ctx)
    if f is None or f < 1 or ctx.d != ctx.p**f + 1:
        raise UnsupportedConfigurationError(f"d = {ctx.d} is not p^f + 1 for p = {ctx.p}")
    p = ctx.p
    records = tuple(orbit_records(ctx, f, parallel))

    index_group = AbelianPGroup.trivial(p)
    sha_group = AbelianPGroup.trivial(p)
    for r in records:
        index_group = index_group + r.index.group()
        sha_group = sha_group + r.sha

    jh, sums, tops, ranks, torsion = [], [], [], [], []
    for r in records:
        o, e = r.orbit, r.index.exponent
        if r.sha.order_exponent != 2 * e * o.size:
            jh.append(f"orbit {o.least}: |Sha^o| = p^{r.sha.order_exponent}, e = {e}")
        if r.sha.rank != o.size * (r.pattern_runs - 1):
            ranks.append(f"orbit {o.least}: rank {r.sha.rank}, k = {r.pattern_runs}")
        if (e > 0) == (r.word.letters == "u" * f + "l" * f):
            torsion.append(f"orbit {o.least}: e = {e}, word {r.word}")
        if o.gcd_class == 1:
            if sum(r.d_list[:-1]) != f - r.height or f - r.height != 2 * e:
                jh.append(f"orbit {o.least}: sum d_j<k = {sum(r.d_list[:-1])}, f - ht = {f - r.height}")
            if sum(r.d_list) != f:
                sums.append(f"orbit {o.least}: sum d = {sum(r.d_list)}")
            if r.d_list[-1] != r.height:
                tops.append(f"orbit {o.least}: d_k = {r.d_list[-1]}, ht = {r.height}")

    small = f <= 2
    iso = index_group.scale(2) == sha_group
    checks = [
        Check(
            "trivial_iff_f_le_2",
            (index_group.is_trivial() and sha_group.is_trivial()) == small,
            f"f = {f}, E/V {index_group}, Sha {sha_group}",
        ),
        Check("index_exponent", index_group.exponent == (f - 1) // 2, f"exponent {index_group.exponent}"),
        Check("sha_exponent", sha_group.exponent == f // 3, f"exponent {sha_group.exponent}"),
        Check("iso_iff_f_le_4", iso == (f <= 4), f"(E/V)^2 = Sha as groups: {iso}"),
        Check(
            "class_number",
            sha_group.order_exponent == 2 * index_group.order_exponent,
            f"|Sha| = p^{sha_group.order_exponent}, |E/V| = p^{index_group.order_exponent}",
        ),
        _identity("jh_doubling", jh),
        _identity("sum_d_equals_f", sums),
        _identity("top_d_equals_height", tops),
    ]
    poly_value = counting.interpolation_poly(f)(p)
    checks.append(
        Check(
            "interpolation",
            poly_value == sha_group.order_exponent,
            f"F_f(p) = {poly_value}, |Sha| = p^{sha_group.order_exponent}",
        )
    )
    selmer_scan = (p**f - 1) + sum(r.orbit.size * (r.pattern_runs - 1) for r in records)
    checks.append(
        Check(
            "selmer",
            selmer_scan == counting.selmer_dimension(p, f),
            f"closed form {counting.selmer_dimension(p, f)}, orbit scan {selmer_scan}",
        )
    )
    h1_scan = counting.h1_dimension_by_orbits(p, f)
    checks.append(
        Check("h1", h1_scan == counting.h1_dimension(p, f), f"closed form {counting.h1_dimension(p, f)}, scan {h1_scan}")
    )
    checks.append(_identity("sha_p_rank", ranks))
    checks.append(_identity("index_p_torsion", torsion))

    return StructureReport(
        context=ctx,
        f=f,
        records=records,
        index_order_exponent=index_group.order_exponent,
        index_exponent=index_group.exponent,
        sha_order_exponent=sha_group.order_exponent,
        sha_exponent=sha_group.exponent,
        checks=tuple(checks),
    )

