"""Orbits, words and invariant factors behind the Legendre curve over K_d.

The modules build on each other in this order: ``orbits`` (the action of p on
Z/dZ), ``words`` (words, base points and heights), ``invariant_factors``
(bidiagonal matrices), ``structures`` (Mordell-Weil, index and Sha per
orbit), ``counting`` (patterns and the polynomial F_f) and ``rays`` (the
higher-genus variant). ``cli`` wraps them for the command line.
"""

from .errors import (
    CapacityError,
    ConsistencyError,
    DomainError,
    InvalidContextError,
    UnsupportedConfigurationError,
)
from .orbits import (
    HalfPlane,
    Orbit,
    OrbitContext,
    OrbitFilter,
    decompose,
    halfplane_class,
    is_balanced_modulus,
    is_balanced_orbit,
    orbit_through,
)
from .words import (
    ExponentialForm,
    HeightProfile,
    Word,
    exponential_form,
    good_base_points,
    height_profile,
    is_complementary,
    standard_base_point,
    standard_word,
    string_diagram,
    word_at,
)
from .invariant_factors import (
    BidiagonalSpec,
    InvariantFactors,
    alternating_sum,
    invariants_by_max_pivot,
    invariants_by_min_pivot,
    invariants_complementary,
    minors_oracle,
    rotation_equivalents,
)
from .structures import (
    AbelianPGroup,
    GammaQuotient,
    QuotientKind,
    StructureReport,
    disc_exponent,
    full_report,
    index_quotient,
    mw_new_part,
    sha_structure_Fq,
    sha_structure_Kd,
)
from .counting import (
    Pattern,
    RationalPoly,
    count_by_pattern,
    count_prefix,
    h1_dimension,
    interpolation_poly,
    pattern_of,
    pattern_of_digits,
    selmer_dimension,
    sha_order_exponent,
    verify_interpolation,
)
from .rays import (
    Ray,
    RayContext,
    RayConvention,
    is_balanced_ray,
    ray_class,
    ray_orbit,
    ray_word,
)

__version__ = "0.1.0"
