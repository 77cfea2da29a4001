"""Pseudo-split algebras, s-invariants, Kato fan subdivisions and a p-adic root oracle."""

__version__ = "0.1.0"

from .perm_core import (  # noqa: E402
    GroupAction,
    GroupError,
    GroupTooLarge,
    Permutation,
    PermutationGroup,
    SubgroupHandle,
    coset_action,
    conjugacy_classes,
    generate_elements,
    has_fixed_point,
    quotient_by_normal,
)
from .etale import (  # noqa: E402
    EtaleAlgebraDescriptor,
    SplitnessReport,
    algebra_from_covering,
    component_degrees,
    is_pseudo_split,
    is_split,
)
from .frobenian import (  # noqa: E402
    ClassFunction,
    GaloisSetup,
    SInvariantProfile,
    conjugacy_saturation,
    delta,
    density_s_eq_1,
    is_pseudo_split_via_s,
    mean,
    predict_surjectivity,
    s_lt_one_witness,
    s_profile,
    s_value,
    surjectivity_set,
)
from .fans import (  # noqa: E402
    FanMorphism,
    FanPoint,
    SmoothKatoFan,
    Subdivision,
    apply_morphism,
    barycentric_subdivision,
    enumerate_points,
    height,
    height_bound_m,
    iterated_barycentric,
    pullback_point,
    star_subdivision,
    validate_smooth_fan,
)
from .oracle import (  # noqa: E402
    DensityEstimate,
    PolynomialFamily,
    compare_with_prediction,
    discriminant,
    empirical_density,
    has_qp_root,
)
