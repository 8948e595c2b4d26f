"""Kinetics, degree statistics, and gel transitions for randomly
cross-linking monomer mixtures.

The model: monomers carry counted functional groups of r types, groups
convert irreversibly in pairs with relative rates from a symmetric weight
matrix, and the evolving bond structure is a random multigraph.  The
package integrates the group-conversion kinetics, builds time-resolved
degree distributions, locates the gel transition, and computes weight
statistics of connected components, with a master-equation integrator and
a stochastic network builder as independent cross-checks.
"""

from .chemistry import (
    FunctionalityVector,
    MonomerDistribution,
    MomentSet,
    SystemSpec,
    ValidationReport,
    WeightMatrix,
    moment_set,
    partial_moment,
    require_valid,
    validate_spec,
)
from .degrees import (
    DegreeDistribution,
    DegreeMoments,
    SpeciesDistribution,
    brute_force_moments,
    degree_dist,
    mu_from_p,
    species_dist,
    unreacted_fraction,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    CriterionUndefined,
    DomainError,
    GelkitError,
    IntegrationError,
    SpecificationError,
    StateSpaceError,
)
from .gelation import (
    CriterionKind,
    GelCriterionValue,
    GelReport,
    KMatrix,
    KappaMix,
    criterion_general,
    criterion_two_type_polynomial,
    criterion_two_type_structural,
    find_gel_time,
    k_matrix,
    kappa_mix,
)
from .kinetics import (
    ConversionState,
    MomentTrajectory,
    conversion,
    conversion_via_A,
    default_horizon,
    integrate_moments,
    moment_rhs,
)
from .molweight import (
    GfValues,
    MwReport,
    SizeDistribution,
    gf_fixed_point,
    size_series,
    weight_avg_mw,
)
from .oracle import (
    MasterState,
    MasterTrajectory,
    McRun,
    OnsetReport,
    giant_onset,
    integrate_master,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConversionState",
    "ConvergenceError",
    "CriterionKind",
    "CriterionUndefined",
    "DegreeDistribution",
    "DegreeMoments",
    "DomainError",
    "FunctionalityVector",
    "GelCriterionValue",
    "GelReport",
    "GelkitError",
    "GfValues",
    "IntegrationError",
    "KMatrix",
    "KappaMix",
    "MasterState",
    "MasterTrajectory",
    "McRun",
    "MomentSet",
    "MomentTrajectory",
    "MonomerDistribution",
    "MwReport",
    "OnsetReport",
    "SizeDistribution",
    "SpeciesDistribution",
    "SpecificationError",
    "StateSpaceError",
    "SystemSpec",
    "ValidationReport",
    "WeightMatrix",
    "brute_force_moments",
    "conversion",
    "conversion_via_A",
    "criterion_general",
    "criterion_two_type_polynomial",
    "criterion_two_type_structural",
    "default_horizon",
    "degree_dist",
    "find_gel_time",
    "gf_fixed_point",
    "giant_onset",
    "integrate_master",
    "integrate_moments",
    "k_matrix",
    "kappa_mix",
    "moment_rhs",
    "moment_set",
    "mu_from_p",
    "partial_moment",
    "require_valid",
    "simulate",
    "size_series",
    "species_dist",
    "unreacted_fraction",
    "validate_spec",
    "weight_avg_mw",
    "__version__",
]
