"""Exact convex staircase constructions and multifractal estimation tools.

The package builds convex test functions out of exact dyadic pieces
(staircase antiderivatives, boundary spikes, smoothed variants), probes
their pointwise regularity from float samples, builds nested Cantor-type
interval hierarchies with exact ball masses, and estimates coarse
singularity spectra with their theoretical counterparts.
"""

from .dyadic import (
    DyadicRational,
    ExponentOverflowError,
    HALF,
    ONE,
    ZERO,
    parse_dyadic,
)
from .kernels import backend_name
from .constructions import (
    ConvexExpr,
    ConvexityReport,
    InvalidSequenceError,
    QuadraticBase,
    SequenceReport,
    SmoothedPart,
    StaircaseLevel,
    boundary_spike_values,
    compose,
    convexity_check,
    find_scale_sequence,
    mollify,
    require_scale_sequence,
    second_difference_scan,
    staircase_antiderivative,
    staircase_value,
    validate_scale_sequence,
    with_spike,
)
from .regularity import (
    ConeProbeResult,
    ConeSystem,
    DerivativeEstimate,
    ExponentEstimate,
    GridTooCoarseError,
    ShiftCheck,
    StabilityCheckReport,
    StabilityRadius,
    build_cone_system,
    cone_probe,
    derivative_stability_radius,
    directional_restriction,
    exponent_shift_check,
    holder_estimate,
    one_sided_derivative,
    stability_check,
)
from .cantor import (
    CoveringReport,
    EmptyIntersectionError,
    GenerationInfo,
    IntervalSet,
    LocalDimensionReport,
    MassDistribution,
    build_measure,
    covering_counts,
    find_measure_sequence,
    intersect_to_depth,
    kept_width_exp,
    lebesgue,
    level_intervals,
    local_dimension,
)
from .spectrum import (
    BoundCheck,
    SPECTRUM_KINDS,
    SpectrumCurve,
    check_upper_bound,
    empirical_spectrum,
    sample_grid,
    theoretical_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # dyadic
    "DyadicRational",
    "ExponentOverflowError",
    "parse_dyadic",
    "ZERO",
    "ONE",
    "HALF",
    # kernels
    "backend_name",
    # constructions
    "StaircaseLevel",
    "staircase_value",
    "staircase_antiderivative",
    "boundary_spike_values",
    "InvalidSequenceError",
    "SequenceReport",
    "validate_scale_sequence",
    "require_scale_sequence",
    "find_scale_sequence",
    "QuadraticBase",
    "SmoothedPart",
    "ConvexExpr",
    "compose",
    "with_spike",
    "mollify",
    "ConvexityReport",
    "second_difference_scan",
    "convexity_check",
    # regularity
    "ExponentEstimate",
    "holder_estimate",
    "ShiftCheck",
    "exponent_shift_check",
    "DerivativeEstimate",
    "one_sided_derivative",
    "StabilityRadius",
    "GridTooCoarseError",
    "derivative_stability_radius",
    "StabilityCheckReport",
    "stability_check",
    "ConeSystem",
    "build_cone_system",
    "directional_restriction",
    "ConeProbeResult",
    "cone_probe",
    # cantor
    "EmptyIntersectionError",
    "kept_width_exp",
    "GenerationInfo",
    "IntervalSet",
    "level_intervals",
    "intersect_to_depth",
    "CoveringReport",
    "covering_counts",
    "find_measure_sequence",
    "MassDistribution",
    "build_measure",
    "lebesgue",
    "LocalDimensionReport",
    "local_dimension",
    # spectrum
    "SPECTRUM_KINDS",
    "theoretical_spectrum",
    "SpectrumCurve",
    "empirical_spectrum",
    "BoundCheck",
    "check_upper_bound",
    "sample_grid",
]
