"""Set-valued hybrid mappings and fixed-point iteration on
constant-curvature model spaces."""

from .classes import (
    CLASSICAL_IDS,
    MULTIVALUED_IDS,
    ClassReport,
    HybridParams,
    check_classical,
    check_generalized_type1,
    check_generalized_type2,
    check_type1,
    check_type2,
    pair_sampler,
    validate_params,
)
from .convex import ConvexSet, ball, contains, intersection, project, whole_space
from .diagnostics import (
    CenterEstimate,
    TailWindow,
    asymptotic_center,
    asymptotic_radius,
    condition_I_check,
    default_windows,
    delta_limit_estimate,
    endpoint_check,
    fejer_check,
    fixed_point_check,
    tail_window,
)
from .errors import CatKappaError, ConfigError, NotConverged
from .iterate import (
    ALL_SCHEMES,
    IterationTrace,
    StepSequences,
    StopRule,
    check_step_condition,
    picard_nearest_search,
    run_multivalued_picard_s,
    run_multivalued_thianwan,
    run_single_valued,
)
from .model_space import (
    ConvexityConstants,
    ModelSpace,
    Point,
    check_convexity_inequality,
    distance,
    estimate_modulus,
    geodesic_point,
    r_constant,
)
from .setmap import (
    CompactSet,
    MultivaluedMap,
    compact_set,
    dist_point_set,
    hausdorff,
    multivalued_map,
    nearest_selection,
)

__version__ = "0.1.0"
