"""oscmax: mean oscillation, BMO/VMO moduli and maximal operators, exactly
evaluated on piecewise-constant carriers in one and two dimensions."""

from .bumps import BumpSum2D, DyadicRowCenters, ExplicitCenters
from .constructions import (
    DiscontinuityInstance,
    build_dyadic_bump_rows,
    build_instance,
    build_perturbation,
    build_rational_bump_rows,
)
from .maximal import (
    MaximalEvaluator,
    dyadic_nonlocal,
    mhl_point,
    mhl_point_bruteforce,
    mhl_profile,
    mhl_scale_split,
)
from .oscillation import (
    OscillationReport,
    average,
    bmo_norm_1d,
    mean_osc,
    omega,
    omega_profile,
    subset_osc,
)
from .plane import (
    GridFunction2D,
    Rect,
    bmo_norm_2d,
    directional_maximal_e1,
    mean_osc_2d,
    product_separable_norm,
    slice_osc_decomposition,
    slice_y,
    strong_maximal,
)
from .sampling import Sampler1D, sample_to_step
from .stepfn import (
    PeriodicExtension1D,
    RejectionError,
    StepFunction1D,
    integrate,
    periodic_even_extend,
    step_algebra,
)

__version__ = "0.1.0"

__all__ = [
    "BumpSum2D", "DiscontinuityInstance", "DyadicRowCenters", "ExplicitCenters",
    "GridFunction2D", "MaximalEvaluator", "OscillationReport",
    "PeriodicExtension1D", "Rect", "RejectionError", "Sampler1D",
    "StepFunction1D", "average", "bmo_norm_1d", "bmo_norm_2d",
    "build_dyadic_bump_rows", "build_instance", "build_perturbation",
    "build_rational_bump_rows", "directional_maximal_e1", "dyadic_nonlocal",
    "integrate", "mean_osc", "mean_osc_2d", "mhl_point",
    "mhl_point_bruteforce", "mhl_profile", "mhl_scale_split", "omega",
    "omega_profile", "periodic_even_extend", "product_separable_norm",
    "sample_to_step", "slice_osc_decomposition", "slice_y", "step_algebra",
    "strong_maximal", "subset_osc",
]
