"""Approximate conformal maps of the unit disk onto domains with acute corners.

The pipeline: fit or declare a trigonometric-polynomial boundary, solve the
boundary-correspondence integral equation in truncated Fourier form, repair
any fold near acute corners with a monotone spline, then evaluate the map as
a Cauchy integral over the corrected correspondence.
"""

from ._backend import HAVE_EXTENSION, USE_EXTENSION
from .boundary import (
    AnglePoint,
    TrigBoundary,
    boundary_from_dict,
    boundary_to_dict,
    detect_corners,
    polyline_distance,
    polyline_winding,
    validate,
    winding_number,
)
from .corrector import (
    CorrectedCorrespondence,
    MonotoneSpline,
    apply_corrections,
    build_spline,
    correct_corner,
    detect_fold,
    monotonicity_report,
)
from .errors import (
    AcuteMapError,
    BoundaryError,
    ConfigError,
    FoldError,
    InvariantError,
    NumericalError,
    SplineMonotonicityError,
    TrustedRegionError,
)
from .fredholm import (
    AssembledSystem,
    FredholmSolution,
    RawCorrespondence,
    assemble,
    solve,
    solve_correspondence,
)
from .kernels import (
    KernelGrid,
    angle_kernel,
    conjugate_coefficients,
    conjugate_samples,
    forcing_samples,
    kernel_grid,
    log_kernel_regular,
)
from .mapper import DiskMap, MapReport

__version__ = "0.1.0"

__all__ = [
    "AcuteMapError",
    "AnglePoint",
    "AssembledSystem",
    "BoundaryError",
    "ConfigError",
    "CorrectedCorrespondence",
    "DiskMap",
    "FoldError",
    "FredholmSolution",
    "HAVE_EXTENSION",
    "InvariantError",
    "KernelGrid",
    "MapReport",
    "MonotoneSpline",
    "NumericalError",
    "RawCorrespondence",
    "SplineMonotonicityError",
    "TrigBoundary",
    "TrustedRegionError",
    "USE_EXTENSION",
    "angle_kernel",
    "apply_corrections",
    "assemble",
    "boundary_from_dict",
    "boundary_to_dict",
    "build_spline",
    "conjugate_coefficients",
    "conjugate_samples",
    "correct_corner",
    "detect_corners",
    "detect_fold",
    "forcing_samples",
    "kernel_grid",
    "log_kernel_regular",
    "monotonicity_report",
    "polyline_distance",
    "polyline_winding",
    "solve",
    "solve_correspondence",
    "validate",
    "winding_number",
]
