"""Zoll metrics on the sphere and the K = 1 Finsler metric on their geodesic space."""

from .finsler import (
    ConvexityViolation,
    FinslerEval,
    FormulaBranchError,
    f_eval,
    flag_curvature,
    fundamental_function,
    hessian,
    homogeneity_defect,
    root_classify,
)
from .indicatrix import (
    QuadratureError,
    QuarticCoeffs,
    TangentSample,
    appendix_integral,
    appendix_integral_quadrature,
    implicit_residual,
    indicatrix_curve,
    indicatrix_point,
    quartic_coefficients,
)
from .polyroots import (
    DegenerateDegreeError,
    RootPolishError,
    combine_conjugate_sqrts,
    polish_root,
    solve_depressed_cubic,
    solve_quartic,
    solve_resolvent,
)
from .zoll import (
    HParam,
    PoleApproachError,
    ZollSurface,
    darboux_check,
    gauss_curvature,
    h_eval,
    integrate_geodesic,
)

__version__ = "0.1.0"

__all__ = [
    "ConvexityViolation",
    "DegenerateDegreeError",
    "FinslerEval",
    "FormulaBranchError",
    "HParam",
    "PoleApproachError",
    "QuadratureError",
    "QuarticCoeffs",
    "RootPolishError",
    "TangentSample",
    "ZollSurface",
    "appendix_integral",
    "appendix_integral_quadrature",
    "combine_conjugate_sqrts",
    "darboux_check",
    "f_eval",
    "flag_curvature",
    "fundamental_function",
    "gauss_curvature",
    "h_eval",
    "hessian",
    "homogeneity_defect",
    "implicit_residual",
    "indicatrix_curve",
    "indicatrix_point",
    "integrate_geodesic",
    "polish_root",
    "quartic_coefficients",
    "root_classify",
    "solve_depressed_cubic",
    "solve_quartic",
    "solve_resolvent",
]
