"""Numerical toolkit for space curves, Frenet apparatus and Mannheim curve pairs."""

from .curvespace import (
    FrenetApparatus,
    SampledCurve,
    frame_orthonormality_report,
    frenet_apparatus,
    resample_by_arclength,
)
from .errors import CurveKitError
from .generating import build_generated, classify, generated_curvatures, s_M, s_T, spherical_check
from .mannheim import (
    FrameVectorField,
    MannheimReport,
    OffsetFunction,
    angular_check,
    build_partner,
    estimate_lambda,
    lambda_from_v,
    partner_ode_residual,
    verify_collinear,
    vmannheim_residual,
)
from .reconstruct import CurvatureProfile, InitialFrame, integrate_frenet, make_named_curve, mannheim_profile

__version__ = "0.1.0"

__all__ = [
    "CurvatureProfile",
    "CurveKitError",
    "FrameVectorField",
    "FrenetApparatus",
    "InitialFrame",
    "MannheimReport",
    "OffsetFunction",
    "SampledCurve",
    "angular_check",
    "build_generated",
    "build_partner",
    "classify",
    "estimate_lambda",
    "frame_orthonormality_report",
    "frenet_apparatus",
    "generated_curvatures",
    "integrate_frenet",
    "lambda_from_v",
    "make_named_curve",
    "mannheim_profile",
    "partner_ode_residual",
    "resample_by_arclength",
    "s_M",
    "s_T",
    "spherical_check",
    "verify_collinear",
    "vmannheim_residual",
]
