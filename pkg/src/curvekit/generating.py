"""Generating curves: S_T / S_M functions, the curve K built from M, and classification.

Given a unit-speed curve M with apparatus (T, N, B, kappa, tau) and a phase
phi0, put ``phi(s) = int_0^s tau + phi0``.  The generated curve K shares the
arc-length parameter of M and has

    kappa_bar = kappa cos(phi),   tau_bar = kappa sin(phi),

with ``beta'' = S_T gamma'`` where ``S_T = kappa cos(phi)``, and principal
normal ``N_bar = T``.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from ._numerics import cumulative_integral, derivative
from .curvespace import KAPPA_MIN, FrenetApparatus, SampledCurve
from .errors import CurvatureSignChange, NotSpherical
from .reconstruct import CurvatureProfile, InitialFrame, grid_for, integrate_frenet

FIT_TOL = 1e-3
ANGLE_TOL = 1e-3
SPHERE_TOL = 1e-6
LABELS = ("mannheim", "b_mannheim", "v_mannheim", "generating")


def torsion_integral(app):
    """Phi(s) = int tau ds along the apparatus grid (cumulative Simpson)."""
    h = app.s[1] - app.s[0]
    return cumulative_integral(app.tau * app.speed, h)


@dataclass(frozen=True, eq=False)
class GeneratingProfile:
    """Samples of ``S_T = kappa cos(phi)`` and ``phi = Phi + phi0`` on a grid."""

    phi0: float
    s: np.ndarray
    s_T: np.ndarray
    phi: np.ndarray

    def __call__(self, s):
        return CubicSpline(self.s, self.s_T)(s)


def s_T(app, theta0):
    """S_T(s) = kappa(s) cos(int_0^s tau + theta0) on the apparatus grid."""
    phi = torsion_integral(app) + theta0
    return GeneratingProfile(float(theta0), app.s, app.kappa * np.cos(phi), phi)


def s_M(gamma, theta0, sphere_tol=SPHERE_TOL):
    """S_M(s) = |gamma'| cos(int_0^s det(gamma, gamma', gamma'') / |gamma'|^2 + theta0).

    ``gamma`` must lie on a sphere centred at the origin; it need not be unit
    speed.  Returns a cubic spline through the samples.

    Raises
    ------
    NotSpherical
        If ``| |gamma| - r |`` exceeds ``sphere_tol`` for the mean radius r.
    """
    p = gamma.points
    radius = np.linalg.norm(p, axis=1)
    r = radius.mean()
    dev = np.abs(radius - r).max()
    if dev >= sphere_tol:
        raise NotSpherical(f"|gamma| varies by {dev:.3e} about r = {r:.6g}")
    h = gamma.step
    d1 = derivative(p, h)
    d2 = derivative(d1, h)
    det = np.einsum("ij,ij->i", p, np.cross(d1, d2))
    speed2 = np.einsum("ij,ij->i", d1, d1)
    angle = cumulative_integral(det / speed2, h) + theta0
    return CubicSpline(gamma.s, np.sqrt(speed2) * np.cos(angle))


class SphereFit(NamedTuple):
    residual: float
    center: np.ndarray
    radius: float


def fit_sphere(points):
    """Least-squares sphere through points; planar sets get the in-plane circle centre.

    Solves ``|x|^2 = 2 c.x + d`` on centred, scaled coordinates with a
    truncated pseudo-inverse, so coplanar input (rank-deficient normal
    direction) resolves to the minimum-norm centre.
    """
    X = np.asarray(points, dtype=float)
    m = X.mean(axis=0)
    Y = X - m
    scale = np.linalg.norm(Y, axis=1).max()
    Y = Y / scale
    A = np.column_stack([2.0 * Y, np.ones(len(Y))])
    sol = np.linalg.lstsq(A, np.einsum("ij,ij->i", Y, Y), rcond=1e-10)[0]
    c, d = sol[:3], sol[3]
    radius = scale * np.sqrt(d + c @ c)
    center = m + scale * c
    resid = np.abs(np.linalg.norm(X - center, axis=1) - radius).max() / radius
    return SphereFit(float(resid), center, float(radius))


def spherical_check(S_M, gamma):
    """Sphere-fit residual of ``alpha(s) = int_0^s S_M gamma ds``.

    ``S_M`` is a callable of s or an array on ``gamma``'s grid.  A residual
    below 1e-4 confirms that alpha is spherical.
    """
    vals = S_M(gamma.s) if callable(S_M) else np.asarray(S_M, dtype=float)
    alpha = cumulative_integral(vals[:, None] * gamma.points, gamma.step)
    return fit_sphere(alpha)


def generated_curvatures(src, phi0, step=1e-3, kappa_min=KAPPA_MIN):
    """Curvature profile of the generated curve K.

    ``kappa_bar = kappa cos(phi)``, ``tau_bar = kappa sin(phi)`` with
    ``phi = int tau + phi0``.  ``src`` is a :class:`FrenetApparatus` (result
    is tabulated on its grid) or an analytic :class:`CurvatureProfile`
    (result stays analytic and is checked on a grid of spacing ``step``).

    Raises
    ------
    CurvatureSignChange
        If kappa_bar <= kappa_min anywhere, i.e. cos(phi) reaches 0.
    """
    if isinstance(src, CurvatureProfile):
        def phi(s):
            return src.tau_integral(s) + phi0

        prof = CurvatureProfile(
            lambda s: src.kappa(s) * np.cos(phi(s)),
            lambda s: src.kappa(s) * np.sin(phi(s)),
            src.s_max,
            kind=src.kind,
            meta={"family": "generated", "phi0": phi0},
        )
        s, _ = grid_for(src.s_max, step)
    else:
        phi = torsion_integral(src) + phi0
        s = src.s - src.s[0]
        prof = CurvatureProfile.tabulated(s, src.kappa * np.cos(phi), src.kappa * np.sin(phi))
        prof.meta.update({"family": "generated", "phi0": phi0})
    kb = prof.kappa(s)
    if kb.min() <= kappa_min:
        i = int(np.argmin(kb))
        raise CurvatureSignChange(f"kappa_bar = {kb[i]:.3e} at s = {s[i]:.6g}; cos(phi) reaches 0")
    return prof


def build_generated(base, app, phi0, backend=None):
    """Construct K from M by integrating its (kappa_bar, tau_bar) profile.

    The initial frame is chosen so that ``N_bar = T``:
    ``T_bar = -cos(phi0) N + sin(phi0) B``, ``N_bar = T``,
    ``B_bar = sin(phi0) N + cos(phi0) B``, starting at ``gamma(0)``.

    Returns ``(curve, apparatus)`` of K on the grid of M.
    """
    prof = generated_curvatures(app, phi0)
    c, s_ = np.cos(phi0), np.sin(phi0)
    init = InitialFrame(
        origin=base.points[0],
        T0=-c * app.N[0] + s_ * app.B[0],
        N0=app.T[0],
        B0=s_ * app.N[0] + c * app.B[0],
    )
    return integrate_frenet(prof, init, step=base.step, backend=backend)


def generated_residuals(base_app, k_curve, k_app, phi0):
    """Post-checks of a generated curve.

    Returns a dict with ``normal_tangent_max`` (max ``|N_bar x T|``),
    ``epsilon`` (sign of ``<N_bar, T>``, with ``sign_constant``),
    ``second_derivative_residual`` (max ``|beta'' - S_T gamma'|`` on interior samples) and
    ``pythagoras`` (max ``|kappa_bar^2 + tau_bar^2 - kappa^2|``).
    """
    cross = np.linalg.norm(np.cross(k_app.N, base_app.T), axis=1)
    dots = np.einsum("ij,ij->i", k_app.N, base_app.T)
    eps = 1 if dots[0] >= 0 else -1
    h = k_curve.step
    d2 = derivative(derivative(k_curve.points, h), h)
    st = s_T(base_app, phi0).s_T
    b = 4  # nested one-sided stencils reach two samples further in
    d2_gap = np.linalg.norm(d2 - st[:, None] * base_app.T, axis=1)[b:-b]
    pyth = np.abs(k_app.kappa**2 + k_app.tau**2 - base_app.kappa**2)
    return {
        "normal_tangent_max": float(cross.max()),
        "epsilon": eps,
        "sign_constant": bool(np.all(np.sign(dots) == eps)),
        "second_derivative_residual": float(d2_gap.max()),
        "pythagoras": float(pyth.max()),
    }


@dataclass(frozen=True)
class ClassificationResult:
    """Outcome of :func:`classify`; ``label`` is None when no sinusoid fits."""

    label: Optional[str]
    fitted: dict = field(default_factory=dict)
    fit_residual: float = float("inf")

    def to_json(self):
        return {
            "label": self.label or "none",
            "R": self.fitted.get("R"),
            "theta0": self.fitted.get("theta0"),
            "fit_residual": self.fit_residual,
        }


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


def fit_sinusoid(kappa, Phi):
    """Least squares ``kappa = A cos(Phi) + B sin(Phi)``.

    Returns ``(R, theta0, relative residual)`` with ``kappa = R cos(Phi + theta0)``.
    """
    M = np.column_stack([np.cos(Phi), np.sin(Phi)])
    (a, b), *_ = np.linalg.lstsq(M, kappa, rcond=None)
    resid = np.abs(kappa - M @ np.array([a, b])).max() / np.abs(kappa).max()
    return float(np.hypot(a, b)), float(np.arctan2(-b, a)), float(resid)


def classify(app, phi0=None, V=None, tol=FIT_TOL, angle_tol=ANGLE_TOL):
    """Fit ``kappa = R cos(Phi + theta0)`` and name the curve that results.

    Without ``phi0`` the fit is read as the defining relation of a generating
    curve of a Mannheim curve (label ``generating``).  With ``phi0`` (the
    phase used to build K) the offset ``delta = theta0 - phi0`` decides what K
    is: 0 gives ``mannheim``, -pi/2 gives ``b_mannheim`` (kappa = R sin(...)),
    anything else ``v_mannheim`` with ``(u, w) = (cos delta, sin delta)`` and
    ``lambda = 1/R``.  A constant field ``V = (u, 0, w)`` pins delta to
    ``atan2(w, u)``; a mismatch gives None.
    """
    sl = app.interior
    R, theta0, resid = fit_sinusoid(app.kappa[sl], torsion_integral(app)[sl])
    fitted = {"R": R, "theta0": theta0}
    if resid >= tol or R == 0:
        return ClassificationResult(None, fitted, resid)
    if phi0 is None:
        return ClassificationResult("generating", fitted, resid)
    delta = float(_wrap(theta0 - phi0))
    fitted["delta"] = delta
    if V is not None:
        u, _, w = (float(np.ravel(x)[0]) for x in V(np.zeros(1)))
        target = float(np.arctan2(w, u))
        if abs(_wrap(delta - target)) >= angle_tol:
            return ClassificationResult(None, fitted, resid)
    if abs(delta) < angle_tol:
        label = "mannheim"
    elif abs(_wrap(delta + np.pi / 2)) < angle_tol:
        label = "b_mannheim"
    else:
        label = "v_mannheim"
    fitted["F"] = R
    fitted["lambda"] = 1.0 / R
    return ClassificationResult(label, fitted, resid)
