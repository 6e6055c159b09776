"""V-Mannheim predicates, partner construction and partner-side checks.

A unit field ``V = uT + vN + wB`` along a base curve with offset function
``lambda(s) = lambda0 - int_0^s v`` defines the partner

    beta(s) = gamma(0) + int_0^s V du + lambda(s) N(s).

The base is V-Mannheim (partner binormal collinear with the base normal) iff
``u kappa - w tau = lambda (kappa^2 + tau^2)`` holds pointwise.
"""

import os
import re
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from ._numerics import cumulative_integral, derivative, smooth_cumulative_integral
from .curvespace import (
    KAPPA_MIN,
    FrenetApparatus,
    SampledCurve,
    estimate_curvature,
    frenet_apparatus,
    resample_by_arclength,
)
from .errors import (
    CurvatureVanishes,
    DegeneratePartner,
    DivideByZero,
    DomainMismatch,
    InvalidField,
    NotApplicable,
    SingularOffset,
    VanishingCurvature,
    VTooLarge,
)
from .reconstruct import CurvatureProfile, grid_for

TOL_PRED_ANALYTIC = 1e-6
TOL_PRED_ESTIMATED = 1e-4
TOL_COL = 1e-4
TOL_FLAT = 1e-4
TOL_ODE = 1e-3
SIGMA_FLOOR = 1e-6  # partner speed below this counts as collapsed
DEGENERATE_FRACTION = 0.05
WINDOW_REL = 0.1  # partner checks use samples with speed >= WINDOW_REL * max speed
SIGN_LABELS = {1: "paper-s1", -1: "paper-eq-b"}


def tolerances(estimated, overrides=None):
    """Verdict tolerances ``{"tol_pred", "tol_col"}``.

    Defaults depend on whether the apparatus is estimated; ``overrides``
    replaces entries, and ``CURVEKIT_TOL_PRED`` in the environment wins
    over both for tol_pred.
    """
    tol = {"tol_pred": TOL_PRED_ESTIMATED if estimated else TOL_PRED_ANALYTIC, "tol_col": TOL_COL}
    tol.update({k: float(v) for k, v in (overrides or {}).items()})
    env = os.environ.get("CURVEKIT_TOL_PRED")
    if env:
        tol["tol_pred"] = float(env)
    return tol


def _as_callable(c):
    if callable(c):
        return c
    c = float(c)
    return lambda s: np.full(np.shape(s), c)


class FrameVectorField:
    """Component functions of ``V = uT + vN + wB``.

    Components may be constants or vectorized callables of s.  The unit-norm
    invariant is checked whenever the field is evaluated.
    """

    def __init__(self, u, v, w, spec=None):
        self.constant_flag = not any(callable(c) for c in (u, v, w))
        self.values = (float(u), float(v), float(w)) if self.constant_flag else None
        self._u, self._v, self._w = (_as_callable(c) for c in (u, v, w))
        self.spec = spec

    @classmethod
    def constant(cls, u, v=0.0, w=0.0):
        return cls(u, v, w)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        u = np.broadcast_to(self._u(s), s.shape).astype(float)
        v = np.broadcast_to(self._v(s), s.shape).astype(float)
        w = np.broadcast_to(self._w(s), s.shape).astype(float)
        dev = np.abs(u * u + v * v + w * w - 1.0)
        if dev.size and dev.max() >= 1e-12:
            raise InvalidField(f"|V|^2 deviates from 1 by {dev.max():.3e}")
        return u, v, w

    def v_is_zero(self, s):
        return bool(np.all(self(s)[1] == 0.0))

    def __repr__(self):
        if self.constant_flag:
            return "FrameVectorField(u={}, v={}, w={})".format(*self.values)
        return f"FrameVectorField({self.spec or 'functions'})"

    @classmethod
    def parse(cls, text, probe_s_max=10.0):
        """Parse ``u=<expr>,v=<expr>,w=<expr>``; expr is a number or ``sin(a*s+b)``/``cos(a*s+b)``.

        The field is divided by its norm, which must be constant in s.
        """
        parts = {}
        for item in text.split(","):
            if "=" not in item:
                raise InvalidField(f"malformed field component {item!r}")
            key, expr = (x.strip() for x in item.split("=", 1))
            if key not in ("u", "v", "w") or key in parts:
                raise InvalidField(f"unexpected field component {key!r}")
            parts[key] = _parse_expr(expr)
        comps = [parts.get(k, 0.0) for k in ("u", "v", "w")]
        probe = np.linspace(0.0, probe_s_max, 1001)
        vals = np.array([_as_callable(c)(probe) for c in comps])
        norm = np.sqrt((vals**2).sum(axis=0))
        if norm.min() <= 0:
            raise InvalidField("field vanishes")
        if np.ptp(norm) > 1e-12 * norm.max():
            raise InvalidField("field norm is not constant in s; cannot normalize")
        n = norm[0]
        scaled = [(lambda f: (lambda s: f(s) / n))(c) if callable(c) else c / n for c in comps]
        return cls(*scaled, spec=text)


_TRIG = re.compile(r"^(sin|cos)\(\s*([-+0-9.eE]*)\s*\*?\s*s\s*(?:([-+])\s*([0-9.eE]+))?\s*\)$")


def _parse_expr(expr):
    try:
        return float(expr)
    except ValueError:
        pass
    m = _TRIG.match(expr.replace(" ", ""))
    if not m:
        raise InvalidField(f"cannot parse field expression {expr!r}")
    fn = np.sin if m.group(1) == "sin" else np.cos
    a_txt = m.group(2)
    a = 1.0 if a_txt in ("", "+") else -1.0 if a_txt == "-" else float(a_txt)
    b = float(m.group(4)) * (-1.0 if m.group(3) == "-" else 1.0) if m.group(4) else 0.0
    return lambda s: fn(a * np.asarray(s, dtype=float) + b)


class OffsetFunction:
    """lambda(s) = lambda0 - int_0^s v, tabulated on a grid and spline-interpolated.

    A constant offset has no grid and evaluates anywhere.
    """

    def __init__(self, lambda0, grid=None, values=None):
        self.lambda0 = float(lambda0)
        self.grid = None if grid is None else np.asarray(grid, dtype=float)
        self.values = None if values is None else np.asarray(values, dtype=float)
        self._spline = None if grid is None else CubicSpline(self.grid, self.values)

    @classmethod
    def constant(cls, lam):
        return cls(lam)

    @property
    def is_constant(self):
        return self.grid is None

    def covers(self, s):
        if self.grid is None:
            return True
        s = np.asarray(s, dtype=float)
        slack = 1e-9 * max(1.0, abs(self.grid[-1]))
        return s.min() >= self.grid[0] - slack and s.max() <= self.grid[-1] + slack

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.grid is None:
            return np.full(s.shape, self.lambda0)
        if not self.covers(s):
            raise DomainMismatch("offset function evaluated outside its grid")
        return self._spline(np.clip(s, self.grid[0], self.grid[-1]))

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        if self.grid is None:
            return np.zeros(s.shape)
        return self._spline(s, 1)

    def __repr__(self):
        kind = "constant" if self.grid is None else f"{self.grid.size} nodes"
        return f"OffsetFunction(lambda0={self.lambda0:g}, {kind})"


def lambda_from_v(v, lambda0, s_max, step):
    """Offset ``lambda(s) = lambda0 - int_0^s v`` by cumulative Simpson quadrature.

    ``v`` is a vectorized callable, a constant, or a :class:`FrameVectorField`
    (its v component is used).
    """
    s, h = grid_for(s_max, step)
    if isinstance(v, FrameVectorField):
        vals = v(s)[1]
    else:
        vals = np.broadcast_to(_as_callable(v)(s), s.shape).astype(float)
    if np.all(vals == 0.0):
        return OffsetFunction(lambda0)
    return OffsetFunction(lambda0, s, lambda0 - cumulative_integral(vals, h))


def _components(app, V, lam):
    if isinstance(lam, (int, float)):
        lam = OffsetFunction.constant(lam)
    if not lam.covers(app.s):
        raise DomainMismatch("apparatus grid extends beyond the offset function's domain")
    u, v, w = V(app.s)
    return u, v, w, lam(app.s)


def vmannheim_residual(app, V, lam):
    """Pointwise ``r = u kappa - w tau - lambda (kappa^2 + tau^2)``, scale-normalized.

    The profile is divided by ``max|lambda| * max(kappa^2 + tau^2)``, which
    makes it invariant under scaling the curve.  With vanishing lambda the
    scale falls back to ``max|u kappa - w tau|``.
    """
    u, _, w, lam_s = _components(app, V, lam)
    k, t = app.kappa, app.tau
    k2 = k * k + t * t
    lhs = u * k - w * t
    r = lhs - lam_s * k2
    scale = np.abs(lam_s).max() * k2.max()
    if scale <= 1e-300:
        scale = max(np.abs(lhs).max(), 1e-300)
    return r / scale


def estimate_lambda(app, V):
    """Solve the predicate for constant lambda when v == 0.

    Returns
    -------
    lambda_fit : float
        Mean of ``(u kappa - w tau) / (kappa^2 + tau^2)`` over interior samples.
    flatness : float
        ``max |lambda(s) - lambda_fit| / |lambda_fit|``.
    """
    u, v, w = V(app.s)
    if np.any(v != 0.0):
        raise NotApplicable("estimate_lambda needs v == 0; use lambda_from_v instead")
    k2 = app.kappa**2 + app.tau**2
    if k2.min() < 1e-12:
        raise DivideByZero("kappa^2 + tau^2 < 1e-12")
    lam = ((u * app.kappa - w * app.tau) / k2)[app.interior]
    fit = float(lam.mean())
    flat = float(np.abs(lam - fit).max() / abs(fit)) if fit != 0 else float("inf")
    return fit, flat


def vmannheim_profile(V, lam, theta, s_max, step=1e-3):
    """Curvature profile satisfying the V-Mannheim predicate by construction.

    With ``c = u cos(theta) - w sin(theta)``, ``kappa = c cos(theta) / lambda``
    and ``tau = c sin(theta) / lambda`` give ``u kappa - w tau = lambda (kappa^2 + tau^2)``
    for any angle function ``theta``.
    """

    def parts(s):
        u, _, w = V(s)
        th = theta(s)
        return (u * np.cos(th) - w * np.sin(th)) / lam(s), th

    def kappa(s):
        c, th = parts(s)
        return c * np.cos(th)

    def tau(s):
        c, th = parts(s)
        return c * np.sin(th)

    s, _ = grid_for(s_max, step)
    k = kappa(s)
    if k.min() <= KAPPA_MIN:
        i = int(np.argmin(k))
        raise CurvatureVanishes(f"kappa = {k[i]:.3e} at s = {s[i]:.6g}")
    return CurvatureProfile(kappa, tau, s_max, meta={"family": "v-mannheim"})


class Correspondence:
    """Monotone map between the base parameter s and partner arc length s_bar."""

    def __init__(self, s, s_bar):
        self.s = np.asarray(s, dtype=float)
        self.s_bar = np.asarray(s_bar, dtype=float)
        if np.any(np.diff(self.s_bar) <= 0):
            raise DomainMismatch("s <-> s_bar correspondence is not monotone")
        self._inverse = CubicSpline(self.s_bar, self.s)

    def to_base(self, s_bar):
        return self._inverse(s_bar)

    def ds_dsbar(self, s_bar):
        return self._inverse(s_bar, 1)


@dataclass(frozen=True, eq=False)
class Partner:
    """Partner curve on the base grid with its speed and arc length.

    ``speed`` is the analytic partner speed ``sqrt((u - lambda kappa)^2 + (w + lambda tau)^2)``;
    ``window`` is the contiguous index range where the speed is at least
    ``WINDOW_REL`` times its maximum, the part on which partner frames are
    well defined numerically.  ``velocity`` is d(beta)/ds from the
    construction, ``(u - lambda kappa) T + (w + lambda tau) B``.
    """

    curve: SampledCurve
    s_bar: np.ndarray
    speed: np.ndarray
    lam: np.ndarray
    window: slice
    velocity: Optional[np.ndarray] = None

    @property
    def correspondence(self):
        w = self.window
        return Correspondence(self.curve.s[w], self.s_bar[w] - self.s_bar[w][0])

    @property
    def length(self):
        return float(self.s_bar[-1])


def _regular_window(speed):
    ok = speed >= WINDOW_REL * speed.max()
    # longest contiguous run
    best, start, best_range = 0, None, (0, 0)
    for i, flag in enumerate(np.append(ok, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start > best:
                best, best_range = i - start, (start, i)
            start = None
    return slice(*best_range)


def build_partner(curve, app, V, lam):
    """Partner ``beta = gamma(0) + int V + lambda N`` sampled on the base grid.

    Raises
    ------
    DomainMismatch
        Curve and apparatus grids differ.
    VanishingCurvature
        Base curvature at or below its floor.
    DegeneratePartner
        Partner speed collapses, or partner curvature vanishes, on more than
        5% of the samples.
    """
    if curve.s.shape != app.s.shape or np.abs(curve.s - app.s).max() > 1e-12 * max(1.0, curve.s[-1]):
        raise DomainMismatch("curve and apparatus grids differ")
    if np.any(app.kappa <= app.kappa_min):
        raise VanishingCurvature("principal normal undefined where kappa <= kappa_min")
    u, v, w, lam_s = _components(app, V, lam)
    h = curve.step
    integrand = (u[:, None] * app.T + v[:, None] * app.N + w[:, None] * app.B) * app.speed[:, None]
    beta = curve.points[0] + smooth_cumulative_integral(integrand, h) + lam_s[:, None] * app.N
    # d(beta)/ds has no N-component because lambda' = -v
    a, b = u - lam_s * app.kappa, w + lam_s * app.tau
    velocity = (a[:, None] * app.T + b[:, None] * app.B) * app.speed[:, None]
    speed = np.hypot(a, b) * app.speed
    collapsed = np.mean(speed < SIGMA_FLOOR)
    if collapsed > DEGENERATE_FRACTION:
        raise DegeneratePartner(f"partner speed vanishes on {100 * collapsed:.0f}% of samples")
    window = _regular_window(speed)
    sub = slice(window.start, window.stop)
    if sub.stop - sub.start < 7:
        raise DegeneratePartner("partner has no regular stretch of at least 7 samples")
    pcurve = SampledCurve(curve.s, beta, unit_speed=False)
    flat = np.mean(estimate_curvature(SampledCurve(curve.s[sub], beta[sub], unit_speed=False)) < KAPPA_MIN)
    if flat > DEGENERATE_FRACTION:
        raise DegeneratePartner(f"partner curvature below {KAPPA_MIN:g} on {100 * flat:.0f}% of samples")
    s_bar = cumulative_integral(speed, h)
    return Partner(pcurve, s_bar, speed, lam_s, window, velocity)


def partner_apparatus(partner, resample_step=None, use_velocity=True, kappa_min=KAPPA_MIN):
    """Frenet apparatus of the partner over its regular window.

    By default frames are estimated on the base grid (a regular, non-arc-length
    parametrization) starting from the constructed velocity, so the partner
    tangent needs no differencing.  ``use_velocity=False`` differentiates the
    partner points instead.  With ``resample_step`` the window is first
    resampled by arc length and the points are differentiated.

    Returns ``(apparatus, correspondence)``.
    """
    w = partner.window
    velocity = None
    if resample_step is None:
        sub = SampledCurve(partner.curve.s[w], partner.curve.points[w], unit_speed=False)
        if use_velocity and partner.velocity is not None:
            velocity = partner.velocity[w]
    else:
        sub = resample_by_arclength(partner.curve.points[w], resample_step)
    try:
        app = frenet_apparatus(sub, kappa_min=kappa_min, velocity=velocity)
    except VanishingCurvature as exc:
        raise DegeneratePartner(f"partner frames undefined: {exc}") from exc
    return app, partner.correspondence


def _base_parameter(partner_app, corr):
    if partner_app.arclength:
        return corr.to_base(partner_app.s)
    return partner_app.s


def _interp_rows(s_src, rows, s_dst):
    return CubicSpline(s_src, rows, axis=0)(s_dst)


class Collinearity(NamedTuple):
    collinearity_max: float
    epsilon: int
    sign_constant: bool


def verify_collinear(base_app, partner_app, corr=None):
    """Compare the partner binormal with the base principal normal.

    ``collinearity_max`` is the largest ``|B_bar x N|`` over interior partner
    samples; ``epsilon`` the sign of ``<B_bar, N>`` at the first of them.
    """
    low = np.mean(partner_app.kappa < KAPPA_MIN)
    if low > DEGENERATE_FRACTION:
        raise DegeneratePartner(f"partner curvature vanishes on {100 * low:.0f}% of samples")
    if corr is None and partner_app.arclength and partner_app is not base_app:
        if partner_app.s.shape != base_app.s.shape:
            raise DomainMismatch("a correspondence is required for arc-length partners")
    s = partner_app.s if corr is None else _base_parameter(partner_app, corr)
    if np.array_equal(s, base_app.s):
        N = base_app.N
    else:
        N = _interp_rows(base_app.s, base_app.N, s)
        N /= np.linalg.norm(N, axis=1, keepdims=True)
    sl = partner_app.interior
    Bb = partner_app.B[sl]
    Ns = N[sl]
    cross = np.linalg.norm(np.cross(Bb, Ns), axis=1)
    dots = np.einsum("ij,ij->i", Bb, Ns)
    eps = 1 if dots[0] >= 0 else -1
    return Collinearity(float(cross.max()), eps, bool(np.all(np.sign(dots) == eps)))


def angular_check(app, u, w, lam, v=0.0):
    """Residuals of the angular form of the predicate for constant (u, w), v = 0.

    With ``theta = atan2(tau, kappa)``, ``theta0 = atan2(w, u)`` and
    ``rho = sqrt(u^2 + w^2)``:

        2 u kappa = (u^2 + u rho cos(2 theta + theta0)) / lambda
        2 w tau   = (-w^2 + w rho sin(2 theta + theta0)) / lambda

    Returns the max absolute residual of each identity multiplied by |lambda|.
    """
    if v != 0.0:
        raise NotApplicable("angular form holds only for v == 0")
    if abs(u * u + w * w - 1.0) >= 1e-12:
        raise InvalidField("u^2 + w^2 must equal 1")
    theta = np.arctan2(app.tau, app.kappa)
    th0 = np.arctan2(w, u)
    rho = np.hypot(u, w)
    sl = app.interior
    r1 = 2 * u * app.kappa - (u * u + u * rho * np.cos(2 * theta + th0)) / lam
    r2 = 2 * w * app.tau - (-w * w + w * rho * np.sin(2 * theta + th0)) / lam
    return float(np.abs(r1[sl]).max() * abs(lam)), float(np.abs(r2[sl]).max() * abs(lam))


@dataclass(frozen=True)
class OdeCheck:
    residual_max: float
    sign_convention: str
    residuals: dict
    absolute: dict
    unique: bool
    speed_ratio_residual: float
    tan_phi_residual: float
    theta_rate_residual: float
    theta_rate_sign: int


def partner_ode_residual(partner_app, lam, V, corr=None, base_app=None, psi_convention="derived", tol=TOL_ODE):
    """Torsion ODE of a V-Mannheim partner, tested under both signs of the kappa_bar term.

    With ``psi = atan2(w, u)`` and dots meaning d/ds_bar::

        tau_bar' = v tau_bar sqrt(1 + lam^2 tau_bar^2) / (lam sqrt(1 - v^2))
                   + (1/lam) (-psi' + sign * kappa_bar) (1 + lam^2 tau_bar^2)

    ``sign = +1`` is labelled ``paper-s1`` and ``sign = -1`` ``paper-eq-b``.
    ``psi_convention="flipped"`` flips the psi' term.  The residual of each sign
    is ``|lhs - rhs|`` divided by the sum of magnitudes of the right-hand
    terms; the reported convention is the one with the smaller maximum.

    Also reported: the speed ratio ds/ds_bar against
    ``sqrt((1 + lam^2 tau_bar^2) / (1 - v^2))``, the identity
    ``lam tau_bar = tan(phi)`` where phi is the angle from V's (T, B)
    projection to the partner tangent, and ``|d theta / d s_bar| = kappa_bar``
    for ``theta = atan2(tau, kappa)`` of the base (needs ``base_app``).
    """
    s = partner_app.s if corr is None else _base_parameter(partner_app, corr)
    u, v, w = V(s)
    if isinstance(lam, (int, float)):
        lam = OffsetFunction.constant(lam)
    lam_s = lam(s)
    if np.abs(lam_s).min() < 1e-9:
        raise SingularOffset("|lambda| < 1e-9")
    if np.abs(v).max() >= 1 - 1e-9:
        raise VTooLarge("|v| >= 1 - 1e-9")
    h = partner_app.s[1] - partner_app.s[0]
    rate = 1.0 / partner_app.speed  # d(param)/d(s_bar)
    kb, tb = partner_app.kappa, partner_app.tau
    dtb = derivative(tb, h) * rate
    psi = np.unwrap(np.arctan2(w, u))
    psi_dot = derivative(psi, h) * rate
    if psi_convention == "flipped":
        psi_dot = -psi_dot
    q = 1.0 + (lam_s * tb) ** 2
    a = v * tb * np.sqrt(q) / (lam_s * np.sqrt(1.0 - v * v))
    c = q / lam_s
    scale = np.abs(a) + np.abs(c) * (np.abs(psi_dot) + kb)
    sl = partner_app.interior
    rel, ab = {}, {}
    for sign, label in SIGN_LABELS.items():
        diff = np.abs(dtb - (a + c * (-psi_dot + sign * kb)))[sl]
        rel[label] = float((diff / scale[sl]).max())
        ab[label] = float(diff.max())
    best = min(rel, key=rel.get)
    unique = sum(r < tol for r in rel.values()) == 1

    if corr is not None and partner_app.arclength:
        ds_dsbar = corr.ds_dsbar(partner_app.s)
    else:
        ds_dsbar = rate
    speed_res = float(np.abs(ds_dsbar - np.sqrt(q / (1.0 - v * v)))[sl].max())

    theta_res, theta_sign, tan_res = float("nan"), 0, float("nan")
    if base_app is not None:
        base = {
            name: _interp_rows(base_app.s, getattr(base_app, name), s)
            for name in ("kappa", "tau", "T", "B")
        }
        theta = np.unwrap(np.arctan2(base["tau"], base["kappa"]))
        dth = derivative(theta, h) * rate
        theta_res = float((np.abs(np.abs(dth) - kb)[sl] / kb[sl].max()).max())
        theta_sign = int(np.sign(np.median(dth[sl])))
        # phi: angle of the partner tangent measured from the (T, B)-part of V
        vt = u[:, None] * base["T"] + w[:, None] * base["B"]
        vt /= np.linalg.norm(vt, axis=1, keepdims=True)
        cos_phi = np.einsum("ij,ij->i", vt, partner_app.T)
        sin_phi = np.linalg.norm(np.cross(vt, partner_app.T), axis=1)
        tan_phi = sin_phi / cos_phi
        tan_res = float((np.abs(np.abs(lam_s * tb) - np.abs(tan_phi))[sl] / np.sqrt(q[sl])).max())
    return OdeCheck(rel[best], best, rel, ab, unique, speed_res, tan_res, theta_res, theta_sign)


@dataclass(frozen=True, eq=False)
class MannheimReport:
    """Verdict record of a V-Mannheim check.

    ``verdict`` is true iff ``residual_max < tol_pred`` and, when a partner
    was built, ``collinearity_max < tol_col`` with a constant sign epsilon.
    """

    verdict: bool
    lambda_fit: Optional[float]
    residual_max: float
    collinearity_max: Optional[float] = None
    epsilon: Optional[int] = None
    sign_convention: Optional[str] = None
    tolerances: dict = field(default_factory=dict)
    theta_profile: Optional[np.ndarray] = None
    speed_ratio_residual: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def to_json(self):
        out = {
            "verdict": bool(self.verdict),
            "lambda_fit": self.lambda_fit,
            "residual_max": self.residual_max,
            "collinearity_max": self.collinearity_max,
            "epsilon": self.epsilon,
            "sign_convention": self.sign_convention,
            "tolerances": dict(self.tolerances),
        }
        if self.speed_ratio_residual is not None:
            out["speed_ratio_residual"] = self.speed_ratio_residual
        out.update(self.extra)
        return out


def _resolve_lambda(app, V, lam):
    """Returns (OffsetFunction, lambda_fit, flatness or None)."""
    if lam is None or lam == "auto":
        fit, flat = estimate_lambda(app, V)
        return OffsetFunction.constant(fit), fit, flat
    if isinstance(lam, (int, float)):
        lam = OffsetFunction.constant(lam)
    return lam, lam.lambda0, None


def check_curve(app, V, lam="auto", tol=None):
    """Predicate-only report (no partner construction).

    ``lam`` is ``"auto"`` (fit a constant, v == 0 only), a number, or an
    :class:`OffsetFunction`.
    """
    tol = dict(tol or tolerances(app.estimated))
    lam, fit, flat = _resolve_lambda(app, V, lam)
    r = vmannheim_residual(app, V, lam)
    res = float(np.abs(r[app.interior]).max())
    verdict = res < tol["tol_pred"]
    extra = {}
    if flat is not None:
        extra["flatness"] = flat
        verdict = verdict and flat < TOL_FLAT
    return MannheimReport(
        verdict=bool(verdict),
        lambda_fit=fit,
        residual_max=res,
        tolerances=tol,
        theta_profile=np.arctan2(app.tau, app.kappa),
        extra=extra,
    )


def check_partner(curve, app, V, lam="auto", tol=None):
    """Full pipeline: predicate, partner construction, collinearity and ODE checks.

    Returns ``(report, partner, partner_app)``.
    """
    tol = dict(tol or tolerances(app.estimated))
    pred = check_curve(app, V, lam, tol)
    lam_f, _, _ = _resolve_lambda(app, V, lam)
    partner = build_partner(curve, app, V, lam_f)
    papp, corr = partner_apparatus(partner)
    col = verify_collinear(app, papp, corr)
    ode = partner_ode_residual(papp, lam_f, V, corr, base_app=app)
    verdict = pred.residual_max < tol["tol_pred"] and col.collinearity_max < tol["tol_col"] and col.sign_constant
    extra = dict(pred.extra)
    extra.update(
        {
            "sign_constant": col.sign_constant,
            "ode_residual": ode.residuals,
            "ode_unique_sign": ode.unique,
            "theta_rate_sign": ode.theta_rate_sign,
            "theta_rate_residual": ode.theta_rate_residual,
            "partner_length": float(partner.s_bar[partner.window][-1] - partner.s_bar[partner.window][0]),
            "window": [float(partner.curve.s[partner.window][0]), float(partner.curve.s[partner.window][-1])],
        }
    )
    report = MannheimReport(
        verdict=bool(verdict),
        lambda_fit=pred.lambda_fit,
        residual_max=pred.residual_max,
        collinearity_max=col.collinearity_max,
        epsilon=col.epsilon,
        sign_convention=ode.sign_convention,
        tolerances=tol,
        theta_profile=pred.theta_profile,
        speed_ratio_residual=ode.speed_ratio_residual,
        extra=extra,
    )
    return report, partner, papp
