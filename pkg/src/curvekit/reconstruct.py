"""Curves from curvature/torsion profiles by integrating the Frenet-Serret system."""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import _kernels
from ._numerics import antiderivative
from .curvespace import FrenetApparatus, SampledCurve
from .errors import (
    CurvatureVanishes,
    DomainError,
    InvalidFrame,
    NonPositiveCurvature,
    ParamOutOfRange,
    StepTooLarge,
    UnknownFamily,
)

FAMILIES = ("circle", "helix", "salkowski")
STABILITY = 0.01  # step * max(kappa, |tau|) must not exceed this
MANNHEIM_FLOOR = 1e-3  # kappa / R below this counts as vanishing curvature


class CurvatureProfile:
    """Evaluable (kappa, tau) on ``[0, s_max]`` with the torsion integral.

    ``tau_integral(s)`` is the integral of tau over ``[0, s]``.  When it is not
    supplied it is computed by Gauss-Legendre quadrature.  Evaluation outside
    the domain raises :class:`DomainError`; nothing is extrapolated.
    """

    def __init__(self, kappa, tau, s_max, tau_integral=None, kind="named-analytic", meta=None):
        if s_max <= 0:
            raise DomainError("s_max must be positive")
        self._kappa = kappa
        self._tau = tau
        self.s_max = float(s_max)
        self._tau_integral = tau_integral or antiderivative(tau, self.s_max)
        self.kind = kind
        self.meta = dict(meta or {})

    def _check(self, s):
        s = np.asarray(s, dtype=float)
        slack = 1e-12 * max(1.0, self.s_max)
        if s.size and (s.min() < -slack or s.max() > self.s_max + slack):
            raise DomainError(f"evaluation outside [0, {self.s_max:g}]")
        return np.clip(s, 0.0, self.s_max)

    def kappa(self, s):
        s = self._check(s)
        return np.broadcast_to(np.asarray(self._kappa(s), dtype=float), s.shape).copy()

    def tau(self, s):
        s = self._check(s)
        return np.broadcast_to(np.asarray(self._tau(s), dtype=float), s.shape).copy()

    def tau_integral(self, s):
        s = self._check(s)
        return np.broadcast_to(np.asarray(self._tau_integral(s), dtype=float), s.shape).copy()

    @classmethod
    def tabulated(cls, grid, kappa, tau):
        """Cubic interpolation of (kappa, tau) given on a uniform grid starting at 0."""
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 4 or abs(grid[0]) > 1e-12:
            raise DomainError("tabulated grid must start at 0 and have at least 4 nodes")
        h = (grid[-1] - grid[0]) / (grid.size - 1)
        if np.abs(np.diff(grid) - h).max() > 1e-9 * max(1.0, h):
            raise DomainError("tabulated grid must be uniform")
        k_spl = CubicSpline(grid, np.asarray(kappa, dtype=float))
        t_spl = CubicSpline(grid, np.asarray(tau, dtype=float))
        t_int = t_spl.antiderivative()
        prof = cls(k_spl, t_spl, grid[-1], tau_integral=t_int, kind="tabulated")
        prof.grid = grid
        prof.grid_kappa = np.asarray(kappa, dtype=float)
        prof.grid_tau = np.asarray(tau, dtype=float)
        return prof

    @property
    def grid_step(self):
        return getattr(self, "grid", None) is not None and (self.grid[1] - self.grid[0]) or None

    def __repr__(self):
        return f"CurvatureProfile(kind={self.kind!r}, s_max={self.s_max:g}, meta={self.meta})"


@dataclass(frozen=True)
class InitialFrame:
    origin: np.ndarray = field(default_factory=lambda: np.zeros(3))
    T0: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    N0: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))
    B0: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        for name in ("origin", "T0", "N0", "B0"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3))
        F = self.matrix
        dev = np.abs(F @ F.T - np.eye(3)).max()
        if dev >= 1e-12:
            raise InvalidFrame(f"initial frame not orthonormal (deviation {dev:.3e})")
        if np.linalg.det(F) < 0:
            raise InvalidFrame("initial frame is left-handed")

    @property
    def matrix(self):
        return np.stack([self.T0, self.N0, self.B0])


def grid_for(s_max, step):
    """Uniform grid on [0, s_max] whose spacing is the largest value <= ``step``."""
    n = int(np.ceil(s_max / step - 1e-9))
    n = max(n, 1)
    return np.linspace(0.0, s_max, n + 1), s_max / n


def integrate_frenet(profile, init=None, step=1e-3, backend=None):
    """Integrate T' = kappa N, N' = -kappa T + tau B, B' = -tau N, gamma' = T.

    The domain ``[0, profile.s_max]`` is split into equal steps no longer than
    ``step``.  Classical RK4 is used with re-orthonormalization of the frame after
    every step.

    Returns
    -------
    curve : SampledCurve
    apparatus : FrenetApparatus
        Integrated frames together with the profile's exact (kappa, tau).
    """
    init = init or InitialFrame()
    s, h = grid_for(profile.s_max, step)
    s_half = np.linspace(0.0, profile.s_max, 2 * (s.size - 1) + 1)
    kh = profile.kappa(s_half)
    th = profile.tau(s_half)
    if np.any(kh <= 0):
        i = int(np.argmax(kh <= 0))
        raise NonPositiveCurvature(f"kappa({s_half[i]:.6g}) = {kh[i]:.3e} <= 0")
    rate = max(kh.max(), np.abs(th).max())
    if h * rate > STABILITY * (1 + 1e-9):
        raise StepTooLarge(f"step {h:.3g} exceeds {STABILITY}/max(kappa,|tau|) = {STABILITY / rate:.3g}")
    pos, frames = _kernels.rk4_frenet(kh, th, h, init.origin, init.matrix, backend=backend)
    curve = SampledCurve(s, pos)
    app = FrenetApparatus(
        s=s,
        T=frames[:, 0],
        N=frames[:, 1],
        B=frames[:, 2],
        kappa=kh[::2],
        tau=th[::2],
        points=pos,
        estimated=False,
    )
    return curve, app


def _require(params, family, *names):
    missing = [n for n in names if n not in params]
    if missing:
        raise ParamOutOfRange(f"{family}: missing parameter(s) {', '.join(missing)}")
    return [float(params[n]) for n in names]


def make_named_curve(family, params, s_max=None):
    """Analytic profile of a named family.

    ``circle{r > 0}``
        kappa = 1/r, tau = 0; default domain one turn.
    ``helix{a > 0, b}``
        kappa = a/(a^2+b^2), tau = b/(a^2+b^2); default domain one turn.
    ``salkowski{0 < a < 1}``
        kappa = 1, tau(s) = tan(phi(s)) with sin(phi(s)) = a s, so
        tau = a s / sqrt(1 - a^2 s^2); needs ``s_max < 1/a``, default ``0.9/a``.
        The principal normal keeps a constant angle with a fixed axis.
    """
    params = dict(params or {})
    meta = {"family": family, "params": params}
    if family == "circle":
        (r,) = _require(params, family, "r")
        if r <= 0:
            raise ParamOutOfRange("circle: r must be > 0")
        s_max = 2 * np.pi * r if s_max is None else s_max
        return CurvatureProfile(lambda s: 1.0 / r, lambda s: 0.0, s_max, lambda s: 0.0 * s, meta=meta)
    if family == "helix":
        a, b = _require(params, family, "a", "b")
        if a <= 0:
            raise ParamOutOfRange("helix: a must be > 0")
        c2 = a * a + b * b
        k, t = a / c2, b / c2
        s_max = 2 * np.pi * np.sqrt(c2) if s_max is None else s_max
        return CurvatureProfile(lambda s: k, lambda s: t, s_max, lambda s: t * s, meta=meta)
    if family == "salkowski":
        (a,) = _require(params, family, "a")
        if not 0 < a < 1:
            raise ParamOutOfRange("salkowski: a must lie in (0, 1)")
        s_max = 0.9 / a if s_max is None else s_max
        if s_max * a >= 1:
            raise ParamOutOfRange("salkowski: s_max must be < 1/a")
        return CurvatureProfile(
            lambda s: 1.0,
            lambda s: a * s / np.sqrt(1.0 - (a * s) ** 2),
            s_max,
            lambda s: (1.0 - np.sqrt(1.0 - (a * s) ** 2)) / a,
            meta=meta,
        )
    raise UnknownFamily(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def mannheim_profile(R, theta, variant="T", s_max=2.0, step=1e-3):
    """Profile of a T- or B-Mannheim curve driven by an angle function.

    variant ``T``: kappa = R cos^2(theta), tau = R cos(theta) sin(theta), so that
    R kappa = kappa^2 + tau^2.  Variant ``B`` swaps the roles:
    kappa = R cos(theta) sin(theta), tau = R cos^2(theta), with R tau = kappa^2 + tau^2.

    ``theta`` is a vectorized callable of s.  Raises :class:`CurvatureVanishes`
    when kappa/R drops below ``MANNHEIM_FLOOR`` anywhere on the grid of spacing
    ``step``.
    """
    if R <= 0:
        raise ParamOutOfRange("R must be > 0")
    if variant == "T":
        kappa = lambda s: R * np.cos(theta(s)) ** 2
        tau = lambda s: R * np.cos(theta(s)) * np.sin(theta(s))
    elif variant == "B":
        kappa = lambda s: R * np.cos(theta(s)) * np.sin(theta(s))
        tau = lambda s: R * np.cos(theta(s)) ** 2
    else:
        raise ParamOutOfRange(f"variant must be 'T' or 'B', got {variant!r}")
    s, _ = grid_for(s_max, step)
    ratio = kappa(s) / R
    if np.any(ratio < MANNHEIM_FLOOR):
        i = int(np.argmin(ratio))
        raise CurvatureVanishes(f"kappa/R = {ratio[i]:.3e} < {MANNHEIM_FLOOR:g} at s = {s[i]:.6g}")
    return CurvatureProfile(kappa, tau, s_max, meta={"family": f"mannheim-{variant}", "R": R})


def profile_from_json(obj):
    """Parse a profile JSON object; returns ``(profile, step)``."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    kind = obj.get("kind")
    if kind == "named":
        prof = make_named_curve(obj["family"], obj.get("params", {}), obj.get("s_max"))
        return prof, float(obj.get("step", 1e-3))
    if kind == "tabulated":
        prof = CurvatureProfile.tabulated(obj["grid"], obj["kappa"], obj["tau"])
        grid = prof.grid
        return prof, float(obj.get("step", grid[1] - grid[0]))
    raise ValueError(f"profile kind must be 'named' or 'tabulated', got {kind!r}")


def profile_to_json(profile, step):
    if profile.kind == "tabulated":
        return {
            "kind": "tabulated",
            "grid": profile.grid.tolist(),
            "kappa": profile.grid_kappa.tolist(),
            "tau": profile.grid_tau.tolist(),
            "step": step,
        }
    meta = profile.meta
    if meta.get("family") not in FAMILIES:
        raise ValueError("only named-family or tabulated profiles serialize to JSON")
    return {"kind": "named", "family": meta["family"], "params": meta["params"], "s_max": profile.s_max, "step": step}
