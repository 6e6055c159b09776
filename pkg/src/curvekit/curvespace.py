"""Sampled space curves, arc-length resampling and Frenet apparatus estimation."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from ._io import atomic_write_text, format_rows
from ._numerics import (
    BOUNDARY,
    _GL_W,
    _GL_X,
    derivative,
    gram_deviation,
    polar_orthonormalize,
)
from .errors import (
    DegenerateInput,
    DuplicatePoints,
    InvalidFrame,
    NotUnitSpeed,
    VanishingCurvature,
)

KAPPA_MIN = 1e-6
TOL_SPEED = 1e-3
MIN_SAMPLES = 7
FRAME_TOL = 1e-8

CURVE_HEADER = "s,x,y,z"
APPARATUS_HEADER = "s,x,y,z,tx,ty,tz,nx,ny,nz,bx,by,bz,kappa,tau"


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Points of a space curve on a uniform parameter grid.

    With ``unit_speed=True`` (the default) the parameter is arc length and the
    chord speed ``|p[k+1] - p[k]| / step`` must lie within ``1 +- TOL_SPEED``.
    Partner curves built on a foreign grid set ``unit_speed=False``.
    """

    s: np.ndarray
    points: np.ndarray
    unit_speed: bool = True

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        p = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "points", p)
        if s.ndim != 1 or p.shape != (s.size, 3):
            raise DegenerateInput(f"expected s of shape (n,) and points (n, 3), got {s.shape}, {p.shape}")
        if s.size < MIN_SAMPLES:
            raise DegenerateInput(f"need at least {MIN_SAMPLES} samples, got {s.size}")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(p))):
            raise DegenerateInput("non-finite samples")
        step = (s[-1] - s[0]) / (s.size - 1)
        if step <= 0:
            raise DegenerateInput("parameter values must increase")
        k = np.arange(s.size)
        if np.abs(s - (s[0] + k * step)).max() > 1e-12 * max(1.0, np.abs(s).max()):
            raise DegenerateInput("parameter grid is not uniform", "uniform parameter spacing")
        chords = np.linalg.norm(np.diff(p, axis=0), axis=1)
        if np.any(chords <= 1e-14 * max(1.0, np.abs(p).max())):
            raise DuplicatePoints(f"consecutive samples coincide at index {int(np.argmin(chords))}")
        if self.unit_speed:
            ratio = chords / step
            bad = np.abs(ratio - 1.0) > TOL_SPEED
            if np.any(bad):
                i = int(np.argmax(np.abs(ratio - 1.0)))
                raise NotUnitSpeed(f"chord speed {ratio[i]:.6g} at index {i} outside 1 +- {TOL_SPEED}")

    @property
    def step(self):
        return (self.s[-1] - self.s[0]) / (self.s.size - 1)

    def __len__(self):
        return self.s.size


@dataclass(frozen=True, eq=False)
class FrenetApparatus:
    """Per-sample orthonormal frame (T, N, B) with curvature and torsion.

    ``speed`` is d(arc length)/d(parameter); it is 1 for arc-length curves.
    ``estimated`` marks finite-difference output, whose outermost
    ``BOUNDARY`` samples per end come from one-sided stencils.
    """

    s: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    points: np.ndarray = None
    speed: np.ndarray = None
    estimated: bool = False
    arclength: bool = True
    kappa_min: float = KAPPA_MIN
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        n = np.asarray(self.s).size
        for name in ("s", "kappa", "tau"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        for name in ("T", "N", "B"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(n, 3))
        if self.points is not None:
            object.__setattr__(self, "points", np.asarray(self.points, dtype=float).reshape(n, 3))
        speed = np.ones(n) if self.speed is None else np.asarray(self.speed, dtype=float)
        object.__setattr__(self, "speed", speed)
        if not self.validate:
            return
        dev = gram_deviation(self.frames)
        if dev.max() >= FRAME_TOL:
            raise InvalidFrame(f"frame orthonormality deviation {dev.max():.3e}")
        det = np.linalg.det(self.frames)
        if np.abs(det - 1.0).max() >= FRAME_TOL:
            raise InvalidFrame("frame is not right-handed")
        low = self.kappa <= self.kappa_min
        if np.any(low):
            i = int(np.argmax(low))
            raise VanishingCurvature(f"kappa = {self.kappa[i]:.3e} <= {self.kappa_min:g} at s = {self.s[i]:.6g}")

    @property
    def frames(self):
        """Stack of frames, shape (n, 3, 3), rows T, N, B."""
        return np.stack([self.T, self.N, self.B], axis=1)

    @property
    def interior(self):
        """Slice excluding one-sided boundary samples of estimated data."""
        b = BOUNDARY if self.estimated else 0
        return slice(b, self.s.size - b)

    def __len__(self):
        return self.s.size


def _arc_integrand(spline):
    d = spline.derivative()
    return lambda t: np.linalg.norm(d(t), axis=-1)


def _segment_lengths(speed, a, b):
    half = 0.5 * (b - a)
    t = a[:, None] + half[:, None] * (_GL_X + 1.0)
    return half * (speed(t) @ _GL_W)


def resample_by_arclength(points, step):
    """Resample an ordered point list at uniform arc-length spacing ``step``.

    A cubic spline through the points in cumulative-chord parametrization
    defines the curve; its arc length is integrated with Gauss-Legendre
    quadrature per knot interval and inverted with Newton iterations.

    Raises
    ------
    DegenerateInput
        Fewer than 4 points, or total length below ``10 * step``.
    DuplicatePoints
        Two consecutive points coincide.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 3 or p.shape[0] < 4:
        raise DegenerateInput(f"need at least 4 points in 3-space, got shape {p.shape}")
    if step <= 0:
        raise DegenerateInput("step must be positive")
    chords = np.linalg.norm(np.diff(p, axis=0), axis=1)
    if np.any(chords <= 1e-14 * max(1.0, np.abs(p).max())):
        raise DuplicatePoints(f"consecutive points coincide at index {int(np.argmin(chords))}")
    t = np.concatenate([[0.0], np.cumsum(chords)])
    spline = CubicSpline(t, p, axis=0)
    speed = _arc_integrand(spline)
    seg = _segment_lengths(speed, t[:-1], t[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    length = cum[-1]
    if length < 10.0 * step * (1 - 1e-9):
        raise DegenerateInput(f"total length {length:.6g} < 10 * step")

    n = int(np.floor(length / step + 1e-9)) + 1
    targets = np.arange(n) * step
    j = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, t.size - 2)
    ta, tb = t[j], t[j + 1]
    frac = (targets - cum[j]) / (cum[j + 1] - cum[j])
    u = ta + frac * (tb - ta)
    for _ in range(30):
        resid = cum[j] + _segment_lengths(speed, ta, u) - targets
        du = resid / speed(u)
        u = np.clip(u - du, ta, tb)
        if np.abs(du).max() < 1e-15 * max(1.0, t[-1]):
            break
    return SampledCurve(targets, spline(u))


def _estimate(d1, h):
    speed = np.linalg.norm(d1, axis=1)
    T = d1 / speed[:, None]
    dT = derivative(T, h)
    dT_norm = np.linalg.norm(dT, axis=1)
    kappa = dT_norm / speed
    return speed, T, dT, dT_norm, kappa


def estimate_curvature(curve):
    """Curvature estimate without building frames (never raises on small kappa)."""
    return _estimate(derivative(curve.points, curve.step), curve.step)[4]


def frenet_apparatus(curve, kappa_min=KAPPA_MIN, velocity=None):
    """Estimate (T, N, B, kappa, tau) from sampled points.

    T = gamma'/|gamma'|, kappa = |T'|/|gamma'|, N = T'/|T'|, B = T x N and
    tau = -<B', N>/|gamma'|, with every derivative taken by the 4th-order
    stencils of :func:`curvekit._numerics.derivative`.  Each frame is projected
    to the nearest rotation before torsion is computed.  Works for any regular
    parametrization; for arc-length curves the speed factor is ~1.

    Parameters
    ----------
    velocity : ndarray, shape (n, 3), optional
        Known d(gamma)/d(parameter) at the samples.  Skips the first
        differencing step, which lowers the noise of every later derivative.

    Raises
    ------
    VanishingCurvature
        If kappa <= ``kappa_min`` at any sample.
    """
    h = curve.step
    d1 = derivative(curve.points, h) if velocity is None else np.asarray(velocity, dtype=float)
    speed, T, dT, dT_norm, kappa = _estimate(d1, h)
    low = kappa <= kappa_min
    if np.any(low):
        i = int(np.argmax(low))
        raise VanishingCurvature(f"estimated kappa = {kappa[i]:.3e} <= {kappa_min:g} at s = {curve.s[i]:.6g}")
    N = dT / dT_norm[:, None]
    B = np.cross(T, N)
    R = polar_orthonormalize(np.stack([T, N, B], axis=1))
    T, N, B = R[:, 0], R[:, 1], R[:, 2]
    dB = derivative(B, h)
    tau = -np.einsum("ij,ij->i", dB, N) / speed
    return FrenetApparatus(
        s=curve.s,
        T=T,
        N=N,
        B=B,
        kappa=kappa,
        tau=tau,
        points=curve.points,
        speed=speed,
        estimated=True,
        arclength=curve.unit_speed,
        kappa_min=kappa_min,
    )


def frame_orthonormality_report(app):
    """Max deviation of the frame Gram matrices from the identity."""
    return float(gram_deviation(np.asarray(app.frames, dtype=float)).max())


def write_curve_csv(path, curve):
    body = format_rows(np.column_stack([curve.s, curve.points]))
    atomic_write_text(path, CURVE_HEADER + "\n" + body)


def _read_table(path, header):
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if first != header:
            raise ValueError(f"{path}: expected header {header!r}, got {first!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    ncol = header.count(",") + 1
    if data.shape[1] != ncol:
        raise ValueError(f"{path}: expected {ncol} columns, got {data.shape[1]}")
    return data


def read_curve_csv(path, unit_speed=True):
    data = _read_table(path, CURVE_HEADER)
    return SampledCurve(data[:, 0], data[:, 1:4], unit_speed=unit_speed)


def write_apparatus_csv(path, app):
    points = app.points if app.points is not None else np.full((len(app), 3), np.nan)
    table = np.column_stack([app.s, points, app.T, app.N, app.B, app.kappa, app.tau])
    atomic_write_text(path, APPARATUS_HEADER + "\n" + format_rows(table))


def read_apparatus_csv(path, estimated=True):
    """Load an apparatus table; the parameter column is taken as arc length."""
    d = _read_table(path, APPARATUS_HEADER)
    return FrenetApparatus(
        s=d[:, 0],
        points=d[:, 1:4],
        T=d[:, 4:7],
        N=d[:, 7:10],
        B=d[:, 10:13],
        kappa=d[:, 13],
        tau=d[:, 14],
        estimated=estimated,
    )
