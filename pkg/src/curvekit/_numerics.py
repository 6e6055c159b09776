"""Shared numerical primitives: stencils, quadrature, frame projection."""

from functools import lru_cache
from math import factorial

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

# 4th-order central first-derivative stencil, coefficients / (12 h)
_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0

BOUNDARY = 2  # one-sided samples per end
_WINDOW = 8  # one-sided window width


@lru_cache(maxsize=None)
def one_sided_stencil(i, m):
    """Minimum-norm first-derivative weights at offset ``i`` of an ``m``-point window.

    The weights differentiate quartics exactly (4th order); among those, the
    minimum-norm choice damps rounding noise, which matters when derivatives
    are nested three deep for torsion.  For ``m == 5`` this is the classical
    one-sided 5-point stencil.
    """
    j = np.arange(m) - i
    A = np.array([j**p / factorial(p) for p in range(5)], dtype=float)
    e = np.zeros(5)
    e[1] = 1.0
    return np.linalg.pinv(A) @ e

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def derivative(f, h, axis=0):
    """First derivative of uniformly sampled data, 4th order everywhere.

    Interior samples use the 5-point central stencil; the two samples at each
    end use one-sided stencils from :func:`one_sided_stencil`.  Needs at least
    5 samples.
    """
    f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
    n = f.shape[0]
    if n < 5:
        raise ValueError("derivative needs at least 5 samples")
    out = np.empty_like(f)
    c = _CENTRAL
    out[2:-2] = c[0] * f[:-4] + c[1] * f[1:-3] + c[3] * f[3:-1] + c[4] * f[4:]
    m = min(_WINDOW, n)
    head = f[:m]
    tail = f[-m:][::-1]
    for i in range(BOUNDARY):
        w = one_sided_stencil(i, m)
        out[i] = np.tensordot(w, head, axes=1)
        out[-1 - i] = -np.tensordot(w, tail, axes=1)
    out /= h
    return np.moveaxis(out, 0, axis)


def cumulative_integral(y, h, axis=0):
    """Cumulative composite-Simpson integral on a uniform grid, starting at 0."""
    return cumulative_simpson(np.asarray(y, dtype=float), dx=h, axis=axis, initial=0.0)


def smooth_cumulative_integral(y, h):
    """Cumulative integral along axis 0 via the antiderivative of a cubic spline.

    Same 4th order as Simpson, but the error varies smoothly from sample to
    sample instead of alternating with parity, so the result survives being
    differentiated several times.
    """
    y = np.asarray(y, dtype=float)
    x = np.arange(y.shape[0]) * h
    return CubicSpline(x, y, axis=0).antiderivative()(x)


def antiderivative(func, s_max, cells=None):
    """Return F(s) = integral of ``func`` over [0, s] as a vectorized callable.

    Cell totals come from 8-point Gauss-Legendre on a uniform partition; a query
    adds Gauss-Legendre over the partial cell, so F is accurate to quadrature
    precision anywhere in [0, s_max], not only on grid nodes.
    """
    f = func
    func = lambda x: np.broadcast_to(np.asarray(f(x), dtype=float), np.shape(x))  # noqa: E731
    cells = cells or max(16, int(np.ceil(s_max / 1e-2)))
    H = s_max / cells
    edges = np.arange(cells) * H
    nodes = edges[:, None] + 0.5 * H * (_GL_X + 1.0)
    totals = 0.5 * H * (np.asarray(func(nodes.ravel()), dtype=float).reshape(nodes.shape) @ _GL_W)
    prefix = np.concatenate([[0.0], np.cumsum(totals)])

    def F(s):
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        j = np.clip(np.floor(flat / H).astype(int), 0, cells - 1)
        a = j * H
        half = 0.5 * (flat - a)
        pts = a[:, None] + half[:, None] * (_GL_X + 1.0)
        vals = np.asarray(func(pts.ravel()), dtype=float).reshape(pts.shape)
        out = prefix[j] + half * (vals @ _GL_W)
        return out.reshape(s.shape)

    return F


def polar_orthonormalize(frames):
    """Project a stack of 3x3 frames (rows T, N, B) to the nearest rotation."""
    U, _, Vt = np.linalg.svd(frames)
    R = U @ Vt
    flip = np.linalg.det(R) < 0
    if np.any(flip):
        U = U.copy()
        U[flip, :, -1] *= -1.0
        R = U @ Vt
    return R


def gram_deviation(frames):
    """Per-sample max |F F^T - I| for a stack of frames."""
    G = np.einsum("nij,nkj->nik", frames, frames)
    return np.abs(G - np.eye(3)).max(axis=(1, 2))


def unit(v, axis=-1):
    return v / np.linalg.norm(v, axis=axis, keepdims=True)


def rigid_align(source, target):
    """Best-fit rotation + translation (Kabsch) mapping ``source`` onto ``target``.

    Returns the aligned copy of ``source`` and the rotation matrix.
    """
    source = np.asarray(source, dtype=float)
    target = np.asarray(target, dtype=float)
    cs, ct = source.mean(axis=0), target.mean(axis=0)
    H = (source - cs).T @ (target - ct)
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    D = np.diag([1.0, 1.0, d])
    R = Vt.T @ D @ U.T
    return (source - cs) @ R.T + ct, R
