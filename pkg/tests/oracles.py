"""Closed-form reference curves used as independent oracles."""

import numpy as np


def helix(a, b, s):
    """Unit-speed helix (a cos t, a sin t, b t), t = s / c with c = sqrt(a^2 + b^2).

    Returns points and the exact frames T, N, B.
    """
    c = np.hypot(a, b)
    t = np.asarray(s, dtype=float) / c
    pts = np.column_stack([a * np.cos(t), a * np.sin(t), b * t])
    T = np.column_stack([-a * np.sin(t), a * np.cos(t), np.full_like(t, b)]) / c
    N = np.column_stack([-np.cos(t), -np.sin(t), np.zeros_like(t)])
    B = np.cross(T, N)
    return pts, T, N, B


def circle(r, s, z=0.0):
    t = np.asarray(s, dtype=float) / r
    return np.column_stack([r * np.cos(t), r * np.sin(t), np.full_like(t, z)])


def arange_closed(stop, step):
    n = int(round(stop / step))
    return np.arange(n + 1) * step


def constant_angle_axis(N, Ndot):
    """Axis d minimising |<N', d>|, and the spread of <N, d> along the curve.

    For a curve whose normal keeps a constant angle with a fixed axis the
    derivative of N is orthogonal to that axis at every point.
    """
    _, sv, Vt = np.linalg.svd(Ndot, full_matrices=False)
    d = Vt[-1]
    return d, sv[-1] / sv[0], np.ptp(N @ d)
