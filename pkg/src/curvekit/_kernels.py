"""Hot loops: fixed-step RK4 integration of the Frenet-Serret system.

Two interchangeable backends produce the same trajectory up to rounding:

* ``numba`` -- a scalar loop compiled with ``@njit``;
* ``numpy`` -- stage propagators for all steps are built at once with
  ``einsum`` and then chained with small matrix products.

The numba path is used when numba imports and ``CURVEKIT_DISABLE_NUMBA`` is
not set to a truthy value.  Both backends take curvature and torsion sampled on
the half-step grid ``s_0, s_0 + h/2, s_1, ...`` (length ``2 n + 1``).
"""

import os

import numpy as np

_DISABLED = os.environ.get("CURVEKIT_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

try:
    if _DISABLED:
        raise ImportError("numba disabled by CURVEKIT_DISABLE_NUMBA")
    import numba

    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False

BACKENDS = ("numba", "numpy") if HAS_NUMBA else ("numpy",)
DEFAULT_BACKEND = BACKENDS[0]


def _frame_rate(F, kappa, tau, out):
    # rows of F are T, N, B
    for j in range(3):
        out[0, j] = kappa * F[1, j]
        out[1, j] = -kappa * F[0, j] + tau * F[2, j]
        out[2, j] = -tau * F[1, j]


def _bjorck(F, sweeps):
    # F <- 1.5 F - 0.5 F F^T F converges to the polar (nearest orthogonal) factor
    G = np.empty((3, 3))
    H = np.empty((3, 3))
    for _ in range(sweeps):
        for i in range(3):
            for j in range(3):
                G[i, j] = F[i, 0] * F[j, 0] + F[i, 1] * F[j, 1] + F[i, 2] * F[j, 2]
        for i in range(3):
            for j in range(3):
                H[i, j] = G[i, 0] * F[0, j] + G[i, 1] * F[1, j] + G[i, 2] * F[2, j]
        for i in range(3):
            for j in range(3):
                F[i, j] = 1.5 * F[i, j] - 0.5 * H[i, j]


def _rk4_frenet_loop(kappa_half, tau_half, h, origin, frame0):
    n = (kappa_half.shape[0] - 1) // 2
    pos = np.empty((n + 1, 3))
    frames = np.empty((n + 1, 3, 3))
    F = frame0.copy()
    p = origin.copy()
    pos[0] = p
    frames[0] = F
    k1 = np.empty((3, 3))
    k2 = np.empty((3, 3))
    k3 = np.empty((3, 3))
    k4 = np.empty((3, 3))
    S = np.empty((3, 3))
    for k in range(n):
        ka, kb, kc = kappa_half[2 * k], kappa_half[2 * k + 1], kappa_half[2 * k + 2]
        ta, tb, tc = tau_half[2 * k], tau_half[2 * k + 1], tau_half[2 * k + 2]
        _frame_rate(F, ka, ta, k1)
        for i in range(3):
            for j in range(3):
                S[i, j] = F[i, j] + 0.5 * h * k1[i, j]
        _frame_rate(S, kb, tb, k2)
        for i in range(3):
            for j in range(3):
                S[i, j] = F[i, j] + 0.5 * h * k2[i, j]
        _frame_rate(S, kb, tb, k3)
        for i in range(3):
            for j in range(3):
                S[i, j] = F[i, j] + h * k3[i, j]
        _frame_rate(S, kc, tc, k4)
        # position increment: weighted stage tangents (row 0 of each stage state)
        for j in range(3):
            t1 = F[0, j]
            t2 = F[0, j] + 0.5 * h * k1[0, j]
            t3 = F[0, j] + 0.5 * h * k2[0, j]
            t4 = F[0, j] + h * k3[0, j]
            p[j] += h / 6.0 * (t1 + 2.0 * t2 + 2.0 * t3 + t4)
        for i in range(3):
            for j in range(3):
                F[i, j] += h / 6.0 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        _bjorck(F, 2)
        pos[k + 1] = p
        frames[k + 1] = F
    return pos, frames


if HAS_NUMBA:
    # globals are resolved at compile time, so the loop picks up the jitted helpers
    _frame_rate = numba.njit(cache=True)(_frame_rate)
    _bjorck = numba.njit(cache=True)(_bjorck)
    _rk4_frenet_numba = numba.njit(cache=True)(_rk4_frenet_loop)


def _generator(kappa, tau):
    """Stack of 3x3 Frenet generators A with F' = A F (rows T, N, B)."""
    A = np.zeros(kappa.shape + (3, 3))
    A[..., 0, 1] = kappa
    A[..., 1, 0] = -kappa
    A[..., 1, 2] = tau
    A[..., 2, 1] = -tau
    return A


def _rk4_frenet_numpy(kappa_half, tau_half, h, origin, frame0):
    """Vectorized propagators, sequential chaining.

    For the linear system F' = A(s) F one RK4 step is F <- P_k F with
    P_k = I + h/6 (A1 S1 + 2 A2 S2 + 2 A3 S3 + A4 S4), where S_i are the stage
    operators; the position increment is row 0 of h/6 (S1 + 2 S2 + 2 S3 + S4) F.
    """
    n = (kappa_half.shape[0] - 1) // 2
    A1 = _generator(kappa_half[0:-1:2], tau_half[0:-1:2])
    A2 = _generator(kappa_half[1::2], tau_half[1::2])
    A4 = _generator(kappa_half[2::2], tau_half[2::2])
    eye = np.broadcast_to(np.eye(3), (n, 3, 3))
    S2 = eye + 0.5 * h * A1
    S3 = eye + 0.5 * h * np.einsum("nij,njk->nik", A2, S2)
    S4 = eye + h * np.einsum("nij,njk->nik", A2, S3)
    P = eye + h / 6.0 * (
        A1
        + 2.0 * np.einsum("nij,njk->nik", A2, S2)
        + 2.0 * np.einsum("nij,njk->nik", A2, S3)
        + np.einsum("nij,njk->nik", A4, S4)
    )
    G = (h / 6.0 * (eye + 2.0 * S2 + 2.0 * S3 + S4))[:, 0, :]

    pos = np.empty((n + 1, 3))
    frames = np.empty((n + 1, 3, 3))
    F = np.array(frame0, dtype=float)
    p = np.array(origin, dtype=float)
    pos[0] = p
    frames[0] = F
    for k in range(n):
        p = p + G[k] @ F
        F = P[k] @ F
        for _ in range(2):
            F = 1.5 * F - 0.5 * (F @ F.T) @ F
        pos[k + 1] = p
        frames[k + 1] = F
    return pos, frames


def rk4_frenet(kappa_half, tau_half, h, origin, frame0, backend=None):
    """Integrate gamma' = T, (T, N, B)' = A (T, N, B) with fixed-step RK4.

    Parameters
    ----------
    kappa_half, tau_half : ndarray, shape (2n + 1,)
        Curvature and torsion on the half-step grid.
    h : float
        Step length.
    origin : ndarray, shape (3,)
    frame0 : ndarray, shape (3, 3)
        Initial frame, rows T, N, B.
    backend : {"numba", "numpy"}, optional

    Returns
    -------
    positions : ndarray, shape (n + 1, 3)
    frames : ndarray, shape (n + 1, 3, 3)
    """
    backend = backend or DEFAULT_BACKEND
    kappa_half = np.ascontiguousarray(kappa_half, dtype=np.float64)
    tau_half = np.ascontiguousarray(tau_half, dtype=np.float64)
    origin = np.ascontiguousarray(origin, dtype=np.float64)
    frame0 = np.ascontiguousarray(frame0, dtype=np.float64)
    if backend == "numba":
        if not HAS_NUMBA:
            raise ValueError("numba backend unavailable")
        return _rk4_frenet_numba(kappa_half, tau_half, float(h), origin, frame0)
    if backend == "numpy":
        return _rk4_frenet_numpy(kappa_half, tau_half, float(h), origin, frame0)
    raise ValueError(f"unknown backend {backend!r}")
