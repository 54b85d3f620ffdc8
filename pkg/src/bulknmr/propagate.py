"""Propagators for constant linear systems ``dv/dt = A v``.

Two independent routes:

* :func:`expm_action` -- Krylov (Arnoldi, or Lanczos for antisymmetric
  generators) approximation of ``exp(tA) v`` with
  an a-posteriori error estimate and automatic substepping. One Krylov
  basis is reused for as many output times as its error estimate allows,
  which makes dense uniform output grids cheap.
* :func:`rk_solve` -- Dormand-Prince 5(4) with a PI step-size controller.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = ["NumericalError", "expm_action", "rk_solve"]


class NumericalError(ArithmeticError):
    """Propagation produced a non-finite value or failed to converge."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


# ||A|| * t beyond this means ~1e11 rotations of the fastest mode; treat as a failure
MAX_SPAN = 1e12


def _check_span(A, times):
    """Reject spans that are non-finite or far beyond any feasible amount of work."""
    if len(times) == 0:
        return
    norm = float(abs(A).sum(axis=0).max()) if A.shape[0] else 0.0
    span = norm * float(times[-1])
    if not np.isfinite(span) or span > MAX_SPAN:
        raise NumericalError(f"propagation span |A| t = {span:.3g} exceeds the work limit {MAX_SPAN:g}",
                             step=0, time=0.0)


def _arnoldi(A, v, m):
    """Arnoldi with classical Gram-Schmidt, applied twice.

    Returns ``(V, H, k)`` with ``V`` of shape ``(k+1, N)`` and ``H`` of shape
    ``(k+1, k)``; ``k < m`` signals an invariant subspace (happy breakdown).
    """
    N = v.shape[0]
    V = np.empty((m + 1, N))
    H = np.zeros((m + 1, m))
    beta = np.linalg.norm(v)
    V[0] = v / beta
    scale = 0.0
    for j in range(m):
        w = A @ V[j]
        for _ in range(2):
            c = V[: j + 1] @ w
            w -= c @ V[: j + 1]
            H[: j + 1, j] += c
        hnext = np.linalg.norm(w)
        H[j + 1, j] = hnext
        scale = max(scale, np.abs(H[: j + 2, j]).sum())
        if hnext <= 1e-13 * max(scale, 1.0):
            return V[: j + 1], H[: j + 1, : j + 1], j + 1, True
        V[j + 1] = w / hnext
    return V, H, m, False


def _skew_lanczos(A, v, m):
    """Lanczos recurrence for an antisymmetric ``A``: ``H`` is skew tridiagonal.

    Only the two previous vectors are used for orthogonalization, so the
    cost per step is one product plus ``O(N)``.
    """
    N = v.shape[0]
    V = np.empty((m + 1, N))
    H = np.zeros((m + 1, m))
    beta = np.linalg.norm(v)
    V[0] = v / beta
    b_prev = 0.0
    scale = 0.0
    for j in range(m):
        w = A @ V[j]
        if j > 0:
            w += b_prev * V[j - 1]
        lo = max(0, j - 1)
        c = V[lo : j + 1] @ w  # local correction against drift
        w -= c @ V[lo : j + 1]
        hnext = np.linalg.norm(w)
        if j > 0:
            H[j - 1, j] = -b_prev
        H[j + 1, j] = hnext
        scale = max(scale, hnext, b_prev)
        if hnext <= 1e-13 * max(scale, 1.0):
            return V[: j + 1], H[: j + 1, : j + 1], j + 1, True
        V[j + 1] = w / hnext
        b_prev = hnext
    return V, H, m, False


def _small_exp(H, tau):
    """``exp(tau H) e1`` and ``phi1(tau H) e1`` for the small Hessenberg block."""
    k = H.shape[1]
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = tau * H[:k, :k]
    M[0, k] = 1.0
    E = scipy.linalg.expm(M)
    return E[:k, 0], E[:k, k]


def expm_action(A, v, times, *, tol=1e-12, m=None, skew=False, max_restarts=1_000_000):
    """Compute ``exp(t A) v`` for every ``t`` in ``times``.

    Parameters
    ----------
    A : sparse matrix or ndarray
        Real square generator.
    v : ndarray
        Starting vector at ``t = 0``.
    times : sequence of float
        Nondecreasing, nonnegative output times.
    tol : float
        Local error bound per Krylov step, relative to the current norm.
    m : int, optional
        Maximum Krylov dimension; defaults to 120 with ``skew`` (cheap
        recurrence) and 40 otherwise.
    skew : bool
        Declare ``A`` antisymmetric and use the short Lanczos recurrence
        instead of full Arnoldi orthogonalization.

    Returns
    -------
    ndarray of shape ``(len(times), len(v))``
    """
    times = np.asarray(times, dtype=float)
    v = np.asarray(v, dtype=float)
    if A.shape != (v.shape[0], v.shape[0]):
        raise ValueError(f"generator shape {A.shape} does not match vector length {v.shape[0]}")
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be a nondecreasing sequence of nonnegative values")
    _check_span(A, times)
    out = np.empty((len(times), v.shape[0]))
    if m is None:
        m = 120 if skew else 40
    m = max(1, min(m, v.shape[0]))
    w = v.copy()
    t_cur = 0.0
    i = 0
    restarts = 0
    while i < len(times):
        beta = np.linalg.norm(w)
        if beta == 0.0:
            out[i:] = w
            break
        V, H, k, exact = (_skew_lanczos if skew else _arnoldi)(A, w, m)
        hnext = 0.0 if exact else H[k, k - 1]
        accepted = 0
        tau_try = None
        while i < len(times):
            tau = times[i] - t_cur
            if tau == 0.0:
                out[i] = w
                i += 1
                continue
            ex, ph = _small_exp(H, tau)
            err = beta * hnext * tau * abs(ph[k - 1])
            if err > tol * beta:
                tau_try = tau
                break
            out[i] = beta * (ex @ V[:k])
            i += 1
            accepted += 1
        if accepted:
            w = out[i - 1].copy()
            t_cur = times[i - 1]
        elif tau_try is not None:
            # no grid point reachable from this basis: take a shorter internal step
            tau = tau_try
            for _ in range(200):
                tau *= 0.5
                ex, ph = _small_exp(H, tau)
                if beta * hnext * tau * abs(ph[k - 1]) <= tol * beta:
                    break
            else:
                raise NumericalError("Krylov step size underflow", step=restarts, time=t_cur)
            w = beta * (ex @ V[:k])
            t_cur += tau
        if not np.all(np.isfinite(w)):
            raise NumericalError("non-finite state during Krylov propagation",
                                 step=restarts, time=t_cur)
        restarts += 1
        if restarts > max_restarts:
            raise NumericalError("too many Krylov restarts", step=restarts, time=t_cur)
    return out


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B_LOW = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B_LOW


def rk_solve(A, v, times, *, rtol=1e-10, atol=1e-12, h0=None, max_steps=10_000_000):
    """Integrate ``dv/dt = A v`` with adaptive Dormand-Prince 5(4).

    Output times are hit exactly by clipping steps. Step size follows a PI
    controller on the scaled RMS error of the embedded pair.
    """
    times = np.asarray(times, dtype=float)
    y = np.asarray(v, dtype=float).copy()
    if A.shape != (y.shape[0], y.shape[0]):
        raise ValueError(f"generator shape {A.shape} does not match vector length {y.shape[0]}")
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be a nondecreasing sequence of nonnegative values")
    _check_span(A, times)
    out = np.empty((len(times), y.shape[0]))
    t = 0.0
    if h0 is None:
        nrm = abs(A).sum(axis=1).max() if A.shape[0] else 0.0
        h = 0.01 / nrm if nrm > 0 else (times[-1] if len(times) and times[-1] > 0 else 1.0)
    else:
        h = h0
    err_prev = 1e-4
    safety, fac_min, fac_max = 0.9, 0.2, 5.0
    alpha, beta = 0.7 / 5, 0.4 / 5
    k = np.empty((7, y.shape[0]))
    k[0] = A @ y
    steps = 0
    for i, target in enumerate(times):
        while t < target:
            h_step = min(h, target - t)
            for s in range(1, 7):
                k[s] = A @ (y + h_step * (np.asarray(_A[s]) @ k[:s]))
            y_new = y + h_step * (_B @ k)
            err_vec = h_step * (_E @ k)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = np.sqrt(np.mean((err_vec / scale) ** 2)) if y.size else 0.0
            steps += 1
            if steps > max_steps:
                raise NumericalError("maximum number of RK steps exceeded", step=steps, time=t)
            if not np.isfinite(err):
                raise NumericalError("non-finite RK error estimate", step=steps, time=t)
            if err <= 1.0:
                t = target if h_step == target - t else t + h_step
                y = y_new
                k[0] = k[6]  # first-same-as-last
                fac = safety * max(err, 1e-10) ** -alpha * err_prev**beta
                err_prev = max(err, 1e-4)
                if h_step == h:
                    h = h * min(fac_max, max(fac_min, fac))
            else:
                h = h_step * max(fac_min, safety * err ** -(1 / 5))
            if not np.all(np.isfinite(y)):
                raise NumericalError("non-finite state during RK integration", step=steps, time=t)
        out[i] = y
    return out
