"""Inner iteration of the projected forward-backward sweep.

Two equivalent implementations of the same update: a plain numpy loop and a
numba-compiled kernel used when numba imports cleanly.  Both follow the
identical schedule: evaluate w_L, costate, and stationarity residual for the
current control, test convergence, monitor cost for divergence, then apply
the projected step.  Status codes: 0 converged, 1 iteration budget
exhausted, 2 diverged (cost rose for DIVERGENCE_PATIENCE consecutive
iterations without backtracking).
"""

import numpy as np

DIVERGENCE_PATIENCE = 50

STATUS_CONVERGED = 0
STATUS_MAX_ITERS = 1
STATUS_DIVERGED = 2


def _sweep_numpy(Bmat, A, cw, we, chi, u, eta, tol, max_iters, backtrack):
    prev_cost = np.inf
    increases = 0
    status = STATUS_MAX_ITERS
    iterations = 0
    residual = np.inf
    w_L = np.zeros(3)
    p = np.zeros(3)
    for iterations in range(max_iters + 1):
        w_L = A @ u
        p = -chi * (w_L + we)
        g = Bmat.T @ p
        residual = float(np.max(np.abs(u - np.maximum(g, 0.0))))
        if residual <= tol:
            status = STATUS_CONVERGED
            break
        miss = w_L + we
        current = 0.5 * float(cw @ (u * u)) + 0.5 * chi * float(miss @ miss)
        if current > prev_cost:
            increases += 1
            if increases >= DIVERGENCE_PATIENCE:
                if backtrack:
                    eta *= 0.5
                    increases = 0
                else:
                    status = STATUS_DIVERGED
                    break
        else:
            increases = 0
        prev_cost = current
        if iterations == max_iters:
            break
        u = np.maximum(u + eta * (g - u), 0.0)
    return u, w_L, p, residual, iterations, status, eta


def _sweep_loops(Bmat, A, cw, we, chi, u, eta, tol, max_iters, backtrack):
    n = u.shape[0]
    w_L = np.zeros(3)
    p = np.zeros(3)
    g = np.zeros(n)
    prev_cost = np.inf
    increases = 0
    status = STATUS_MAX_ITERS
    iterations = 0
    residual = np.inf
    for iterations in range(max_iters + 1):
        for a in range(3):
            acc = 0.0
            for j in range(n):
                acc += A[a, j] * u[j]
            w_L[a] = acc
            p[a] = -chi * (w_L[a] + we[a])
        residual = 0.0
        for j in range(n):
            gj = Bmat[0, j] * p[0] + Bmat[1, j] * p[1] + Bmat[2, j] * p[2]
            g[j] = gj
            r = u[j] - (gj if gj > 0.0 else 0.0)
            if r < 0.0:
                r = -r
            if r > residual:
                residual = r
        if residual <= tol:
            status = STATUS_CONVERGED
            break
        effort = 0.0
        for j in range(n):
            effort += cw[j] * u[j] * u[j]
        miss_sq = 0.0
        for a in range(3):
            miss = w_L[a] + we[a]
            miss_sq += miss * miss
        current = 0.5 * effort + 0.5 * chi * miss_sq
        if current > prev_cost:
            increases += 1
            if increases >= DIVERGENCE_PATIENCE:
                if backtrack:
                    eta *= 0.5
                    increases = 0
                else:
                    status = STATUS_DIVERGED
                    break
        else:
            increases = 0
        prev_cost = current
        if iterations == max_iters:
            break
        for j in range(n):
            uj = u[j] + eta * (g[j] - u[j])
            u[j] = uj if uj > 0.0 else 0.0
    return u, w_L, p, residual, iterations, status, eta


try:
    from numba import njit

    _sweep_fast = njit(cache=True)(_sweep_loops)
except ImportError:      # pragma: no cover - exercised only without numba
    _sweep_fast = None


def run_sweep(Bmat, A, cw, we, chi, u, eta, tol, max_iters, backtrack):
    if _sweep_fast is not None:
        return _sweep_fast(Bmat, A, cw, we, chi, u, eta, tol, max_iters, backtrack)
    return _sweep_numpy(Bmat, A, cw, we, chi, u, eta, tol, max_iters, backtrack)
