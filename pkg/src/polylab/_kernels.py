"""Compiled inner loops.  Everything here works on plain float64 arrays."""

import math

import numpy as np
from numba import njit

NEG_INF = -np.inf


@njit(cache=True, nogil=True)
def logaddexp(a, b):
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@njit(cache=True, nogil=True)
def scan_max(eta, incoming, out, origin):
    """out[t] = eta[t] + max(out[t-1], incoming[t]); out[0] pinned to 0 at the origin."""
    n = out.shape[0]
    if origin:
        out[0] = 0.0
    else:
        out[0] = eta[0] + incoming[0]
    for t in range(1, n):
        prev = out[t - 1]
        inc = incoming[t]
        out[t] = eta[t] + (prev if prev > inc else inc)


@njit(cache=True, nogil=True)
def scan_logsumexp(beta_eta, incoming, out, origin):
    """Log-domain analogue of :func:`scan_max`."""
    n = out.shape[0]
    if origin:
        out[0] = 0.0
    else:
        out[0] = beta_eta[0] + incoming[0]
    for t in range(1, n):
        out[t] = beta_eta[t] + logaddexp(out[t - 1], incoming[t])


@njit(cache=True, nogil=True)
def brownian_last_passage(paths):
    """Grid last passage: D(t,i) = B_i(t) + max_{s<=t} (D(s,i-1) - B_i(s))."""
    m, k1 = paths.shape
    d = paths[0].copy()
    for i in range(1, m):
        run = NEG_INF
        for k in range(k1):
            v = d[k] - paths[i, k]
            if v > run:
                run = v
            d[k] = paths[i, k] + run
    return d[k1 - 1]


@njit(cache=True, nogil=True)
def brownian_log_partition(paths, beta, log_step):
    """Left-endpoint quadrature of the nested time integrals, in log domain.

    log zeta_i[k] = beta B_i(t_k) + log sum_{j<k} zeta_{i-1}[j] exp(-beta B_i(t_j)) dt
    """
    m, k1 = paths.shape
    z = beta * paths[0]
    nz = np.empty(k1)
    for i in range(1, m):
        acc = NEG_INF
        for k in range(k1):
            b = beta * paths[i, k]
            nz[k] = acc + b
            acc = logaddexp(acc, z[k] - b + log_step)
        z, nz = nz, z
    return z[k1 - 1]


@njit(cache=True, nogil=True)
def sturm_count(diag, off2, x):
    """Number of eigenvalues < x of the symmetric tridiagonal (diag, off-diagonal squared)."""
    n = diag.shape[0]
    count = 0
    q = diag[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = 1e-300
        q = diag[i] - x - off2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def tridiag_top_eigenvalue(diag, off2, tol):
    n = diag.shape[0]
    lo = np.inf
    hi = -np.inf
    # Gershgorin bounds
    for i in range(n):
        r = 0.0
        if i > 0:
            r += math.sqrt(off2[i - 1])
        if i < n - 1:
            r += math.sqrt(off2[i])
        lo = min(lo, diag[i] - r)
        hi = max(hi, diag[i] + r)
    lo -= 1e-12
    hi += 1e-12
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if sturm_count(diag, off2, mid) >= n:
            hi = mid
        else:
            lo = mid
        it += 1
        if it > 400:
            return np.nan
    return 0.5 * (lo + hi)
