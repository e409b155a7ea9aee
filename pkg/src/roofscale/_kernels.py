"""Compiled inner loops for the convex-roof optimizer.

The optimizer spends nearly all of its time evaluating the decomposition
average for a parameter vector, so the registered monotones get a numba
kernel here. Monotones without a kernel use the numpy path in ``convexroof``.

Parameter layout for an m x r isometry: the first column is real (one entry
per row, this removes the row-phase redundancy), the remaining ``m*(r-1)``
entries are complex, stored as interleaved real/imaginary pairs.
"""

from __future__ import annotations

import numpy as np
from numba import njit

KIND_CONCURRENCE = 0
KIND_TAU3 = 1
KIND_SQRT_TAU3 = 2


def n_params(m: int, r: int) -> int:
    return m + 2 * m * (r - 1)


@njit(cache=True, nogil=True)
def _hyperdet(a):
    x0 = a[0] * a[7]
    x1 = a[1] * a[6]
    x2 = a[2] * a[5]
    x3 = a[3] * a[4]
    s = x0 + x1 + x2 + x3
    d3 = a[0] * a[6] * a[5] * a[3] + a[4] * a[2] * a[1] * a[7]
    return 2.0 * (x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3) - s * s + 4.0 * d3


@njit(cache=True, nogil=True)
def kernel_value(kind, psi, eps):
    if kind == KIND_CONCURRENCE:
        d = psi[0] * psi[3] - psi[1] * psi[2]
    else:
        d = _hyperdet(psi)
    a2 = d.real * d.real + d.imag * d.imag
    if kind == KIND_SQRT_TAU3:
        return 2.0 * ((a2 + eps * eps) ** 0.25 - np.sqrt(eps))
    coef = 4.0 if kind == KIND_TAU3 else 2.0
    return coef * (np.sqrt(a2 + eps * eps) - eps)


@njit(cache=True, nogil=True)
def isometry_from_params(x, m, r):
    """Map parameters to an isometry by modified Gram-Schmidt (QR, positive diagonal).

    Returns an all-zero matrix if the columns are numerically dependent.
    """
    u = np.empty((m, r), np.complex128)
    for i in range(m):
        u[i, 0] = x[i]
    k = m
    for j in range(1, r):
        for i in range(m):
            u[i, j] = x[k] + 1j * x[k + 1]
            k += 2
    for j in range(r):
        for l in range(j):
            c = 0j
            for i in range(m):
                c += u[i, l].conjugate() * u[i, j]
            for i in range(m):
                u[i, j] -= c * u[i, l]
        nrm = 0.0
        for i in range(m):
            nrm += u[i, j].real ** 2 + u[i, j].imag ** 2
        if nrm < 1e-200:
            return np.zeros((m, r), np.complex128)
        nrm = np.sqrt(nrm)
        for i in range(m):
            u[i, j] /= nrm
    return u


@njit(cache=True, nogil=True)
def roof_objective(x, basis, m, r, eps, kind):
    """Weighted average of the (smoothed) monotone over the steered decomposition.

    ``basis`` holds the rows ``sqrt(lam_j) v_j`` of the spectral ensemble.
    """
    dim = basis.shape[1]
    u = isometry_from_params(x, m, r)
    if u[0, 0] == 0 and np.all(u == 0):
        return np.inf
    psi = np.empty(dim, np.complex128)
    total = 0.0
    for i in range(m):
        p = 0.0
        for d in range(dim):
            s = 0j
            for j in range(r):
                s += u[i, j] * basis[j, d]
            psi[d] = s
            p += s.real * s.real + s.imag * s.imag
        if p >= 1e-14:
            inv = 1.0 / np.sqrt(p)
            for d in range(dim):
                psi[d] *= inv
            total += p * kernel_value(kind, psi, eps)
    return total


@njit(cache=True, nogil=True)
def nelder_mead(x0, basis, m, r, eps, kind, step, xatol, fatol, maxfev):
    """Adaptive Nelder-Mead (dimension-dependent coefficients) on ``roof_objective``.

    Returns ``(x_best, f_best, n_evaluations)``.
    """
    n = x0.shape[0]
    alpha = 1.0
    gamma = 1.0 + 2.0 / n
    rho = 0.75 - 1.0 / (2.0 * n)
    sigma = 1.0 - 1.0 / n
    sim = np.empty((n + 1, n))
    fs = np.empty(n + 1)
    sim[0] = x0
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += step
    for i in range(n + 1):
        fs[i] = roof_objective(sim[i], basis, m, r, eps, kind)
    nfev = n + 1
    xbar = np.empty(n)
    while nfev < maxfev:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]
        dx = 0.0
        df = 0.0
        for i in range(1, n + 1):
            v = abs(fs[i] - fs[0])
            if v > df:
                df = v
            for j in range(n):
                v = abs(sim[i, j] - sim[0, j])
                if v > dx:
                    dx = v
        if dx <= xatol and df <= fatol:
            break
        xbar[:] = 0.0
        for i in range(n):
            xbar += sim[i]
        xbar /= n
        xr = xbar + alpha * (xbar - sim[n])
        fr = roof_objective(xr, basis, m, r, eps, kind)
        nfev += 1
        if fr < fs[0]:
            xe = xbar + gamma * (xr - xbar)
            fe = roof_objective(xe, basis, m, r, eps, kind)
            nfev += 1
            if fe < fr:
                sim[n] = xe
                fs[n] = fe
            else:
                sim[n] = xr
                fs[n] = fr
        elif fr < fs[n - 1]:
            sim[n] = xr
            fs[n] = fr
        else:
            shrink = False
            if fr < fs[n]:
                xc = xbar + rho * (xr - xbar)
                fc = roof_objective(xc, basis, m, r, eps, kind)
                nfev += 1
                if fc <= fr:
                    sim[n] = xc
                    fs[n] = fc
                else:
                    shrink = True
            else:
                xc = xbar - rho * (xbar - sim[n])
                fc = roof_objective(xc, basis, m, r, eps, kind)
                nfev += 1
                if fc < fs[n]:
                    sim[n] = xc
                    fs[n] = fc
                else:
                    shrink = True
            if shrink:
                for i in range(1, n + 1):
                    sim[i] = sim[0] + sigma * (sim[i] - sim[0])
                    fs[i] = roof_objective(sim[i], basis, m, r, eps, kind)
                    nfev += 1
    best = np.argmin(fs)
    return sim[best].copy(), fs[best], nfev
