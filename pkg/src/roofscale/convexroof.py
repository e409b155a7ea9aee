"""Convex-roof extension by multi-start search over decompositions, plus the rescaling results built on it.

Every decomposition of a rank-``r`` density matrix into ``m`` members comes from
an ``m x r`` isometry acting on the spectral ensemble (see ``qstate.steer``).
The optimizer searches that isometry space with Nelder-Mead. Monotones of the
form ``c |P|^k`` are not smooth where ``P`` vanishes, so each restart first
minimizes a smoothed surrogate and walks the smoothing parameter down to zero.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize

from . import _kernels
from .errors import DimensionError, InvariantViolation, NotApplicableError, RoofscaleError
from .invariants import Monotone
from .localops import LocalOperator, inverse, transport_decomposition
from .qstate import (
    RANK_TOL,
    Decomposition,
    Isometry,
    MixedState,
    PureState,
    _decomposition_from_members,
)

__all__ = [
    "RoofOptions",
    "RoofResult",
    "ZeroClass",
    "convex_roof",
    "decomposition_value",
    "spectral_value",
    "rescaled_roof",
    "transport_optimal",
    "zero_class",
    "zero_polytope_certificate",
    "naive_rescale",
    "symmetric_rescale",
    "check_equal_trace",
    "pullback_bound",
]

ZERO_TOL = 1e-7
NONZERO_TOL = 1e-5
CONVERGED_TOL = 1e-6
EQUAL_TRACE_TOL = 1e-8


@dataclass(frozen=True)
class RoofOptions:
    restarts: int = 32
    max_length: int | None = None  # None means r**2
    tolerance: float = 1e-8
    seed: int = 0
    # cap on evaluations in the final (unsmoothed) stage of a restart
    max_evals: int = 20000
    threads: int | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise InvariantViolation("restarts must be at least 1")
        if self.max_length is not None and self.max_length < 1:
            raise InvariantViolation("max_length must be positive")


@dataclass(frozen=True, eq=False)
class RoofResult:
    """Best decomposition found. ``value`` is an upper bound on the true roof."""

    value: float
    decomposition: Decomposition
    restarts_used: int
    converged: bool


class ZeroClass(str, enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNDECIDED = "undecided"


def decomposition_value(m: Monotone, dec: Decomposition) -> float:
    """Weighted average ``sum_i p_i m(pi_i)``."""
    if m.dims is not None and dec.dims != m.dims:
        raise DimensionError(f"{m.name} needs dims {m.dims}, got {dec.dims}")
    vals = m.evaluator(dec.vectors)
    return float(np.dot(dec.weights, vals))


def spectral_value(m: Monotone, rho: MixedState) -> float:
    w, v = _spectral_pairs(rho)
    return float(np.dot(w, m.evaluator(v.T)))


def _spectral_pairs(rho: MixedState):
    w, v = rho.spectrum
    keep = w > RANK_TOL
    return w[keep], v[:, keep]


def _thread_cap(opts: RoofOptions) -> int:
    if opts.threads is not None:
        return max(1, opts.threads)
    env = os.environ.get("ROOFSCALE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise RoofscaleError(f"ROOFSCALE_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _identity_params(m: int, r: int) -> np.ndarray:
    x = np.zeros(_kernels.n_params(m, r))
    x[0] = 1.0
    for j in range(1, r):
        x[m + 2 * (m * (j - 1) + j)] = 1.0
    return x


def _stage_plan(schedule, tol, max_evals):
    """(eps, step, xatol, fatol, maxfev, repeats) per continuation stage."""
    plan = []
    for k, eps in enumerate(schedule):
        step = 0.3 if k == 0 else max(1e-3, 10.0 * eps)
        if eps > 0:
            plan.append((eps, step, 1e-7, max(tol, 1e-3 * eps), 8000, 2))
        else:
            plan.append((0.0, step, 1e-10, tol * 1e-2, max_evals, 3))
    return plan


def _restart_kernel(kind, basis, m, r, x0, plan):
    x = x0
    for eps, step, xatol, fatol, maxfev, repeats in plan:
        prev = np.inf
        for _ in range(repeats):
            x, fv, _n = _kernels.nelder_mead(x, basis, m, r, eps, kind, step, xatol, fatol, maxfev)
            if prev - fv <= fatol:
                break
            prev = fv
            step = max(step * 0.3, 1e-4)
    return x


def _numpy_objective(mono: Monotone, basis, m, r, eps):
    def f(x):
        u = _kernels.isometry_from_params(x, m, r)
        if not np.any(u):
            return np.inf
        members = u @ basis
        p = np.einsum("ij,ij->i", members, members.conj()).real
        keep = p >= 1e-14
        vals = mono.smoothed(members[keep] / np.sqrt(p[keep])[:, None], eps)
        return float(np.dot(p[keep], vals))

    return f


def _restart_numpy(mono, basis, m, r, x0, plan):
    x = x0
    for eps, step, xatol, fatol, maxfev, _repeats in plan:
        n = x.size
        simplex = np.vstack([x, x + step * np.eye(n)])
        res = minimize(
            _numpy_objective(mono, basis, m, r, eps), x, method="Nelder-Mead",
            options=dict(initial_simplex=simplex, xatol=xatol, fatol=fatol,
                         maxfev=maxfev, adaptive=True),
        )
        x = res.x
    return x


def _sphere_grid(n: int) -> np.ndarray:
    """Fibonacci lattice on the unit sphere, poles included."""
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = np.pi * (1 + np.sqrt(5)) * k
    rho = np.sqrt(1 - z * z)
    pts = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    return np.vstack([pts, [[0, 0, 1], [0, 0, -1]]])


def _bloch_to_coef(n: np.ndarray) -> np.ndarray:
    theta = np.arccos(np.clip(n[:, 2], -1, 1))
    phase = np.exp(1j * np.arctan2(n[:, 1], n[:, 0]))
    return np.column_stack([np.cos(theta / 2), phase * np.sin(theta / 2)])


def _coef_to_bloch(c: np.ndarray) -> np.ndarray:
    off = c[:, 0].conj() * c[:, 1]
    return np.column_stack([2 * off.real, 2 * off.imag, np.abs(c[:, 0]) ** 2 - np.abs(c[:, 1]) ** 2])


def _local_patch(n0: np.ndarray, radius: float, k: int = 5) -> np.ndarray:
    t1 = np.cross(n0, [1.0, 0, 0] if abs(n0[0]) < 0.9 else [0, 1.0, 0])
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(n0, t1)
    a, b = np.meshgrid(np.linspace(-1, 1, k), np.linspace(-1, 1, k))
    pts = n0 + radius * (a.reshape(-1, 1) * t1 + b.reshape(-1, 1) * t2)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _hull_start(mono: Monotone, w, v, m, n_grid=3000, rounds=14) -> np.ndarray | None:
    """Starting parameters for rank two from a linear program over sphere points.

    Range states of a rank-2 state are points on a Bloch sphere in its
    eigenbasis, and decompositions are probability measures with barycentre
    ``(0, 0, lam1 - lam2)``. The roof is the lower convex envelope of the
    monotone on that sphere. A global grid LP is refined by adding shrinking
    patches around the support, which converges without derivatives even at
    the cusps of ``|P|^k``.
    """
    coef = _bloch_to_coef(_sphere_grid(n_grid))
    # exact zeros are cusps, which a grid only approaches like sqrt(spacing)
    if mono.polynomial is not None and mono.poly_degree is not None:
        zeros = _range_zero_states(mono, v[:, 0], v[:, 1])
        if zeros:
            coef = np.vstack([coef, np.array(zeros, complex)])
    b_eq = np.array([0.0, 0.0, (w[0] - w[1]) / (w[0] + w[1]), 1.0])
    radius = 2.0 / np.sqrt(n_grid)
    fixed = coef[n_grid + 2:]  # zeros stay in every round
    weights = None
    for _ in range(rounds + 1):
        n = _coef_to_bloch(coef)
        f = mono.evaluator(coef @ v.T)
        lp = linprog(f, A_eq=np.vstack([n.T, np.ones(len(n))]), b_eq=b_eq, bounds=(0, None), method="highs")
        if lp.status != 0:
            break
        support = np.flatnonzero(lp.x > 1e-13)
        weights, chosen = lp.x[support], coef[support]
        patches = [_local_patch(n[j], radius) for j in support]
        coef = np.vstack([chosen, fixed, _bloch_to_coef(np.vstack(patches))])
        radius *= 0.35
    if weights is None:
        return None
    if weights.size > m:
        keep = np.argsort(weights)[::-1][:m]
        weights, chosen = weights[keep], chosen[keep]
    # U_jk = sqrt(p_j) <v_k|psi_j> / sqrt(lam_k), rows rephased so column 0 is real
    u = np.zeros((m, 2), complex)
    u[: weights.size] = np.sqrt(weights)[:, None] * chosen * np.sqrt((w[0] + w[1]) / w)[None, :]
    u *= np.exp(-1j * np.angle(u[:, :1]))
    # already an isometry up to LP tolerance; the kernel's Gram-Schmidt cleans the rest
    x = np.empty(_kernels.n_params(m, 2))
    x[:m] = u[:, 0].real
    x[m::2] = u[:, 1].real
    x[m + 1::2] = u[:, 1].imag
    return x


def _members(x, basis, m, r) -> np.ndarray:
    u = _kernels.isometry_from_params(x, m, r)
    return Isometry(u).entries @ basis


def convex_roof(mono: Monotone, rho: MixedState, opts: RoofOptions | None = None) -> RoofResult:
    """Multi-start minimization of the decomposition average of ``mono`` over decompositions of ``rho``.

    Restart 0 starts at the spectral decomposition; the others start from
    random isometries drawn from independent child seeds, so results do not
    depend on the number of worker threads.
    """
    opts = opts or RoofOptions()
    if mono.dims is not None and rho.dims != mono.dims:
        raise DimensionError(f"{mono.name} needs dims {mono.dims}, got {rho.dims}")
    w, v = _spectral_pairs(rho)
    r = w.size
    spectral = _decomposition_from_members(rho.dims, (np.sqrt(w)[:, None] * v.T))
    spec_val = decomposition_value(mono, spectral)
    if r == 1:
        return RoofResult(spec_val, spectral, 0, True)
    m = r * r if opts.max_length is None else opts.max_length
    if m < r:
        raise InvariantViolation(f"max_length {m} is below the rank {r}")
    basis = np.ascontiguousarray(np.sqrt(w)[:, None] * v.T, dtype=np.complex128)
    plan = _stage_plan(mono.schedule, opts.tolerance, opts.max_evals)
    seeds = np.random.SeedSequence(opts.seed).spawn(opts.restarts)
    npar = _kernels.n_params(m, r)

    def start(i):
        if i == 0:
            return _identity_params(m, r)
        return np.random.default_rng(seeds[i]).normal(size=npar)

    if mono.kernel_id is not None:
        kind = mono.kernel_id

        def polish(x0, stages):
            return _restart_kernel(kind, basis, m, r, x0, stages)
    else:
        def polish(x0, stages):
            return _restart_numpy(mono, basis, m, r, x0, stages)

    def run(i):
        return polish(start(i), plan)

    threads = min(_thread_cap(opts), opts.restarts)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            xs = list(ex.map(run, range(opts.restarts)))
    else:
        xs = [run(i) for i in range(opts.restarts)]
    if r == 2:
        x_hull = _hull_start(mono, w, v, m)
        if x_hull is not None:
            # smoothing would lift the zero-valued members off their cusps, so polish unsmoothed only
            fine = [(0.0, 1e-3, *rest) for eps, _step, *rest in plan if eps == 0.0]
            xs[:0] = [x_hull, polish(x_hull, fine)]

    best_val, best_dec, history = spec_val, spectral, []
    for x in xs:
        try:
            dec = _decomposition_from_members(rho.dims, _members(x, basis, m, r))
        except (InvariantViolation, RoofscaleError):
            history.append(best_val)
            continue
        val = decomposition_value(mono, dec)
        if val < best_val:
            best_val, best_dec = val, dec
        history.append(best_val)
    tail = max(1, len(history) // 4)
    ref = history[-tail - 1] if len(history) > tail else spec_val
    converged = abs(ref - best_val) <= CONVERGED_TOL
    return RoofResult(best_val, best_dec, opts.restarts, converged)


def rescaled_roof(mono: Monotone, roof_of_rho: float, T: float) -> float:
    """Roof of ``A rho A^dagger / T`` from the roof of ``rho``; valid only for degree 2."""
    if mono.degree != 2:
        raise NotApplicableError(
            f"exact rescaling of the roof holds only for degree 2, {mono.name} has degree {mono.degree}"
        )
    if not T > 0:
        raise InvariantViolation("trace factor must be positive")
    return roof_of_rho / T


def transport_optimal(mono: Monotone, A: LocalOperator, result: RoofResult) -> RoofResult:
    """Carry a (near-)optimal decomposition of ``rho`` over to ``A rho A^dagger / T``."""
    if mono.degree != 2:
        raise NotApplicableError("optimal decompositions are transported exactly only for degree 2")
    dec = transport_decomposition(A, result.decomposition)
    return RoofResult(decomposition_value(mono, dec), dec, result.restarts_used, result.converged)


def _range_zero_states(mono: Monotone, v1: np.ndarray, v2: np.ndarray):
    """Unit vectors ``(alpha, beta)`` with ``P(alpha v1 + beta v2) = 0``; None if P vanishes on the span."""
    d = mono.poly_degree
    n = 2 * d + 2
    z = np.exp(2j * np.pi * np.arange(n) / n)
    vals = mono.polynomial(v1[None, :] + z[:, None] * v2[None, :])
    c = np.fft.fft(vals) / n
    coeffs = c[: d + 1]
    scale = np.max(np.abs(coeffs))
    if scale <= 1e-13:
        return None
    thr = 1e-12 * scale
    out = []
    top = d
    while abs(coeffs[top]) <= thr:
        out.append(np.array([0.0, 1.0]))  # zero at beta-only, i.e. v2
        top -= 1
    if top > 0:
        for root in np.roots(coeffs[: top + 1][::-1]):
            vec = np.array([1.0, root])
            out.append(vec / np.linalg.norm(vec))
    return out


def zero_polytope_certificate(mono: Monotone, rho: MixedState) -> ZeroClass:
    """Exact zero test for rank <= 2 when the monotone is ``c |P|^k`` for a polynomial P.

    A rank-2 state has vanishing roof iff its Bloch vector (in the eigenbasis of
    its range) lies in the convex hull of the finitely many zeros of P in that
    range. The hull test is a small LP minimizing the L1 misfit.
    """
    if mono.polynomial is None:
        return ZeroClass.UNDECIDED
    w, v = _spectral_pairs(rho)
    if w.size == 1:
        val = float(mono.evaluator(v[:, 0]))
        return ZeroClass.ZERO if val <= ZERO_TOL else (ZeroClass.NONZERO if val > NONZERO_TOL else ZeroClass.UNDECIDED)
    if w.size != 2:
        return ZeroClass.UNDECIDED
    zeros = _range_zero_states(mono, v[:, 0], v[:, 1])
    if zeros is None:
        return ZeroClass.ZERO
    pts = []
    for al, be in zeros:
        cross = np.conj(al) * be
        pts.append([2 * cross.real, 2 * cross.imag, abs(al) ** 2 - abs(be) ** 2])
    pts = np.array(pts).T  # 3 x k
    target = np.array([0.0, 0.0, (w[0] - w[1]) / w.sum()])
    k = pts.shape[1]
    # variables: weights (k), slack plus/minus (3 + 3)
    cost = np.concatenate([np.zeros(k), np.ones(6)])
    A_eq = np.zeros((4, k + 6))
    A_eq[:3, :k] = pts
    A_eq[:3, k:k + 3] = np.eye(3)
    A_eq[:3, k + 3:] = -np.eye(3)
    A_eq[3, :k] = 1.0
    b_eq = np.concatenate([target, [1.0]])
    res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (k + 6), method="highs")
    if res.status != 0:
        return ZeroClass.UNDECIDED
    if res.fun <= 1e-9:
        return ZeroClass.ZERO
    if res.fun > 1e-6:
        return ZeroClass.NONZERO
    return ZeroClass.UNDECIDED


def zero_class(mono: Monotone, rho: MixedState, opts: RoofOptions | None = None) -> ZeroClass:
    """Classify the roof of ``rho`` as zero, nonzero or undecided.

    "zero" when the optimizer reaches ``<= 1e-7`` or the rank-2 certificate finds
    an exact zero decomposition; "nonzero" only when the certificate excludes one.
    """
    res = convex_roof(mono, rho, opts)
    if res.value <= ZERO_TOL:
        return ZeroClass.ZERO
    return zero_polytope_certificate(mono, rho)


def naive_rescale(value: float, T: float, eta: float) -> float:
    """``value / T**(eta/2)``. Exact only for ``eta == 2``; kept to show the failure otherwise."""
    if not T > 0:
        raise InvariantViolation("trace factor must be positive")
    return value / T ** (eta / 2.0)


def symmetric_rescale(mono: Monotone, value: float, T: float, condition_ok: bool) -> float:
    """Rescale by ``T**(eta/2)``, valid when every optimal member has ``tr(A pi A^dagger) = T``."""
    if not condition_ok:
        raise NotApplicableError("members of the optimal decomposition do not share the trace factor")
    return naive_rescale(value, T, mono.degree)


def check_equal_trace(A: LocalOperator, dec: Decomposition, tol: float = EQUAL_TRACE_TOL) -> tuple[bool, float]:
    """Whether all members satisfy ``tr(A pi_i A^dagger) = T``; returns (flag, max deviation)."""
    t = np.linalg.norm(dec.vectors @ A.matrix.T, axis=1) ** 2
    T = float(np.dot(dec.weights, t))
    dev = float(np.max(np.abs(t - T)))
    return dev <= tol, dev


def pullback_bound(mono: Monotone, A: LocalOperator, dec_prime: Decomposition, T: float) -> float:
    """Upper bound on the roof of ``rho`` from any decomposition of ``rho' = A rho A^dagger / T``.

    ``T * sum_j q_j [tr A^-1 w_j A^-dagger]^((2 - eta)/2) m(w_j)``.
    """
    Ainv = inverse(A)
    t = np.linalg.norm(dec_prime.vectors @ Ainv.matrix.T, axis=1) ** 2
    vals = mono.evaluator(dec_prime.vectors)
    return float(T * np.dot(dec_prime.weights, t ** ((2.0 - mono.degree) / 2.0) * vals))
