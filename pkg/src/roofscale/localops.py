"""Invertible local operations and how they move states, decompositions and monotone values."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DegenerateStateError, DimensionError, InvariantViolation
from .qstate import Decomposition, MixedState, PureState, _decomposition_from_members

SINGULAR_TOL = 1e-12
DET_TOL = 1e-10

__all__ = [
    "LocalOperator",
    "RescaleResult",
    "sl_normalize",
    "apply_pure",
    "apply_mixed",
    "transport_decomposition",
    "inverse",
    "diagonal_ilo_for_family",
    "random_local_operator",
    "random_diagonal_ilo",
]


def _principal_root(z: complex, n: int) -> complex:
    return complex(np.abs(z) ** (1.0 / n) * np.exp(1j * np.angle(z) / n))


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """Tensor product of invertible single-site matrices.

    ``normalized_factors`` divide each factor by the principal ``d``-th root of its
    determinant, so every normalized factor has determinant one.
    """

    factors: tuple[np.ndarray, ...]
    normalized_factors: tuple[np.ndarray, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)

    @property
    def matrix(self) -> np.ndarray:
        """Determinant-one operator on the composite space (kron of normalized factors)."""
        return reduce(np.kron, self.normalized_factors)

    @property
    def raw_matrix(self) -> np.ndarray:
        return reduce(np.kron, self.factors)


@dataclass(frozen=True, eq=False)
class RescaleResult:
    state: MixedState | PureState
    factor: float

    def __post_init__(self):
        if not self.factor > 0:
            raise InvariantViolation(f"rescale factor must be positive, got {self.factor!r}")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def sl_normalize(factors: Sequence[np.ndarray]) -> LocalOperator:
    fs, ns = [], []
    for k, f in enumerate(factors):
        f = np.asarray(f, dtype=np.complex128)
        if f.ndim != 2 or f.shape[0] != f.shape[1]:
            raise DimensionError(f"factor {k} is not square: shape {f.shape}")
        if not np.all(np.isfinite(f)):
            raise InvariantViolation(f"factor {k} has non-finite entries")
        det = np.linalg.det(f)
        if abs(det) <= SINGULAR_TOL:
            raise DegenerateStateError(f"factor {k} is singular (|det| = {abs(det):.3g})")
        a = f / _principal_root(det, f.shape[0])
        if abs(np.linalg.det(a) - 1.0) > DET_TOL:
            raise InvariantViolation(f"factor {k} could not be normalized to unit determinant")
        fs.append(_frozen(f))
        ns.append(_frozen(a))
    if not fs:
        raise InvariantViolation("a local operator needs at least one factor")
    return LocalOperator(tuple(fs), tuple(ns))


def _check(A: LocalOperator, dims) -> None:
    if A.dims != tuple(dims):
        raise DimensionError(f"operator acts on dims {A.dims}, state has dims {tuple(dims)}")


def apply_pure(A: LocalOperator, phi: PureState) -> RescaleResult:
    """Return ``A phi / ||A phi||`` together with ``||A phi||``."""
    _check(A, phi.dims)
    if not phi.normalized:
        raise InvariantViolation("apply_pure expects a normalized state")
    v = A.matrix @ phi.amplitudes
    n = float(np.linalg.norm(v))
    return RescaleResult(PureState(phi.dims, v / n), n)


def apply_mixed(A: LocalOperator, rho: MixedState) -> RescaleResult:
    """Return ``A rho A^dagger / T`` together with ``T = tr A rho A^dagger``."""
    _check(A, rho.dims)
    M = A.matrix
    out = M @ rho.matrix @ M.conj().T
    T = float(np.trace(out).real)
    out = out / T
    return RescaleResult(MixedState(rho.dims, 0.5 * (out + out.conj().T)), T)


def transport_decomposition(A: LocalOperator, dec: Decomposition) -> Decomposition:
    """Push a decomposition of ``rho`` forward to one of ``A rho A^dagger / T``.

    Weights become ``p_i tr(A pi_i A^dagger) / T``.
    """
    _check(A, dec.dims)
    members = (np.sqrt(dec.weights)[:, None] * dec.vectors) @ A.matrix.T
    return _decomposition_from_members(dec.dims, members)


def inverse(A: LocalOperator) -> LocalOperator:
    return sl_normalize([np.linalg.inv(f) for f in A.factors])


def diagonal_ilo_for_family(a, b, c, d, f) -> LocalOperator:
    """Diagonal determinant-one ILO that maps gGHZ(a, b) onto a multiple of GHZ and gW(c, d, f) onto a multiple of W.

    ``alpha`` is the principal sixth root of ``b c^2 / (a d f)``; ``beta`` and
    ``gamma`` are then fixed through ``beta^2 = alpha^2 d / c`` and
    ``gamma^2 = alpha^2 f / c``, which keeps the three roots on matching branches
    for complex coefficients.
    """
    coeffs = np.array([a, b, c, d, f], dtype=np.complex128)
    if np.any(np.abs(coeffs) <= SINGULAR_TOL):
        raise DegenerateStateError("all family coefficients must be nonzero")
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-10 or abs(abs(c) ** 2 + abs(d) ** 2 + abs(f) ** 2 - 1) > 1e-10:
        raise InvariantViolation("family coefficients must be normalized")
    a, b, c, d, f = coeffs
    x = _principal_root(b * c * c / (a * d * f), 3)
    alpha = np.sqrt(x)
    beta = np.sqrt(x * d / c)
    gamma = np.sqrt(x * f / c)
    return sl_normalize([np.diag([z, 1.0 / z]) for z in (alpha, beta, gamma)])


def random_local_operator(dims: Sequence[int], rng: np.random.Generator) -> LocalOperator:
    """Ginibre factors, redrawn until comfortably invertible."""
    fs = []
    for n in dims:
        while True:
            f = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            if abs(np.linalg.det(f)) > 1e-3:
                break
        fs.append(f)
    return sl_normalize(fs)


def random_diagonal_ilo(n_sites: int, rng: np.random.Generator, spread: float = 0.5) -> LocalOperator:
    """Diagonal qubit ILO with log-normal moduli and uniform phases."""
    z = np.exp(spread * rng.normal(size=n_sites) + 1j * rng.uniform(0, 2 * np.pi, size=n_sites))
    return sl_normalize([np.diag([v, 1.0 / v]) for v in z])
