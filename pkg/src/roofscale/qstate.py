"""State representations: pure states, density matrices and their decompositions.

Amplitudes use big-endian ordering: site 1 is the most significant digit, so
for three qubits the basis ket ``|ijk>`` sits at index ``4*i + 2*j + k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegenerateStateError, DimensionError, InvariantViolation

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
RANK_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-10
MIN_WEIGHT = 1e-14


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise InvariantViolation(f"local dimensions must be positive integers, got {dims}")
    return dims


@dataclass(frozen=True, eq=False)
class PureState:
    """A (not necessarily normalized) vector in a tensor product of local spaces."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise InvariantViolation(
                f"{amps.size} amplitudes do not fit local dimensions {dims}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvariantViolation("amplitudes must be finite")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def normalized(self) -> bool:
        return abs(self.norm - 1.0) <= NORM_TOL

    def projector(self) -> np.ndarray:
        v = self.amplitudes
        return np.outer(v, v.conj())

    def scaled(self, alpha: complex) -> "PureState":
        return PureState(self.dims, alpha * self.amplitudes)

    def __repr__(self) -> str:
        return f"PureState(dims={self.dims}, amplitudes={np.round(self.amplitudes, 6)!r})"


@dataclass(frozen=True, eq=False)
class MixedState:
    """Unit-trace Hermitian positive-semidefinite matrix."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        rho = np.asarray(self.matrix, dtype=np.complex128)
        n = int(np.prod(dims))
        if rho.shape != (n, n):
            raise InvariantViolation(f"matrix of shape {rho.shape} does not fit dims {dims}")
        if not np.all(np.isfinite(rho)):
            raise InvariantViolation("matrix entries must be finite")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvariantViolation("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
            raise InvariantViolation(f"density matrix has trace {np.trace(rho).real!r}")
        rho = 0.5 * (rho + rho.conj().T)
        if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
            raise InvariantViolation("density matrix has a negative eigenvalue")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", _frozen(rho))

    @classmethod
    def from_pure(cls, psi: PureState) -> "MixedState":
        v = normalize(psi).amplitudes
        return cls(psi.dims, np.outer(v, v.conj()))

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues in descending order with matching eigenvector columns."""
        w, v = np.linalg.eigh(self.matrix)
        return w[::-1].copy(), v[:, ::-1].copy()

    @property
    def rank(self) -> int:
        return int(np.sum(self.spectrum[0] > RANK_TOL))


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Convex weights together with normalized pure states."""

    weights: np.ndarray
    states: tuple[PureState, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        states = tuple(self.states)
        if w.size != len(states) or not states:
            raise InvariantViolation("weights and states must be non-empty and of equal length")
        if np.any(w < -1e-12):
            raise InvariantViolation("decomposition weights must be nonnegative")
        w = np.where(w < 0, 0.0, w)
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InvariantViolation(f"decomposition weights sum to {w.sum()!r}")
        dims = states[0].dims
        for s in states:
            if s.dims != dims:
                raise DimensionError("decomposition members have differing dimensions")
            if not s.normalized:
                raise InvariantViolation("decomposition members must be normalized")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.states[0].dims

    @property
    def vectors(self) -> np.ndarray:
        """Member amplitudes stacked as rows, shape ``(len(self), prod(dims))``."""
        return np.stack([s.amplitudes for s in self.states])

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True, eq=False)
class Isometry:
    """Complex m x r matrix with orthonormal columns."""

    entries: np.ndarray = field()

    def __post_init__(self):
        u = np.asarray(self.entries, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] < u.shape[1]:
            raise InvariantViolation(f"isometry must be m x r with m >= r, got {u.shape}")
        gram = u.conj().T @ u
        if np.max(np.abs(gram - np.eye(u.shape[1]))) > 1e-10:
            raise InvariantViolation("isometry columns are not orthonormal")
        object.__setattr__(self, "entries", _frozen(u))

    @classmethod
    def from_matrix(cls, z: np.ndarray) -> "Isometry":
        """Orthonormalize the columns of ``z`` (QR with positive diagonal)."""
        q, r = np.linalg.qr(np.asarray(z, dtype=np.complex128))
        phases = np.diag(r) / np.where(np.abs(np.diag(r)) > 0, np.abs(np.diag(r)), 1.0)
        return cls(q * phases)

    @classmethod
    def identity(cls, r: int, m: int | None = None) -> "Isometry":
        m = r if m is None else m
        return cls(np.eye(m, r, dtype=np.complex128))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def normalize(state: PureState) -> PureState:
    """Return ``state / ||state||``; raises on the zero vector."""
    n = state.norm
    if n <= 1e-300 or not np.isfinite(n):
        raise DegenerateStateError("cannot normalize the zero vector")
    return PureState(state.dims, state.amplitudes / n)


def mix(dec: Decomposition) -> MixedState:
    """Density matrix ``sum_i p_i |psi_i><psi_i|`` of a decomposition."""
    v = dec.vectors
    rho = (v.T * dec.weights) @ v.conj()
    return MixedState(dec.dims, rho)


def spectral_decomposition(rho: MixedState) -> Decomposition:
    w, v = rho.spectrum
    keep = w > RANK_TOL
    w, v = w[keep], v[:, keep]
    return Decomposition(w / w.sum(), tuple(PureState(rho.dims, v[:, j]) for j in range(v.shape[1])))


def steer(rho: MixedState, U: Isometry) -> Decomposition:
    """Decomposition of ``rho`` selected by an isometry acting on its spectral ensemble.

    Member ``i`` is proportional to ``sum_j U[i, j] sqrt(lam_j) v_j``; its weight is
    the squared norm of that vector. Every decomposition of ``rho`` arises this way
    for a suitable ``U`` with enough rows.
    """
    w, v = rho.spectrum
    keep = w > RANK_TOL
    w, v = w[keep], v[:, keep]
    if U.shape[1] != w.size:
        raise DimensionError(
            f"isometry has {U.shape[1]} columns but the state has rank {w.size}"
        )
    members = U.entries @ (np.sqrt(w)[:, None] * v.T)
    return _decomposition_from_members(rho.dims, members)


def _decomposition_from_members(dims, members: np.ndarray) -> Decomposition:
    """Build a decomposition from unnormalized member rows ``sqrt(p_i) psi_i``."""
    p = np.einsum("ij,ij->i", members, members.conj()).real
    keep = p >= MIN_WEIGHT
    p, members = p[keep], members[keep]
    states = tuple(PureState(dims, row / np.sqrt(pi)) for row, pi in zip(members, p))
    return Decomposition(p / p.sum(), states)


def projector_distance(a: PureState, b: PureState) -> float:
    """Largest entrywise difference between the projectors of two normalized states."""
    return float(np.max(np.abs(a.projector() - b.projector())))


def random_pure_state(dims: Sequence[int], rng: np.random.Generator) -> PureState:
    n = int(np.prod(dims))
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return PureState(tuple(dims), z / np.linalg.norm(z))


def random_mixed_state(dims: Sequence[int], rank: int, rng: np.random.Generator) -> MixedState:
    """Random density matrix with Haar-random range and Dirichlet spectrum."""
    n = int(np.prod(dims))
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    q, _ = np.linalg.qr(g)
    lam = rng.dirichlet(np.ones(rank))
    return MixedState(tuple(dims), (q * lam) @ q.conj().T)
