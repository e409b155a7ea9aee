"""Homogeneous SL-invariant monotones on pure states.

Two monotones are registered: the three-tangle ``tau3`` (degree 4) and its
square root ``sqrt_tau3`` (degree 2). The two-qubit concurrence is provided as
well, together with Wootters' closed form for its convex roof, so that the
numerical roof optimizer can be checked against an exact answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .errors import DegenerateStateError, DimensionError
from .qstate import MixedState, PureState

__all__ = [
    "Monotone",
    "TangleBreakdown",
    "three_tangle",
    "sqrt_three_tangle",
    "evaluate_normalized",
    "evaluate_raw",
    "hyperdeterminant",
    "wootters_concurrence",
    "TAU3",
    "SQRT_TAU3",
    "CONCURRENCE",
    "MONOTONES",
    "get_monotone",
]


def hyperdeterminant(amps: np.ndarray) -> np.ndarray:
    """Cayley hyperdeterminant ``d1 - 2 d2 + 4 d3`` of three-qubit amplitudes.

    Vectorized over leading axes; the last axis holds the 8 amplitudes.
    """
    a = np.asarray(amps)
    x = a[..., [0, 1, 2, 3]] * a[..., [7, 6, 5, 4]]
    sx = x.sum(axis=-1)
    d3 = a[..., 0] * a[..., 6] * a[..., 5] * a[..., 3] + a[..., 4] * a[..., 2] * a[..., 1] * a[..., 7]
    # d1 - 2 d2 with d1 = sum x_k^2 and d2 = sum_{k<l} x_k x_l
    return 2.0 * (x * x).sum(axis=-1) - sx * sx + 4.0 * d3


def _concurrence_poly(amps: np.ndarray) -> np.ndarray:
    a = np.asarray(amps)
    return a[..., 0] * a[..., 3] - a[..., 1] * a[..., 2]


@dataclass(frozen=True)
class Monotone:
    """A named pure-state monotone, homogeneous of degree ``degree``.

    ``evaluator`` acts on raw amplitude arrays (last axis = amplitudes) and is
    vectorized over leading axes. When the monotone is ``coefficient * |P|**power``
    for a holomorphic polynomial ``P``, ``polynomial``/``power``/``coefficient``
    describe that structure; the roof optimizer uses it for smoothing and the
    zero classifier for exact zero sets.
    """

    name: str
    degree: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    dims: tuple[int, ...] | None = None
    polynomial: Callable[[np.ndarray], np.ndarray] | None = None
    poly_degree: int | None = None
    coefficient: float = 1.0
    power: float = 1.0
    # eps values for continuation in the roof optimizer, ending with 0
    schedule: tuple[float, ...] = (0.0,)
    kernel_id: int | None = None

    def smoothed(self, amps: np.ndarray, eps: float) -> np.ndarray:
        """``coefficient * ((|P|^2 + eps^2)^(power/2) - eps^power)``; exact at eps=0."""
        if self.polynomial is None or eps == 0.0:
            return self.evaluator(amps)
        a2 = np.abs(self.polynomial(amps)) ** 2
        half = 0.5 * self.power
        return self.coefficient * ((a2 + eps * eps) ** half - eps ** self.power)

    def __call__(self, psi: PureState) -> float:
        return evaluate_normalized(self, psi)


def _check_dims(m: Monotone, psi: PureState) -> None:
    if m.dims is not None and psi.dims != m.dims:
        raise DimensionError(f"{m.name} needs dims {m.dims}, got {psi.dims}")


TAU3 = Monotone(
    name="tau3",
    degree=4.0,
    evaluator=lambda a: 4.0 * np.abs(hyperdeterminant(a)),
    dims=(2, 2, 2),
    polynomial=hyperdeterminant,
    poly_degree=4,
    coefficient=4.0,
    power=1.0,
    schedule=(1e-2, 1e-4, 1e-6, 0.0),
    kernel_id=_kernels.KIND_TAU3,
)

SQRT_TAU3 = Monotone(
    name="sqrt_tau3",
    degree=2.0,
    evaluator=lambda a: 2.0 * np.sqrt(np.abs(hyperdeterminant(a))),
    dims=(2, 2, 2),
    polynomial=hyperdeterminant,
    poly_degree=4,
    coefficient=2.0,
    power=0.5,
    schedule=(1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 0.0),
    kernel_id=_kernels.KIND_SQRT_TAU3,
)

CONCURRENCE = Monotone(
    name="concurrence",
    degree=2.0,
    evaluator=lambda a: 2.0 * np.abs(_concurrence_poly(a)),
    dims=(2, 2),
    polynomial=_concurrence_poly,
    poly_degree=2,
    coefficient=2.0,
    power=1.0,
    schedule=(1e-2, 1e-4, 0.0),
    kernel_id=_kernels.KIND_CONCURRENCE,
)

MONOTONES: dict[str, Monotone] = {TAU3.name: TAU3, SQRT_TAU3.name: SQRT_TAU3}


def get_monotone(name: str) -> Monotone:
    try:
        return MONOTONES[name]
    except KeyError:
        raise KeyError(f"unknown monotone {name!r}; choose from {sorted(MONOTONES)}") from None


@dataclass(frozen=True)
class TangleBreakdown:
    d1: complex
    d2: complex
    d3: complex
    value: float


def three_tangle(psi: PureState) -> TangleBreakdown:
    """Three-tangle ``4 |d1 - 2 d2 + 4 d3|`` of the raw amplitudes (degree 4)."""
    if psi.dims != (2, 2, 2):
        raise DimensionError(f"three-tangle needs dims (2, 2, 2), got {psi.dims}")
    t = psi.amplitudes.reshape(2, 2, 2)
    d1 = (t[0, 0, 0] ** 2 * t[1, 1, 1] ** 2 + t[0, 0, 1] ** 2 * t[1, 1, 0] ** 2
          + t[0, 1, 0] ** 2 * t[1, 0, 1] ** 2 + t[0, 1, 1] ** 2 * t[1, 0, 0] ** 2)
    d2 = (t[0, 0, 0] * t[0, 0, 1] * t[1, 1, 0] * t[1, 1, 1]
          + t[0, 0, 0] * t[0, 1, 0] * t[1, 0, 1] * t[1, 1, 1]
          + t[0, 0, 0] * t[0, 1, 1] * t[1, 0, 0] * t[1, 1, 1]
          + t[0, 0, 1] * t[0, 1, 0] * t[1, 0, 1] * t[1, 1, 0]
          + t[0, 0, 1] * t[0, 1, 1] * t[1, 0, 0] * t[1, 1, 0]
          + t[0, 1, 0] * t[0, 1, 1] * t[1, 0, 0] * t[1, 0, 1])
    d3 = (t[0, 0, 0] * t[1, 1, 0] * t[1, 0, 1] * t[0, 1, 1]
          + t[1, 0, 0] * t[0, 1, 0] * t[0, 0, 1] * t[1, 1, 1])
    return TangleBreakdown(complex(d1), complex(d2), complex(d3), float(4 * abs(d1 - 2 * d2 + 4 * d3)))


def sqrt_three_tangle(psi: PureState) -> float:
    return float(np.sqrt(three_tangle(psi).value))


def evaluate_raw(m: Monotone, psi: PureState) -> float:
    """Evaluate on the amplitudes as given, without normalizing first."""
    _check_dims(m, psi)
    return float(m.evaluator(psi.amplitudes))


def evaluate_normalized(m: Monotone, psi: PureState) -> float:
    """Evaluate ``m`` on ``psi / ||psi||``."""
    _check_dims(m, psi)
    n = psi.norm
    if n <= 1e-300:
        raise DegenerateStateError("cannot evaluate a monotone on the zero vector")
    return float(m.evaluator(psi.amplitudes / n))


_SIGMA_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=np.complex128
)


def wootters_concurrence(rho: MixedState) -> float:
    """Concurrence of a two-qubit density matrix (Wootters' closed form).

    For ``rho = X X^dagger`` the numbers ``lambda_i`` are the singular values of
    the symmetric matrix ``X^T (sigma_y x sigma_y) X``; working with ``X`` instead
    of ``rho rho~`` avoids square roots of tiny negative eigenvalues.
    """
    if rho.dims != (2, 2):
        raise DimensionError(f"Wootters concurrence needs dims (2, 2), got {rho.dims}")
    w, v = rho.spectrum
    keep = w > 0
    x = v[:, keep] * np.sqrt(w[keep])
    lam = np.linalg.svd(x.T @ _SIGMA_YY @ x, compute_uv=False)
    lam = np.concatenate([np.sort(lam)[::-1], np.zeros(4)])[:4]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
