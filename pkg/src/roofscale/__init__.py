"""Convex-roof entanglement monotones for three qubits and their behaviour under invertible local operations."""

from .convexroof import (
    RoofOptions,
    RoofResult,
    ZeroClass,
    check_equal_trace,
    convex_roof,
    naive_rescale,
    rescaled_roof,
    symmetric_rescale,
    transport_optimal,
    zero_class,
)
from .errors import (
    DegenerateStateError,
    DimensionError,
    InvariantViolation,
    NotApplicableError,
    RoofscaleError,
)
from .ghzw import GhzwFamily
from .invariants import (
    CONCURRENCE,
    MONOTONES,
    SQRT_TAU3,
    TAU3,
    Monotone,
    evaluate_normalized,
    get_monotone,
    sqrt_three_tangle,
    three_tangle,
    wootters_concurrence,
)
from .localops import (
    LocalOperator,
    RescaleResult,
    apply_mixed,
    apply_pure,
    diagonal_ilo_for_family,
    inverse,
    sl_normalize,
    transport_decomposition,
)
from .qstate import (
    Decomposition,
    Isometry,
    MixedState,
    PureState,
    mix,
    normalize,
    spectral_decomposition,
    steer,
)

__version__ = "0.1.0"
