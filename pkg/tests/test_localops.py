import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from roofscale import ghzw as gw
from roofscale.errors import DegenerateStateError, DimensionError, InvariantViolation
from roofscale.invariants import SQRT_TAU3, TAU3, evaluate_normalized
from roofscale.localops import (
    apply_mixed,
    apply_pure,
    diagonal_ilo_for_family,
    inverse,
    random_diagonal_ilo,
    random_local_operator,
    sl_normalize,
    transport_decomposition,
)
from roofscale.qstate import Decomposition, PureState, mix, projector_distance, random_mixed_state, random_pure_state, steer, Isometry

from oracles import ket


def test_sl_normalize_examples():
    A = sl_normalize([2 * np.eye(2)])
    assert np.allclose(A.normalized_factors[0], np.eye(2))
    A = sl_normalize([np.diag([3.0, 1 / 3])])
    assert np.allclose(A.normalized_factors[0], np.diag([3.0, 1 / 3]))
    A = sl_normalize([np.diag([2.0, 1.0])])
    assert np.allclose(A.normalized_factors[0], np.diag([np.sqrt(2), 1 / np.sqrt(2)]))


def test_sl_normalize_errors():
    with pytest.raises(DegenerateStateError):
        sl_normalize([np.array([[1, 2], [2, 4]])])
    with pytest.raises(DimensionError):
        sl_normalize([np.ones((2, 3))])


def test_unit_determinants(rng):
    for _ in range(20):
        A = random_local_operator((2, 3, 2), rng)
        for a in A.normalized_factors:
            assert abs(np.linalg.det(a) - 1) <= 1e-10


def test_apply_pure_identity_and_unitary(rng):
    phi = random_pure_state((2, 2, 2), rng)
    res = apply_pure(sl_normalize([np.eye(2)] * 3), phi)
    assert res.factor == pytest.approx(1) and projector_distance(res.state, phi) <= 1e-14
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    assert apply_pure(sl_normalize([q, q, q]), phi).factor == pytest.approx(1, abs=1e-12)
    with pytest.raises(InvariantViolation):
        apply_pure(sl_normalize([np.eye(2)] * 3), phi.scaled(2))
    with pytest.raises(DimensionError):
        apply_pure(sl_normalize([np.eye(2)] * 2), phi)


def test_pure_rescaling_eq(rng):
    for _ in range(100):
        phi = random_pure_state((2, 2, 2), rng)
        res = apply_pure(random_local_operator((2, 2, 2), rng), phi)
        for m in (SQRT_TAU3, TAU3):
            lhs = evaluate_normalized(m, res.state) * res.factor ** m.degree
            assert lhs == pytest.approx(evaluate_normalized(m, phi), rel=1e-9)


def test_ilo_maps_gghz_to_ghz(rng):
    for _ in range(10):
        fam = gw.GhzwFamily.random(rng)
        A = diagonal_ilo_for_family(fam.a, fam.b, fam.c, fam.d, fam.f)
        for f_ in A.normalized_factors:
            assert abs(np.linalg.det(f_) - 1) <= 1e-10
            assert np.count_nonzero(np.abs(f_ - np.diag(np.diag(f_))) > 0) == 0
        res = apply_pure(A, fam.gghz())
        assert projector_distance(res.state, gw.ghz_state()) <= 1e-12
        assert res.factor == pytest.approx(np.sqrt(2 * fam.ab), rel=1e-12)
        assert projector_distance(apply_pure(A, fam.gw()).state, gw.w_state()) <= 1e-12


def test_ilo_standard_is_identity():
    fam = gw.GhzwFamily.standard()
    A = fam.ilo()
    assert np.allclose(A.matrix, np.eye(8))
    assert apply_mixed(A, gw.mixture_state(fam, 0.4)).factor == pytest.approx(1)


def test_ilo_rejects_zero_coefficient():
    with pytest.raises(DegenerateStateError):
        diagonal_ilo_for_family(1, 0, 1 / np.sqrt(3), 1 / np.sqrt(3), 1 / np.sqrt(3))


def test_apply_mixed_trace_factor_formula():
    fam = gw.GhzwFamily.s2sqrt2()
    assert gw.s_parameter(fam) == pytest.approx(2 * np.sqrt(2))
    for p in np.linspace(0, 1, 21):
        res = apply_mixed(fam.ilo(), gw.mixture_state(fam, p))
        ref = 2 * fam.ab * (p + 3 * (1 - p) / 8 * abs(2 * gw.s_parameter(fam)) ** (2 / 3))
        assert res.factor == pytest.approx(ref, abs=1e-10)


def _zero_decomposition(fam, p):
    """Three U3-related members with vanishing tangle and equal weights."""
    phis = np.linspace(0, 2 * np.pi, 7200, endpoint=False)
    vals = [SQRT_TAU3.evaluator(gw.superposition(fam, p, t).amplitudes) for t in phis]
    phi = phis[int(np.argmin(vals))]
    phi = minimize_scalar(lambda t: float(TAU3.evaluator(gw.superposition(fam, p, t).amplitudes)),
                          bounds=(phi - 1e-3, phi + 1e-3), method="bounded", options=dict(xatol=1e-13)).x
    states = tuple(gw.superposition(fam, p, phi + k * 2 * np.pi / 3) for k in range(3))
    return Decomposition(np.full(3, 1 / 3), states)


def test_transport_weights_formula():
    fam = gw.GhzwFamily.s2sqrt2()
    p0 = gw.p_zero(fam)
    rho = gw.mixture_state(fam, p0)
    dec = _zero_decomposition(fam, p0)
    assert np.max(np.abs(mix(dec).matrix - rho.matrix)) <= 1e-10
    A = fam.ilo()
    res = apply_mixed(A, rho)
    moved = transport_decomposition(A, dec)
    tr = [np.linalg.norm(A.matrix @ s.amplitudes) ** 2 for s in dec.states]
    assert np.allclose(moved.weights, dec.weights * tr / res.factor, atol=1e-12)
    assert np.max(np.abs(mix(moved).matrix - res.state.matrix)) <= 1e-8
    assert abs(moved.weights.sum() - 1) <= 1e-12


def test_transport_identity_and_single(rng):
    rho = random_mixed_state((2, 2, 2), 3, rng)
    dec = steer(rho, Isometry.from_matrix(rng.normal(size=(5, 3)) + 0j))
    moved = transport_decomposition(sl_normalize([np.eye(2)] * 3), dec)
    assert np.allclose(moved.weights, dec.weights)
    single = Decomposition([1.0], (random_pure_state((2, 2, 2), rng),))
    assert len(transport_decomposition(random_local_operator((2, 2, 2), rng), single)) == 1


def test_inverse_examples(rng):
    A = sl_normalize([np.diag([np.sqrt(2), 1 / np.sqrt(2)])])
    assert np.allclose(inverse(A).normalized_factors[0], np.diag([1 / np.sqrt(2), np.sqrt(2)]))
    assert np.allclose(inverse(sl_normalize([np.eye(2)])).matrix, np.eye(2))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 31), rank=st.integers(1, 4))
def test_round_trip_and_composition(seed, rank):
    rng = np.random.default_rng(seed)
    rho = random_mixed_state((2, 2, 2), rank, rng)
    A = random_local_operator((2, 2, 2), rng)
    res = apply_mixed(A, rho)
    assert res.factor > 0
    back = apply_mixed(A, apply_mixed(inverse(A), rho).state).state
    assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-8
    dec = steer(rho, Isometry.from_matrix(rng.normal(size=(rank + 2, rank)) + 1j * rng.normal(size=(rank + 2, rank))))
    moved = transport_decomposition(A, dec)
    assert abs(moved.weights.sum() - 1) <= 1e-12
    assert np.max(np.abs(mix(moved).matrix - res.state.matrix)) <= 1e-8
    returned = transport_decomposition(inverse(A), moved)
    assert np.allclose(returned.weights, dec.weights, atol=1e-8)
    for s, t in zip(returned.states, dec.states):
        assert projector_distance(s, t) <= 1e-8


def test_random_diagonal_ilo(rng):
    A = random_diagonal_ilo(3, rng)
    M = A.matrix
    assert np.allclose(M, np.diag(np.diag(M)))
    assert abs(np.linalg.det(M) - 1) <= 1e-9
