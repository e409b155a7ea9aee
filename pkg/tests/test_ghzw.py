import numpy as np
import pytest

from roofscale import ghzw as gw
from roofscale.errors import InvariantViolation, NotApplicableError
from roofscale.invariants import SQRT_TAU3, TAU3, evaluate_normalized
from roofscale.qstate import PureState, projector_distance

STD = gw.GhzwFamily.standard()
S2 = gw.GhzwFamily.s2sqrt2()
CUBE = 2 ** (7 / 3) / 3


def test_family_validation():
    with pytest.raises(InvariantViolation):
        gw.GhzwFamily(1, 1, 1, 0, 0)
    with pytest.raises(InvariantViolation):
        gw.GhzwFamily(1, 0, 1 / np.sqrt(3), 1 / np.sqrt(3), 1 / np.sqrt(3))


def test_s_parameter_examples():
    assert gw.s_parameter(STD) == pytest.approx(2 ** 3.5 / 3 ** 1.5)
    assert abs(gw.s_parameter(STD)) == pytest.approx(2.17732, abs=1e-5)
    assert gw.s_parameter(S2) == pytest.approx(2 * np.sqrt(2))
    w = np.exp(0.7j)
    rot = gw.GhzwFamily(STD.a, STD.b, STD.c * w, STD.d * w, STD.f * w)
    assert gw.s_parameter(rot) == pytest.approx(gw.s_parameter(STD) * w ** 3)


def test_mixture_state():
    assert projector_distance(PureState((2, 2, 2), np.linalg.eigh(gw.mixture_state(S2, 1).matrix)[1][:, -1]), S2.gghz()) <= 1e-12
    assert np.allclose(gw.mixture_state(S2, 0).matrix, S2.gw().projector())
    assert np.allclose(np.linalg.eigvalsh(gw.mixture_state(STD, 0.5).matrix)[-2:], [0.5, 0.5])
    with pytest.raises(InvariantViolation):
        gw.mixture_state(STD, 1.2)


def test_char_curve_endpoints_and_zero(rng):
    for fam in (STD, S2, gw.GhzwFamily.random(rng)):
        assert gw.char_curve(fam, 1) == pytest.approx(2 * fam.ab)
        assert gw.char_curve(fam, 0) == 0
        assert gw.char_curve(fam, gw.p_zero(fam)) <= 1e-7


def test_char_curve_vs_phase_minimum(rng):
    for _ in range(10):
        fam = gw.GhzwFamily.random(rng)
        for p in np.linspace(0, 1, 50):
            assert gw.phase_minimum(fam, p) == pytest.approx(gw.char_curve(fam, p), abs=1e-6)


def test_p_zero_examples():
    assert gw.p_zero(STD) == pytest.approx(2 ** (7 / 3) / (3 + 2 ** (7 / 3)), abs=1e-12)
    assert gw.p_zero(S2) == pytest.approx(2 / 3, abs=1e-12)
    tiny = gw.GhzwFamily(np.sqrt(1 - 1e-10), 1e-5, 1e-6, 1e-6, np.sqrt(1 - 2e-12))
    assert gw.p_zero(tiny) < 1e-2


def test_convex_char_curve(rng):
    assert gw.convex_char_curve(STD, gw.p_zero(STD)) == 0
    assert gw.convex_char_curve(STD, 0.9) == pytest.approx(0.9 - 0.1 * CUBE)
    assert gw.convex_char_curve(STD, 0.9) == pytest.approx(0.73201, abs=1e-5)
    for _ in range(5):
        fam = gw.GhzwFamily.random(rng)
        assert gw.convex_char_curve(fam, 1) == pytest.approx(2 * fam.ab)
        p0 = gw.p_zero(fam)
        for p in np.linspace(0, 1, 101):
            c, t = gw.convex_char_curve(fam, p), gw.char_curve(fam, p)
            assert c <= t + 1e-12
            if p > p0:
                # the curve is concave above p0, so the chord from p0 to 1 lies under it
                assert c <= t


def test_standard_sqrt_roof():
    assert gw.standard_sqrt_roof(gw.P0_STANDARD) == 0
    assert gw.standard_sqrt_roof(1) == pytest.approx(1)
    assert gw.standard_sqrt_roof(0.7) == pytest.approx(0.7 - 0.3 * CUBE)
    assert gw.standard_sqrt_roof(0.7) == pytest.approx(0.19603, abs=1e-5)


def test_tangency_point_and_slope():
    p1 = gw.tangency_point()
    assert p1 == pytest.approx(0.70868, abs=1e-5)
    g = lambda p: p * p - gw.S_STANDARD * np.sqrt(p * (1 - p) ** 3)
    assert (1 - g(p1)) / (1 - p1) == pytest.approx(1.5 + np.sqrt(465) / 18, abs=1e-8)
    # the printed closed form for the tangency point lies outside [0, 1]
    assert 0.5 + np.sqrt(465) / 18 > 1


def test_standard_tau3_roof_branches():
    p1 = gw.tangency_point()
    assert gw.standard_tau3_roof(1) == pytest.approx(1)
    assert gw.standard_tau3_roof(gw.P0_STANDARD) == 0
    assert gw.standard_tau3_roof(0.3) == 0
    below, above = gw.standard_tau3_roof(p1 - 1e-9), gw.standard_tau3_roof(p1 + 1e-9)
    assert below == pytest.approx(above, abs=1e-8)
    # standard tau3 at p'=0.9 sits on the straight third branch
    assert gw.standard_tau3_roof(0.9) == pytest.approx(1 - 0.1 * gw.SLOPE_STANDARD)


def test_p_maps(rng):
    for p in (0.0, 1.0):
        assert gw.p_prime_from_p(S2, p) == p and gw.p_from_p_prime(S2, p) == p
    for p in np.linspace(0, 1, 11):
        assert gw.p_prime_from_p(STD, p) == pytest.approx(p, abs=1e-14)
    for _ in range(3):
        fam = gw.GhzwFamily.random(rng)
        ps = np.linspace(0, 1, 100)
        pp = [gw.p_prime_from_p(fam, p) for p in ps]
        assert np.all(np.diff(pp) > 0)
        assert max(abs(gw.p_from_p_prime(fam, q) - p) for p, q in zip(ps, pp)) <= 1e-12


def test_trace_factor_examples():
    for p in np.linspace(0, 1, 11):
        assert gw.trace_factor(STD, p) == pytest.approx(1, abs=1e-14)
    assert gw.trace_factor(S2, 1) == pytest.approx(2 * S2.ab)
    assert gw.trace_factor(S2, 0) == pytest.approx(0.75 * S2.ab * abs(2 * gw.s_parameter(S2)) ** (2 / 3))


def test_roof_via_rescaling(rng):
    for p in np.linspace(0, 1, 51):
        assert gw.roof_via_rescaling(STD, p) == pytest.approx(gw.standard_sqrt_roof(p), abs=1e-14)
    assert gw.roof_via_rescaling(S2, 2 / 3) == pytest.approx(0, abs=1e-12)
    for _ in range(10):
        fam = gw.GhzwFamily.random(rng)
        assert gw.roof_via_rescaling(fam, 1) == pytest.approx(2 * fam.ab)
        for p in np.linspace(0, 1, 1000):
            assert abs(gw.roof_via_rescaling(fam, p) - gw.convex_char_curve(fam, p)) <= 1e-10


def test_naive_p1():
    assert gw.naive_p1(1e-9) < 1e-4
    assert gw.naive_p1(1e9) > 1 - 1e-4
    vals = [gw.naive_p1(s) for s in np.linspace(0.1, 10, 50)]
    assert np.all(np.diff(vals) > 0)
    assert gw.naive_p1(gw.S_STANDARD) == pytest.approx(gw.tangency_point(), abs=1e-9)


def test_true_p1_moves_opposite_to_naive():
    xs = np.linspace(0.15, 1 / np.sqrt(3), 10)
    fams = [gw.GhzwFamily(1 / np.sqrt(2), 1 / np.sqrt(2), x, x, np.sqrt(1 - 2 * x * x)) for x in xs]
    s = [abs(gw.s_parameter(f)) for f in fams]
    assert np.all(np.diff(s) > 0)
    assert np.all(np.diff([gw.tangency_point(f) for f in fams]) < 0)
    assert np.all(np.diff([gw.naive_p1(v) for v in s]) > 0)


def test_tau3_curve_general(rng):
    p1 = gw.tangency_point()
    for p in np.linspace(gw.P0_STANDARD, p1, 20):
        assert gw.tau3_curve_general(STD, p) == pytest.approx(gw.standard_tau3_roof(p), abs=1e-12)
    for _ in range(5):
        fam = gw.GhzwFamily.random(rng)
        p0 = gw.p_zero(fam)
        assert gw.tau3_curve_general(fam, p0) <= 1e-12
        for p in np.linspace(p0, 1, 20):
            assert gw.tau3_curve_general(fam, p) == pytest.approx(gw.char_curve(fam, p) ** 2, abs=1e-12)
        with pytest.raises(NotApplicableError):
            gw.tau3_curve_general(fam, p0 / 2)


def test_u3_symmetry():
    U = gw.u3_symmetry()
    M = U.matrix
    for p in np.linspace(0, 1, 5):
        rho = gw.mixture_state(STD, p).matrix
        assert np.max(np.abs(M @ rho @ M.conj().T - rho)) <= 1e-12
    M3 = np.linalg.matrix_power(M, 3)
    assert np.allclose(M3, M3[0, 0] * np.eye(8))
    p, phi = 0.6, 0.4
    psi = gw.superposition(STD, p, phi)
    moved = PureState((2, 2, 2), M @ psi.amplitudes)
    target = gw.superposition(STD, p, phi - 2 * np.pi / 3)
    assert projector_distance(moved, target) <= 1e-12
    assert projector_distance(moved, psi) > 1e-3
    assert evaluate_normalized(TAU3, moved) == pytest.approx(evaluate_normalized(TAU3, psi))


def test_rank3_state():
    assert np.allclose(gw.rank3_state(1, 0).matrix, gw.ghz_state().projector())
    assert np.allclose(gw.rank3_state(0, 1).matrix, gw.w_state().projector())
    assert np.allclose(gw.rank3_state(0, 0).matrix, gw.wbar_state().projector())
    with pytest.raises(InvariantViolation):
        gw.rank3_state(0.7, 0.4)


def test_char_surface_corners_and_edge():
    assert abs(gw.char_surface(1, 0) - 1) <= 1e-12
    assert gw.char_surface(0, 1) <= 1e-12 and gw.char_surface(0, 0) <= 1e-12
    # the q = 0 edge is the GHZ / flipped-W curve, whose coefficient equals the standard |s|
    assert 8 * np.sqrt(6) / 9 == pytest.approx(gw.S_STANDARD)
    assert gw.char_surface(gw.P0_STANDARD, 0) <= 1e-7


def test_char_surface_vs_direct(rng):
    from roofscale.ghzw import _surface_inner
    for _ in range(15):
        p, q, _ = rng.dirichlet([1, 1, 1])
        direct, formula = gw.char_surface_direct(p, q), gw.char_surface(p, q)
        if _surface_inner(p, q) >= 0:
            assert direct == pytest.approx(formula, abs=1e-6)
        else:
            assert direct <= formula + 1e-9


def test_convexify_curve():
    xs = np.linspace(0, 1, 11)
    convex = [gw.CurveSample(x, x * x, x * x) for x in xs]
    assert [s.convex_value for s in gw.convexify_curve(convex)] == pytest.approx(list(xs ** 2))
    with pytest.raises(InvariantViolation):
        gw.convexify_curve(convex[::-1])
    env = gw.curve_samples(STD, 1e-3)
    assert max(abs(s.convex_value - gw.standard_sqrt_roof(s.p)) for s in env) <= 2e-3


def test_convexify_tau3_curve():
    env = gw.curve_samples(STD, 1e-3, "tau3")
    assert max(abs(s.convex_value - gw.standard_tau3_roof(s.p)) for s in env) <= 2e-3


def test_lower_hull_1d():
    x = np.array([0, 1, 2, 3, 4.0])
    y = np.array([0, -1, 5, -1, 0.0])
    assert list(gw.lower_hull_1d(x, y)) == [0, 1, 3, 4]


def test_surface_envelope_small_grid():
    grid = gw.surface_samples(1 / 40)
    env = gw.surface_convexify(grid, gw.surface_zero_points(1 / 40))
    for s in env:
        assert s.convex_value <= s.char_value + 1e-12
        assert s.r == 1 - s.p - s.q
        if s.p == 0:
            assert s.convex_value <= 1e-9
    assert [s.convex_value for s in env if s.p == 1][0] == pytest.approx(1)
    with pytest.raises(InvariantViolation):
        gw.surface_convexify(grid[:2])
