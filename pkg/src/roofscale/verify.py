"""Property suites run by ``roofscale verify``.

``fast`` holds the closed-form and linear-algebra properties (seconds).
``full`` adds the optimizer-backed checks (minutes).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import convexroof as cr
from . import ghzw as gw
from .invariants import CONCURRENCE, SQRT_TAU3, TAU3, evaluate_normalized, evaluate_raw, wootters_concurrence
from .localops import (
    apply_mixed,
    apply_pure,
    inverse,
    random_diagonal_ilo,
    random_local_operator,
    transport_decomposition,
)
from .qstate import Isometry, MixedState, PureState, mix, random_mixed_state, random_pure_state, spectral_decomposition, steer

DIMS3 = (2, 2, 2)


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: float
    seconds: float

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "seconds": self.seconds}


def _rng(k: int) -> np.random.Generator:
    return np.random.default_rng(1000 + k)


# each check returns (passed, worst observed error or margin)

def spectral_reconstruction():
    rng, worst = _rng(1), 0.0
    for i in range(100):
        rho = random_mixed_state(DIMS3, 1 + i % 8, rng)
        worst = max(worst, np.max(np.abs(mix(spectral_decomposition(rho)).matrix - rho.matrix)))
    return worst <= 1e-8, worst


def steer_reconstruction():
    rng, worst = _rng(2), 0.0
    for i in range(100):
        r = 1 + i % 4
        rho = random_mixed_state(DIMS3, r, rng)
        m = r + rng.integers(0, 6)
        U = Isometry.from_matrix(rng.normal(size=(m, r)) + 1j * rng.normal(size=(m, r)))
        worst = max(worst, np.max(np.abs(mix(steer(rho, U)).matrix - rho.matrix)))
    return worst <= 1e-8, worst


def homogeneity():
    rng, worst = _rng(3), 0.0
    for _ in range(100):
        psi = random_pure_state(DIMS3, rng)
        t3, t = evaluate_raw(TAU3, psi), evaluate_raw(SQRT_TAU3, psi)
        for a in (0.5, 2.0, 3.7):
            sc = psi.scaled(a)
            worst = max(worst, abs(evaluate_raw(TAU3, sc) - a ** 4 * t3) / max(a ** 4 * t3, 1e-300),
                        abs(evaluate_raw(SQRT_TAU3, sc) - a ** 2 * t) / max(a ** 2 * t, 1e-300))
    return worst <= 1e-10, worst


def sl_invariance():
    rng, worst = _rng(4), 0.0
    for _ in range(100):
        psi = random_pure_state(DIMS3, rng)
        A = random_local_operator(DIMS3, rng)
        t = evaluate_raw(TAU3, psi)
        t2 = evaluate_raw(TAU3, PureState(DIMS3, A.matrix @ psi.amplitudes))
        worst = max(worst, abs(t2 - t) / t)
    return worst <= 1e-9, worst


def pure_rescaling():
    rng, worst = _rng(5), 0.0
    for _ in range(100):
        phi = random_pure_state(DIMS3, rng)
        A = random_local_operator(DIMS3, rng)
        res = apply_pure(A, phi)
        for m in (SQRT_TAU3, TAU3):
            ref = evaluate_normalized(m, phi)
            worst = max(worst, abs(evaluate_normalized(m, res.state) * res.factor ** m.degree - ref) / ref)
    return worst <= 1e-9, worst


def u3_invariance():
    rng, worst = _rng(6), 0.0
    U = gw.u3_symmetry().matrix
    for _ in range(100):
        psi = random_pure_state(DIMS3, rng)
        worst = max(worst, abs(evaluate_raw(TAU3, PureState(DIMS3, U @ psi.amplitudes)) - evaluate_raw(TAU3, psi)))
    for p in np.linspace(0, 1, 11):
        rho = gw.mixture_state(gw.GhzwFamily.standard(), p).matrix
        worst = max(worst, np.max(np.abs(U @ rho @ U.conj().T - rho)))
    return worst <= 1e-12, worst


def transport_properties():
    rng, worst = _rng(7), 0.0
    ok = True
    for _ in range(50):
        rho = random_mixed_state(DIMS3, 1 + rng.integers(0, 4), rng)
        A = random_local_operator(DIMS3, rng)
        res = apply_mixed(A, rho)
        ok &= res.factor > 0
        dec = steer(rho, Isometry.from_matrix(rng.normal(size=(6, rho.rank)) + 1j * rng.normal(size=(6, rho.rank))))
        t = np.linalg.norm(dec.vectors @ A.matrix.T, axis=1) ** 2
        ok &= bool(np.all(t > 0))
        moved = transport_decomposition(A, dec)
        worst = max(worst, abs(moved.weights.sum() - 1.0),
                    np.max(np.abs(mix(moved).matrix - res.state.matrix)))
        back = apply_mixed(A, apply_mixed(inverse(A), rho).state).state
        worst = max(worst, np.max(np.abs(back.matrix - rho.matrix)))
    return ok and worst <= 1e-8, worst


def p_map_round_trip():
    rng, worst = _rng(8), 0.0
    for _ in range(10):
        fam = gw.GhzwFamily.random(rng)
        for p in np.linspace(0, 1, 100):
            worst = max(worst, abs(gw.p_from_p_prime(fam, gw.p_prime_from_p(fam, p)) - p))
    return worst <= 1e-12, worst


def rescaling_identity():
    rng, worst = _rng(9), 0.0
    for _ in range(10):
        fam = gw.GhzwFamily.random(rng)
        for p in np.linspace(0, 1, 1000):
            worst = max(worst, abs(gw.roof_via_rescaling(fam, p) - gw.convex_char_curve(fam, p)))
    return worst <= 1e-10, worst


def char_curve_vs_phase_minimum():
    rng, worst = _rng(10), 0.0
    for _ in range(10):
        fam = gw.GhzwFamily.random(rng)
        for p in np.linspace(0, 1, 50):
            worst = max(worst, abs(gw.phase_minimum(fam, p) - gw.char_curve(fam, p)))
    return worst <= 1e-6, worst


def convex_below_char():
    rng, margin = _rng(11), np.inf
    for _ in range(10):
        fam = gw.GhzwFamily.random(rng)
        for p in np.linspace(0, 1, 200):
            margin = min(margin, gw.char_curve(fam, p) - gw.convex_char_curve(fam, p))
    return margin >= -1e-12, margin


def naive_p1_increasing():
    vals = np.array([gw.naive_p1(s) for s in np.linspace(0.1, 10, 50)])
    d = np.diff(vals)
    return bool(np.all(d > 0)), float(d.min())


def true_p1_decreasing():
    """The hull tangency point of the transformed degree-4 problem moves the opposite way."""
    p1 = []
    for x in np.linspace(0.15, 1 / np.sqrt(3), 12):
        # a = b and c = d = x sweep |s| upward from about 0.25 to the standard value
        fam = gw.GhzwFamily(1 / np.sqrt(2), 1 / np.sqrt(2), x, x, np.sqrt(1 - 2 * x * x))
        p1.append(gw.tangency_point(fam))
    d = np.diff(p1)
    return bool(np.all(d < 0)), float(d.max())


def surface_corners():
    worst = max(abs(gw.char_surface(1, 0) - 1), gw.char_surface(0, 1), gw.char_surface(0, 0))
    zero = gw.char_surface(gw.P0_STANDARD, 0.0)
    return worst <= 1e-12 and zero <= 1e-6, max(worst, zero)


def wootters_oracle():
    rng, worst = _rng(20), 0.0
    for _ in range(50):
        rho = random_mixed_state((2, 2), 2, rng)
        worst = max(worst, abs(cr.convex_roof(CONCURRENCE, rho).value - wootters_concurrence(rho)))
    return worst <= 1e-6, worst


def rescaling_theorem():
    rng, worst = _rng(21), 0.0
    for _ in range(20):
        rho = random_mixed_state(DIMS3, 2, rng)
        A = random_diagonal_ilo(3, rng)
        res = apply_mixed(A, rho)
        direct = cr.convex_roof(SQRT_TAU3, res.state).value
        worst = max(worst, abs(direct - cr.convex_roof(SQRT_TAU3, rho).value / res.factor))
    return worst <= 2e-3, worst


def roof_convexity():
    rng, worst = _rng(22), -np.inf
    for _ in range(5):
        r1, r2 = random_mixed_state(DIMS3, 1, rng), random_mixed_state(DIMS3, 1, rng)
        lam = rng.uniform(0.2, 0.8)
        rho = MixedState(DIMS3, lam * r1.matrix + (1 - lam) * r2.matrix)
        lhs = cr.convex_roof(SQRT_TAU3, rho).value
        rhs = lam * cr.convex_roof(SQRT_TAU3, r1).value + (1 - lam) * cr.convex_roof(SQRT_TAU3, r2).value
        worst = max(worst, lhs - rhs)
    return worst <= 2e-3, worst


def zero_set_invariance():
    rng, agree = _rng(23), 0
    for _ in range(10):
        rho = random_mixed_state(DIMS3, 2, rng)
        rho2 = apply_mixed(random_diagonal_ilo(3, rng), rho).state
        for m in (SQRT_TAU3, TAU3):
            agree += cr.zero_class(m, rho) == cr.zero_class(m, rho2)
    return agree == 20, float(20 - agree)


def pullback_inequality():
    rng, worst = _rng(24), -np.inf
    for _ in range(5):
        rho = random_mixed_state(DIMS3, 2, rng)
        A = random_diagonal_ilo(3, rng)
        res = apply_mixed(A, rho)
        lhs = cr.convex_roof(SQRT_TAU3, rho)
        for m in (SQRT_TAU3, TAU3):
            dec = cr.convex_roof(m, res.state).decomposition
            val = lhs.value if m is SQRT_TAU3 else cr.convex_roof(TAU3, rho).value
            worst = max(worst, val - cr.pullback_bound(m, A, dec, res.factor))
    return worst <= 1e-8, worst


def optimizer_vs_closed_form():
    worst = 0.0
    for fam in (gw.GhzwFamily.standard(), gw.GhzwFamily.s2sqrt2()):
        for p in (0.2, gw.p_zero(fam), 0.8, 0.95):
            val = cr.convex_roof(SQRT_TAU3, gw.mixture_state(fam, p)).value
            worst = max(worst, abs(val - gw.convex_char_curve(fam, p)))
    return worst <= 2e-3, worst


FAST: list[Callable] = [
    spectral_reconstruction, steer_reconstruction, homogeneity, sl_invariance, pure_rescaling,
    u3_invariance, transport_properties, p_map_round_trip, rescaling_identity,
    char_curve_vs_phase_minimum, convex_below_char, naive_p1_increasing, true_p1_decreasing,
    surface_corners,
]
FULL: list[Callable] = FAST + [
    wootters_oracle, rescaling_theorem, roof_convexity, zero_set_invariance,
    pullback_inequality, optimizer_vs_closed_form,
]
SUITES = {"fast": FAST, "full": FULL}


def run_suite(name: str) -> list[PropertyResult]:
    try:
        checks = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    out = []
    for check in checks:
        t = time.perf_counter()
        passed, detail = check()
        out.append(PropertyResult(check.__name__, bool(passed), float(detail), time.perf_counter() - t))
    return out
