"""Closed forms for mixtures of generalized GHZ and W states.

Covers the characteristic curve and its convex envelope, the diagonal ILO that
maps any generic family onto the standard one, the degree-4 (three-tangle)
solution of the standard problem, and the rank-3 GHZ/W/flipped-W surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.spatial import ConvexHull

from .errors import InvariantViolation, NotApplicableError
from .invariants import SQRT_TAU3, Monotone, hyperdeterminant
from .localops import LocalOperator, diagonal_ilo_for_family, sl_normalize
from .qstate import MixedState, PureState

__all__ = [
    "GhzwFamily",
    "CurveSample",
    "SurfaceSample",
    "ghz_state",
    "w_state",
    "wbar_state",
    "S_STANDARD",
    "P0_STANDARD",
    "SLOPE_STANDARD",
    "s_parameter",
    "mixture_state",
    "superposition",
    "char_curve",
    "phase_minimum",
    "p_zero",
    "convex_char_curve",
    "standard_sqrt_roof",
    "standard_tau3_roof",
    "tangency_point",
    "p_prime_from_p",
    "p_from_p_prime",
    "trace_factor",
    "roof_via_rescaling",
    "naive_p1",
    "tau3_char_curve",
    "tau3_curve_general",
    "u3_symmetry",
    "rank3_state",
    "char_surface",
    "char_surface_direct",
    "curve_samples",
    "convexify_curve",
    "surface_samples",
    "surface_convexify",
    "surface_zero_points",
    "characteristic_surface",
    "lower_hull_1d",
]

SQRT2, SQRT3 = np.sqrt(2.0), np.sqrt(3.0)
S_STANDARD = 2 ** 3.5 / 3 ** 1.5
P0_STANDARD = 2 ** (7 / 3) / (3 + 2 ** (7 / 3))
SLOPE_STANDARD = 1.5 + np.sqrt(465.0) / 18.0
_W_RATIO_STD = 2 ** (7 / 3) / 3  # |s|^(2/3) of the standard family


@dataclass(frozen=True)
class GhzwFamily:
    """Coefficients of ``a|000> + b|111>`` and ``c|100> + d|010> + f|001>``."""

    a: complex
    b: complex
    c: complex
    d: complex
    f: complex

    def __post_init__(self):
        vals = [complex(getattr(self, k)) for k in "abcdf"]
        for k, v in zip("abcdf", vals):
            if not np.isfinite(v):
                raise InvariantViolation(f"coefficient {k} is not finite")
            object.__setattr__(self, k, v)
        a, b, c, d, f = vals
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-10:
            raise InvariantViolation("|a|^2 + |b|^2 must equal 1")
        if abs(abs(c) ** 2 + abs(d) ** 2 + abs(f) ** 2 - 1) > 1e-10:
            raise InvariantViolation("|c|^2 + |d|^2 + |f|^2 must equal 1")
        if min(abs(v) for v in vals) <= 1e-12:
            raise InvariantViolation("all five coefficients must be nonzero")

    @classmethod
    def standard(cls) -> "GhzwFamily":
        return cls(1 / SQRT2, 1 / SQRT2, 1 / SQRT3, 1 / SQRT3, 1 / SQRT3)

    @classmethod
    def s2sqrt2(cls) -> "GhzwFamily":
        return cls(1 / SQRT3, np.sqrt(2 / 3), 1 / SQRT3, 1 / SQRT3, 1 / SQRT3)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "GhzwFamily":
        g = rng.normal(size=2) + 1j * rng.normal(size=2)
        w = rng.normal(size=3) + 1j * rng.normal(size=3)
        g, w = g / np.linalg.norm(g), w / np.linalg.norm(w)
        return cls(g[0], g[1], w[0], w[1], w[2])

    @property
    def ab(self) -> float:
        return abs(self.a * self.b)

    def gghz(self) -> PureState:
        v = np.zeros(8, complex)
        v[0], v[7] = self.a, self.b
        return PureState((2, 2, 2), v)

    def gw(self) -> PureState:
        v = np.zeros(8, complex)
        v[4], v[2], v[1] = self.c, self.d, self.f
        return PureState((2, 2, 2), v)

    def ilo(self) -> LocalOperator:
        return diagonal_ilo_for_family(self.a, self.b, self.c, self.d, self.f)


@dataclass(frozen=True)
class CurveSample:
    p: float
    char_value: float
    convex_value: float

    def __post_init__(self):
        if self.convex_value > self.char_value + 1e-12:
            raise InvariantViolation("convex value exceeds the characteristic value")


@dataclass(frozen=True)
class SurfaceSample:
    p: float
    q: float
    r: float
    char_value: float
    convex_value: float

    def __post_init__(self):
        if self.r != 1.0 - self.p - self.q:
            raise InvariantViolation("r must equal 1 - p - q")
        if self.convex_value > self.char_value + 1e-12:
            raise InvariantViolation("convex value exceeds the characteristic value")


def ghz_state() -> PureState:
    return GhzwFamily.standard().gghz()


def w_state() -> PureState:
    return GhzwFamily.standard().gw()


def wbar_state() -> PureState:
    v = np.zeros(8, complex)
    v[[3, 5, 6]] = 1 / SQRT3
    return PureState((2, 2, 2), v)


def _check_p(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvariantViolation(f"{name} must lie in [0, 1], got {p!r}")
    return p


def _w_ratio(fam: GhzwFamily) -> float:
    return abs(s_parameter(fam)) ** (2 / 3)


def s_parameter(fam: GhzwFamily) -> complex:
    return 4 * fam.c * fam.d * fam.f / (fam.a ** 2 * fam.b)


def mixture_state(fam: GhzwFamily, p: float) -> MixedState:
    p = _check_p(p)
    g, w = fam.gghz().amplitudes, fam.gw().amplitudes
    return MixedState((2, 2, 2), p * np.outer(g, g.conj()) + (1 - p) * np.outer(w, w.conj()))


def superposition(fam: GhzwFamily, p: float, phi: float) -> PureState:
    """``sqrt(p) gGHZ + sqrt(1-p) e^{i phi} gW``."""
    p = _check_p(p)
    return PureState((2, 2, 2), np.sqrt(p) * fam.gghz().amplitudes
                     + np.sqrt(1 - p) * np.exp(1j * phi) * fam.gw().amplitudes)


def char_curve(fam: GhzwFamily, p: float) -> float:
    p = _check_p(p)
    inner = p * p - abs(s_parameter(fam)) * np.sqrt(p * (1 - p) ** 3)
    return float(2 * fam.ab * np.sqrt(abs(inner)))


def phase_minimum(fam: GhzwFamily, p: float, monotone: Monotone = SQRT_TAU3, n_grid: int = 720) -> float:
    """Minimum of ``monotone`` over the relative phase of the superposition, by grid search plus bounded Brent refinement."""
    p = _check_p(p)
    g, w = fam.gghz().amplitudes, fam.gw().amplitudes
    sq, sw = np.sqrt(p), np.sqrt(1 - p)

    def f(phi):
        phi = np.atleast_1d(phi)
        return monotone.evaluator(sq * g + sw * np.exp(1j * phi)[:, None] * w)

    grid = np.linspace(0, 2 * np.pi, n_grid, endpoint=False)
    vals = f(grid)
    k = int(np.argmin(vals))
    h = grid[1] - grid[0]
    res = minimize_scalar(lambda t: float(f(t)[0]), bounds=(grid[k] - h, grid[k] + h),
                          method="bounded", options=dict(xatol=1e-10))
    return float(min(vals[k], res.fun))


def p_zero(fam: GhzwFamily) -> float:
    x = _w_ratio(fam)
    return x / (1 + x)


def convex_char_curve(fam: GhzwFamily, p: float) -> float:
    p = _check_p(p)
    if p <= p_zero(fam):
        return 0.0
    return float(max(0.0, 2 * fam.ab * (p - (1 - p) * _w_ratio(fam))))


def standard_sqrt_roof(p_prime: float) -> float:
    p = _check_p(p_prime, "p_prime")
    if p <= P0_STANDARD:
        return 0.0
    return float(max(0.0, p - (1 - p) * _W_RATIO_STD))


def tau3_char_curve(fam: GhzwFamily, p: float) -> float:
    """Square of the characteristic curve: the minimal three-tangle at fixed mixing weight."""
    return char_curve(fam, p) ** 2


def _tau3_middle(fam: GhzwFamily, p):
    return 4 * fam.ab ** 2 * (p * p - abs(s_parameter(fam)) * np.sqrt(p * (1 - p) ** 3))


def tangency_point(fam: GhzwFamily | None = None, tol: float = 1e-10) -> float:
    """Point where the line through ``(1, tau3(1))`` touches the middle three-tangle branch.

    Bisection on ``g(p) + g'(p)(1 - p) - g(1)``; defaults to the standard family.
    Returns ``p0`` when the chord from the zero already supports the curve.
    """
    fam = fam or GhzwFamily.standard()
    s = abs(s_parameter(fam))
    k = 4 * fam.ab ** 2

    def h(p):
        u = p * (1 - p) ** 3
        du = (1 - p) ** 3 - 3 * p * (1 - p) ** 2
        g = k * (p * p - s * np.sqrt(u))
        dg = k * (2 * p - s * du / (2 * np.sqrt(u)))
        return g + dg * (1 - p) - k

    p0 = p_zero(fam)
    grid = 1.0 - (1.0 - p0) * np.geomspace(1.0, 1e-9, 4001)
    hv = h(grid)
    if hv[0] >= 0:
        return p0  # the chord from (p0, 0) to (1, tau3(1)) already lies below the curve
    idx = np.nonzero(np.sign(hv[:-1]) != np.sign(hv[1:]))[0]
    if idx.size == 0:
        raise NotApplicableError("no tangency point found for this family")
    lo, hi = grid[idx[0]], grid[idx[0] + 1]
    hlo = h(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        hm = h(mid)
        if np.sign(hm) == np.sign(hlo):
            lo, hlo = mid, hm
        else:
            hi = mid
    return 0.5 * (lo + hi)


_P1_STANDARD: float | None = None


def _p1_standard() -> float:
    global _P1_STANDARD
    if _P1_STANDARD is None:
        _P1_STANDARD = tangency_point()
    return _P1_STANDARD


def standard_tau3_roof(p_prime: float) -> float:
    p = _check_p(p_prime, "p_prime")
    if p <= P0_STANDARD:
        return 0.0
    if p <= _p1_standard():
        return float(max(0.0, p * p - S_STANDARD * np.sqrt(p * (1 - p) ** 3)))
    return float(1 - (1 - p) * SLOPE_STANDARD)


def p_prime_from_p(fam: GhzwFamily, p: float) -> float:
    p = _check_p(p)
    k = _w_ratio_2s(fam)
    return p / (p + 3 * (1 - p) / 8 * k)


def p_from_p_prime(fam: GhzwFamily, p_prime: float) -> float:
    q = _check_p(p_prime, "p_prime")
    k = _w_ratio_2s(fam)
    return 3 * q * k / (3 * q * k + 8 * (1 - q))


def _w_ratio_2s(fam: GhzwFamily) -> float:
    return abs(2 * s_parameter(fam)) ** (2 / 3)


def trace_factor(fam: GhzwFamily, p: float) -> float:
    p = _check_p(p)
    return float(2 * fam.ab * (p + 3 * (1 - p) / 8 * _w_ratio_2s(fam)))


def roof_via_rescaling(fam: GhzwFamily, p: float) -> float:
    return trace_factor(fam, p) * standard_sqrt_roof(p_prime_from_p(fam, p))


def naive_p1(s: complex) -> float:
    """Tangency point predicted by rescaling the degree-4 roof with ``T**2``. Known to be wrong."""
    if s == 0:
        raise InvariantViolation("s must be nonzero")
    k = 24 * abs(2 * s) ** (2 / 3)
    return float(k / (91 - 3 * np.sqrt(465.0) + k))


def tau3_curve_general(fam: GhzwFamily, p: float) -> float:
    """Three-tangle of the mixture on its middle branch (from ``p0`` up to the tangency point)."""
    p = _check_p(p)
    if p < p_zero(fam) - 1e-12:
        raise NotApplicableError(f"p = {p} lies below p0 = {p_zero(fam)}; the formula does not apply")
    return float(max(0.0, _tau3_middle(fam, p)))


def u3_symmetry() -> LocalOperator:
    u = np.diag([np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3)])
    return sl_normalize([u, u, u])


def _check_pq(p: float, q: float) -> tuple[float, float, float]:
    p, q = float(p), float(q)
    if p < 0 or q < 0 or p + q > 1 + 1e-12:
        raise InvariantViolation(f"(p, q) = ({p}, {q}) is outside the simplex")
    return p, q, max(0.0, 1.0 - p - q)


def rank3_state(p: float, q: float) -> MixedState:
    p, q, r = _check_pq(p, q)
    vs = [ghz_state().amplitudes, w_state().amplitudes, wbar_state().amplitudes]
    rho = sum(wt * np.outer(v, v.conj()) for wt, v in zip((p, q, r), vs))
    return MixedState((2, 2, 2), rho)


def _surface_inner(p, q):
    r = np.maximum(0.0, 1.0 - p - q)
    return (p * p - 4 * p * np.sqrt(q * r) - 4 / 3 * q * r
            - 8 * np.sqrt(6) / 9 * (np.sqrt(p * q ** 3) + np.sqrt(p * r ** 3)))


def char_surface(p: float, q: float) -> float:
    """Closed-form square-root tangle on the GHZ/W/flipped-W plane at zero relative phases."""
    p, q, _ = _check_pq(p, q)
    return float(np.sqrt(abs(_surface_inner(p, q))))


def char_surface_direct(p: float, q: float, n_grid: int = 240) -> float:
    """Minimum over both relative phases of the square-root tangle, by grid search and local refinement."""
    p, q, r = _check_pq(p, q)
    g, w, wb = ghz_state().amplitudes, w_state().amplitudes, wbar_state().amplitudes

    def f(phis):
        phis = np.atleast_2d(phis)
        psi = (np.sqrt(p) * g - np.sqrt(q) * np.exp(1j * phis[:, :1]) * w
               - np.sqrt(r) * np.exp(1j * phis[:, 1:2]) * wb)
        return 2 * np.sqrt(np.abs(hyperdeterminant(psi)))

    t = np.linspace(0, 2 * np.pi, n_grid, endpoint=False)
    P1, P2 = np.meshgrid(t, t, indexing="ij")
    pts = np.column_stack([P1.ravel(), P2.ravel()])
    vals = f(pts)
    best = float(vals.min())
    for k in np.argsort(vals)[:4]:
        res = minimize(lambda x: float(f(x)[0]), pts[k], method="Nelder-Mead",
                       options=dict(xatol=1e-10, fatol=1e-13, initial_simplex=pts[k] + 0.02 * np.array([[0, 0], [1, 0], [0, 1]])))
        best = min(best, float(res.fun))
    return best


def lower_hull_1d(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the lower convex hull vertices of points sorted by ``x`` (monotone chain)."""
    hull: list[int] = []
    for i in range(len(x)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (x[i1] - x[i0]) * (y[i] - y[i0]) - (y[i1] - y[i0]) * (x[i] - x[i0])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull, dtype=int)


def convexify_curve(samples: Sequence[CurveSample], anchors: Sequence[tuple[float, float]] = ()) -> list[CurveSample]:
    """Replace ``convex_value`` by the lower convex envelope of the ``char_value`` samples.

    ``anchors`` are extra ``(p, value)`` points (typically exact zeros) that
    take part in the hull but are not returned.
    """
    if not samples:
        return []
    x = np.array([s.p for s in samples], float)
    y = np.array([s.char_value for s in samples], float)
    if np.any(np.diff(x) <= 0):
        raise InvariantViolation("curve samples must be strictly increasing in p")
    hx, hy = x, y
    if len(anchors):
        ax, ay = np.array(anchors, float).reshape(-1, 2).T
        hx, hy = np.concatenate([x, ax]), np.concatenate([y, ay])
        order = np.lexsort((hy, hx))
        hx, hy = hx[order], hy[order]
    h = lower_hull_1d(hx, hy)
    env = np.minimum(np.interp(x, hx[h], hy[h]), y)
    return [CurveSample(float(a), float(b), float(c)) for a, b, c in zip(x, y, env)]


def curve_samples(fam: GhzwFamily, step: float = 1e-3, monotone: str = "sqrt_tau3") -> list[CurveSample]:
    """Characteristic curve on a uniform grid, convexified with the exact zero ``p0`` as anchor.

    ``monotone`` selects tau (``sqrt_tau3``) or its square (``tau3``).
    """
    if not 0 < step <= 1:
        raise InvariantViolation("step must lie in (0, 1]")
    n = int(round(1 / step))
    ps = np.linspace(0.0, 1.0, n + 1)
    if monotone == "sqrt_tau3":
        ys = [char_curve(fam, p) for p in ps]
    elif monotone == "tau3":
        ys = [tau3_char_curve(fam, p) for p in ps]
    else:
        raise KeyError(f"unknown monotone {monotone!r}")
    samples = [CurveSample(float(p), float(y), float(y)) for p, y in zip(ps, ys)]
    return convexify_curve(samples, [(p_zero(fam), 0.0)])


def surface_samples(step: float = 1 / 200) -> list[SurfaceSample]:
    """Regular simplex grid with the closed-form surface, not yet convexified."""
    n = int(round(1 / step))
    out = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            p, q = i / n, j / n
            c = char_surface(p, q)
            out.append(SurfaceSample(p, q, 1.0 - p - q, c, c))
    return out


def surface_zero_points(step: float = 1 / 200, resolution: int = 4000) -> list[SurfaceSample]:
    """Points where the closed-form surface vanishes, on the rows, columns and constant-r lines of the grid.

    The surface behaves like a square root near its zero curve, so grid samples
    alone overestimate the envelope there by O(sqrt(step)); these exact zeros
    are meant as extra hull anchors for ``surface_convexify``.
    """
    n = int(round(1 / step))
    out = []
    lines = []
    for k in range(n + 1):
        c = k / n
        lines.append((lambda t, c=c: (t, c), 1 - c))        # q fixed
        lines.append((lambda t, c=c: (c, t), 1 - c))        # p fixed
        lines.append((lambda t, c=c: (t, 1 - c - t), 1 - c))  # r fixed
    for curve, length in lines:
        if length <= 0:
            continue
        ts = np.linspace(0.0, length, resolution + 1)
        v = _surface_inner(*curve(ts))
        for i in np.nonzero(v[:-1] * v[1:] < 0)[0]:
            t0 = brentq(lambda t: float(_surface_inner(*curve(t))), ts[i], ts[i + 1], xtol=1e-15)
            p, q = curve(t0)
            p, q = float(min(max(p, 0.0), 1.0)), float(min(max(q, 0.0), 1.0 - p))
            out.append(SurfaceSample(p, q, 1.0 - p - q, 0.0, 0.0))
    return out


def surface_convexify(grid: Iterable[SurfaceSample], anchors: Iterable[SurfaceSample] = (),
                      chunk: int = 512) -> list[SurfaceSample]:
    """Lower convex envelope over the simplex from the lower facets of the 3-D hull of ``(p, q, char)``.

    ``anchors`` join the hull but are not returned. The envelope at a point is
    the largest of the lower-facet planes there.
    """
    grid = list(grid)
    allpts = grid + list(anchors)
    pts = np.array([[s.p, s.q, s.char_value] for s in allpts], float)
    if len(pts) < 3:
        raise InvariantViolation("need at least 3 samples")
    if np.linalg.matrix_rank(pts[:, :2] - pts[0, :2]) < 2:
        raise InvariantViolation("samples are collinear in the (p, q) plane")
    hull = ConvexHull(pts)
    eq = hull.equations
    lower = eq[eq[:, 2] < -1e-9]
    a = -lower[:, 0] / lower[:, 2]
    b = -lower[:, 1] / lower[:, 2]
    c = -lower[:, 3] / lower[:, 2]
    g = pts[: len(grid)]
    env = np.empty(len(grid))
    for k in range(0, len(grid), chunk):
        blk = g[k:k + chunk]
        env[k:k + chunk] = np.max(blk[:, :1] * a + blk[:, 1:2] * b + c, axis=1)
    env = np.clip(np.minimum(env, g[:, 2]), 0.0, None)
    return [SurfaceSample(s.p, s.q, s.r, s.char_value, float(e)) for s, e in zip(grid, env)]


def characteristic_surface(step: float = 1 / 200) -> list[SurfaceSample]:
    """Grid samples of the closed-form surface with their convex envelope (zero curve anchored)."""
    return surface_convexify(surface_samples(step), surface_zero_points(step))
