"""Numerical convex roof: two-qubit concurrence against the known closed form, then a GHZ/W mixture."""

import time

import numpy as np

from roofscale import ghzw as gw
from roofscale.convexroof import convex_roof, spectral_value
from roofscale.invariants import CONCURRENCE, SQRT_TAU3, wootters_concurrence
from roofscale.qstate import random_mixed_state

rng = np.random.default_rng(1)
for _ in range(3):
    rho = random_mixed_state((2, 2), 2, rng)
    t = time.perf_counter()
    res = convex_roof(CONCURRENCE, rho)
    print(f"roof {res.value:.10f}  closed form {wootters_concurrence(rho):.10f}  "
          f"spectral bound {spectral_value(CONCURRENCE, rho):.4f}  ({time.perf_counter() - t:.2f}s)")

std = gw.GhzwFamily.standard()
for p in (0.5, gw.P0_STANDARD, 0.9):
    res = convex_roof(SQRT_TAU3, gw.mixture_state(std, p))
    print(f"GHZ/W p={p:.4f}: roof {res.value:.8f}  closed form {gw.convex_char_curve(std, p):.8f}  "
          f"members {len(res.decomposition)}")
