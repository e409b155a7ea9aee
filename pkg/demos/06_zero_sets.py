"""Deciding whether a rank-2 roof vanishes, and checking that local operations preserve the answer."""

import numpy as np

from roofscale import ghzw as gw
from roofscale.convexroof import zero_class
from roofscale.invariants import SQRT_TAU3, TAU3
from roofscale.localops import apply_mixed, random_diagonal_ilo
from roofscale.qstate import random_mixed_state

rng = np.random.default_rng(3)
# two generic states, then two GHZ/W mixtures below their zero boundary
states = [random_mixed_state((2, 2, 2), 2, rng) for _ in range(2)]
states += [gw.mixture_state(gw.GhzwFamily.s2sqrt2(), 0.6), gw.mixture_state(gw.GhzwFamily.standard(), 0.55)]
for k, rho in enumerate(states):
    moved = apply_mixed(random_diagonal_ilo(3, rng), rho).state
    row = [f"{m.name}: {zero_class(m, rho).value}/{zero_class(m, moved).value}" for m in (SQRT_TAU3, TAU3)]
    print(f"state {k}:", "   ".join(row))
