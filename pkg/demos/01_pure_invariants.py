"""Three-tangle of a few pure states, and its behaviour under local operations."""

import numpy as np

from roofscale import ghzw as gw
from roofscale.invariants import SQRT_TAU3, TAU3, evaluate_normalized, three_tangle
from roofscale.localops import apply_pure, random_local_operator
from roofscale.qstate import random_pure_state

rng = np.random.default_rng(0)

print("GHZ tau3 =", evaluate_normalized(TAU3, gw.ghz_state()))
print("W   tau3 =", evaluate_normalized(TAU3, gw.w_state()))
psi = random_pure_state((2, 2, 2), rng)
tb = three_tangle(psi)
print(f"random state tau3 = {tb.value:.6f} from d1={tb.d1:.4f}, d2={tb.d2:.4f}, d3={tb.d3:.4f}")

# an invertible local operation rescales tau by the squared norm of the image
A = random_local_operator((2, 2, 2), rng)
res = apply_pure(A, psi)
print(f"tau(A psi / |A psi|) * |A psi|^2 = {evaluate_normalized(SQRT_TAU3, res.state) * res.factor ** 2:.12f}")
print(f"tau(psi)                        = {evaluate_normalized(SQRT_TAU3, psi):.12f}")
