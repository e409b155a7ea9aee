"""Solving a whole family of GHZ/W mixtures from the standard one by a diagonal local operation."""

from roofscale import ghzw as gw
from roofscale.convexroof import convex_roof
from roofscale.invariants import SQRT_TAU3

fam = gw.GhzwFamily.s2sqrt2()
print(f"p0 of this family: {gw.p_zero(fam):.10f}")
print(" p      p'        T         rescaled    optimizer")
for p in (0.5, 2 / 3, 0.8, 0.95):
    pp, T = gw.p_prime_from_p(fam, p), gw.trace_factor(fam, p)
    direct = convex_roof(SQRT_TAU3, gw.mixture_state(fam, p)).value
    print(f"{p:.3f}  {pp:.6f}  {T:.6f}  {gw.roof_via_rescaling(fam, p):.8f}  {direct:.8f}")
