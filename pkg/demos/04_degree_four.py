"""Why the trick fails for the tangle itself (degree 4): the tangency point does not transform naively."""

import numpy as np

from roofscale import ghzw as gw

samples = gw.curve_samples(gw.GhzwFamily.standard(), 1e-4, "tau3")
x = np.array([s.p for s in samples])
y = np.array([s.char_value for s in samples])
h = gw.lower_hull_1d(x, y)
print(f"hull vertex before p=1: {x[h[-2]]:.5f}   tangency by bisection: {gw.tangency_point():.10f}")
print(f"last segment slope: {(y[h[-1]] - y[h[-2]]) / (x[h[-1]] - x[h[-2]]):.8f}  "
      f"expected {gw.SLOPE_STANDARD:.8f}")

print("\n x      |s|     naive p1   true p1")
for c in np.linspace(0.2, 1 / np.sqrt(3), 5):
    fam = gw.GhzwFamily(1 / np.sqrt(2), 1 / np.sqrt(2), c, c, np.sqrt(1 - 2 * c * c))
    s = abs(gw.s_parameter(fam))
    print(f"{c:.3f}  {s:.4f}  {gw.naive_p1(s):.6f}  {gw.tangency_point(fam):.6f}")
