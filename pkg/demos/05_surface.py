"""Rank-3 mixtures of GHZ, W and flipped W: the characteristic surface and its convex envelope."""

from roofscale import ghzw as gw

surf = gw.characteristic_surface(1 / 50)
zeros = gw.surface_zero_points(1 / 50)
print(f"{len(surf)} grid points, {len(zeros)} exact zero anchors")
print(f"zero on the q=0 edge at p = {min(z.p for z in zeros if z.q == 0):.10f}")
for p, q in ((0.9, 0.05), (0.7, 0.2), (0.5, 0.3), (0.2, 0.4)):
    s = min(surf, key=lambda s: (s.p - p) ** 2 + (s.q - q) ** 2)
    print(f"p={s.p:.2f} q={s.q:.2f}: surface {s.char_value:.5f}  envelope {s.convex_value:.5f}")
