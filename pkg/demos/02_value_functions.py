"""Closed-form value functions for each strategy family.

Evaluates V, V' and V'' for a hybrid strategy, a liquidation window, and
the periodic-zero strategy, and shows the structural facts the solver
relies on: V(0) = 0, continuity at barriers, slope beta beyond the upper
barrier, and the curvature kink at b.
"""

import numpy as np

from divopt import (
    Hybrid,
    Liquidation,
    ModelParams,
    PeriodicZero,
    ValueFunction,
    solve_roots,
)

pos = ModelParams(mu=1.0, sigma=0.3, chi=0.01, beta=0.9, gamma=1.0, delta=0.15)
rp = solve_roots(pos)
hybrid = Hybrid(a_p=0.30, a_c=0.40, b=1.35)
vf = ValueFunction(pos, rp, hybrid)

print("hybrid", hybrid)
xs = np.array([0.0, 0.15, 0.30, 0.40, 0.9, 1.35, 2.0])
print("  x        V          V'         V''")
for x in xs:
    print(f"{x:5.2f} {float(vf(x)):10.5f} {float(vf.d1(x)):10.5f} {float(vf.d2(x)):10.5f}")
print(f"V(0) = {vf(0.0)}  (ruin state)")
print(f"V(b + 1) - V(b) = {vf(hybrid.b + 1) - vf(hybrid.b):.6f}  (slope beta = {pos.beta})")
print(f"curvature kink at b: V''(b-) = {float(vf.d2(hybrid.b, side='left')):.5f}, "
      f"V''(b+) = {float(vf.d2(hybrid.b, side='right')):.5f}")

neg = ModelParams(mu=-1.0, sigma=0.3, chi=0.15, beta=0.7, gamma=1.0, delta=0.15)
rn = solve_roots(neg)
pz = ValueFunction(neg, rn, PeriodicZero())
print("\nperiodic-zero value under negative drift:")
for x in (0.0, 0.5, 2.0, 10.0):
    print(f"  V({x:4.1f}) = {float(pz(x)):8.5f}   V'({x:4.1f}) = {float(pz.d1(x)):.5f}")
print(f"  slope approaches gamma/(gamma+delta) = {neg.pvfactor:.5f}")

liq = Liquidation(b1=0.32, b2=2.66)
vl = ValueFunction(neg, rn, liq)
print(f"\nliquidation window {liq}: inside it V(x) = beta x - chi")
for bp in (liq.b1, liq.b2):
    print(f"  continuity at {bp}: |V- - V+| = "
          f"{abs(float(vl(bp - 1e-10)) - float(vl(bp + 1e-10))):.2e}")
