"""Exact Green fields of killed walks, hand-checkable on a tiny segment.

The interior {0, 1} of the integer line with absorbing neighbours -1 and 2
is small enough to verify everything on paper: the field solves a 2x2
system, the walk exits in two expected steps, and the unit inward flow
through any separating cut is visible edge by edge.
"""

import numpy as np

from awlab import (build_graph, exit_time_exact, flow_through, green_killed,
                   harmonic_residual, hop_ball, lattice_box_graph, level_set,
                   LatticeBox)

g = build_graph([(-1, 0, 1.0), (0, 1, 1.0), (1, 2, 1.0)], root=0,
                frame=[-1, 2])
gf = green_killed(g, [0, 1])

print("segment {0,1} with absorbing ends")
print(f"  G(0) = {gf.value(0):.6f}   (2/3: two expected visits over m=2)")
print(f"  G(1) = {gf.value(1):.6f}   (1/3)")
print(f"  expected exit time = {exit_time_exact(g, gf):.6f}  (gambler's ruin: 2)")
print(f"  harmonicity residual away from the root: {harmonic_residual(g, gf):.2e}")

print("\nunit flow through separating cuts:")
for B in ([0], [1], [0, 1]):
    print(f"  flow through boundary of {B}: {flow_through(g, gf, B):+.6f}")

print("\nlevel sets shrink toward the root as the threshold rises:")
for s in (0.2, 0.4, 0.6):
    members = sorted(level_set(gf, s).members)
    print(f"  s = {s:.1f}: {members}")

# the same machinery at lattice scale
g2 = lattice_box_graph(LatticeBox(2, 10))
ball = hop_ball(g2, 6)
gf2 = green_killed(g2, ball)
print(f"\nplanar box, ball of radius 6 ({len(ball)} vertices):")
print(f"  E(exit time) = {exit_time_exact(g2, gf2):.3f}")
print(f"  solver residual = {gf2.residual:.2e}")
