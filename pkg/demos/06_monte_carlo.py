"""Seeded walks against the exact identities.

Exit-time estimates land within a few standard errors of the linear-solve
values, and displacement samples separate ballistic escape on a regular
tree (speed 1/3) from diffusive spreading on the planar lattice.
"""

import numpy as np

from awlab import (build_graph, exit_time_exact, green_killed, hop_ball,
                   lattice_box_graph, LatticeBox, simulate_displacement,
                   simulate_exit, simulate_occupation)


def tree(depth, branching=2):
    edges, frame, layer, nxt = [], [], [0], 1
    for d in range(1, depth + 2):
        new = []
        for parent in layer:
            for _ in range(branching + 1 if parent == 0 else branching):
                edges.append((parent, nxt, 1.0))
                if d == depth + 1:
                    frame.append(nxt)
                new.append(nxt)
                nxt += 1
        layer = new
    return build_graph(edges, root=0, frame=frame)


g = lattice_box_graph(LatticeBox(2, 9))
ball = hop_ball(g, 6)
gf = green_killed(g, ball)
exact = exit_time_exact(g, gf)
rep = simulate_exit(g, ball, trials=40000, horizon=10 ** 5, seed=11)
print(f"planar ball of radius 6: exact E(exit) = {exact:.3f}")
print(f"  Monte Carlo {rep.mean:.3f} +- {rep.se:.3f} "
      f"({abs(rep.mean - exact) / rep.se:.1f} standard errors off)")

occ = simulate_occupation(g, ball, trials=20000, horizon=10 ** 5, seed=12)
print(f"  occupation of the ball until box exit: {occ.mean:.3f} +- {occ.se:.3f}")

t = tree(14)
samples = simulate_displacement(t, steps=2000, trials=200, seed=17)
print(f"\ndegree-3 tree, depth 14: displacement speed {samples.mean():.3f}"
      f" (escape at speed 1/3)")

g2 = lattice_box_graph(LatticeBox(2, 15))
samples2 = simulate_displacement(g2, steps=2000, trials=200, seed=18)
print(f"side-31 planar box: displacement speed {samples2.mean():.3f}"
      f" (diffusive, near zero)")
