"""Occupation-time convergence as a transience diagnostic.

The truncated occupation of a fixed ball over growing boxes is exactly
nondecreasing; it converges when the walk is transient (d = 3) and diverges
logarithmically when it is recurrent (d = 2), linearly in one dimension.
Independently, summability of 1/F^2 certifies a uniform horizon t0 past
which every profile has dropped below the smallest vertex measure, which
caps the Green function and proves transience for the family.
"""

from awlab import (LatticeBox, ProfileFunction, hop_ball, lattice_box_graph,
                   occupation_truncated, transience_diagnostic)


def show(d, radii):
    def family(R):
        return lattice_box_graph(LatticeBox(d, R))
    ball = hop_ball(family(radii[0]), 2)
    values = occupation_truncated(family, sorted(ball.members), radii)
    print(f"d = {d}, ball of radius 2:")
    prev = None
    for R, v in values:
        inc = "" if prev is None else f"   (+{(v - prev) / v * 100:.2f}%)"
        print(f"  R = {R:2d}: {v:10.4f}{inc}")
        prev = v


show(1, [4, 8, 16])
show(2, [5, 10, 20])
show(3, [6, 8, 10, 12, 14])

print("\nsummability of 1/F^2 and the certified horizon t0:")
for label, F in [("x^(1/2)", ProfileFunction.power(2)),
                 ("x^(2/3)", ProfileFunction.power(3)),
                 ("x      ", ProfileFunction.linear())]:
    finite, t0 = transience_diagnostic(F, C=1.0, inf_m=1.0)
    verdict = f"finite, t0 = {t0:.2f}" if finite else "divergent tail"
    print(f"  F(x) = {label}: {verdict}")
