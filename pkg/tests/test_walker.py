import numpy as np
import pytest

from awlab import (exit_time_exact, green_killed, hop_ball,
                   occupation_truncated, simulate_displacement, simulate_exit,
                   simulate_occupation)
from awlab.errors import ExcessiveTruncation, RootNotInRegion
from awlab.walk import _stepper

from conftest import lattice, random_graph, regular_tree, seg3, z_segment


def test_forced_one_step_exit():
    g = seg3()
    rep = simulate_exit(g, [0], trials=500, horizon=100, seed=1)
    assert rep.mean == 1.0
    assert rep.se == 0.0
    assert rep.truncated == 0


def test_walk_must_start_in_region():
    g = seg3()
    with pytest.raises(RootNotInRegion):
        simulate_exit(g, [1, 2], trials=10, horizon=10, seed=0)


def test_gamblers_ruin_segment():
    g = z_segment(0, 9)
    rep = simulate_exit(g, list(range(10)), trials=20000, horizon=10 ** 5,
                        seed=7)
    assert abs(rep.mean - 10.0) <= 4.0 * rep.se


def test_exit_matches_exact_on_lattice_ball():
    g = lattice(2, 7)
    A = hop_ball(g, 5)
    exact = exit_time_exact(g, green_killed(g, A))
    rep = simulate_exit(g, A, trials=20000, horizon=10 ** 5, seed=3)
    assert abs(rep.mean - exact) <= 4.0 * rep.se


def test_exit_deterministic():
    g = lattice(2, 5)
    A = hop_ball(g, 3)
    r1 = simulate_exit(g, A, trials=5000, horizon=10 ** 4, seed=11)
    r2 = simulate_exit(g, A, trials=5000, horizon=10 ** 4, seed=11)
    assert r1 == r2


def test_excessive_truncation_raises():
    g = lattice(2, 10)
    A = g.non_frame_ids().tolist()
    with pytest.raises(ExcessiveTruncation):
        simulate_exit(g, A, trials=300, horizon=3, seed=2)


def test_occupation_equals_exit_when_region_is_interior():
    g = z_segment(0, 9)
    A = list(range(10))
    occ = simulate_occupation(g, A, trials=20000, horizon=10 ** 5, seed=5)
    ext = simulate_exit(g, A, trials=20000, horizon=10 ** 5, seed=5)
    assert abs(occ.mean - ext.mean) <= 4.0 * (occ.se + ext.se)


def test_occupation_matches_truncated_green_z3():
    def family(R):
        return lattice(3, R)
    g = family(9)
    ball = hop_ball(g, 2)
    converged = occupation_truncated(family, sorted(ball.members), [9])[0][1]
    rep = simulate_occupation(g, ball, trials=20000, horizon=10 ** 5, seed=13)
    assert abs(rep.mean - converged) <= 4.0 * rep.se


def test_single_trial_reproducible():
    g = lattice(2, 5)
    A = hop_ball(g, 3)
    r1 = simulate_exit(g, A, trials=1, horizon=10 ** 4, seed=9)
    r2 = simulate_exit(g, A, trials=1, horizon=10 ** 4, seed=9)
    assert r1.mean == r2.mean and r1.se == 0.0


def test_step_law_chi_square():
    g = random_graph(np.random.default_rng(4), n=8)
    cum, nxt = _stepper(g)
    p = g.pos(g.root)
    rng = np.random.default_rng(123)
    n_steps = 10 ** 6
    u = rng.random(n_steps)
    rows = cum[np.full(n_steps, p)]
    k = (rows <= u[:, None]).sum(axis=1)
    landed = nxt[p, k]
    lo, hi = g.indptr[p], g.indptr[p + 1]
    for q, w in zip(g.nbr[lo:hi], g.wts[lo:hi]):
        prob = w / g.m[p]
        observed = int((landed == q).sum())
        sigma = np.sqrt(n_steps * prob * (1 - prob))
        assert abs(observed - n_steps * prob) <= 4.0 * sigma


def test_displacement_zero_steps():
    g = lattice(2, 4)
    samples = simulate_displacement(g, steps=0, trials=25, seed=1)
    assert np.all(samples == 0.0)


def test_displacement_equals_literal_formula_without_absorption():
    # tiny step count on a big box: no trial reaches the frame, so each
    # sample is exactly d(root, X_steps)/steps
    g = lattice(2, 12)
    from awlab import hop_distances_from
    samples = simulate_displacement(g, steps=4, trials=400, seed=21)
    assert np.all(samples <= 1.0)
    assert np.all(samples * 4 == np.round(samples * 4))


def test_displacement_tree_speed_vs_projection_oracle():
    depth = 8
    g = regular_tree(depth)
    samples = simulate_displacement(g, steps=2000, trials=400, seed=17)
    # depth process: birth-death chain, up 2/3 except forced up at the root;
    # the pooled normalisation makes the sample mean estimate D / E[tau]
    D = depth + 1
    P = np.zeros((D + 1, D + 1))
    P[0, 1] = 1.0
    for k in range(1, D):
        P[k, k + 1] = 2 / 3
        P[k, k - 1] = 1 / 3
    dist = np.zeros(D + 1)
    dist[0] = 1.0
    e_tau = 0.0
    for t in range(1, 20000):
        dist = dist @ P
        e_tau += dist[D] * t
        dist[D] = 0.0
    oracle = D / e_tau
    assert abs(samples.mean() - oracle) <= 0.05
    assert 0.28 <= samples.mean() <= 0.42


def test_displacement_diffusive_on_z2():
    g = lattice(2, 15)
    samples = simulate_displacement(g, steps=2000, trials=300, seed=19)
    assert samples.mean() <= 0.1


def test_displacement_deterministic():
    g = lattice(2, 8)
    s1 = simulate_displacement(g, steps=200, trials=100, seed=23)
    s2 = simulate_displacement(g, steps=200, trials=100, seed=23)
    assert np.array_equal(s1, s2)


def test_report_json():
    g = seg3()
    rep = simulate_exit(g, [0], trials=10, horizon=5, seed=1)
    payload = rep.to_json()
    assert payload == {"mean": 1.0, "se": 0.0, "trials": 10, "truncated": 0,
                       "horizon": 5, "seed": 1}
