"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from awlab import (LatticeBox, ProfileFunction, as_region, bound_exit,
                   bound_occupation, check_edu, cis_levelsets,
                   closed_form_bound, exit_time_exact, factor_two_check,
                   flow_through, green_killed, harmonic_residual, hop_ball,
                   integral_u, lattice_box_graph, numeric_bound_curve,
                   occupation_truncated, profile_u, simulate_displacement,
                   simulate_exit, solve_bound_curve, transience_diagnostic)
from awlab.environments import (EnvironmentLaw, environment_graph,
                                percolation_cluster, sample_environment)
from awlab.experiments import ExperimentConfig, run_scaling
from awlab.green import level_sweep

from conftest import (lattice, oracle_exit_time, random_graph, regular_tree,
                      z_segment)

F2 = ProfileFunction.power(2)


def _solve(g, A=None, tol=1e-10):
    A = g.non_frame_ids().tolist() if A is None else A
    return green_killed(g, A, tol=tol)


@pytest.fixture(scope="session")
def random_corpus():
    """50 random weighted graphs (5..100 vertices) with solved interiors."""
    master = np.random.default_rng(1234)
    out = []
    for k in range(50):
        n = int(master.integers(5, 101))
        g = random_graph(np.random.default_rng((99, k)), n=n,
                         extra=int(master.integers(3, 25)))
        A = g.non_frame_ids().tolist()
        out.append((f"random-{k}", g, _solve(g, A)))
    return out


@pytest.fixture(scope="session")
def lattice_corpus():
    """20 lattice regions: balls on boxes of dimension 1, 2 and 3."""
    out = []
    g2 = lattice(2, 11)
    for r in range(1, 11):
        out.append((f"z2-ball-{r}", g2, _solve(g2, hop_ball(g2, r))))
    g3 = lattice(3, 6)
    for r in range(1, 6):
        out.append((f"z3-ball-{r}", g3, _solve(g3, hop_ball(g3, r))))
    for k in (2, 4, 6, 8, 10):
        g1 = z_segment(0, k)
        out.append((f"z1-seg-{k}", g1, _solve(g1, list(range(k + 1)))))
    return out


@pytest.fixture(scope="session")
def edu_corpus(random_corpus):
    """Criterion-5 corpus: random graphs, Z2 box, environment, percolation."""
    out = [(name, g, gf) for name, g, gf in random_corpus[:12]]
    g = lattice(2, 12)                                     # side 25
    out.append(("z2-side25", g, _solve(g)))
    box = LatticeBox(2, 12)
    g = environment_graph(
        sample_environment(EnvironmentLaw.uniform01(), box, 2026), box)
    out.append(("env-side25", g, _solve(g)))
    box = LatticeBox(2, 15)                                # side 31
    g = percolation_cluster(
        sample_environment(EnvironmentLaw.bernoulli(0.7), box, 8), box)
    assert len(g.frame_ids) > 0          # cluster touches the shell
    out.append(("perc-side31", g, _solve(g)))
    return out


@pytest.fixture(scope="session")
def z3_family():
    """Occupation values of the radius-2 ball over growing boxes, plus the
    largest box's field for occupation-bound certificates."""
    def family(R):
        return lattice(3, R)
    g0 = family(6)
    ball = hop_ball(g0, 2)
    radii = [6, 8, 10, 12, 13, 14]
    values = occupation_truncated(family, sorted(ball.members), radii)
    g14 = family(14)
    gf14 = _solve(g14)
    return {"ball": sorted(ball.members), "values": values,
            "g14": g14, "gf14": gf14}


def test_criterion_01_green_oracle_equivalence(random_corpus, lattice_corpus):
    t0 = time.monotonic()
    checked = 0
    for name, g, gf in random_corpus + lattice_corpus:
        members = sorted(gf.region.members)
        fresh = green_killed(g, members)
        exact = exit_time_exact(g, fresh)
        oracle = oracle_exit_time(g, members)
        assert exact == pytest.approx(oracle, rel=1e-9), name
        checked += 1
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    print(f"\nACCEPTANCE 1: PASS - exit time matches the fundamental-matrix "
          f"oracle to 1e-9 on {checked} instances in {elapsed:.2f}s")


def test_criterion_02_flow_identity(random_corpus, lattice_corpus):
    rng = np.random.default_rng(555)
    worst_flow = 0.0
    worst_harm = 0.0
    for name, g, gf in random_corpus + lattice_corpus:
        members = sorted(gf.region.members)
        for _ in range(100):
            k = int(rng.integers(1, len(members) + 1))
            B = list(rng.choice(members, size=k, replace=False))
            expect = 1.0 if g.root in B else 0.0
            err = abs(flow_through(g, gf, B) - expect)
            worst_flow = max(worst_flow, err)
            assert err <= 1e-8, name
        harm = harmonic_residual(g, gf)
        worst_harm = max(worst_harm, harm)
        assert harm <= 1e-9, name
    print(f"\nACCEPTANCE 2: PASS - flow identity within {worst_flow:.2e}, "
          f"harmonic residual within {worst_harm:.2e}")


def test_criterion_03_level_set_structure(random_corpus, lattice_corpus,
                                          edu_corpus):
    total_levels = 0
    instances = 0
    for name, g, gf in random_corpus + lattice_corpus + edu_corpus:
        root_pos = g.pos(g.root)
        first = True
        for s, new_pos, _, _, ncomp in level_sweep(g, gf):
            assert ncomp == 1, name
            if first:
                assert root_pos in set(int(p) for p in new_pos), name
                first = False
            total_levels += 1
        instances += 1
    print(f"\nACCEPTANCE 3: PASS - {total_levels} level sets over "
          f"{instances} instances, all connected and rooted")


def test_criterion_04_profile_identities(random_corpus, lattice_corpus):
    for name, g, gf in random_corpus + lattice_corpus:
        lp = profile_u(g, gf)
        mass = gf.region.measure
        assert abs(lp.mass - mass) <= 1e-12 * mass, name
        integral, closed = integral_u(lp)
        assert integral == pytest.approx(closed, rel=1e-10), name
        assert factor_two_check(g, gf, lp).ok, name
    print("\nACCEPTANCE 4: PASS - u(0)=m(A) to 1e-12, integral identity to "
          "1e-10, factor-two inequality everywhere")


def test_criterion_05_differential_inequation(edu_corpus):
    checked = 0
    for name, g, gf in edu_corpus:
        F = F2.with_floor(g.measure(g.root))
        lp = profile_u(g, gf)
        iso = cis_levelsets(g, gf, F)
        report = check_edu(lp, F, iso.constant)
        assert report.violations == (), name
        checked += report.checked
    # the linear family must work the same way
    name, g, gf = edu_corpus[0]
    F = ProfileFunction.linear(floor=g.measure(g.root))
    iso = cis_levelsets(g, gf, F)
    assert check_edu(profile_u(g, gf), F, iso.constant).violations == ()
    print(f"\nACCEPTANCE 5: PASS - zero differential-inequality violations "
          f"at {checked} breakpoints with the level-set constant")


def test_criterion_06_bound_chain(random_corpus, lattice_corpus, edu_corpus,
                                  z3_family):
    for name, g, gf in random_corpus + lattice_corpus + edu_corpus:
        F = F2.with_floor(g.measure(g.root))
        iso = cis_levelsets(g, gf, F)
        curve = solve_bound_curve(F, iso.constant, gf.region.measure)
        exact = exit_time_exact(g, gf)
        bnd = bound_exit(curve)
        assert exact <= bnd * (1 + 1e-9), name
    # transient side: converged occupation against the clamped-curve bound
    g14, gf14 = z3_family["g14"], z3_family["gf14"]
    F3 = ProfileFunction.power(3, floor=g14.measure(g14.root))
    iso = cis_levelsets(g14, gf14, F3)
    ball_mass = as_region(g14, z3_family["ball"]).measure
    occ_bound = bound_occupation(solve_bound_curve(F3, iso.constant, None),
                                 ball_mass)
    occ_value = z3_family["values"][-1][1]
    assert occ_value <= occ_bound * (1 + 1e-9)
    # closed forms against the numeric integrator
    closed = solve_bound_curve(ProfileFunction.power(3, floor=1e-9), 0.5, 100.0)
    numeric = numeric_bound_curve(ProfileFunction.power(3), 0.5, 100.0,
                                  floored=False, s_max=40.0)
    grid = np.linspace(0.0, 40.0, 201)
    vc = np.asarray(closed.value(grid))
    vn = np.asarray(numeric.value(grid))
    assert np.max(np.abs(vn - vc) / vc) <= 1e-6
    print(f"\nACCEPTANCE 6: PASS - exit bounds dominate everywhere; "
          f"occupation {occ_value:.3f} <= bound {occ_bound:.3f}; "
          f"closed/numeric curves agree to 1e-6")


def test_criterion_07_closed_form_constants():
    t0 = time.monotonic()
    for d in (2.0, 2.5, 3.0, 4.0):
        for C in (0.3, 1.0, 2.0):
            for mA in (1.5, 20.0, 500.0):
                F = ProfileFunction.power(d, floor=1.0)
                got = bound_exit(solve_bound_curve(F, C, mA))
                want = d / C ** 2 * mA ** (2.0 / d)
                assert got == pytest.approx(want, rel=1e-9)
                assert closed_form_bound("exit", "power", d, C, mA, 1.0) == \
                    pytest.approx(want, rel=1e-12)
    for C in (0.5, 1.0):
        for ratio in (1.0, math.e, 50.0):
            mo = 2.0
            F = ProfileFunction.linear(floor=mo)
            got = bound_exit(solve_bound_curve(F, C, ratio * mo))
            want = (1.0 + 2.0 * math.log(ratio)) / C ** 2
            assert got == pytest.approx(want, rel=1e-9)
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    print(f"\nACCEPTANCE 7: PASS - power and linear bound constants match "
          f"the closed forms to 1e-9 in {elapsed:.3f}s")


def test_criterion_08_scaling_laws():
    t0 = time.monotonic()
    z2 = run_scaling(ExperimentConfig(source="lattice", d=2, n=12,
                                      radii=tuple(range(2, 11))))
    assert 0.85 <= z2["slope"] <= 1.15
    z3 = run_scaling(ExperimentConfig(source="lattice", d=3, n=14,
                                      radii=tuple(range(2, 7))))
    assert z3["mode"] == "occupation"
    assert 2 / 3 - 0.15 <= z3["slope"] <= 2 / 3 + 0.15
    env2, env3 = [], []
    for seed in (1, 2, 3):
        r = run_scaling(ExperimentConfig(source="environment", d=2, n=12,
                                         law="uniform01", env_seed=seed,
                                         radii=tuple(range(2, 11))))
        env2.append(r["slope"])
        assert 1.0 - 0.2 <= r["slope"] <= 1.0 + 0.2
        r = run_scaling(ExperimentConfig(source="environment", d=3, n=14,
                                         law="uniform01", env_seed=seed,
                                         radii=tuple(range(2, 7))))
        env3.append(r["slope"])
        assert 2 / 3 - 0.2 <= r["slope"] <= 2 / 3 + 0.2
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0
    print(f"\nACCEPTANCE 8: PASS - slopes z2={z2['slope']:.3f} "
          f"z3={z3['slope']:.3f} env2={[round(s, 3) for s in env2]} "
          f"env3={[round(s, 3) for s in env3]} in {elapsed:.1f}s")


def test_criterion_09_transience_dichotomy(z3_family):
    seq = [v for _, v in z3_family["values"]]
    assert all(a <= b for a, b in zip(seq, seq[1:]))
    increments = [(b - a) / b for a, b in zip(seq, seq[1:])]
    assert increments[-1] < 0.01
    vals2 = occupation_truncated(lambda R: lattice(2, R),
                                 sorted(hop_ball(lattice(2, 5), 2).members),
                                 [5, 10, 20])
    seq2 = [v for _, v in vals2]
    inc2 = [(b - a) / b for a, b in zip(seq2, seq2[1:])]
    assert min(inc2) > 0.10
    for F, finite_expected in [
        (ProfileFunction.power(2), False),
        (ProfileFunction.power(2.5), True),
        (ProfileFunction.power(3), True),
        (ProfileFunction.power(5), True),
        (ProfileFunction.linear(), True),
    ]:
        finite, t0 = transience_diagnostic(F, 1.0, 0.5)
        assert finite is finite_expected
        assert (t0 is not None and t0 > 0) if finite_expected else t0 is None
    print(f"\nACCEPTANCE 9: PASS - d=3 increments fall to "
          f"{increments[-1]*100:.2f}% by R=14, d=2 increments stay above "
          f"{min(inc2)*100:.1f}%, diagnostic matches summability exactly")


def test_criterion_10_monte_carlo_concordance():
    t0 = time.monotonic()
    instances = []
    for k in (5, 10, 15):
        g = z_segment(0, k - 1)
        instances.append((f"segment-{k}", g, list(range(k))))
    g2 = lattice(2, 7)
    for r in (3, 4, 5):
        instances.append((f"z2-ball-{r}", g2, hop_ball(g2, r)))
    for k, n in ((0, 30), (1, 60)):
        g = random_graph(np.random.default_rng((7, k)), n=n)
        instances.append((f"random-{n}", g, g.non_frame_ids().tolist()))
    box = LatticeBox(2, 7)
    ge = environment_graph(
        sample_environment(EnvironmentLaw.uniform01(), box, 4), box)
    for r in (3, 4):
        instances.append((f"env-ball-{r}", ge, hop_ball(ge, r)))
    assert len(instances) == 10
    for i, (name, g, A) in enumerate(instances):
        gf = green_killed(g, A)
        exact = exit_time_exact(g, gf)
        rep = simulate_exit(g, A, trials=10 ** 5, horizon=10 ** 6, seed=40 + i)
        assert abs(rep.mean - exact) <= 4.0 * rep.se, name
    tree = regular_tree(14)
    samples = simulate_displacement(tree, steps=2000, trials=200, seed=77)
    speed = float(samples.mean())
    assert 0.28 <= speed <= 0.38
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    print(f"\nACCEPTANCE 10: PASS - 10 exit estimates within 4 SE; tree "
          f"speed {speed:.3f} in [0.28, 0.38]; {elapsed:.1f}s")


def test_criterion_11_thread_determinism(tmp_path):
    out = tmp_path / "out"
    args = [sys.executable, "-m", "awlab.cli", "verify-bounds",
            "--env", "law=uniform01,d=2,n=5", "--seed", "3",
            "--region", "ball:1..3", "--F", "power:2", "--out", str(out)]
    snapshots = {}
    for threads in ("1", "2", "8"):
        env = dict(os.environ)
        env["AWLAB_THREADS"] = threads
        proc = subprocess.run(args, capture_output=True, text=True, env=env,
                              cwd="/root/pkg")
        assert proc.returncode == 0, proc.stderr
        snapshots[threads] = {p.name: p.read_bytes()
                              for p in sorted(out.iterdir())}
    assert snapshots["1"] == snapshots["2"] == snapshots["8"]
    print("\nACCEPTANCE 11: PASS - byte-identical outputs under 1, 2 and 8 "
          "worker threads")
