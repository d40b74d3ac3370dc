import numpy as np
import pytest

from awlab import (LatticeBox, as_region, check_level_sets, exit_time_exact,
                   flow_through, green_killed, harmonic_residual,
                   lattice_box_graph, level_set, occupation_truncated,
                   write_green_csv)
from awlab.errors import NoExit, NotConnected, RootNotInRegion

from conftest import (lattice, oracle_exit_time, oracle_green, random_graph,
                      seg3, z_segment)


@pytest.fixture(scope="module")
def seg_field():
    g = seg3()
    return g, green_killed(g, [0, 1])


def test_single_vertex_green():
    g = seg3()
    gf = green_killed(g, [0])
    assert gf.value(0) == pytest.approx(0.5, rel=1e-12)


def test_two_vertex_green_values(seg_field):
    g, gf = seg_field
    assert gf.value(0) == pytest.approx(2 / 3, rel=1e-12)
    assert gf.value(1) == pytest.approx(1 / 3, rel=1e-12)
    # matches the dense visit-count oracle
    oracle = oracle_green(g, [0, 1])
    assert gf.value(0) == pytest.approx(oracle[0], rel=1e-12)
    assert gf.value(1) == pytest.approx(oracle[1], rel=1e-12)


def test_no_exit_without_frame():
    g = lattice_like = None
    from awlab import build_graph
    g = build_graph([(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], root=0)
    with pytest.raises(NoExit):
        green_killed(g, [0, 1, 2])


def test_region_must_be_connected_and_rooted():
    g = z_segment(-3, 3)
    with pytest.raises(NotConnected):
        green_killed(g, [-2, 0, 2])
    with pytest.raises(RootNotInRegion):
        green_killed(g, [1, 2])


def test_harmonic_residual_exact_on_seg(seg_field):
    g, gf = seg_field
    assert harmonic_residual(g, gf) <= 1e-14


def test_harmonic_residual_small_on_random(rng):
    for _ in range(5):
        g = random_graph(rng, n=10)
        gf = green_killed(g, g.non_frame_ids().tolist())
        assert harmonic_residual(g, gf) <= 1e-10


def test_harmonic_residual_single_vertex():
    g = seg3()
    gf = green_killed(g, [0])
    assert harmonic_residual(g, gf) == 0.0


def test_flow_examples(seg_field):
    g, gf = seg_field
    assert flow_through(g, gf, [0]) == pytest.approx(1.0, abs=1e-12)
    assert flow_through(g, gf, [1]) == pytest.approx(0.0, abs=1e-12)
    assert flow_through(g, gf, [0, 1]) == pytest.approx(1.0, abs=1e-12)


def test_flow_identity_random_subsets(rng):
    g = random_graph(rng, n=24)
    A = g.non_frame_ids().tolist()
    gf = green_killed(g, A)
    members = sorted(gf.region.members)
    for _ in range(60):
        k = int(rng.integers(1, len(members) + 1))
        B = list(rng.choice(members, size=k, replace=False))
        expect = 1.0 if g.root in B else 0.0
        assert flow_through(g, gf, B) == pytest.approx(expect, abs=1e-8)


def test_flow_requires_subset(seg_field):
    g, gf = seg_field
    with pytest.raises(ValueError):
        flow_through(g, gf, [0, 1, 2])


def test_level_set_examples(seg_field):
    g, gf = seg_field
    assert level_set(gf, 0.5).members == {0}
    assert g.root in level_set(gf, gf.root_value).members
    assert level_set(gf, gf.root_value + 0.1).members == frozenset()


def test_level_sets_connected_on_symmetric_lattice():
    g = lattice(2, 5)
    gf = green_killed(g, g.non_frame_ids().tolist())
    count = check_level_sets(g, gf)
    assert count >= 1
    # ties from the lattice symmetry must not split a level set
    for s in np.linspace(1e-6, gf.root_value, 37):
        region = level_set(gf, float(s))
        assert region.connected and g.root in region.members


def test_max_principle(rng):
    # the max is attained at the root (ties possible, e.g. a leaf whose only
    # neighbour is the root carries exactly the root value)
    for _ in range(5):
        g = random_graph(rng, n=18)
        gf = green_killed(g, g.non_frame_ids().tolist())
        assert gf.root_value >= gf.values.max() - 1e-12 * gf.root_value


def test_exit_time_examples(seg_field):
    g, gf = seg_field
    assert exit_time_exact(g, green_killed(g, [0])) == pytest.approx(1.0, rel=1e-12)
    assert exit_time_exact(g, gf) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_exit_time_gamblers_ruin(n):
    # interior {0..n-1} of the integer line, absorbing at -1 and n
    g = z_segment(0, n - 1)
    gf = green_killed(g, list(range(n)))
    assert exit_time_exact(g, gf) == pytest.approx(float(n), rel=1e-10)
    assert exit_time_exact(g, gf) == pytest.approx(
        oracle_exit_time(g, list(range(n))), rel=1e-12)


def test_exit_time_matches_oracle_random(rng):
    for _ in range(8):
        g = random_graph(rng, n=int(rng.integers(6, 40)))
        A = g.non_frame_ids().tolist()
        gf = green_killed(g, A)
        assert exit_time_exact(g, gf) == pytest.approx(
            oracle_exit_time(g, A), rel=1e-9)


def test_occupation_truncated_monotone_z3():
    def family(R):
        return lattice(3, R)
    g0 = family(4)
    from awlab import hop_ball
    A = sorted(hop_ball(g0, 2).members)
    vals = occupation_truncated(family, A, [4, 6, 8])
    seq = [v for _, v in vals]
    assert seq[0] <= seq[1] <= seq[2]
    rel = [(b - a) / b for a, b in zip(seq, seq[1:])]
    assert rel[1] < rel[0]


def test_occupation_truncated_linear_growth_1d():
    def family(R):
        return z_segment(-R, R)
    vals = occupation_truncated(family, [0], [3, 5, 9])
    for R, v in vals:
        assert v == pytest.approx(R + 1.0, rel=1e-10)


def test_occupation_truncated_empty():
    def family(R):
        return lattice(2, R)
    assert occupation_truncated(family, [], [3, 4]) == [(3, 0.0), (4, 0.0)]


def test_green_csv_dump(tmp_path, seg_field):
    g, gf = seg_field
    path = tmp_path / "green.csv"
    write_green_csv(gf, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# region")
    assert lines[1] == "vertex,G"
    assert lines[2].startswith("0,") and lines[3].startswith("1,")
