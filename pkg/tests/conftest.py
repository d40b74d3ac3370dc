"""Shared builders and independent oracles for the test suite."""

import numpy as np
import pytest

from awlab import LatticeBox, build_graph, lattice_box_graph


# ---------------------------------------------------------------------------
# graph builders


def z_segment(lo, hi):
    """Integer segment [lo, hi] with unit weights and frame at lo-1, hi+1."""
    edges = [(k, k + 1, 1.0) for k in range(lo - 1, hi + 1)]
    return build_graph(edges, root=0, frame=[lo - 1, hi + 1])


def seg3():
    """The hand-checked instance: interior {0, 1, 2}, frame {-1, 3}."""
    return z_segment(0, 2)


def regular_tree(depth, branching=2):
    """Rooted tree where the root has branching+1 children and every other
    interior vertex has `branching` children (constant degree branching+1);
    vertices at depth `depth`+1 form the frame."""
    edges = []
    frame = []
    next_id = 1
    layer = [0]
    for d in range(1, depth + 2):
        new_layer = []
        for parent in layer:
            kids = branching + 1 if parent == 0 else branching
            for _ in range(kids):
                edges.append((parent, next_id, 1.0))
                if d == depth + 1:
                    frame.append(next_id)
                new_layer.append(next_id)
                next_id += 1
        layer = new_layer
    return build_graph(edges, root=0, frame=frame)


def random_graph(rng, n=20, extra=12, frame_links=2):
    """Connected random weighted graph with one absorbing frame vertex."""
    edges = []
    order = rng.permutation(n)
    for i in range(1, n):
        a = int(order[i])
        b = int(order[rng.integers(i)])
        edges.append((a, b, float(0.2 + 1.8 * rng.random())))
    for _ in range(extra):
        a, b = rng.integers(n, size=2)
        if a != b:
            edges.append((int(a), int(b), float(0.2 + 1.8 * rng.random())))
    frame = n
    for _ in range(frame_links):
        a = int(rng.integers(n))
        edges.append((a, frame, float(0.5 + rng.random())))
    return build_graph(edges, root=int(order[0]), frame=[frame])


def lattice(d, n):
    return lattice_box_graph(LatticeBox(d, n))


# ---------------------------------------------------------------------------
# dense oracles (independent of the library's solver path)


def transition_submatrix(g, members):
    """Dense killed transition matrix P[x, y] over the listed members."""
    members = sorted(members)
    index = {v: i for i, v in enumerate(members)}
    P = np.zeros((len(members), len(members)))
    for v in members:
        nbrs, ws = g.neighbors(v)
        for y, w in zip(nbrs.tolist(), ws.tolist()):
            if y in index:
                P[index[v], index[y]] += w / g.measure(v)
    return members, P


def oracle_exit_time(g, members):
    """Fundamental-matrix exit time: solve (I - P) t = 1, read t at the root."""
    members, P = transition_submatrix(g, members)
    t = np.linalg.solve(np.eye(len(members)) - P, np.ones(len(members)))
    return float(t[members.index(g.root)])


def oracle_green(g, members):
    """Green values from expected visit counts: nu = (I - P)^-T e_root."""
    members, P = transition_submatrix(g, members)
    e = np.zeros(len(members))
    e[members.index(g.root)] = 1.0
    visits = np.linalg.solve((np.eye(len(members)) - P).T, e)
    return {v: visits[i] / g.measure(v) for i, v in enumerate(members)}


def brute_force_connected_sets(g, max_size):
    """All connected root-containing member sets up to max_size, by powerset."""
    from itertools import combinations
    from awlab import is_connected
    pool = [v for v in g.non_frame_ids().tolist() if v != g.root]
    found = []
    for k in range(0, max_size):
        for combo in combinations(pool, k):
            A = frozenset(combo) | {g.root}
            if is_connected(g, A):
                found.append(A)
    return found


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
