"""Weighted-graph model of a reversible random walk.

A :class:`WeightedGraph` stores a symmetric edge kernel ``mu`` (each
unordered pair once), the reversible measure ``m(x) = sum_z mu(x, z)`` and a
distinguished root vertex.  Finite instances carry an optional absorbing
"frame": exterior vertices the walk can step into but which belong to no
region, so that every region, including the full interior, has a nonempty
boundary.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph

from .errors import NegativeWeight, RootIsolated, Unreachable

__all__ = [
    "WeightedGraph",
    "Region",
    "BoundaryEdges",
    "build_graph",
    "as_region",
    "boundary",
    "is_connected",
    "hop_distance",
    "hop_distances_from",
    "hop_ball",
    "region_hash",
    "write_graph",
    "read_graph",
]


class WeightedGraph:
    """Immutable reversible-chain graph over integer vertex labels.

    Transition probabilities are ``p(x, y) = mu(x, y) / m(x)`` and sum to one
    over all neighbours, frame vertices included.  Self-loops are allowed,
    contribute to ``m`` once, and never belong to any boundary.
    """

    def __init__(self, ids, index, indptr, nbr, wts, m, root, frame_ids, edge_table):
        self.ids = ids                  # sorted original labels, position-indexed
        self._index = index             # label -> position
        self.indptr = indptr            # CSR layout over positions
        self.nbr = nbr                  # neighbour positions
        self.wts = wts                  # kernel values mu(x, y)
        self.m = m                      # reversible measure per position
        self.root = root
        self.frame_ids = frame_ids      # frozenset of labels
        self._edges = edge_table        # (u, v, w) unordered, sorted, u <= v
        self.is_frame = np.zeros(len(ids), dtype=bool)
        for v in frame_ids:
            self.is_frame[index[v]] = True
        self._adj_struct = None

    # -- basic queries ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.ids)

    def pos(self, v: int) -> int:
        """Internal position of vertex label ``v``."""
        return self._index[v]

    def has_vertex(self, v: int) -> bool:
        return v in self._index

    def neighbors(self, v: int):
        """Neighbour labels and kernel values of ``v``."""
        p = self._index[v]
        lo, hi = self.indptr[p], self.indptr[p + 1]
        return self.ids[self.nbr[lo:hi]], self.wts[lo:hi]

    def measure(self, v: int) -> float:
        return float(self.m[self._index[v]])

    def non_frame_ids(self) -> np.ndarray:
        return self.ids[~self.is_frame]

    def edges(self):
        """Unordered merged edge triples ``(u, v, w)`` sorted by ``(u, v)``."""
        return iter(self._edges)

    # -- internals -------------------------------------------------------

    def _structure(self) -> sp.csr_matrix:
        """0/1 adjacency used for connectivity and hop distances."""
        if self._adj_struct is None:
            data = np.ones(len(self.nbr), dtype=np.int8)
            self._adj_struct = sp.csr_matrix(
                (data, self.nbr, self.indptr), shape=(self.n, self.n)
            )
        return self._adj_struct

    def kernel_matrix(self) -> sp.csr_matrix:
        """Symmetric sparse kernel matrix M with M[x, y] = mu(x, y)."""
        return sp.csr_matrix((self.wts, self.nbr, self.indptr), shape=(self.n, self.n))

    def positions_of(self, labels) -> np.ndarray:
        return np.fromiter((self._index[v] for v in labels), dtype=np.int64,
                           count=len(labels))

    def incident_arrays(self, positions) -> tuple:
        """All directed incidences of the given positions as flat arrays.

        Returns ``(xs, ys, ws)`` with one entry per CSR slot of the listed
        rows: ``xs`` repeats the row position, ``ys`` is the neighbour
        position, ``ws`` the kernel value.
        """
        positions = np.asarray(positions, dtype=np.int64)
        counts = self.indptr[positions + 1] - self.indptr[positions]
        total = int(counts.sum())
        if total == 0:
            return (np.empty(0, np.int64), np.empty(0, np.int64),
                    np.empty(0, float))
        starts = np.repeat(self.indptr[positions], counts)
        offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        within = np.arange(total) - np.repeat(offsets, counts)
        take = starts + within
        return np.repeat(positions, counts), self.nbr[take], self.wts[take]


@dataclass(frozen=True)
class Region:
    """A finite set of non-frame vertices with cached mass and connectivity."""

    members: frozenset
    measure: float
    connected: bool

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return v in self.members


@dataclass(frozen=True)
class BoundaryEdges:
    """Directed pairs (x in A, y not in A) with positive kernel, plus their total."""

    pairs: tuple
    total: float


def build_graph(edges: Iterable[Sequence], root: int, frame=None) -> WeightedGraph:
    """Build an immutable graph from an edge list.

    Duplicate pairs (in either orientation) merge by weight summation,
    zero-weight edges are dropped, and vertices left with zero measure are
    pruned.  ``frame`` lists absorbing exterior vertices.

    Raises
    ------
    NegativeWeight
        If any listed weight is negative.
    RootIsolated
        If the root has zero measure after pruning.
    """
    merged: dict = {}
    for u, v, w in edges:
        w = float(w)
        if w < 0.0:
            raise NegativeWeight(f"edge ({u}, {v}) has weight {w}")
        if w == 0.0:
            continue
        key = (u, v) if u <= v else (v, u)
        merged[key] = merged.get(key, 0.0) + w

    mass: dict = {}
    for (u, v), w in merged.items():
        mass[u] = mass.get(u, 0.0) + w
        if v != u:
            mass[v] = mass.get(v, 0.0) + w

    retained = sorted(k for k, mv in mass.items() if mv > 0.0)
    if root not in mass or mass[root] <= 0.0:
        raise RootIsolated(f"root {root} has zero measure after pruning")

    ids = np.asarray(retained, dtype=np.int64)
    index = {int(v): i for i, v in enumerate(ids)}

    frame_ids = frozenset(int(v) for v in (frame or ()) if v in index)
    if root in frame_ids:
        raise ValueError("root cannot be a frame vertex")

    deg = np.zeros(len(ids), dtype=np.int64)
    for (u, v), w in merged.items():
        deg[index[u]] += 1
        if v != u:
            deg[index[v]] += 1
    indptr = np.zeros(len(ids) + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    nbr = np.zeros(indptr[-1], dtype=np.int64)
    wts = np.zeros(indptr[-1], dtype=np.float64)
    cursor = indptr[:-1].copy()
    edge_table = []
    for (u, v), w in sorted(merged.items()):
        pu, pv = index[u], index[v]
        nbr[cursor[pu]] = pv
        wts[cursor[pu]] = w
        cursor[pu] += 1
        if pv != pu:
            nbr[cursor[pv]] = pu
            wts[cursor[pv]] = w
            cursor[pv] += 1
        edge_table.append((u, v, w))

    m = np.zeros(len(ids))
    np.add.at(m, np.repeat(np.arange(len(ids)), np.diff(indptr)), wts)
    # self-loops appear once in the CSR row, so the row sum is already m.

    return WeightedGraph(ids, index, indptr, nbr, wts, m, int(root),
                         frame_ids, tuple(edge_table))


def as_region(g: WeightedGraph, A) -> Region:
    """Normalise ``A`` (a Region or iterable of labels) into a Region of ``g``.

    Membership must be a subset of the retained non-frame vertices.
    """
    if isinstance(A, Region):
        return A
    members = frozenset(int(v) for v in A)
    for v in members:
        if v not in g._index:
            raise ValueError(f"vertex {v} is not a retained vertex")
        if g.is_frame[g._index[v]]:
            raise ValueError(f"vertex {v} is a frame vertex and cannot join a region")
    if not members:
        return Region(members, 0.0, True)
    pos = g.positions_of(sorted(members))
    measure = float(g.m[pos].sum())
    sub = g._structure()[np.ix_(pos, pos)]
    ncomp = csgraph.connected_components(sub, directed=False, return_labels=False)
    return Region(members, measure, bool(ncomp <= 1))


def boundary(g: WeightedGraph, A) -> BoundaryEdges:
    """Directed boundary pairs leaving ``A``; frame vertices count as outside."""
    A = as_region(g, A)
    pairs = []
    total = 0.0
    for x in sorted(A.members):
        nbrs, ws = g.neighbors(x)
        for y, w in zip(nbrs.tolist(), ws.tolist()):
            if y not in A.members:
                pairs.append((x, y, w))
                total += w
    return BoundaryEdges(tuple(pairs), total)


def is_connected(g: WeightedGraph, A) -> bool:
    """True iff every pair of members is joined inside ``A``; empty is connected."""
    return as_region(g, A).connected


def hop_distances_from(g: WeightedGraph, x: int) -> np.ndarray:
    """Hop distances from ``x`` to every vertex (inf where unreachable)."""
    return csgraph.dijkstra(g._structure(), directed=False, unweighted=True,
                            indices=g.pos(x))


def hop_distance(g: WeightedGraph, x: int, y: int) -> int:
    """Shortest path length over positive-weight edges.

    Raises :class:`Unreachable` when no path exists.
    """
    d = hop_distances_from(g, x)[g.pos(y)]
    if np.isinf(d):
        raise Unreachable(f"no path from {x} to {y}")
    return int(d)


def hop_ball(g: WeightedGraph, radius: int, center: int | None = None) -> Region:
    """Region of non-frame vertices within hop distance ``radius`` of the root."""
    c = g.root if center is None else center
    d = hop_distances_from(g, c)
    sel = (d <= radius) & ~g.is_frame
    return as_region(g, g.ids[sel].tolist())


def region_hash(A) -> str:
    """Stable short hash of a member set, for dump headers."""
    members = sorted(A.members if isinstance(A, Region) else A)
    blob = ",".join(str(v) for v in members).encode()
    return hashlib.blake2b(blob, digest_size=8).hexdigest()


def write_graph(g: WeightedGraph, path, extra_headers: dict | None = None) -> None:
    """Edge-list dump: ``#root``/``#frame`` headers then one ``u v w`` line per edge."""
    lines = [f"#root {g.root}"]
    if g.frame_ids:
        lines.append("#frame " + " ".join(str(v) for v in sorted(g.frame_ids)))
    for key, value in (extra_headers or {}).items():
        lines.append(f"#{key} {value}")
    for u, v, w in g.edges():
        lines.append(f"{u} {v} {w!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_graph(path) -> tuple:
    """Read an edge-list dump; returns ``(graph, extra_headers)``."""
    root = None
    frame: list = []
    edges = []
    extra: dict = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, rest = line[1:].partition(" ")
                if key == "root":
                    root = int(rest)
                elif key == "frame":
                    frame = [int(t) for t in rest.split()]
                else:
                    extra[key] = rest
                continue
            u, v, w = line.split()
            edges.append((int(u), int(v), float(w)))
    if root is None:
        raise ValueError(f"{path}: missing '#root' header")
    return build_graph(edges, root, frame=frame), extra
