"""Reproducible i.i.d. conductance environments and percolation clusters.

Edges of a lattice box draw their conductance from a counter-based scheme
keyed on the canonical edge coordinates, so the same edge receives the same
value in every box size: environments extend consistently to larger boxes,
which is what makes monotone occupation-time limits over growing radii
meaningful on a single coupled environment.
"""

from __future__ import annotations

import hashlib
import itertools
import struct
from dataclasses import dataclass

from .errors import RootIsolated
from .graph import WeightedGraph, build_graph

__all__ = [
    "EnvironmentLaw",
    "LatticeBox",
    "sample_environment",
    "environment_graph",
    "percolation_cluster",
    "lattice_box_graph",
    "write_environment",
]


@dataclass(frozen=True)
class EnvironmentLaw:
    """Conductance law on [0, 1]: uniform on (0, 1], Bernoulli, or a quantile table."""

    kind: str                      # "uniform01" | "bernoulli" | "quantile"
    p: float | None = None
    table: tuple | None = None     # ((probability, value), ...)

    @staticmethod
    def uniform01() -> "EnvironmentLaw":
        return EnvironmentLaw("uniform01")

    @staticmethod
    def bernoulli(p: float) -> "EnvironmentLaw":
        if not 0.0 < p <= 1.0:
            raise ValueError("Bernoulli parameter must lie in (0, 1]")
        return EnvironmentLaw("bernoulli", p=float(p))

    @staticmethod
    def quantile(table) -> "EnvironmentLaw":
        pts = tuple((float(p), float(v)) for p, v in table)
        if abs(sum(p for p, _ in pts) - 1.0) > 1e-9:
            raise ValueError("quantile probabilities must sum to 1")
        if any(not 0.0 <= v <= 1.0 for _, v in pts):
            raise ValueError("conductance values must lie in [0, 1]")
        return EnvironmentLaw("quantile", table=pts)

    @property
    def all_positive(self) -> bool:
        """True iff the law gives weight zero with probability zero."""
        if self.kind == "uniform01":
            return True
        if self.kind == "bernoulli":
            return False
        return all(v > 0.0 for p, v in self.table if p > 0.0)

    def draw(self, u: float) -> float:
        """Map a uniform variate in [0, 1) to a conductance."""
        if self.kind == "uniform01":
            return 1.0 - u
        if self.kind == "bernoulli":
            return 1.0 if u < self.p else 0.0
        acc = 0.0
        for p, v in self.table:
            acc += p
            if u < acc:
                return v
        return self.table[-1][1]

    def spec_string(self) -> str:
        if self.kind == "uniform01":
            return "uniform01"
        if self.kind == "bernoulli":
            return f"bernoulli:{self.p!r}"
        body = ",".join(f"{p!r}:{v!r}" for p, v in self.table)
        return f"quantile:{body}"

    @staticmethod
    def parse(spec: str) -> "EnvironmentLaw":
        name, _, rest = spec.partition(":")
        if name == "uniform01":
            return EnvironmentLaw.uniform01()
        if name == "bernoulli":
            return EnvironmentLaw.bernoulli(float(rest))
        if name == "quantile":
            pairs = [tuple(float(t) for t in item.split(":"))
                     for item in rest.split(",")]
            return EnvironmentLaw.quantile(pairs)
        raise ValueError(f"unknown law spec {spec!r}")


_COORD_BASE = 1 << 21        # per-axis label range after zig-zag folding


def _zigzag(c: int) -> int:
    return 2 * c if c >= 0 else -2 * c - 1


@dataclass(frozen=True)
class LatticeBox:
    """Cube ``[-n, n]^d`` with origin root and an absorbing exterior shell.

    Vertex labels encode coordinates (independently of ``n``), so regions and
    environments are consistent across nested boxes.
    """

    d: int
    n: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        if self.n < 1:
            raise ValueError("box parameter must be at least 1")

    def contains(self, coord) -> bool:
        return all(-self.n <= c <= self.n for c in coord)

    def vertex_id(self, coord) -> int:
        vid = 0
        for c in reversed(coord):
            vid = vid * _COORD_BASE + _zigzag(int(c))
        return vid

    @property
    def origin_id(self) -> int:
        return self.vertex_id((0,) * self.d)

    def interior_coords(self):
        rng = range(-self.n, self.n + 1)
        return itertools.product(*([rng] * self.d))

    def edge_keys(self):
        """Canonical edges ``(base_coord, axis)`` with at least one end in the box."""
        for coord in self.interior_coords():
            for axis in range(self.d):
                yield coord, axis
                if coord[axis] == -self.n:
                    below = list(coord)
                    below[axis] -= 1
                    yield tuple(below), axis

    def edge_endpoints(self, key):
        base, axis = key
        other = list(base)
        other[axis] += 1
        return base, tuple(other)


def _edge_uniform(seed: int, key, d: int) -> float:
    base, axis = key
    blob = struct.pack(f"<b{d}q", axis, *base)
    h = hashlib.blake2b(blob, digest_size=8,
                        key=int(seed).to_bytes(8, "little")).digest()
    return int.from_bytes(h, "little") / 2.0 ** 64


def sample_environment(law: EnvironmentLaw, box: LatticeBox, seed: int) -> dict:
    """One independent conductance draw per edge, reproducible from the seed.

    The returned map is keyed by canonical edge ``(base_coord, axis)``; the
    draw for an edge depends only on ``(seed, edge)``, never on iteration
    order or box size.
    """
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return {key: law.draw(_edge_uniform(seed, key, box.d))
            for key in box.edge_keys()}


def _classify_edges(env: dict, box: LatticeBox):
    """Split positive-weight edges into graph triples plus the frame id set."""
    edges = []
    frame = set()
    for key, w in env.items():
        if w <= 0.0:
            continue
        a, b = box.edge_endpoints(key)
        ia, ib = box.vertex_id(a), box.vertex_id(b)
        if not box.contains(a):
            frame.add(ia)
        if not box.contains(b):
            frame.add(ib)
        edges.append((ia, ib, w))
    return edges, frame


def environment_graph(env: dict, box: LatticeBox) -> WeightedGraph:
    """Weighted graph of an environment: kernel equals the conductances.

    Shell vertices become the absorbing frame; zero-conductance edges are
    dropped.  Raises :class:`RootIsolated` when every edge at the origin has
    conductance zero.
    """
    edges, frame = _classify_edges(env, box)
    return build_graph(edges, box.origin_id, frame=frame)


def percolation_cluster(env: dict, box: LatticeBox) -> WeightedGraph:
    """Open cluster of the origin in a Bernoulli environment.

    Vertices are the box vertices reachable from the origin through open
    (conductance 1) interior edges; edges are the open edges among them,
    plus open frame edges from cluster vertices to the shell.  The cluster
    touches the box shell iff the returned graph's frame is nonempty (the
    desk-scale stand-in for an infinite cluster).
    """
    adj: dict = {}
    frame_links = []
    for key, w in env.items():
        if w <= 0.0:
            continue
        a, b = box.edge_endpoints(key)
        if box.contains(a) and box.contains(b):
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        else:
            inside, outside = (a, b) if box.contains(a) else (b, a)
            frame_links.append((inside, outside))

    origin = (0,) * box.d
    component = {origin}
    stack = [origin]
    while stack:
        c = stack.pop()
        for nb in adj.get(c, ()):
            if nb not in component:
                component.add(nb)
                stack.append(nb)

    edges = []
    seen = set()
    for c in component:
        for nb in adj.get(c, ()):
            if nb in component:
                key = (min(c, nb), max(c, nb))
                if key not in seen:
                    seen.add(key)
                    edges.append((box.vertex_id(c), box.vertex_id(nb), 1.0))
    frame = set()
    for inside, outside in frame_links:
        if inside in component:
            fid = box.vertex_id(outside)
            frame.add(fid)
            edges.append((box.vertex_id(inside), fid, 1.0))

    if not edges:
        raise RootIsolated("origin has no open edge")
    return build_graph(edges, box.origin_id, frame=frame)


def lattice_box_graph(box: LatticeBox) -> WeightedGraph:
    """Unit-conductance box graph (the deterministic lattice instance)."""
    env = {key: 1.0 for key in box.edge_keys()}
    return environment_graph(env, box)


def write_environment(g: WeightedGraph, path, law: EnvironmentLaw, seed: int,
                      box: LatticeBox) -> None:
    """Edge-list dump with law/seed/box headers; re-ingestible via read_graph."""
    from .graph import write_graph
    write_graph(g, path, extra_headers={
        "law": law.spec_string(),
        "seed": str(seed),
        "box": f"d={box.d} n={box.n}",
    })
