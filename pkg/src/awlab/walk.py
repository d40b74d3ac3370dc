"""Seeded Monte Carlo simulation of the reversible walk.

Trials run in fixed-size chunks, each chunk driven by its own counter-based
substream keyed on ``(seed, chunk index)``; results therefore depend only on
``(seed, trials)`` and never on scheduling.  Walks step into the absorbing
frame exactly as the killed kernel prescribes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExcessiveTruncation, RootNotInRegion
from .graph import WeightedGraph, as_region, hop_distances_from

__all__ = [
    "EstimateReport",
    "simulate_exit",
    "simulate_occupation",
    "simulate_displacement",
]

_CHUNK = 8192
_TRUNCATION_LIMIT = 0.10


@dataclass(frozen=True)
class EstimateReport:
    """Monte Carlo estimate with its standard error and truncation count."""

    mean: float
    se: float
    trials: int
    truncated: int
    horizon: int
    seed: int

    def to_json(self) -> dict:
        return {"mean": self.mean, "se": self.se, "trials": self.trials,
                "truncated": self.truncated, "horizon": self.horizon,
                "seed": self.seed}


def _stepper(g: WeightedGraph):
    """Padded per-vertex cumulative transition rows and neighbour table."""
    deg = np.diff(g.indptr)
    width = int(deg.max()) if len(deg) else 1
    cum = np.full((g.n, width), 2.0)
    nxt = np.zeros((g.n, width), dtype=np.int64)
    for p in range(g.n):
        lo, hi = g.indptr[p], g.indptr[p + 1]
        k = hi - lo
        if k == 0:
            nxt[p, :] = p
            continue
        c = np.cumsum(g.wts[lo:hi]) / g.m[p]
        c[-1] = 1.0
        cum[p, :k] = c
        nxt[p, :k] = g.nbr[lo:hi]
        nxt[p, k:] = p
    return cum, nxt


def _advance(pos, cum, nxt, u):
    rows = cum[pos]
    k = (rows <= u[:, None]).sum(axis=1)
    return nxt[pos, k]


def _summary(samples, truncated, horizon, seed, trials):
    mean = float(samples.mean()) if trials else 0.0
    se = float(samples.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    if truncated > _TRUNCATION_LIMIT * trials:
        raise ExcessiveTruncation(
            f"{truncated}/{trials} trials hit the horizon {horizon}")
    return EstimateReport(mean, se, trials, truncated, horizon, seed)


def simulate_exit(g: WeightedGraph, A, trials: int, horizon: int,
                  seed: int) -> EstimateReport:
    """Empirical expected exit time from ``A`` for walks started at the root.

    Trials that never leave ``A`` within ``horizon`` steps contribute the
    horizon itself (a downward bias, preferred to the upward bias of
    discarding); more than 10% truncation raises
    :class:`ExcessiveTruncation`.
    """
    A = as_region(g, A)
    if g.root not in A.members:
        raise RootNotInRegion("the walk must start inside A")
    in_A = np.zeros(g.n, dtype=bool)
    in_A[g.positions_of(sorted(A.members))] = True
    cum, nxt = _stepper(g)
    root = g.pos(g.root)

    times = np.empty(trials)
    truncated = 0
    done = 0
    chunk_index = 0
    while done < trials:
        size = min(_CHUNK, trials - done)
        rng = np.random.default_rng((seed, chunk_index))
        pos = np.full(size, root)
        out = np.full(size, horizon, dtype=np.int64)
        active = np.arange(size)
        for t in range(1, horizon + 1):
            pos[active] = _advance(pos[active], cum, nxt, rng.random(active.size))
            exited = ~in_A[pos[active]]
            out[active[exited]] = t
            active = active[~exited]
            if active.size == 0:
                break
        truncated += active.size
        times[done:done + size] = out
        done += size
        chunk_index += 1
    return _summary(times, truncated, horizon, seed, trials)


def simulate_occupation(g: WeightedGraph, A, trials: int, horizon: int,
                        seed: int) -> EstimateReport:
    """Empirical occupation time of ``A``: time indices spent in ``A``.

    The walk may leave and re-enter ``A``; it ends on absorption at the frame
    or at the horizon.  A truncated trial reports its visit count so far, a
    lower bound.
    """
    A = as_region(g, A)
    if g.root not in A.members:
        raise RootNotInRegion("the walk must start inside A")
    in_A = np.zeros(g.n, dtype=bool)
    in_A[g.positions_of(sorted(A.members))] = True
    cum, nxt = _stepper(g)
    root = g.pos(g.root)
    frame = g.is_frame

    counts = np.empty(trials)
    truncated = 0
    done = 0
    chunk_index = 0
    while done < trials:
        size = min(_CHUNK, trials - done)
        rng = np.random.default_rng((seed, chunk_index))
        pos = np.full(size, root)
        occ = np.ones(size, dtype=np.int64)          # index 0 is the root
        active = np.arange(size)
        for t in range(1, horizon + 1):
            pos[active] = _advance(pos[active], cum, nxt, rng.random(active.size))
            occ[active] += in_A[pos[active]]
            absorbed = frame[pos[active]]
            active = active[~absorbed]
            if active.size == 0:
                break
        truncated += active.size
        counts[done:done + size] = occ
        done += size
        chunk_index += 1
    return _summary(counts, truncated, horizon, seed, trials)


def simulate_displacement(g: WeightedGraph, steps: int, trials: int,
                          seed: int) -> np.ndarray:
    """Per-trial normalised displacement of the walk at its final step.

    Each trial walks until it enters the frame or completes ``steps`` steps,
    ending at hop distance ``d_i`` from the root after ``T_i`` steps.  The
    returned samples are ``d_i / mean(T)``: when no trial is absorbed this is
    exactly ``d(root, X_steps) / steps``, and when walks are killed at the
    frame the sample mean equals the renewal speed estimate
    ``sum d_i / sum T_i`` (normalising each trial by its own short lifetime
    would inflate the mean well above the walk's speed).
    """
    if steps == 0:
        return np.zeros(trials)
    dist = hop_distances_from(g, g.root)
    cum, nxt = _stepper(g)
    root = g.pos(g.root)
    frame = g.is_frame

    dists = np.empty(trials)
    lifetimes = np.empty(trials)
    done = 0
    chunk_index = 0
    while done < trials:
        size = min(_CHUNK, trials - done)
        rng = np.random.default_rng((seed, chunk_index))
        pos = np.full(size, root)
        life = np.full(size, steps, dtype=np.int64)
        active = np.arange(size)
        for t in range(1, steps + 1):
            pos[active] = _advance(pos[active], cum, nxt, rng.random(active.size))
            absorbed = frame[pos[active]]
            life[active[absorbed]] = t
            active = active[~absorbed]
            if active.size == 0:
                break
        dists[done:done + size] = dist[pos]
        lifetimes[done:done + size] = life
        done += size
        chunk_index += 1
    return dists / lifetimes.mean()
