"""Config-driven verification campaigns tying the modules together.

A campaign resolves a graph source (file, lattice, environment, percolation
cluster), a region sweep and a profile function, then runs one of the
pipelines: the full bound chain per region, a scaling-law regression, or an
occupation-convergence table with the transience diagnostic.  Reports embed
the fully resolved configuration so a report can be reproduced exactly from
itself; nothing in a report depends on wall-clock time.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bounds import ProfileFunction, bound_exit, solve_bound_curve, \
    transience_diagnostic
from .environments import EnvironmentLaw, LatticeBox, environment_graph, \
    lattice_box_graph, percolation_cluster, sample_environment
from .errors import ConfigError
from .graph import WeightedGraph, as_region, hop_ball, read_graph
from .green import exit_time_exact, green_killed, occupation_truncated
from .isoperimetry import cis_levelsets
from .profiles import check_edu, factor_two_check, integral_u, profile_u

__all__ = [
    "ExperimentConfig",
    "thread_count",
    "resolve_graph",
    "resolve_regions",
    "resolve_profile",
    "run_verify_bounds",
    "run_scaling",
    "run_transience",
    "write_report",
]


def thread_count() -> int:
    """Worker cap: the AWLAB_THREADS environment variable, else a small default."""
    v = os.environ.get("AWLAB_THREADS", "").strip()
    if v:
        return max(1, int(v))
    return min(4, os.cpu_count() or 1)


def _parse_radii(spec: str):
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(t) for t in spec.replace(",", " ").split())


@dataclass
class ExperimentConfig:
    """Resolved experiment parameters; every randomized step needs its seed."""

    scenario: str = "scenario"
    source: str = "lattice"              # lattice | file | environment | percolation
    d: int = 2
    n: int = 8
    graph_file: str | None = None
    law: str = "uniform01"
    p: float = 0.7
    env_seed: int | None = None
    region_kind: str = "ball"            # ball | list | interior
    radii: tuple = (3,)
    vertices: tuple = ()
    profile: str = "power:2"
    floor: str = "auto"                  # auto | none | numeric value
    tol: float = 1e-10
    trials: int = 10000
    horizon: int = 100000
    steps: int = 1000
    mc_seed: int | None = None
    mc_kind: str = "exit"                # exit | occupation | displacement
    box_radii: tuple = ()
    scaling_mode: str | None = None      # exit | occupation (default from d)
    diag_C: float = 1.0
    samples: int = 1000
    max_measure: float = 200.0
    max_vertices: int = 8
    out_dir: str = "out"

    @staticmethod
    def from_ini(path) -> "ExperimentConfig":
        import configparser
        if not Path(path).exists():
            raise ConfigError(f"config file {path} does not exist")
        cp = configparser.ConfigParser()
        cp.read(path)
        cfg = ExperimentConfig()

        def opt(section, key, cast=str):
            if cp.has_option(section, key):
                return cast(cp.get(section, key))
            return None

        for section, key, attr, cast in [
            ("scenario", "name", "scenario", str),
            ("graph", "source", "source", str),
            ("graph", "d", "d", int),
            ("graph", "n", "n", int),
            ("graph", "file", "graph_file", str),
            ("graph", "law", "law", str),
            ("graph", "p", "p", float),
            ("graph", "seed", "env_seed", int),
            ("region", "kind", "region_kind", str),
            ("region", "radii", "radii", _parse_radii),
            ("profile", "F", "profile", str),
            ("profile", "floor", "floor", str),
            ("solver", "tol", "tol", float),
            ("montecarlo", "trials", "trials", int),
            ("montecarlo", "horizon", "horizon", int),
            ("montecarlo", "steps", "steps", int),
            ("montecarlo", "seed", "mc_seed", int),
            ("montecarlo", "kind", "mc_kind", str),
            ("transience", "radii", "box_radii", _parse_radii),
            ("transience", "C", "diag_C", float),
            ("scaling", "mode", "scaling_mode", str),
            ("isoperimetry", "samples", "samples", int),
            ("isoperimetry", "max_measure", "max_measure", float),
            ("isoperimetry", "max_vertices", "max_vertices", int),
            ("output", "dir", "out_dir", str),
        ]:
            value = opt(section, key, cast)
            if value is not None:
                setattr(cfg, attr, value)
        if cp.has_option("region", "vertices"):
            cfg.vertices = tuple(int(t) for t in cp.get("region", "vertices").split())
        return cfg

    def resolved(self) -> dict:
        d = asdict(self)
        d["radii"] = list(self.radii)
        d["vertices"] = list(self.vertices)
        d["box_radii"] = list(self.box_radii)
        return d


def resolve_graph(cfg: ExperimentConfig) -> WeightedGraph:
    """Build the configured graph; randomized sources require a seed."""
    if cfg.source == "file":
        if not cfg.graph_file:
            raise ConfigError("graph source 'file' needs a file path")
        if not Path(cfg.graph_file).exists():
            raise ConfigError(f"graph file {cfg.graph_file} does not exist")
        return read_graph(cfg.graph_file)[0]
    if cfg.source == "lattice":
        return lattice_box_graph(LatticeBox(cfg.d, cfg.n))
    if cfg.source in ("environment", "percolation"):
        if cfg.env_seed is None:
            raise ConfigError(f"graph source '{cfg.source}' needs a seed")
        box = LatticeBox(cfg.d, cfg.n)
        if cfg.source == "environment":
            law = EnvironmentLaw.parse(cfg.law)
            return environment_graph(sample_environment(law, box, cfg.env_seed), box)
        law = EnvironmentLaw.bernoulli(cfg.p)
        return percolation_cluster(sample_environment(law, box, cfg.env_seed), box)
    raise ConfigError(f"unknown graph source {cfg.source!r}")


def resolve_regions(cfg: ExperimentConfig, g: WeightedGraph):
    """Region sweep: hop balls, an explicit list, or the full interior."""
    if cfg.region_kind == "ball":
        if not cfg.radii:
            raise ConfigError("ball regions need at least one radius")
        return [(f"ball:{r}", hop_ball(g, r)) for r in cfg.radii]
    if cfg.region_kind == "list":
        if not cfg.vertices:
            raise ConfigError("list regions need explicit vertices")
        return [("list", as_region(g, cfg.vertices))]
    if cfg.region_kind == "interior":
        return [("interior", as_region(g, g.non_frame_ids().tolist()))]
    raise ConfigError(f"unknown region kind {cfg.region_kind!r}")


def resolve_profile(cfg: ExperimentConfig, g: WeightedGraph) -> ProfileFunction:
    """Profile function from its spec string, floored at m(root) by default."""
    spec = cfg.profile.strip()
    if spec in ("id", "linear"):
        F = ProfileFunction.linear()
    elif spec.startswith("power:"):
        F = ProfileFunction.power(float(spec.split(":", 1)[1]))
    else:
        raise ConfigError(f"unknown profile spec {spec!r}")
    if cfg.floor == "none":
        return F
    if cfg.floor == "auto":
        return F.with_floor(g.measure(g.root))
    return F.with_floor(float(cfg.floor))


def run_verify_bounds(cfg: ExperimentConfig) -> dict:
    """Full bound chain per region: exact <= 2*integral(u) <= curve bound.

    Each row records the region mass, the exact exit time, twice the profile
    integral, the comparison-curve bound with the level-set constant, and any
    differential-inequality violations; the report is ``ok`` only if every
    row passes every link of the chain.
    """
    g = resolve_graph(cfg)
    regions = resolve_regions(cfg, g)
    F = resolve_profile(cfg, g)

    def one(item):
        label, A = item
        gf = green_killed(g, A, tol=cfg.tol)
        exact = exit_time_exact(g, gf)
        lp = profile_u(g, gf)
        iso = cis_levelsets(g, gf, F)
        edu = check_edu(lp, F, iso.constant)
        ft = factor_two_check(g, gf, lp)
        curve = solve_bound_curve(F, iso.constant, A.measure)
        bnd = bound_exit(curve)
        two_int = 2.0 * integral_u(lp)[0]
        chain_ok = (exact <= two_int * (1 + 1e-9) + 1e-12
                    and two_int <= bnd * (1 + 1e-9) + 1e-12)
        return {
            "region": label,
            "size": len(A),
            "mA": A.measure,
            "exact": exact,
            "two_int_u": two_int,
            "bound": bnd,
            "C_levelset": iso.constant,
            "violations": len(edu.violations),
            "factor_two_ok": ft.ok,
            "chain_ok": bool(chain_ok),
        }

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        rows = list(pool.map(one, regions))
    ok = all(r["chain_ok"] and r["factor_two_ok"] and r["violations"] == 0
             for r in rows)
    return {"kind": "verify-bounds", "config": cfg.resolved(), "rows": rows,
            "ok": ok}


def run_scaling(cfg: ExperimentConfig) -> dict:
    """Log-log regression of exit (d=2) or occupation (d>=3) against m(A)."""
    g = resolve_graph(cfg)
    regions = resolve_regions(cfg, g)
    if len(regions) < 2:
        raise ConfigError("scaling needs at least two region sizes")
    mode = cfg.scaling_mode or ("occupation" if cfg.d >= 3 else "exit")

    if mode == "exit":
        def one(item):
            label, A = item
            gf = green_killed(g, A, tol=cfg.tol)
            return label, A.measure, exit_time_exact(g, gf)
        with ThreadPoolExecutor(max_workers=thread_count()) as pool:
            pts = list(pool.map(one, regions))
    elif mode == "occupation":
        interior = as_region(g, g.non_frame_ids().tolist())
        gf = green_killed(g, interior, tol=cfg.tol)
        pts = []
        for label, A in regions:
            sel = g.positions_of(sorted(A.members))
            pts.append((label, A.measure, float((g.m[sel] * gf.values[sel]).sum())))
    else:
        raise ConfigError(f"unknown scaling mode {mode!r}")

    xs = np.log([p[1] for p in pts])
    ys = np.log([p[2] for p in pts])
    slope, intercept = np.polyfit(xs, ys, 1)
    residuals = (ys - (slope * xs + intercept)).tolist()
    return {
        "kind": "scaling",
        "config": cfg.resolved(),
        "mode": mode,
        "points": [{"region": l, "mA": m, "value": v} for l, m, v in pts],
        "slope": float(slope),
        "intercept": float(intercept),
        "residuals": residuals,
        "ok": True,
    }


def run_transience(cfg: ExperimentConfig) -> dict:
    """Occupation convergence over a box family plus the summability verdict."""
    if len(cfg.box_radii) < 2:
        raise ConfigError("transience needs at least two box radii")
    radii = tuple(sorted(cfg.box_radii))
    if cfg.source == "environment" and cfg.env_seed is None:
        raise ConfigError("environment box families need a seed")

    def family(R: int) -> WeightedGraph:
        box = LatticeBox(cfg.d, R)
        if cfg.source == "environment":
            law = EnvironmentLaw.parse(cfg.law)
            return environment_graph(sample_environment(law, box, cfg.env_seed), box)
        return lattice_box_graph(box)

    g0 = family(radii[0])
    ball_r = cfg.radii[0] if cfg.radii else 2
    A = hop_ball(g0, ball_r)
    values = occupation_truncated(family, sorted(A.members), radii, tol=cfg.tol)
    increments = []
    for (_, a), (rb, b) in zip(values, values[1:]):
        increments.append({"R": rb, "relative_increment": (b - a) / b})
    finite, t0 = transience_diagnostic(
        ProfileFunction.power(max(cfg.d, 2)), cfg.diag_C,
        inf_m=float(g0.m[~g0.is_frame].min()),
        mA_max=float(g0.m[~g0.is_frame].sum()))
    last = increments[-1]["relative_increment"] if increments else float("nan")
    return {
        "kind": "transience",
        "config": cfg.resolved(),
        "values": [{"R": R, "value": v} for R, v in values],
        "increments": increments,
        "last_increment": last,
        "converged_1pct": bool(last < 0.01),
        "diverging_10pct": bool(min(i["relative_increment"] for i in increments) > 0.10)
        if increments else False,
        "diagnostic": {"finite": finite, "t0": t0},
        "ok": True,
    }


def write_report(report: dict, out_dir, name: str) -> Path:
    """Write the JSON report (and a CSV table when rows are present)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    rows = report.get("rows") or report.get("points") or report.get("values")
    if rows:
        cols = list(rows[0].keys())
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join(repr(r[c]) if isinstance(r[c], float)
                                  else str(r[c]) for c in cols))
        with open(out / f"{name}.csv", "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return path
