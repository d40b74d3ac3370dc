"""Command-line experiment runner.

Subcommands: ``gen-env``, ``green``, ``verify-bounds``, ``scaling``,
``transience``, ``isoperimetry``, ``simulate``.  Scenarios come from a config
file (``--config``) or inline flags; ``--seed``, ``--tol`` and ``--out``
override either.  Exit codes: 0 ok, 1 assertion or bound failure, 2 config
error.  ``AWLAB_THREADS`` caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments as xp
from .bounds import ProfileFunction
from .environments import EnvironmentLaw, LatticeBox
from .errors import AwlabError, ConfigError
from .experiments import ExperimentConfig
from .graph import write_graph
from .green import exit_time_exact, green_killed, write_green_csv
from .isoperimetry import cis_exhaustive, cis_levelsets, cis_sampled
from .walk import simulate_displacement, simulate_exit, simulate_occupation


def _kv_spec(spec: str) -> dict:
    out = {}
    for item in spec.split(","):
        k, _, v = item.partition("=")
        out[k.strip()] = v.strip()
    return out


def _apply_args(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if args.lattice:
        kv = _kv_spec(args.lattice)
        cfg.source = "lattice"
        cfg.d = int(kv.get("d", cfg.d))
        cfg.n = int(kv.get("n", cfg.n))
    if args.env:
        kv = _kv_spec(args.env)
        cfg.source = "environment"
        cfg.law = kv.get("law", cfg.law)
        cfg.d = int(kv.get("d", cfg.d))
        cfg.n = int(kv.get("n", cfg.n))
        if "seed" in kv:
            cfg.env_seed = int(kv["seed"])
    if args.percolation:
        kv = _kv_spec(args.percolation)
        cfg.source = "percolation"
        cfg.p = float(kv.get("p", cfg.p))
        cfg.d = int(kv.get("d", cfg.d))
        cfg.n = int(kv.get("n", cfg.n))
        if "seed" in kv:
            cfg.env_seed = int(kv["seed"])
    if args.graph:
        cfg.source = "file"
        cfg.graph_file = args.graph
    if args.region:
        spec = args.region
        if spec == "interior":
            cfg.region_kind = "interior"
        elif spec.startswith("ball:"):
            cfg.region_kind = "ball"
            cfg.radii = xp._parse_radii(spec.split(":", 1)[1])
        elif spec.startswith("list:"):
            cfg.region_kind = "list"
            cfg.vertices = tuple(int(t) for t in
                                 spec.split(":", 1)[1].replace(",", " ").split())
        else:
            raise ConfigError(f"unknown region spec {spec!r}")
    if args.F:
        cfg.profile = args.F
    if args.floor:
        cfg.floor = args.floor
    if args.radii:
        cfg.box_radii = xp._parse_radii(args.radii)
    if args.tol is not None:
        cfg.tol = args.tol
    if args.trials is not None:
        cfg.trials = args.trials
    if args.horizon is not None:
        cfg.horizon = args.horizon
    if args.steps is not None:
        cfg.steps = args.steps
    if args.mc:
        cfg.mc_kind = args.mc
    if args.samples is not None:
        cfg.samples = args.samples
    if args.max_measure is not None:
        cfg.max_measure = args.max_measure
    if args.max_vertices is not None:
        cfg.max_vertices = args.max_vertices
    if args.seed is not None:
        if cfg.env_seed is None:
            cfg.env_seed = args.seed
        cfg.mc_seed = args.seed
    if args.out:
        cfg.out_dir = args.out
    return cfg


def _single_region(cfg: ExperimentConfig, g):
    regions = xp.resolve_regions(cfg, g)
    return regions[0][1]


def _cmd_gen_env(cfg: ExperimentConfig) -> int:
    if cfg.source not in ("environment", "percolation"):
        raise ConfigError("gen-env needs an environment or percolation source")
    g = xp.resolve_graph(cfg)
    box = LatticeBox(cfg.d, cfg.n)
    law = (EnvironmentLaw.bernoulli(cfg.p) if cfg.source == "percolation"
           else EnvironmentLaw.parse(cfg.law))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_graph(g, out / "env.txt", extra_headers={
        "law": law.spec_string(),
        "seed": str(cfg.env_seed),
        "box": f"d={box.d} n={box.n}",
        "kind": cfg.source,
        "spans": str(bool(g.frame_ids)).lower(),
    })
    print(f"wrote {out / 'env.txt'} ({g.n} vertices)")
    return 0


def _cmd_green(cfg: ExperimentConfig) -> int:
    g = xp.resolve_graph(cfg)
    A = _single_region(cfg, g)
    gf = green_killed(g, A, tol=cfg.tol)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_green_csv(gf, out / "green.csv")
    print(f"G(root)={gf.root_value!r} exit_time={exit_time_exact(g, gf)!r} "
          f"residual={gf.residual:.3e}")
    return 0


def _cmd_isoperimetry(cfg: ExperimentConfig, method: str) -> int:
    g = xp.resolve_graph(cfg)
    F = xp.resolve_profile(cfg, g)
    if method == "exhaustive":
        rep = cis_exhaustive(g, F, cfg.max_vertices)
    elif method == "sampled":
        if cfg.mc_seed is None:
            raise ConfigError("sampled isoperimetry needs a seed")
        rep = cis_sampled(g, F, cfg.samples, cfg.max_measure, cfg.mc_seed)
    elif method == "levelset":
        A = _single_region(cfg, g)
        gf = green_killed(g, A, tol=cfg.tol)
        rep = cis_levelsets(g, gf, F)
    else:
        raise ConfigError(f"unknown isoperimetry method {method!r}")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"config": cfg.resolved(), "report": rep.to_json()}
    with open(out / "iso.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{method} constant: {rep.constant!r}")
    return 0


def _cmd_simulate(cfg: ExperimentConfig) -> int:
    if cfg.mc_seed is None:
        raise ConfigError("simulate needs a seed")
    g = xp.resolve_graph(cfg)
    if cfg.mc_kind == "displacement":
        samples = simulate_displacement(g, cfg.steps, cfg.trials, cfg.mc_seed)
        payload = {
            "config": cfg.resolved(),
            "kind": "displacement",
            "mean": float(samples.mean()),
            "se": float(samples.std(ddof=1) / len(samples) ** 0.5)
            if len(samples) > 1 else 0.0,
            "trials": cfg.trials,
            "steps": cfg.steps,
            "seed": cfg.mc_seed,
        }
    else:
        A = _single_region(cfg, g)
        sim = simulate_exit if cfg.mc_kind == "exit" else simulate_occupation
        rep = sim(g, A, cfg.trials, cfg.horizon, cfg.mc_seed)
        payload = {"config": cfg.resolved(), "kind": cfg.mc_kind,
                   **rep.to_json()}
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sim.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{payload['kind']} mean={payload['mean']!r}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="awlab",
        description="verification campaigns for exit-time bounds on "
                    "reversible walks")
    parser.add_argument("command", choices=[
        "gen-env", "green", "verify-bounds", "scaling", "transience",
        "isoperimetry", "simulate"])
    parser.add_argument("--config")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--out")
    parser.add_argument("--lattice", help="inline lattice spec, e.g. d=2,n=12")
    parser.add_argument("--env", help="inline environment spec, e.g. "
                                      "law=uniform01,d=2,n=12")
    parser.add_argument("--percolation", help="e.g. p=0.7,d=2,n=15")
    parser.add_argument("--graph", help="edge-list file")
    parser.add_argument("--region", help="ball:1..10 | interior | list:0,1,2")
    parser.add_argument("--F", help="power:D | id")
    parser.add_argument("--floor", help="auto | none | value")
    parser.add_argument("--radii", help="box family radii, e.g. 6,8,10,12")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--mc", choices=["exit", "occupation", "displacement"])
    parser.add_argument("--samples", type=int)
    parser.add_argument("--max-measure", dest="max_measure", type=float)
    parser.add_argument("--max-vertices", dest="max_vertices", type=int)
    parser.add_argument("--method", default="sampled",
                        choices=["exhaustive", "sampled", "levelset"])
    args = parser.parse_args(argv)

    try:
        cfg = (ExperimentConfig.from_ini(args.config) if args.config
               else ExperimentConfig())
        cfg = _apply_args(cfg, args)
        if args.command == "gen-env":
            return _cmd_gen_env(cfg)
        if args.command == "green":
            return _cmd_green(cfg)
        if args.command == "isoperimetry":
            return _cmd_isoperimetry(cfg, args.method)
        if args.command == "simulate":
            return _cmd_simulate(cfg)
        runner = {"verify-bounds": xp.run_verify_bounds,
                  "scaling": xp.run_scaling,
                  "transience": xp.run_transience}[args.command]
        report = runner(cfg)
        path = xp.write_report(report, cfg.out_dir, args.command)
        print(f"wrote {path}")
        if not report.get("ok", False):
            print("FAILED: report contains violated assertions",
                  file=sys.stderr)
            return 1
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (AwlabError, AssertionError) as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
