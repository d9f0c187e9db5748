"""Command-line entry points.

Subcommands: params, generate, degrees, diameter, communities, expander,
concentration, experiment.  Analyses print a JSON payload to stdout;
`generate` prints the edge list as CSV unless --out names a directory.
GPANET_OUT supplies a default output directory when --out is omitted.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .graph import MODEL_NAMES, EdgeKind, KIND_NAMES
from .harness import (ExperimentSpec, derive_parameters, run_experiment)
from .metrics import (analytic_fk, community_check, concentration_report,
                      degree_histogram, diameter, expander_scan,
                      fit_power_law_exponent)
from .models import ModelConfig, default_probes, generate


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=MODEL_NAMES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--r", type=float, default=None,
                   help="cap radius as a central angle in (0, pi]")
    p.add_argument("--c0", type=float, default=None,
                   help="when --r is omitted, use r = min(ln(n)^c0/sqrt(n), pi)")
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--seed", type=int, required=True)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None,
                   help="output directory (default: $GPANET_OUT if set)")
    p.add_argument("--json", action="store_true",
                   help="machine-readable output, including errors")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="gpanet")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derived radius/time scales")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--c0", type=float, required=True)
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("generate", help="grow a graph, emit edge list + trace")
    _add_graph_args(p)
    _add_common(p)
    p.add_argument("--probes", type=int, default=0)
    p.add_argument("--checkpoints", default=None,
                   help="comma-separated times for the occupancy trace")

    p = sub.add_parser("degrees", help="degree histogram, tail fit, law check")
    _add_graph_args(p)
    _add_common(p)
    p.add_argument("--kmin", type=int, default=None,
                   help="fit threshold (default: m)")
    p.add_argument("--kind", default="total")

    p = sub.add_parser("diameter", help="shortest-path diameter")
    _add_graph_args(p)
    _add_common(p)
    p.add_argument("--mode", default="exact",
                   choices=["exact", "component-wise"])
    p.add_argument("--method", default=None,
                   choices=["bfs-all", "double-sweep-prune"])

    p = sub.add_parser("communities", help="cap communities around sampled vertices")
    _add_graph_args(p)
    _add_common(p)
    p.add_argument("--R", type=float, default=None,
                   help="community radius (default: 2r)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--size-cap", type=float, default=None)
    p.add_argument("--centers", type=int, default=50)

    p = sub.add_parser("expander", help="conductance scan over radii")
    _add_graph_args(p)
    _add_common(p)
    p.add_argument("--radii", default=None,
                   help="comma-separated radii (default: r,2r)")
    p.add_argument("--centers", type=int, default=100)

    p = sub.add_parser("concentration", help="cap occupancy vs expectation")
    _add_graph_args(p)
    _add_common(p)
    p.add_argument("--probes", type=int, default=3)
    p.add_argument("--checkpoints", default=None,
                   help="comma-separated times (default: quartiles of n)")
    p.add_argument("--t-r", type=float, default=None, dest="t_r")

    p = sub.add_parser("experiment", help="run an ExperimentSpec JSON file")
    p.add_argument("--spec", required=True)
    _add_common(p)
    return top


def _default_out(args) -> Path | None:
    if args.out is not None:
        return Path(args.out)
    env = os.environ.get("GPANET_OUT")
    return Path(env) if env else None


def _resolve_r(args) -> float:
    if args.r is not None:
        return args.r
    if args.c0 is None:
        raise ValueError("need --r or --c0 to fix the cap radius")
    if args.n < 2:
        raise ValueError("--c0 needs n >= 2")
    return min(math.log(args.n) ** args.c0 / math.sqrt(args.n), math.pi)


def _parse_times(text: str | None, n: int) -> tuple[int, ...]:
    if text is None:
        qs = sorted({max(1, n // 4), max(1, n // 2), max(1, 3 * n // 4), n})
        return tuple(qs)
    return tuple(int(t) for t in text.split(","))


def _config_from_args(args, probes=None, checkpoints=()) -> ModelConfig:
    return ModelConfig(model=args.model, n=args.n, m=args.m, xi=args.xi,
                       r=_resolve_r(args), seed=args.seed, delta=args.delta,
                       probes=probes, checkpoint_times=checkpoints)


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for k in sorted(payload):
            print(f"{k}: {payload[k]}")


def _cmd_params(args) -> int:
    dp = derive_parameters(args.n, args.xi, args.c0, args.c1, args.r)
    print(json.dumps(dp.to_json_dict(), sort_keys=True, indent=2))
    return 0


def _cmd_generate(args) -> int:
    k = args.probes
    cps = _parse_times(args.checkpoints, args.n) if args.checkpoints else ()
    cfg = _config_from_args(args, default_probes(k) if k else None, cps)
    g, trace = generate(cfg)
    out = _default_out(args)
    if out is None:
        print("src,dst,kind")
        names = [KIND_NAMES[EdgeKind(i)] for i in range(3)]
        for s, d, kidx in zip(g.edge_src, g.edge_dst, g.edge_kind):
            print(f"{s},{d},{names[kidx]}")
        return 0
    out.mkdir(parents=True, exist_ok=True)
    g.write_edges_csv(out / "edges.csv")
    g.write_vertices_csv(out / "vertices.csv")
    files = ["edges.csv", "vertices.csv"]
    if cps:
        trace.write_csv(out / "trace.csv")
        files.append("trace.csv")
    (out / "config.json").write_text(
        json.dumps(cfg.to_json_dict(), sort_keys=True, indent=2) + "\n")
    files.append("config.json")
    _emit({"out": str(out), "files": files, "n": g.n,
           "edges": int(g.edge_src.size)}, args.json)
    return 0


def _cmd_degrees(args) -> int:
    cfg = _config_from_args(args)
    g, _ = generate(cfg)
    h = degree_histogram(g, args.kind)
    k_min = cfg.m if args.kmin is None else args.kmin
    fit = fit_power_law_exponent(h, k_min)
    ks, cs = h.as_arrays()
    sel = ks >= cfg.m
    emp = cs[sel] / cs[sel].sum()
    l1 = float(np.abs(emp - analytic_fk(ks[sel], cfg.m, cfg.xi, cfg.delta)).sum())
    payload = {"config": cfg.to_json_dict(), "kind": args.kind,
               "k_min": int(k_min), "exponent": fit.exponent,
               "stderr": fit.stderr, "tail_count": fit.tail_count,
               "expected_exponent": 3.0 + cfg.xi, "fk_l1_distance": l1,
               "max_degree": int(ks.max())}
    out = _default_out(args)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        h.write_csv(out / "degrees.csv")
        payload["histogram_csv"] = str(out / "degrees.csv")
    _emit(payload, args.json)
    return 0


def _cmd_diameter(args) -> int:
    cfg = _config_from_args(args)
    g, _ = generate(cfg)
    rep = diameter(g, args.mode, args.method)
    payload = rep.to_json_dict()
    payload["config"] = cfg.to_json_dict()
    _emit(payload, args.json)
    return 0


def _cmd_communities(args) -> int:
    cfg = _config_from_args(args)
    g, _ = generate(cfg)
    R = 2.0 * cfg.r if args.R is None else args.R
    size_cap = float(cfg.n) if args.size_cap is None else args.size_cap
    k = min(args.centers, cfg.n)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 101]))
    centers = np.sort(rng.choice(cfg.n, size=k, replace=False))
    reports = [community_check(g, int(v), R, args.alpha, args.beta,
                               size_cap).to_json_dict() for v in centers]
    payload = {"config": cfg.to_json_dict(), "R": R, "alpha": args.alpha,
               "beta": args.beta, "size_cap": size_cap,
               "n_checked": len(reports),
               "n_satisfying": sum(r["satisfies"] for r in reports),
               "reports": reports}
    _emit(payload, args.json)
    return 0


def _cmd_expander(args) -> int:
    cfg = _config_from_args(args)
    g, _ = generate(cfg)
    radii = ([float(x) for x in args.radii.split(",")] if args.radii
             else [cfg.r, min(2.0 * cfg.r, math.pi)])
    k = min(args.centers, cfg.n)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 202]))
    centers = np.sort(rng.choice(cfg.n, size=k, replace=False))
    payload = expander_scan(g, centers, radii).to_json_dict()
    payload["config"] = cfg.to_json_dict()
    _emit(payload, args.json)
    return 0


def _cmd_concentration(args) -> int:
    cps = _parse_times(args.checkpoints, args.n)
    cfg = _config_from_args(args, default_probes(args.probes), cps)
    _, trace = generate(cfg)
    rep = concentration_report(trace, cfg, args.t_r)
    payload = rep.to_json_dict()
    payload["config"] = cfg.to_json_dict()
    out = _default_out(args)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        trace.write_csv(out / "trace.csv")
        payload["trace_csv"] = str(out / "trace.csv")
    _emit(payload, args.json)
    return 0


def _cmd_experiment(args) -> int:
    spec_dict = json.loads(Path(args.spec).read_text())
    if args.out is not None:
        spec_dict["out_dir"] = args.out
    spec = ExperimentSpec.from_json_dict(spec_dict)
    index = run_experiment(spec)
    if args.json:
        print(json.dumps(index, sort_keys=True, indent=2))
    else:
        print(f"wrote {len(index['artifacts'])} artifacts to {spec.out_dir}")
        for err in index["errors"]:
            print(f"error [seed {err['seed']}, {err['analysis']}]: "
                  f"{err['error']}", file=sys.stderr)
    return 0


_HANDLERS = {
    "params": _cmd_params,
    "generate": _cmd_generate,
    "degrees": _cmd_degrees,
    "diameter": _cmd_diameter,
    "communities": _cmd_communities,
    "expander": _cmd_expander,
    "concentration": _cmd_concentration,
    "experiment": _cmd_experiment,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, OSError) as exc:
        if getattr(args, "json", False):
            print(json.dumps({"error": str(exc), "command": args.command}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
