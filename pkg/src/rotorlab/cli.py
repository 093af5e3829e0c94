"""Command-line experiment runner.

Subcommands: scaling | exact | short-term | fuzz | analyze | graph.
Exit code 0 only when every assertion in the invoked suite passes.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import adversary, analytics, experiments
from .backend import active_backend
from .errors import RotorLabError
from .graphs import read_edge_list, write_edge_list


def _sizes(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def _load_or_build(args) -> tuple:
    if getattr(args, "graph_file", None):
        g = read_edge_list(args.graph_file)
        family = "file"
    else:
        g = experiments.instance_graph(args.family, args.size, k=args.k,
                                       degree=args.degree, seed=args.seed)
        family = args.family
    return g, family


def _add_common(p, sizes=False, size=False):
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cap", type=int, default=None, help="step cap per run")
    p.add_argument("--out", default=None, help="output file path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--k", type=int, default=2, help="kary_tree arity")
    p.add_argument("--degree", type=int, default=10,
                   help="degree for random_regular / tree_anchored_expander")
    if sizes:
        p.add_argument("--family", required=True)
        p.add_argument("--sizes", type=_sizes, required=True,
                       help="comma separated instance sizes")
    if size:
        p.add_argument("--family", default=None)
        p.add_argument("--size", type=int, default=None)
        p.add_argument("--graph-file", default=None,
                       help="edge-list file instead of --family/--size")


def cmd_scaling(args) -> int:
    spec = experiments.ExperimentSpec(
        family=args.family, sizes=args.sizes, builder=args.builder,
        start=args.start, modes=tuple(args.mode), trials=args.trials,
        seed=args.seed, cap=args.cap, k=args.k, degree=args.degree,
        analytics_max_n=args.analytics_max_n)
    result = experiments.run_scaling(spec)
    fits = {}
    for name, fit in (("vertex", result.fit_vertex), ("edge", result.fit_edge)):
        if fit:
            fits[name] = fit.as_dict()
            print(f"{name} fit: slope={fit.slope:.4f} r2={fit.r2:.5f}")
    for row in result.rows:
        print(f"  n={row.n} m={row.m} vc={row.vertex_cover_steps} "
              f"ec={row.edge_cover_steps} mc_v={row.mc_vertex_mean}")
    if result.failures:
        print(f"{len(result.failures)} runs hit the cap", file=sys.stderr)
    if args.out:
        meta = {"seed": args.seed, "builder": args.builder, "family": args.family,
                "backend": active_backend()}
        experiments.emit(result.rows, args.out, args.format, meta=meta, fits=fits)
        print(f"wrote {args.out}")
    return 1 if result.failures else 0


def cmd_exact(args) -> int:
    kwargs = {}
    if args.quick:
        kwargs = {"cycle_max": 201, "hypercube_max_d": 8,
                  "complete_range": (4, 24), "random_euler_cases": 10}
    result = experiments.run_exact_suite(seed=args.seed, **kwargs)
    for line in result.summary_lines():
        print(line)
    for case in result.failures():
        print(f"  FAIL {case.name}: expected {case.comparison} {case.expected}, "
              f"measured {case.measured}")
    if args.out:
        payload = [c.__dict__ for c in result.cases]
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
        print(f"wrote {args.out}")
    print(f"exact suite: {'PASS' if result.ok else 'FAIL'} "
          f"({len(result.cases)} cases)")
    return 0 if result.ok else 1


def cmd_short_term(args) -> int:
    g, family = _load_or_build(args)
    builder = adversary.BUILDERS[args.builder]
    config, b_start = builder(g, seed=args.seed)
    start = b_start if args.start is None else args.start
    result = experiments.run_short_term(g, config, start, args.horizons)
    print(f"family={family} n={g.n} m={g.m} delta={g.min_degree} "
          f"builder={args.builder} start={start}")
    for row in result.rows:
        flag = "ok" if row["bound_ok"] else "VIOLATION"
        print(f"  t={row['t']} vertices={row['distinct_vertices']} "
              f"edges_directed={row['distinct_edges_directed']} "
              f"bound={row['bound']:.3f} {flag}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(result.rows, fh, indent=2)
        print(f"wrote {args.out}")
    return 0 if result.ok else 1


def cmd_fuzz(args) -> int:
    result = experiments.run_fuzz(cases=args.cases, seed=args.seed,
                                  max_n=args.max_n)
    print(f"fuzz: {result.cases} cases, {len(result.violations)} violations")
    print(f"  max concentration residual (plain): "
          f"{result.max_concentration_residual:.3e}")
    print(f"  max concentration residual (lazy):  "
          f"{result.max_lazy_concentration_residual:.3e}")
    print(f"  min (3 max K' - edge cover steps):  "
          f"{result.edge_cover_vs_bound_margin:.3f}")
    if result.violations and args.out:
        with open(args.out, "w") as fh:
            json.dump(result.violations, fh, indent=2)
        print(f"wrote replay bundles to {args.out}")
    print(f"fuzz suite: {'PASS' if result.ok else 'FAIL'}")
    return 0 if result.ok else 1


def cmd_analyze(args) -> int:
    g, family = _load_or_build(args)
    chain = analytics.build_chain(g, lazy=args.lazy)
    report = analytics.bound_evaluators(
        g, chain=chain,
        with_divergence=g.n <= args.psi_max_n,
        with_flow=g.n <= args.flow_max_n)
    payload = {"family": family, **report.to_dict()}
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    if args.matrices_dir:
        import os
        os.makedirs(args.matrices_dir, exist_ok=True)
        analytics.save_matrix(f"{args.matrices_dir}/P.txt", chain.P)
        analytics.save_matrix(f"{args.matrices_dir}/H.txt",
                              analytics.hitting_times(chain))
        print(f"wrote matrices to {args.matrices_dir}")
    return 0


def cmd_graph(args) -> int:
    g = experiments.instance_graph(args.family, args.size, k=args.k,
                                   degree=args.degree, seed=args.seed)
    write_edge_list(g, args.out)
    print(f"wrote {args.out} (n={g.n}, m={g.m})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorlab",
        description="Rotor-router walk laboratory: cover-time experiments, "
                    "adversarial configurations, and chain-analytic bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scaling", help="cover-time sweeps with log-log fits")
    _add_common(p, sizes=True)
    p.add_argument("--builder", default="canonical",
                   choices=sorted(adversary.BUILDERS))
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--mode", action="append", choices=("vertex", "edge"),
                   default=None)
    p.add_argument("--trials", type=int, default=0,
                   help="Monte Carlo baseline trials per instance")
    p.add_argument("--analytics-max-n", type=int, default=0)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("exact", help="closed-form lower-bound verification")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("short-term", help="distinct vertices/edges per horizon")
    _add_common(p, size=True)
    p.add_argument("--builder", default="canonical",
                   choices=sorted(adversary.BUILDERS))
    p.add_argument("--start", type=int, default=None)
    p.add_argument("--horizons", type=_sizes, default=(10, 100, 1000, 10000))
    p.set_defaults(func=cmd_short_term)

    p = sub.add_parser("fuzz", help="random invariant checks with replay bundles")
    p.add_argument("--cases", type=int, default=500)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--max-n", type=int, default=24)
    p.add_argument("--out", default=None, help="replay bundle path on failure")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("analyze", help="chain analytics and bound values")
    _add_common(p, size=True)
    p.add_argument("--lazy", action="store_true", help="analyze the lazy chain")
    p.add_argument("--psi-max-n", type=int, default=64)
    p.add_argument("--flow-max-n", type=int, default=256)
    p.add_argument("--matrices-dir", default=None,
                   help="dump P and H as plain text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("graph", help="export a family instance as an edge list")
    p.add_argument("--family", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--degree", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_graph)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "mode", "missing") is None:
        args.mode = ["vertex"]
    if hasattr(args, "size") and getattr(args, "graph_file", None) is None \
            and (args.family is None or args.size is None):
        print("need --family/--size or --graph-file", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except RotorLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
