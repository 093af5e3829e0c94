"""Experiment runners: scaling sweeps with growth-rate fits, the exact
lower-bound verification suite, short-term behavior runs, and invariant
fuzzing with self-contained replay bundles.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import adversary, analytics, rotor
from .errors import CapExceeded, InvalidParameters
from .graphs import (Graph, build_family, FamilyId, edge_list_text,
                     graph_from_edge_list_text, random_connected_graph)

__all__ = [
    "ExperimentSpec",
    "ReportRow",
    "FitResult",
    "ScalingResult",
    "fit_loglog",
    "instance_graph",
    "run_scaling",
    "ExactCase",
    "ExactSuiteResult",
    "run_exact_suite",
    "TORUS7_PHASE_CHECKPOINTS",
    "ShortTermResult",
    "run_short_term",
    "FuzzResult",
    "run_fuzz",
    "replay_bundle",
    "run_replay",
    "emit",
    "REPORT_COLUMNS",
]

REPORT_COLUMNS = [
    "family", "n", "m", "builder", "start",
    "vertex_cover_steps", "edge_cover_steps",
    "mc_vertex_mean", "mc_vertex_stderr", "mc_edge_mean", "mc_edge_stderr",
    "max_k", "three_max_k", "psi", "lambda2", "flow_total",
]


@dataclass
class ReportRow:
    family: str
    n: int
    m: int
    builder: str
    start: int
    vertex_cover_steps: int | None = None
    edge_cover_steps: int | None = None
    mc_vertex_mean: float | None = None
    mc_vertex_stderr: float | None = None
    mc_edge_mean: float | None = None
    mc_edge_stderr: float | None = None
    max_k: float | None = None
    three_max_k: float | None = None
    psi: float | None = None
    lambda2: float | None = None
    flow_total: float | None = None

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in REPORT_COLUMNS}


@dataclass
class ExperimentSpec:
    """What to sweep: family x sizes under one configuration builder."""

    family: str
    sizes: tuple[int, ...]
    builder: str = "canonical"
    start: int | None = None          # None = builder-prescribed start
    modes: tuple[str, ...] = ("vertex",)
    trials: int = 0                   # Monte Carlo baseline trials (0 = off)
    seed: int = 1
    cap: int | None = None
    k: int = 2                        # kary_tree arity
    degree: int = 10                  # random_regular / expander degree
    analytics_max_n: int = 0          # compute K/lambda2 up to this n
    psi_max_n: int = 64
    flow_max_n: int = 128

    def __post_init__(self):
        if list(self.sizes) != sorted(set(self.sizes)):
            raise InvalidParameters("sizes must be strictly increasing")
        if self.builder not in adversary.BUILDERS:
            raise InvalidParameters(f"unknown builder {self.builder!r}")
        for mode in self.modes:
            if mode not in ("vertex", "edge"):
                raise InvalidParameters(f"unknown mode {mode!r}")


def instance_graph(family: str, size: int, *, k: int = 2, degree: int = 10,
                   seed: int = 1) -> Graph:
    """Map a scalar sweep size to a concrete family instance.

    size means: n for cycle/path/complete/star/lollipop; the side for torus;
    the dimension for hypercube; the depth for kary_tree; n for
    random_regular (with --degree); the level count for
    tree_anchored_expander (with --degree).
    """
    if family == "torus":
        return build_family(FamilyId("torus", (size, size)))
    if family == "hypercube":
        return build_family(FamilyId("hypercube", (size,)))
    if family == "kary_tree":
        return build_family(FamilyId("kary_tree", (k, size)))
    if family == "random_regular":
        return build_family(FamilyId("random_regular", (size, degree, seed)))
    if family == "tree_anchored_expander":
        return build_family(FamilyId("tree_anchored_expander", (degree, size, seed)))
    return build_family(FamilyId(family, (size,)))


@dataclass
class FitResult:
    slope: float
    intercept: float
    r2: float

    def as_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r2": self.r2}


def fit_loglog(ns: Sequence[float], ys: Sequence[float]) -> FitResult:
    """Least-squares slope of log(y) vs log(n) with R^2."""
    ns = np.asarray(ns, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(ns) < 3:
        raise InvalidParameters("need >= 3 sizes for a fit")
    x, y = np.log(ns), np.log(ys)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return FitResult(float(slope), float(intercept), r2)


@dataclass
class ScalingResult:
    spec: ExperimentSpec
    rows: list[ReportRow]
    fit_vertex: FitResult | None = None
    fit_edge: FitResult | None = None
    failures: list[dict] = field(default_factory=list)


def run_scaling(spec: ExperimentSpec) -> ScalingResult:
    """One ReportRow per instance plus log-log fits over completed runs."""
    rows: list[ReportRow] = []
    failures: list[dict] = []
    build = adversary.BUILDERS[spec.builder]
    for size in spec.sizes:
        g = instance_graph(spec.family, size, k=spec.k, degree=spec.degree,
                           seed=spec.seed)
        config, b_start = build(g, seed=spec.seed)
        start = b_start if spec.start is None else spec.start
        row = ReportRow(family=spec.family, n=g.n, m=g.m,
                        builder=spec.builder, start=start)
        for mode in spec.modes:
            runner = (rotor.run_until_vertex_cover if mode == "vertex"
                      else rotor.run_until_edge_cover)
            try:
                steps, _ = runner(g, config, start, spec.cap)
                if mode == "vertex":
                    row.vertex_cover_steps = steps
                else:
                    row.edge_cover_steps = steps
            except CapExceeded as exc:
                failures.append({"family": spec.family, "n": g.n, "mode": mode,
                                 "cap": spec.cap, "steps": exc.steps})
        if spec.trials > 0:
            for mode in spec.modes:
                mc = analytics.mc_random_walk(g, start, f"{mode}_cover",
                                              spec.trials, spec.seed, spec.cap)
                if mode == "vertex":
                    row.mc_vertex_mean, row.mc_vertex_stderr = mc.mean, mc.stderr
                else:
                    row.mc_edge_mean, row.mc_edge_stderr = mc.mean, mc.stderr
        if g.n <= spec.analytics_max_n:
            lazy = spec.builder == "lazy"
            ana = analytics.analyze_chain(g, lazy=lazy)
            row.max_k = ana.max_k
            row.three_max_k = 3.0 * ana.max_k
            row.lambda2 = ana.lambda2_abs
            if g.n <= spec.psi_max_n:
                try:
                    chain = analytics.build_chain(g, lazy=True)
                    row.psi = float(analytics.local_divergence_all(chain).max())
                except analytics.NonConvergent:
                    row.psi = None
            if g.n <= spec.flow_max_n:
                row.flow_total = max(analytics.electrical_flow(g, s).total_abs
                                     for s in range(g.n))
        rows.append(row)
    rows.sort(key=lambda r: (r.family, r.n))
    result = ScalingResult(spec=spec, rows=rows, failures=failures)
    v_pts = [(r.n, r.vertex_cover_steps) for r in rows if r.vertex_cover_steps]
    e_pts = [(r.n, r.edge_cover_steps) for r in rows if r.edge_cover_steps]
    if len(v_pts) >= 3:
        result.fit_vertex = fit_loglog([p[0] for p in v_pts], [p[1] for p in v_pts])
    if len(e_pts) >= 3:
        result.fit_edge = fit_loglog([p[0] for p in e_pts], [p[1] for p in e_pts])
    return result


# ----------------------------------------------------------------------------
# Exact lower-bound suite
# ----------------------------------------------------------------------------

# Phase boundaries of the origin-pointing walk on the 7x7 torus: at each
# listed step the walk stands at canonical coordinates (0, y).
TORUS7_PHASE_CHECKPOINTS = (
    (1, 1), (9, 1), (18, 2), (49, 1), (57, 1), (66, 2),
    (83, 3), (138, 2), (169, 1), (177, 1), (186, 2), (203, 3),
)


@dataclass
class ExactCase:
    name: str
    n: int
    expected: int
    measured: int
    passed: bool
    comparison: str = "=="


@dataclass
class ExactSuiteResult:
    cases: list[ExactCase]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self) -> list[ExactCase]:
        return [c for c in self.cases if not c.passed]

    def summary_lines(self) -> list[str]:
        groups: dict[str, list[ExactCase]] = {}
        for c in self.cases:
            groups.setdefault(c.name.split("[")[0], []).append(c)
        lines = []
        for name, cases in groups.items():
            ok = sum(c.passed for c in cases)
            flag = "PASS" if ok == len(cases) else "FAIL"
            lines.append(f"[{flag}] {name}: {ok}/{len(cases)} cases")
        return lines


def _exact_case(name, n, expected, measured, comparison="==") -> ExactCase:
    passed = measured == expected if comparison == "==" else measured >= expected
    return ExactCase(name=name, n=n, expected=expected, measured=measured,
                     passed=passed, comparison=comparison)


def run_exact_suite(cycle_max: int = 2001, path_sizes=(2, 3, 5, 9, 17, 33, 501, 1001),
                    torus_sides=(3, 5, 7, 9, 11, 13), hypercube_max_d: int = 12,
                    complete_range=(4, 64), random_euler_cases: int = 50,
                    seed: int = 2024) -> ExactSuiteResult:
    """Integer-equality checks of every closed-form construction.

    Cycle and torus formulas count steps; path and hypercube formulas count
    distinct walk positions (steps + 1), matching their derivations.
    """
    cases: list[ExactCase] = []

    for n in range(3, cycle_max + 1, 2):
        g = build_family(FamilyId("cycle", (n,)))
        config, start = adversary.cycle_inward_config(g)
        steps, _ = rotor.run_until_vertex_cover(g, config, start)
        cases.append(_exact_case(f"cycle_inward[{n}]", n, (n - 1) * n // 2, steps))

    for n in path_sizes:
        g = build_family(FamilyId("path", (n,)))
        config, start = adversary.cycle_inward_config(g)
        steps, _ = rotor.run_until_vertex_cover(g, config, start)
        cases.append(_exact_case(f"path_inward_positions[{n}]", n,
                                 (n - 1) ** 2 + 1, steps + 1))

    for side in torus_sides:
        g = build_family(FamilyId("torus", (side, side)))
        config, start = adversary.torus_origin_config(g)
        steps, state = rotor.run_until_vertex_cover(g, config, start)
        n = side * side
        expected = (2 * (n * side - side)) // 3   # (2/3)(n^{3/2} - sqrt(n))
        cases.append(_exact_case(f"torus_origin[{side}x{side}]", n, expected, steps))
        if side == 7:
            _, trace = rotor.run_recorded(g, config, start, budget=210)
            verts = trace.vertices(start)
            ok = all(adversary.torus_label(7, int(verts[step])) == (0, y)
                     for step, y in TORUS7_PHASE_CHECKPOINTS)
            cases.append(ExactCase(name="torus7_phase_checkpoints", n=n,
                                   expected=1, measured=int(ok), passed=ok))

    for d in range(1, hypercube_max_d + 1):
        g = build_family(FamilyId("hypercube", (d,)))
        config, start = adversary.hypercube_lex_config(g)
        far = (1 << d) - 1
        state = rotor.WalkState.begin(g, config, start)
        cap = rotor.default_cap(g)
        rotor.run_steps(g, state, cap, rotor.STOP_VERTEX_COVER)
        fv = int(state.first_visit[far])
        expected = d + 1 + d * (d - 1) * (1 << (d - 1))
        cases.append(_exact_case(f"hypercube_lex_positions[{d}]", g.n,
                                 expected, fv + 1))

    lo, hi = complete_range
    for n in range(lo, hi + 1):
        g = build_family(FamilyId("complete", (n,)))
        config, start = adversary.euler_avoid_config(g)
        steps, _ = rotor.run_until_vertex_cover(g, config, start)
        cases.append(_exact_case(f"complete_euler_lower[{n}]", n,
                                 g.m - g.min_degree, steps, comparison=">="))

    rng = np.random.default_rng(seed)
    made = 0
    attempt = 0
    while made < random_euler_cases:
        attempt += 1
        n = int(rng.integers(5, 40))
        p = float(rng.uniform(0.2, 0.8))
        sub = int(rng.integers(1 << 30))
        try:
            g = random_connected_graph(n, p, sub)
            config, start = adversary.euler_avoid_config(g)
        except InvalidParameters:
            continue
        steps, _ = rotor.run_until_vertex_cover(g, config, start)
        cases.append(_exact_case(f"random_euler_lower[{attempt}]", n,
                                 g.m - g.min_degree, steps, comparison=">="))
        made += 1

    return ExactSuiteResult(cases=cases)


# ----------------------------------------------------------------------------
# Short-term behavior
# ----------------------------------------------------------------------------

@dataclass
class ShortTermResult:
    rows: list[dict]

    @property
    def ok(self) -> bool:
        return all(r["bound_ok"] for r in self.rows)


def short_term_bound(t: int, delta: int, directed_edges: int) -> float:
    """Minimum distinct directed edges after t steps.

    min(t, sqrt(t) delta/13), saturating at the number of directed edges:
    once everything is traversed the sqrt(t) growth no longer applies (the
    rate argument's own fallback case).
    """
    return min(float(t), math.sqrt(t) * delta / 13.0, float(directed_edges))


def run_short_term(g: Graph, config: rotor.RotorConfiguration, start: int,
                   horizons: Sequence[int]) -> ShortTermResult:
    """Distinct vertex / edge counts at each horizon, with the rate bound.

    Distinct edges are counted as directed traversals, which is what the
    per-edge visit cap argument controls.
    """
    horizons = list(horizons)
    if horizons != sorted(set(horizons)) or horizons[0] < 1:
        raise InvalidParameters("horizons must be ascending positive")
    state = rotor.WalkState.begin(g, config, start)
    delta = g.min_degree
    rows = []
    done = 0
    for t in horizons:
        rotor.run_steps(g, state, t - done)
        done = t
        bound = short_term_bound(t, delta, 2 * g.m)
        rows.append({
            "t": t,
            "distinct_vertices": state.visited_count,
            "distinct_edges_directed": state.distinct_directed,
            "distinct_edges_undirected": state.covered_edge_count,
            "bound": bound,
            "bound_ok": state.distinct_directed >= bound - 1e-9,
        })
    return ShortTermResult(rows=rows)


# ----------------------------------------------------------------------------
# Invariant fuzzing
# ----------------------------------------------------------------------------

CHECKPOINTS = (10, 100, 1_000, 10_000)
CONC_SLACK = 1e-8


def replay_bundle(g: Graph, config: rotor.RotorConfiguration, start: int,
                  seed: int, kind: str, details: dict) -> dict:
    """Self-contained reproduction record for a fuzz violation."""
    return {
        "kind": kind,
        "details": details,
        "seed": seed,
        "start": start,
        "graph": edge_list_text(g),
        "config": rotor.config_text(config),
    }


def run_replay(bundle: dict, budget: int = 10_000):
    """Re-run a bundle; returns (state, trace) for bit-identical comparison."""
    g = graph_from_edge_list_text(bundle["graph"])
    config = rotor.config_from_text(bundle["config"])
    return rotor.run_recorded(g, config, bundle["start"], budget)


@dataclass
class FuzzResult:
    cases: int
    violations: list[dict]
    max_concentration_residual: float
    max_lazy_concentration_residual: float
    edge_cover_vs_bound_margin: float    # min over cases of 3 maxK' - EC steps

    @property
    def ok(self) -> bool:
        return not self.violations


def _fuzz_case_graph(rng: np.random.Generator, max_n: int) -> Graph:
    n = int(rng.integers(4, max_n + 1))
    p = float(rng.uniform(0.2, 0.9))
    return random_connected_graph(n, p, int(rng.integers(1 << 30)))


def run_fuzz(cases: int = 500, seed: int = 7, max_n: int = 24,
             checkpoints: Sequence[int] = CHECKPOINTS) -> FuzzResult:
    """Random small graphs x random rotor configurations x random starts.

    Per case: a checked walk (balance + edge-interleaving at every step,
    counter conservation, concentration against the plain chain, short-term
    rate at checkpoints) and a lazy walk (edge cover within 3 max K', lazy
    concentration at checkpoints). Zero violations required.
    """
    rng = np.random.default_rng(seed)
    ker_status_names = {2: "balance", 3: "edge_interleaving"}
    violations: list[dict] = []
    max_resid = -math.inf
    max_lazy_resid = -math.inf
    min_margin = math.inf

    for case in range(cases):
        case_seed = int(rng.integers(1 << 30))
        g = _fuzz_case_graph(rng, max_n)
        config = adversary.random_config(g, case_seed)
        start = int(rng.integers(g.n))

        plain = analytics.analyze_chain(g, lazy=False)
        state = rotor.WalkState.begin(g, config, start)
        checked = rotor.CheckedRun.begin(g)
        done = 0
        for t in checkpoints:
            status = rotor.run_steps_checked(g, state, checked, t - done)
            done = t
            if status in ker_status_names:
                violations.append(replay_bundle(
                    g, config, start, case_seed, ker_status_names[status],
                    {"viol": [int(x) for x in checked.viol], "case": case}))
                break
            if not state.counters_consistent():
                violations.append(replay_bundle(
                    g, config, start, case_seed, "counter_conservation",
                    {"t": state.t, "case": case}))
                break
            resid = rotor.concentration_check(state, plain.chain.pi, plain.K)
            max_resid = max(max_resid, resid)
            if resid > CONC_SLACK:
                violations.append(replay_bundle(
                    g, config, start, case_seed, "concentration",
                    {"residual": resid, "t": state.t, "case": case}))
                break
            bound = short_term_bound(state.t, g.min_degree, 2 * g.m)
            if state.distinct_directed < bound - 1e-9:
                violations.append(replay_bundle(
                    g, config, start, case_seed, "short_term_rate",
                    {"t": state.t, "distinct": state.distinct_directed,
                     "bound": bound, "case": case}))
                break

        lazy_chain, lazy_config = rotor.lazify(g, config)
        lazy = analytics.analyze_chain(g, lazy=True)
        try:
            ec_steps, _ = rotor.run_until_edge_cover(g, lazy_config, start)
        except CapExceeded:
            violations.append(replay_bundle(
                g, lazy_config, start, case_seed, "edge_cover_cap",
                {"case": case}))
            continue
        margin = 3.0 * lazy.max_k - ec_steps
        min_margin = min(min_margin, margin)
        if margin < 0:
            violations.append(replay_bundle(
                g, lazy_config, start, case_seed, "edge_cover_bound",
                {"steps": ec_steps, "bound": 3.0 * lazy.max_k, "case": case}))
        lstate = rotor.WalkState.begin(g, lazy_config, start)
        done = 0
        for t in checkpoints:
            rotor.run_steps(g, lstate, t - done)
            done = t
            resid = rotor.concentration_check(lstate, lazy.chain.pi, lazy.K)
            max_lazy_resid = max(max_lazy_resid, resid)
            if resid > CONC_SLACK:
                violations.append(replay_bundle(
                    g, lazy_config, start, case_seed, "lazy_concentration",
                    {"residual": resid, "t": lstate.t, "case": case}))
                break

    return FuzzResult(cases=cases, violations=violations,
                      max_concentration_residual=max_resid,
                      max_lazy_concentration_residual=max_lazy_resid,
                      edge_cover_vs_bound_margin=min_margin)


# ----------------------------------------------------------------------------
# Emission
# ----------------------------------------------------------------------------

def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def emit(rows: Sequence[ReportRow], path, fmt: str = "csv",
         meta: dict | None = None, fits: dict | None = None) -> None:
    """Write report rows with a stable column order.

    CSV: exact step counts stay integers, floats use 6 significant digits.
    JSON round-trips the full values.
    """
    rows = list(rows)
    if not rows:
        raise InvalidParameters("report is empty")
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(REPORT_COLUMNS)
            for row in rows:
                writer.writerow([_fmt_cell(getattr(row, c)) for c in REPORT_COLUMNS])
    elif fmt == "json":
        payload = {"meta": meta or {}, "rows": [r.as_dict() for r in rows]}
        if fits:
            payload["fits"] = fits
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=False)
            fh.write("\n")
    else:
        raise InvalidParameters(f"unknown format {fmt!r}")


def rows_from_json(path) -> list[ReportRow]:
    with open(path) as fh:
        payload = json.load(fh)
    return [ReportRow(**{k: row.get(k) for k in REPORT_COLUMNS})
            for row in payload["rows"]]
