"""Experiment orchestration: configs, pipelines, reports, CSV emission.

Four pipelines drive every empirical claim in the package:

* ``steiner-lb``  -- walk adversary vs a path-collection solution; exact
  girth certificates on every good walk.
* ``tsp-lb``      -- two-walk adversary vs a tour distribution; exact
  alternation certificates on every E1-and-E2 sample.
* ``universal-upper`` -- FRT trees on random metrics: domination, stretch,
  tour doubling, contiguity, and exact-oracle ratios.
* ``dp-transfer`` -- mechanism suite audits plus the transfer-theorem check.

Reproducibility contract: a (config, master seed) pair determines every row
byte-for-byte, because each trial consumes only its own derived substreams.
A certificate that fails on inputs meeting its preconditions contradicts a
theorem; the harness raises ``CertificateFalsification`` and the CLI maps it
to exit code 2.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rngs
from .adversary import (
    SteinerAdversaryConfig,
    TspAdversaryConfig,
    block_alternation,
    check_separation,
    is_good_walk,
    steiner_certificate,
    tsp_certificate,
)
from .expanders import lps_graph, random_regular, second_eigenvalue
from .frt import frt_sample, hst_dominates, hst_to_spanning_tree, stretch_stats
from .graphs import Graph, bfs_distances, girth as graph_girth, read_graph
from .metric import (
    MetricSpace,
    random_euclidean_metric,
    random_uniform_metric,
    shortest_path_metric,
)
from .oracles import OracleBudget, OracleRefusal, opt_surrogates, steiner_exact, tsp_exact
from .privacy import (
    LowerBoundWitness,
    MechanismTable,
    all_subsets,
    dp_audit,
    exponential_mechanism,
    transfer_check,
    transfer_lower_bound,
)
from .solutions import (
    PathCollection,
    SpanningTree,
    TourOrder,
    bfs_tree,
    project_paths,
    project_tour,
    project_tree,
    restricted_dfs_order,
    tree_to_path_collection,
    tree_to_tour,
)
from .walks import random_walk


class ConfigError(ValueError):
    pass


class CertificateFalsification(RuntimeError):
    """A certificate failed on inputs meeting its preconditions."""


PIPELINES = ("steiner-lb", "tsp-lb", "universal-upper", "dp-transfer")

_DEFAULTS: dict[str, object] = {
    "pipeline": "",
    "graph": "",
    "solution": "spt",
    "solution_count": 16,
    "trials": 1000,
    "t": "auto",
    "blocks": "auto",
    "gamma": 1.0,
    "separation_multiplier": 3,
    "oracle_cap": 0,
    "metric_cap": 6000,
    "seed": 0,
    "root": 0,
    "csv": "",
    "json": "",
    # universal-upper specifics
    "metrics": 20,
    "metric_kind": "euclidean",
    "metric_size_min": 32,
    "metric_size_max": 64,
    "trees_per_metric": 10,
    "terminals_per_metric": 3,
    "max_terminals": 10,
    # dp-transfer specifics
    "universe": 8,
    "mechanisms": 20,
    "eps": 0.5,
}

_INT_KEYS = {
    "solution_count", "trials", "separation_multiplier", "oracle_cap",
    "metric_cap", "seed", "root", "metrics", "metric_size_min",
    "metric_size_max", "trees_per_metric", "terminals_per_metric",
    "max_terminals", "universe", "mechanisms",
}
_FLOAT_KEYS = {"gamma", "eps"}


@dataclass(frozen=True)
class RunConfig:
    values: dict[str, object]

    def __getattr__(self, key: str):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    @staticmethod
    def make(**overrides) -> "RunConfig":
        values = dict(_DEFAULTS)
        for key, val in overrides.items():
            if key not in _DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            if val is None:
                continue
            values[key] = _coerce(key, val)
        if values["pipeline"] not in PIPELINES:
            raise ConfigError(f"pipeline must be one of {PIPELINES}")
        return RunConfig(values=values)

    @staticmethod
    def parse_file(path: str | Path) -> dict[str, str]:
        values: dict[str, str] = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
        return values

    @staticmethod
    def from_file(path: str | Path, **overrides) -> "RunConfig":
        values: dict[str, object] = dict(RunConfig.parse_file(path))
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.make(**values)


def _coerce(key: str, val: object) -> object:
    if key in _INT_KEYS:
        return int(val)
    if key in _FLOAT_KEYS:
        return float(val)
    if key in ("t", "blocks"):
        return val if val == "auto" else int(val)
    return str(val)


@dataclass
class ExperimentReport:
    config: dict[str, object]
    columns: list[str]
    rows: list[dict[str, object]]
    aggregates: dict[str, object] = field(default_factory=dict)
    series: list[dict[str, object]] = field(default_factory=list)
    wall_clock_sec: float = 0.0

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _cell(row.get(k)) for k in self.columns})
        return buf.getvalue()

    def write(self, csv_path: str | Path | None, json_path: str | Path | None) -> None:
        if csv_path:
            Path(csv_path).write_text(self.csv_text())
        if json_path:
            doc = {
                "config": self.config,
                "aggregates": self.aggregates,
                "series": self.series,
                "row_count": len(self.rows),
                "wall_clock_sec": self.wall_clock_sec,
            }
            Path(json_path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _cell(value) -> object:
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return value


@dataclass(frozen=True)
class InstanceBundle:
    graph: Graph
    label: str
    d: int
    girth: int | None
    diameter: int          # exact for vertex-transitive constructions, else an upper bound
    diameter_exact: bool
    beta: float | None = None
    metric: MetricSpace | None = None


def load_instance(spec_str: str, root: int, metric_cap: int, need_metric: bool) -> InstanceBundle:
    """Resolve a graph spec: ``lps:p,q`` | ``regular:n,d[,seed]`` | ``file:path``.

    The recorded diameter is exact for LPS graphs (vertex-transitivity), and
    exact whenever the dense metric is built; otherwise it is the upper bound
    2 * ecc(v0), which keeps the walk surrogates valid upper bounds.
    """
    kind, sep, rest = spec_str.partition(":")
    if not sep or kind not in ("lps", "regular", "file"):
        # bare path shorthand: --graph g.txt
        kind, rest = "file", spec_str
    metric: MetricSpace | None = None
    if kind == "lps":
        p, q = (int(x) for x in rest.split(","))
        g, cert = lps_graph(p, q)
        gir, diam, beta = cert.girth, cert.diameter, cert.beta
        diam_exact = True
        label = f"lps({p},{q})"
    elif kind == "regular":
        parts = [int(x) for x in rest.split(",")]
        n, d = parts[0], parts[1]
        seed = parts[2] if len(parts) > 2 else 0
        g = random_regular(n, d, seed)
        gir = graph_girth(g)
        beta = second_eigenvalue(g, tol=1e-6)
        diam, diam_exact = _diameter_bound(g, root, metric_cap)
        label = f"regular({n},{d})"
    elif kind == "file":
        g = read_graph(rest)
        gir = graph_girth(g)
        beta = None
        diam, diam_exact = _diameter_bound(g, root, metric_cap)
        label = rest
    else:
        raise ConfigError(f"unknown graph spec {spec_str!r}")
    if need_metric:
        if g.n > metric_cap:
            raise ConfigError(
                f"n={g.n} exceeds metric_cap={metric_cap}; this pipeline needs the full metric"
            )
        metric = shortest_path_metric(g, root)
        diam = int(metric.dist.max())
        diam_exact = True
    return InstanceBundle(graph=g, label=label, d=int(g.degrees.max()), girth=gir,
                          diameter=diam, diameter_exact=diam_exact, beta=beta,
                          metric=metric)


def _diameter_bound(g: Graph, root: int, metric_cap: int) -> tuple[int, bool]:
    if g.n <= metric_cap:
        m = shortest_path_metric(g, root)
        return int(m.dist.max()), True
    ecc = int(bfs_distances(g, root).max())
    return 2 * ecc, False


LB_COLUMNS = [
    "trial", "n", "d", "girth", "t", "x_size", "good", "e1", "e2",
    "shared", "lhs", "rhs", "ratio", "opt_kind",
]


def _steiner_solutions(cfg: RunConfig, inst: InstanceBundle) -> list[PathCollection]:
    root = cfg.root
    if cfg.solution == "spt":
        return [tree_to_path_collection(bfs_tree(inst.graph, root))]
    if cfg.solution == "frt":
        if inst.metric is None:
            raise ConfigError("frt solutions need the metric (raise metric_cap)")
        out = []
        for i in range(cfg.solution_count):
            h = frt_sample(inst.metric, rngs.stream(cfg.seed, rngs.TREE, i))
            out.append(tree_to_path_collection(hst_to_spanning_tree(h, inst.metric)))
        return out
    raise ConfigError(f"unknown steiner solution {cfg.solution!r}")


def run_steiner_lb(cfg: RunConfig) -> ExperimentReport:
    inst = load_instance(cfg.graph, cfg.root, cfg.metric_cap,
                         need_metric=(cfg.solution == "frt" or cfg.oracle_cap > 0))
    if inst.girth is None:
        raise ConfigError("acyclic graph has no girth; steiner-lb needs cycles")
    t = max(1, inst.girth // 3) if cfg.t == "auto" else int(cfg.t)
    adv = SteinerAdversaryConfig(t=t, certificate_mode=(3 * t <= inst.girth))
    solutions = _steiner_solutions(cfg, inst)
    f_sets = [p.first_edges for p in solutions]
    # The girth certificate argues about graph cycles; it only applies to
    # collections whose paths are walks in the graph (SPT yes; contracted
    # tree solutions carry metric edges and are measured, not certified).
    certifiable = [_graph_paths(p, inst.graph) for p in solutions]
    budget = _budget(cfg.oracle_cap)

    rows: list[dict[str, object]] = []
    good_count = 0
    certified = 0
    ratios: list[float] = []
    for trial in range(cfg.trials):
        sol_idx = 0
        if len(solutions) > 1:
            sol_idx = int(rngs.stream(cfg.seed, rngs.SOLUTION, trial).integers(len(solutions)))
        paths = solutions[sol_idx]
        F = f_sets[sol_idx]
        walk = random_walk(inst.graph, adv.t, rngs.stream(cfg.seed, rngs.WALK, trial))
        x = frozenset(walk.distinct()) - {cfg.root}
        good, bad, distinct = is_good_walk(walk, F, adv)
        lhs, _ = project_paths(paths, x, inst.metric)
        rhs = len(x) * inst.girth / 6.0
        if good:
            good_count += 1
            if adv.certificate_mode and certifiable[sol_idx]:
                cert = steiner_certificate(paths, walk, inst.girth, adv, inst.metric)
                certified += 1
                if not cert.holds:
                    raise CertificateFalsification(
                        f"steiner certificate failed at trial {trial}: {cert.witness}"
                    )
        opt, opt_kind = _steiner_opt(inst, x, walk, adv.t, budget, cfg.oracle_cap)
        ratio = lhs / opt if opt > 0 else float("nan")
        if x:
            ratios.append(ratio)
        rows.append({
            "trial": trial, "n": inst.graph.n, "d": inst.d, "girth": inst.girth,
            "t": adv.t, "x_size": len(x), "good": good, "e1": None, "e2": None,
            "shared": None, "lhs": lhs, "rhs": rhs, "ratio": ratio,
            "opt_kind": opt_kind,
        })

    report = ExperimentReport(config=dict(cfg.values), columns=LB_COLUMNS, rows=rows)
    arr = np.array(ratios) if ratios else np.array([np.nan])
    report.aggregates = {
        "good_walk_frequency": good_count / cfg.trials if cfg.trials else 0.0,
        "certificate_failures": 0,
        "certified_samples": certified,
        "ratio_median": float(np.median(arr)),
        "ratio_q25": float(np.quantile(arr, 0.25)),
        "ratio_q75": float(np.quantile(arr, 0.75)),
        "girth": inst.girth, "diameter": inst.diameter, "beta": inst.beta,
        "t": adv.t, "label": inst.label,
    }
    freq = report.aggregates["good_walk_frequency"]
    stderr = math.sqrt(max(freq * (1 - freq), 0.0) / cfg.trials) if cfg.trials else 0.0
    report.series = [
        {
            "series": "ratio-vs-n", "x": inst.graph.n,
            "y": report.aggregates["ratio_median"],
            "ci_lo": report.aggregates["ratio_q25"],
            "ci_hi": report.aggregates["ratio_q75"],
        },
        {
            "series": "good-freq-vs-t", "x": adv.t, "y": freq,
            "ci_lo": freq - 3 * stderr, "ci_hi": freq + 3 * stderr,
        },
    ]
    return report


def _graph_paths(p: PathCollection, g: Graph) -> bool:
    edges = {(min(u, v), max(u, v)) for u, v in g.edges}
    for v in range(p.n):
        if v == p.root:
            continue
        path = p.paths[v]
        for a, b in zip(path, path[1:]):
            if (min(a, b), max(a, b)) not in edges:
                return False
    return True


def _budget(oracle_cap: int) -> OracleBudget:
    if oracle_cap <= 0:
        return OracleBudget()
    return OracleBudget(steiner_terminals=max(2, oracle_cap + 1),
                        tsp_terminals=max(2, oracle_cap))


def _steiner_opt(inst, x, walk, t, budget, oracle_cap) -> tuple[float, str]:
    if inst.metric is not None and 0 < oracle_cap and len(x) <= oracle_cap:
        try:
            return steiner_exact(inst.metric, x, budget), "oracle"
        except OracleRefusal:
            pass
    return opt_surrogates([walk], t, inst.diameter).steiner, "walk-bound"


def run_tsp_lb(cfg: RunConfig) -> ExperimentReport:
    inst = load_instance(cfg.graph, cfg.root, cfg.metric_cap, need_metric=True)
    m = inst.metric
    assert m is not None
    base = TspAdversaryConfig.paper_default(inst.graph.n, inst.d, cfg.gamma)
    t = base.t if cfg.t == "auto" else int(cfg.t)
    blocks = base.blocks if cfg.blocks == "auto" else int(cfg.blocks)
    adv = TspAdversaryConfig(t=t, blocks=blocks,
                             separation_multiplier=cfg.separation_multiplier)
    tours = _tour_solutions(cfg, inst)
    budget = _budget(cfg.oracle_cap)

    rows: list[dict[str, object]] = []
    qualifying = 0
    e1_count = 0
    ratios: list[float] = []
    for trial in range(cfg.trials):
        tour_idx = 0
        if len(tours) > 1:
            tour_idx = int(rngs.stream(cfg.seed, rngs.SOLUTION, trial).integers(len(tours)))
        sigma = tours[tour_idx]
        q1 = random_walk(inst.graph, adv.t, rngs.stream(cfg.seed, rngs.WALK, trial))
        q2 = random_walk(inst.graph, adv.t, rngs.stream(cfg.seed, rngs.WALK2, trial))
        x1 = set(q1.distinct()) - {cfg.root}
        x2 = set(q2.distinct()) - {cfg.root}
        x = x1 | x2
        e1 = check_separation(q1, q2, m, adv.t, adv.separation_multiplier)
        b1, b2, shared, e2 = block_alternation(sigma, x1, x2, adv.blocks,
                                               adv.alternation_fraction)
        lhs = project_tour(sigma, m, x)
        rhs = float(shared * adv.t)
        if e1:
            e1_count += 1
        if e1 and e2:
            qualifying += 1
            cert = tsp_certificate(sigma, m, x1, x2, adv.t, adv.blocks)
            if not cert.holds:
                raise CertificateFalsification(
                    f"tsp certificate failed at trial {trial}: {cert.witness}"
                )
        opt, opt_kind = _tsp_opt(m, x, [q1, q2], adv.t, inst.diameter, budget,
                                 cfg.oracle_cap)
        ratio = lhs / opt if opt > 0 else float("nan")
        if x:
            ratios.append(ratio)
        rows.append({
            "trial": trial, "n": inst.graph.n, "d": inst.d, "girth": inst.girth,
            "t": adv.t, "x_size": len(x), "good": None, "e1": e1, "e2": e2,
            "shared": shared, "lhs": lhs, "rhs": rhs, "ratio": ratio,
            "opt_kind": opt_kind,
        })

    report = ExperimentReport(config=dict(cfg.values), columns=LB_COLUMNS, rows=rows)
    arr = np.array(ratios) if ratios else np.array([np.nan])
    report.aggregates = {
        "qualifying_samples": qualifying,
        "e1_samples": e1_count,
        "certificate_failures": 0,
        "ratio_median": float(np.median(arr)),
        "blocks": adv.blocks, "t": adv.t,
        "girth": inst.girth, "diameter": inst.diameter, "label": inst.label,
    }
    report.series = [{
        "series": "ratio-vs-n", "x": inst.graph.n,
        "y": report.aggregates["ratio_median"], "ci_lo": None, "ci_hi": None,
    }]
    return report


def _tour_solutions(cfg: RunConfig, inst: InstanceBundle) -> list[TourOrder]:
    root = cfg.root
    if cfg.solution == "spt-tour":
        return [tree_to_tour(bfs_tree(inst.graph, root))]
    if cfg.solution in ("random-tour", "spt"):
        non_root = np.array([v for v in range(inst.graph.n) if v != root])
        out = []
        for i in range(cfg.solution_count):
            perm = rngs.stream(cfg.seed, rngs.TOUR, i).permutation(non_root)
            out.append(TourOrder(root=root, order=tuple(int(v) for v in perm)))
        return out
    raise ConfigError(f"unknown tour solution {cfg.solution!r}")


def _tsp_opt(m, x, walks, t, diam, budget, oracle_cap) -> tuple[float, str]:
    if 0 < oracle_cap and len(x) <= oracle_cap:
        try:
            return tsp_exact(m, x, budget), "oracle"
        except OracleRefusal:
            pass
    return opt_surrogates(walks, t, diam).tsp, "walk-tour"


UNIVERSAL_COLUMNS = [
    "trial", "n", "x_size", "mean_tree_cost", "opt", "ratio",
    "domination", "cost_bound", "doubling", "contiguity", "opt_kind",
]


def run_universal_upper(cfg: RunConfig) -> ExperimentReport:
    """FRT upper-bound pipeline on random metrics.

    Per metric: sample FRT trees, verify HST domination and the contraction
    cost bound per sample, then for each terminal set check tour doubling
    and DFS contiguity exactly on every tree, and compare the mean projected
    cost against the exact Steiner optimum.
    """
    budget = OracleBudget()
    rows: list[dict[str, object]] = []
    stretch_max_all: list[float] = []
    stretch_mean_all: list[float] = []
    mean_ratios: list[float] = []
    violations = {"domination": 0, "cost_bound": 0, "doubling": 0, "contiguity": 0}
    trial = 0
    for mi in range(cfg.metrics):
        mrng = rngs.stream(cfg.seed, rngs.METRIC, mi)
        n = int(mrng.integers(cfg.metric_size_min, cfg.metric_size_max + 1))
        if cfg.metric_kind == "euclidean":
            m = random_euclidean_metric(n, mrng)
        else:
            m = random_uniform_metric(n, mrng)

        trees: list[SpanningTree] = []
        tours: list[TourOrder] = []
        dominated = True
        costs_bounded = True
        for ti in range(cfg.trees_per_metric):
            h = frt_sample(m, rngs.stream(cfg.seed, rngs.TREE, mi, ti))
            if not hst_dominates(h, m):
                dominated = False
                violations["domination"] += 1
            tree = hst_to_spanning_tree(h, m)
            if tree.total_cost > h.total_weight + 1e-9:
                costs_bounded = False
                violations["cost_bound"] += 1
            trees.append(tree)
            tours.append(tree_to_tour(tree))

        st = stretch_stats(m, trees)
        stretch_max_all.append(st["max_pair_stretch"])
        stretch_mean_all.append(st["mean_pair_stretch"])

        for xi in range(cfg.terminals_per_metric):
            xr = rngs.stream(cfg.seed, rngs.SUBSET, mi, xi)
            k = int(xr.integers(2, cfg.max_terminals + 1))
            pool = [v for v in range(n) if v != m.root]
            x = set(int(v) for v in xr.choice(pool, size=min(k, len(pool)), replace=False))

            doubling_ok = True
            contiguity_ok = True
            costs = []
            for tree, tour in zip(trees, tours):
                c_tx, _ = project_tree(tree, x)
                costs.append(c_tx)
                c_sx = project_tour(tour, m, x)
                if c_sx > 2.0 * c_tx + 1e-9:
                    doubling_ok = False
                    violations["doubling"] += 1
                pos = tour.positions()
                if restricted_dfs_order(tree, x) != tuple(sorted(x, key=pos.__getitem__)):
                    contiguity_ok = False
                    violations["contiguity"] += 1

            opt = steiner_exact(m, x, budget)
            mean_cost = float(np.mean(costs))
            ratio = mean_cost / opt
            mean_ratios.append(ratio)
            rows.append({
                "trial": trial, "n": n, "x_size": len(x),
                "mean_tree_cost": mean_cost, "opt": opt, "ratio": ratio,
                "domination": dominated, "cost_bound": costs_bounded,
                "doubling": doubling_ok, "contiguity": contiguity_ok,
                "opt_kind": "oracle",
            })
            trial += 1

    report = ExperimentReport(config=dict(cfg.values), columns=UNIVERSAL_COLUMNS, rows=rows)
    report.aggregates = {
        "mean_ratio": float(np.mean(mean_ratios)) if mean_ratios else float("nan"),
        "max_ratio": float(np.max(mean_ratios)) if mean_ratios else float("nan"),
        "measured_stretch_max": float(np.max(stretch_max_all)) if stretch_max_all else float("nan"),
        "measured_stretch_mean": float(np.mean(stretch_mean_all)) if stretch_mean_all else float("nan"),
        "violations": violations,
    }
    report.series = [{
        "series": "stretch-vs-n", "x": cfg.metric_size_max,
        "y": report.aggregates["measured_stretch_mean"], "ci_lo": None,
        "ci_hi": report.aggregates["measured_stretch_max"],
    }]
    return report


DP_COLUMNS = [
    "trial", "mech", "eps", "audit_pass", "worst_ratio", "eps0",
    "prob_beat", "bound", "transfer_ok",
]


def star_metric(universe_size: int) -> MetricSpace:
    """Unit star: root 0 at distance 1 from everyone, leaves pairwise 2."""
    n = universe_size + 1
    dist = np.full((n, n), 2, dtype=np.int64)
    dist[0, :] = 1
    dist[:, 0] = 1
    np.fill_diagonal(dist, 0)
    return MetricSpace(n=n, dist=dist, root=0)


def suite_mechanism(
    m: MetricSpace, universe: frozenset[int], eps: float, rng: np.random.Generator,
    groups: int = 4,
) -> tuple[MechanismTable, LowerBoundWitness]:
    """One structured suite mechanism with an exact transfer witness.

    The universe is randomly split into ``groups`` groups; candidate tree j
    serves group j with direct spokes and detours everyone else through the
    group's hub (cost 3 instead of 1 per terminal). On the empty input the
    mechanism is exactly uniform (all projections cost 0), so each singleton
    {v} beats ratio 1 with probability exactly 1/groups -- an (alpha=1, rho)
    witness with rho(1) = 1/groups, giving eps0 = ln(groups / 2).
    """
    items = sorted(universe)
    groups = min(groups, len(items))
    perm = [items[i] for i in rng.permutation(len(items))]
    group_of = {v: i % groups for i, v in enumerate(perm)}
    hubs = {j: min(v for v in items if group_of[v] == j) for j in range(groups)}

    n = m.n
    candidates: dict[str, SpanningTree] = {}
    for j in range(groups):
        parent = [m.root] * n
        parent[m.root] = m.root
        for v in items:
            if group_of[v] != j and v != hubs[j]:
                parent[v] = hubs[j]
        costs = tuple(0.0 if v == m.root else float(m.dist[v, parent[v]])
                      for v in range(n))
        candidates[f"t{j}"] = SpanningTree(root=m.root, parent=tuple(parent),
                                           edge_cost=costs)

    cost_table: dict[tuple[frozenset[int], str], float] = {}
    for X in all_subsets(universe):
        for sid, tree in candidates.items():
            cost_table[(X, sid)] = project_tree(tree, X)[0]
    sens = _table_sensitivity(cost_table, universe, list(candidates))
    mech = exponential_mechanism(universe, candidates, cost_table, eps, sens)

    alpha = 1.0
    sets = tuple(frozenset({v}) for v in items)
    d_empty = mech.distribution(frozenset())
    rho_1 = 0.0
    for X in sets:
        opt = float(len(X))  # each spoke costs exactly 1 on the star
        p = sum(prob for sid, prob in d_empty.items()
                if project_tree(candidates[sid], X)[0] <= alpha * opt)
        rho_1 = max(rho_1, p)
    witness = LowerBoundWitness(alpha=alpha, rho={1: min(rho_1 + 1e-12, 1.0)},
                                metric=m, sets=sets)
    return mech, witness


def _table_sensitivity(
    cost_table: dict[tuple[frozenset[int], str], float],
    universe: frozenset[int],
    ids: list[str],
) -> float:
    """Exact L-infinity sensitivity of a cost table across neighbor sets."""
    worst = 0.0
    for X in all_subsets(universe):
        for v in universe - X:
            y = X | {v}
            for sid in ids:
                worst = max(worst, abs(cost_table[(y, sid)] - cost_table[(X, sid)]))
    return max(worst, 1e-12)


def run_dp_transfer(cfg: RunConfig) -> ExperimentReport:
    m = star_metric(cfg.universe)
    universe = frozenset(range(1, cfg.universe + 1))

    rows: list[dict[str, object]] = []
    audit_failures = 0
    transfer_failures = 0
    applicable = 0
    for i in range(cfg.mechanisms):
        mech, witness = suite_mechanism(m, universe, cfg.eps,
                                        rngs.stream(cfg.seed, rngs.SOLUTION, i))
        audit = dp_audit(mech, cfg.eps)
        if not audit.passed:
            audit_failures += 1
        eps0 = transfer_lower_bound(witness)
        ok = prob_beat = bound = None
        if eps0 > 0 and cfg.eps <= eps0:
            applicable += 1
            chk = transfer_check(
                mech, m, witness, cfg.eps,
                opt_fn=lambda X: steiner_exact(m, X),
            )
            ok, prob_beat, bound = chk.ok, chk.prob_beat, chk.bound
            if not ok:
                transfer_failures += 1
        rows.append({
            "trial": i, "mech": f"expmech-{i}", "eps": cfg.eps,
            "audit_pass": audit.passed, "worst_ratio": audit.worst_ratio,
            "eps0": eps0, "prob_beat": prob_beat, "bound": bound,
            "transfer_ok": ok,
        })
    report = ExperimentReport(config=dict(cfg.values), columns=DP_COLUMNS, rows=rows)
    report.aggregates = {
        "audit_failures": audit_failures,
        "transfer_failures": transfer_failures,
        "transfer_applicable": applicable,
    }
    return report


def run_experiment(cfg: RunConfig) -> ExperimentReport:
    """Dispatch a pipeline, write its outputs, return the report."""
    start = time.perf_counter()
    pipeline = cfg.pipeline
    if pipeline == "steiner-lb":
        report = run_steiner_lb(cfg)
    elif pipeline == "tsp-lb":
        report = run_tsp_lb(cfg)
    elif pipeline == "universal-upper":
        report = run_universal_upper(cfg)
    elif pipeline == "dp-transfer":
        report = run_dp_transfer(cfg)
    else:
        raise ConfigError(f"unknown pipeline {pipeline!r}")
    report.wall_clock_sec = time.perf_counter() - start
    report.write(cfg.csv or None, getattr(cfg, "json") or None)
    return report


def monte_carlo_lb(
    solutions: list[tuple[PathCollection, float]],
    graph: Graph,
    girth_value: int,
    diam: int,
    adv: SteinerAdversaryConfig,
    trials: int,
    master_seed: int,
    root: int = 0,
    metric: MetricSpace | None = None,
    oracle_cap: int = 0,
) -> ExperimentReport:
    """Steiner lower-bound experiment over an explicit finite distribution
    of path collections (pairs of (solution, probability))."""
    probs = np.array([p for _, p in solutions])
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("solution distribution must sum to 1")
    cum = np.cumsum(probs)
    budget = OracleBudget()
    rows = []
    for trial in range(trials):
        pick = rngs.stream(master_seed, rngs.SOLUTION, trial).random()
        idx = min(int(np.searchsorted(cum, pick, side="right")), len(solutions) - 1)
        paths = solutions[idx][0]
        F = paths.first_edges
        walk = random_walk(graph, adv.t, rngs.stream(master_seed, rngs.WALK, trial))
        x = frozenset(walk.distinct()) - {root}
        good, bad, distinct = is_good_walk(walk, F, adv)
        lhs, _ = project_paths(paths, x, metric)
        if good and adv.certificate_mode:
            cert = steiner_certificate(paths, walk, girth_value, adv, metric)
            if not cert.holds:
                raise CertificateFalsification(f"trial {trial}: {cert.witness}")
        if metric is not None and 0 < oracle_cap and len(x) <= oracle_cap:
            opt, opt_kind = steiner_exact(metric, x, budget), "oracle"
        else:
            opt, opt_kind = opt_surrogates([walk], adv.t, diam).steiner, "walk-bound"
        rows.append({
            "trial": trial, "n": graph.n, "d": int(graph.degrees.max()),
            "girth": girth_value, "t": adv.t, "x_size": len(x), "good": good,
            "e1": None, "e2": None, "shared": None, "lhs": lhs,
            "rhs": len(x) * girth_value / 6.0,
            "ratio": lhs / opt if opt > 0 else float("nan"), "opt_kind": opt_kind,
        })
    report = ExperimentReport(config={"trials": trials, "seed": master_seed},
                              columns=LB_COLUMNS, rows=rows)
    ratios = [r["ratio"] for r in rows if r["x_size"]]
    report.aggregates = {
        "certificate_failures": 0,
        "ratio_median": float(np.median(ratios)) if ratios else float("nan"),
        "good_walk_frequency": sum(1 for r in rows if r["good"]) / trials if trials else 0.0,
    }
    return report


def emit_plot_data(reports: list) -> str:
    """Tidy plot CSV with columns exactly: series, x, y, ci_lo, ci_hi."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["series", "x", "y", "ci_lo", "ci_hi"],
                            lineterminator="\n")
    writer.writeheader()
    count = 0
    for rep in reports:
        series = rep.series if isinstance(rep, ExperimentReport) else rep.get("series", [])
        for point in series:
            writer.writerow({k: _cell(point.get(k)) for k in
                             ("series", "x", "y", "ci_lo", "ci_hi")})
            count += 1
    if count == 0:
        raise ValueError("no series data in the given reports")
    return buf.getvalue()
