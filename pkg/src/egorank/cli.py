"""Command-line driver for the ego-network experiments.

Every subcommand writes plain CSV/JSON into ``--out``; nothing is plotted.
Exit status: 0 success, 2 configuration error, 3 data error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classify, evaluate, ranking
from .data import LabelMap, SbmSpec, export_id_map, gen_sbm, load_labels, write_labels
from .errors import ConfigError, ConvergenceError, DataError
from .graph import Graph, extract_ego, load_graph, write_edge_list

log = logging.getLogger("egorank")

COMPARE_METHODS = ("common", "adamic_adar", "pagerank_escape", "ppr")
RANK_METHODS = ("ppr_power", "ppr_push", "pagerank_basic", "pagerank_escape", "common", "adamic_adar")
SWEEP_SCOPES = ("level1", "within2")


def derive_seed(master: int, *keys: int) -> int:
    """Independent, reproducible child seed for the cell identified by ``keys``."""
    return int(np.random.SeedSequence([master, *keys]).generate_state(1, dtype=np.uint32)[0])


def parse_int_list(text: str | None, default: list[int]) -> list[int]:
    """``"5"`` -> [5], ``"1:4"`` -> [1, 2, 3, 4], ``"1,3,9"`` -> [1, 3, 9]."""
    if text is None:
        return default
    try:
        if ":" in text:
            lo, hi = (int(x) for x in text.split(":"))
            out = list(range(lo, hi + 1))
        else:
            out = [int(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse integer list {text!r}") from None
    if not out or any(k < 1 for k in out):
        raise ConfigError(f"k values must be positive, got {text!r}")
    return out


def parse_float_list(text: str | None, default: list[float]) -> list[float]:
    if text is None:
        return default
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse number list {text!r}") from None


@dataclass
class ExperimentConfig:
    edges: Path | None = None
    labels: Path | None = None
    sbm: SbmSpec | None = None
    observer: str | None = None
    hops: int = 2
    alpha: float = ranking.DEFAULT_ALPHA
    epsilon: list[float] | None = None
    scope: str = "within2"
    strategies: list[str] = field(default_factory=lambda: ["random_positive"])
    k: str | None = None
    rounds: int = 1
    seed: int = 0
    out: Path = Path("out")

    def __post_init__(self):
        if self.edges is not None and not Path(self.edges).is_file():
            raise ConfigError(f"edge file {self.edges} does not exist")
        if self.labels is not None and not Path(self.labels).is_file():
            raise ConfigError(f"label file {self.labels} does not exist")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be >= 1, got {self.rounds}")
        if self.hops < 1:
            raise ConfigError(f"hops must be >= 1, got {self.hops}")
        for s in self.strategies:
            if s not in ranking.STRATEGIES:
                raise ConfigError(f"unknown strategy {s!r}; choose from {', '.join(ranking.STRATEGIES)}")
        ranking.PprParams(self.alpha)

    @classmethod
    def from_args(cls, args) -> "ExperimentConfig":
        sbm = None
        if getattr(args, "sbm", None):
            sbm = SbmSpec.from_json(args.sbm)
        elif args.edges is None:
            sbm = SbmSpec(rng_seed=args.seed)
        strategies = getattr(args, "strategy", None) or "random_positive"
        return cls(
            edges=args.edges, labels=args.labels, sbm=sbm, observer=args.observer,
            hops=args.hops, alpha=args.alpha,
            epsilon=parse_float_list(args.epsilon, None) if args.epsilon else None,
            scope=args.scope, strategies=strategies.split(","), k=args.k,
            rounds=args.rounds, seed=args.seed, out=Path(args.out),
        )

    def load(self) -> tuple[Graph, LabelMap | None, str]:
        """Graph, labels (if any) and observer name."""
        if self.edges is not None:
            graph = load_graph(self.edges)
            labels = load_labels(self.labels) if self.labels else None
            if self.observer is None:
                raise ConfigError("--observer is required with --edges")
            return graph, labels, self.observer
        spec = self.sbm or SbmSpec(rng_seed=self.seed)
        graph, labels = gen_sbm(spec)
        observer = self.observer if self.observer is not None else str(spec.observer)
        return graph, labels, observer

    def provenance(self) -> dict:
        return {
            "edges": str(self.edges) if self.edges else None,
            "labels": str(self.labels) if self.labels else None,
            "sbm": self.sbm.to_dict() if self.sbm else None,
            "observer": self.observer, "hops": self.hops, "alpha": self.alpha,
            "scope": self.scope, "seed": self.seed,
        }


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _need_labels(labels: LabelMap | None) -> LabelMap:
    if labels is None:
        raise ConfigError("this command needs --labels (or a generated SBM)")
    return labels


# -- commands ---------------------------------------------------------------

def cmd_gen(args) -> int:
    spec = SbmSpec.from_json(args.sbm) if args.sbm else SbmSpec(rng_seed=args.seed)
    graph, labels = gen_sbm(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(graph, out / "edges.txt")
    write_labels(labels, out / "labels.tsv", graph)
    export_id_map(graph, out / "id_map.tsv")
    _write_json(out / "sbm.json", spec.to_dict())
    log.info("wrote %d nodes, %d edges to %s", graph.node_count, graph.edge_count, out)
    return 0


def cmd_extract(args) -> int:
    cfg = ExperimentConfig.from_args(args)
    graph, _, observer = cfg.load()
    view = extract_ego(graph, observer, cfg.hops)
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(view, out / "view_edges.txt", use_names=True)
    names = view.names
    _write_csv(out / "view_nodes.csv", ["node", "local_id", "level", "visible_degree", "true_degree"],
               [[names[i], i, int(view.levels[i]), int(view.degrees[i]),
                 int(graph.degrees[view.global_ids[i]])] for i in range(view.node_count)])
    export_id_map(graph, out / "id_map.tsv")
    if graph.report is not None:
        _write_json(out / "load_report.json", graph.report.__dict__)
    log.info("view of %s: %d nodes, %d visible edges", observer, view.node_count, view.edge_count)
    return 0


def _escape_vector(args, cfg: ExperimentConfig, view, labels):
    if getattr(args, "ev_nodes", None):
        return ranking.ev_from_set(view, args.ev_nodes.split(","))
    if args.strategy:
        lab = _need_labels(labels)
        k = parse_int_list(cfg.k, [3])[0]
        return ranking.ev_strategy(view, lab.positives(view), cfg.strategies[0], k, cfg.seed)
    return ranking.ev_from_set(view, [view.observer_local])


def _rank(args, cfg: ExperimentConfig, view, labels) -> ranking.ScoreVector:
    method = args.method
    eps = cfg.epsilon[0] if cfg.epsilon else None
    if method in ("common", "adamic_adar"):
        return ranking.heuristic_scores(view, method)
    if method == "pagerank_basic":
        return ranking.pagerank_basic(view)
    if method == "pagerank_escape":
        return ranking.pagerank_escape(view, ranking.PprParams(cfg.alpha, eps or ranking.DEFAULT_POWER_EPSILON))
    ev = _escape_vector(args, cfg, view, labels)
    if method == "ppr_power":
        return ranking.ppr_power(view, ev, ranking.PprParams(cfg.alpha, eps or ranking.DEFAULT_POWER_EPSILON))
    if eps is None:
        eps = ranking.push_epsilon_for_budget(view, 1e-6)
    return ranking.ppr_push(view, ev, ranking.PprParams(cfg.alpha, eps))


def cmd_rank(args) -> int:
    cfg = ExperimentConfig.from_args(args)
    graph, labels, observer = cfg.load()
    view = extract_ego(graph, observer, cfg.hops)
    scores = _rank(args, cfg, view, labels)
    nodes = classify.test_set(view, cfg.scope)
    _write_json(cfg.out / f"scores_{scores.method}.json", scores.to_dict(nodes))
    return 0


def cmd_classify(args) -> int:
    cfg = ExperimentConfig.from_args(args)
    graph, labels, observer = cfg.load()
    view = extract_ego(graph, observer, cfg.hops)
    scores = _rank(args, cfg, view, labels)
    nodes = classify.test_set(view, cfg.scope)
    if args.prior is not None:
        pred = classify.threshold_by_prior(scores, nodes, args.prior, args.target_fpr, args.target_tpr)
    else:
        if cfg.k is None:
            raise ConfigError("classify needs --k or --prior")
        pred = classify.threshold_by_count(scores, nodes, parse_int_list(cfg.k, [])[0])
    truth = labels.binary(view) if labels is not None else None
    result = pred.to_dict(view, truth)
    if truth is not None:
        cm = evaluate.confusion(pred, truth)
        result["metrics"] = {"accuracy": evaluate.accuracy(cm)}
        if cm.a + cm.b:
            result["metrics"]["tpr"] = evaluate.tpr(cm)
        if cm.c + cm.d:
            result["metrics"]["fpr"] = evaluate.fpr(cm)
    _write_json(cfg.out / "prediction.json", result)
    return 0


def compare_methods(view, labels: LabelMap, alpha: float, scope: str = "within2", top_k: int = 3):
    """AUC and ROC of the four rankings on one view: (aucs, curves)."""
    truth = labels.binary(view)
    nodes = classify.test_set(view, scope)
    params = ranking.PprParams(alpha, ranking.DEFAULT_POWER_EPSILON)
    ev = ranking.ev_strategy(view, labels.positives(view), "observer_plus_top", top_k)
    scores = {
        "common": ranking.heuristic_scores(view, "common"),
        "adamic_adar": ranking.heuristic_scores(view, "adamic_adar"),
        "pagerank_escape": ranking.pagerank_escape(view, params),
        "ppr": ranking.ppr_power(view, ev, params),
    }
    curves = {m: evaluate.roc(s, truth, nodes) for m, s in scores.items()}
    return {m: evaluate.auc(c) for m, c in curves.items()}, curves


def cmd_compare(args) -> int:
    cfg = ExperimentConfig.from_args(args)
    graph, labels, observer = cfg.load()
    view = extract_ego(graph, observer, cfg.hops)
    aucs, curves = compare_methods(view, _need_labels(labels), cfg.alpha, cfg.scope)
    cfg.out.mkdir(parents=True, exist_ok=True)
    for method, curve in curves.items():
        curve.to_csv(cfg.out / f"roc_{method}.csv")
    summary = {
        "auc": aucs,
        "relative_improvement_ppr_over_pagerank_escape":
            evaluate.relative_improvement(aucs["ppr"], aucs["pagerank_escape"])
            if aucs["pagerank_escape"] > 0.5 else None,
        "config": cfg.provenance(),
        "view": {"nodes": view.node_count, "edges": view.edge_count},
    }
    _write_json(cfg.out / "auc.json", summary)
    for m in COMPARE_METHODS:
        print(f"{m:16s} {aucs[m]:.4f}")
    return 0


def sweep_ev(view, labels: LabelMap, strategies, ks, rounds: int, alpha: float, seed: int,
             scopes=SWEEP_SCOPES):
    """AUC for every (strategy, k, round) cell, evaluated on each scope.

    Returns ``(rows, skipped)``; rows are sorted. Deterministic strategies run
    a single round.
    """
    truth = labels.binary(view)
    positives = labels.positives(view)
    test_sets = {s: classify.test_set(view, s) for s in scopes}
    params = ranking.PprParams(alpha, ranking.DEFAULT_POWER_EPSILON)
    rows, skipped = [], []
    for si, strategy in enumerate(strategies):
        n_rounds = rounds if strategy == "random_positive" else 1
        for k in ks:
            if k > len(positives):
                skipped.append({"strategy": strategy, "k": k,
                                "reason": f"only {len(positives)} positives visible"})
                continue
            for rnd in range(n_rounds):
                cell_seed = derive_seed(seed, si, k, rnd)
                ev = ranking.ev_strategy(view, positives, strategy, k, cell_seed)
                scores = ranking.ppr_power(view, ev, params)
                for scope in scopes:
                    a = evaluate.auc_score(scores, truth, test_sets[scope])
                    rows.append((strategy, scope, k, rnd, cell_seed, alpha, a))
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    return rows, skipped


def summarize_sweep(rows):
    groups: dict[tuple, list[float]] = {}
    for strategy, scope, k, _, _, _, a in rows:
        groups.setdefault((strategy, scope, k), []).append(a)
    out = []
    for key in sorted(groups):
        vals = np.asarray(groups[key])
        var = float(vals.var(ddof=1)) if len(vals) > 1 else 0.0
        out.append((*key, len(vals), float(vals.mean()), var))
    return out


def cmd_sweep_ev(args) -> int:
    cfg = ExperimentConfig.from_args(args)
    graph, labels, observer = cfg.load()
    view = extract_ego(graph, observer, cfg.hops)
    ks = parse_int_list(cfg.k, list(range(1, 101)))
    if cfg.k is not None and ":" not in cfg.k and "," not in cfg.k:
        ks = list(range(1, ks[0] + 1))
    rows, skipped = sweep_ev(view, _need_labels(labels), cfg.strategies, ks, cfg.rounds, cfg.alpha, cfg.seed)
    fmt = [(s, sc, k, r, sd, repr(al), repr(a)) for s, sc, k, r, sd, al, a in rows]
    _write_csv(cfg.out / "sweep_ev.csv", ["strategy", "scope", "k", "round", "seed", "alpha", "auc"], fmt)
    summary = [(s, sc, k, n, repr(m), repr(v)) for s, sc, k, n, m, v in summarize_sweep(rows)]
    _write_csv(cfg.out / "sweep_ev_mean.csv", ["strategy", "scope", "k", "rounds", "mean_auc", "var_auc"], summary)
    _write_json(cfg.out / "sweep_ev.json", {"skipped": skipped, "config": cfg.provenance()})
    return 0


DEFAULT_EPSILONS = [10.0 ** -e for e in range(1, 11)]


def convergence(view, ev, alpha: float, epsilons, benchmark_epsilon: float = 1e-10, seed: int = 0):
    """Error of each solver against the power-iteration benchmark, per tolerance.

    Rows: (solver, epsilon, l1_error, wall_time_ms, steps, error_bound, alpha, seed).
    """
    bench = ranking.ppr_power(view, ev, ranking.PprParams(alpha, benchmark_epsilon)).values
    total_degree = float(view.degrees.sum())
    rows = []
    for solver in ("power", "push"):
        for eps in epsilons:
            params = ranking.PprParams(alpha, eps)
            t0 = time.perf_counter()
            if solver == "power":
                out = ranking.ppr_power(view, ev, params)
                bound = alpha / (1 - alpha) * eps
            else:
                out = ranking.ppr_push(view, ev, params)
                bound = eps * total_degree
            ms = (time.perf_counter() - t0) * 1e3
            err = float(np.abs(out.values - bench).sum())
            rows.append((solver, eps, err, ms, out.steps, bound, alpha, seed))
    return rows


def cmd_convergence(args) -> int:
    cfg = ExperimentConfig.from_args(args)
    graph, labels, observer = cfg.load()
    view = extract_ego(graph, observer, cfg.hops)
    k = parse_int_list(cfg.k, [5])[0]
    ev = ranking.ev_strategy(view, _need_labels(labels).positives(view), "high_degree_positive", k)
    rows = convergence(view, ev, cfg.alpha, cfg.epsilon or DEFAULT_EPSILONS, seed=cfg.seed)
    fmt = [(s, repr(e), repr(err), f"{ms:.3f}", st, repr(b), repr(a), sd) for s, e, err, ms, st, b, a, sd in rows]
    _write_csv(cfg.out / "convergence.csv",
               ["solver", "epsilon", "l1_error", "wall_time_ms", "steps", "error_bound", "alpha", "seed"], fmt)
    return 0


# -- argument parsing -------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", type=Path, help="edge list file")
    p.add_argument("--labels", type=Path, help="node<TAB>institution file")
    p.add_argument("--sbm", type=Path, help="SBM spec JSON (used when --edges is absent)")
    p.add_argument("--observer", help="observer node name")
    p.add_argument("--hops", type=int, default=2)
    p.add_argument("--alpha", type=float, default=ranking.DEFAULT_ALPHA)
    p.add_argument("--epsilon", help="solver tolerance (comma list for convergence)")
    p.add_argument("--scope", default="within2", help="level<k> or within<k>")
    p.add_argument("--strategy", help=f"escape-vector strategy: {', '.join(ranking.STRATEGIES)}")
    p.add_argument("--k", help="count, range lo:hi, or list a,b,c")
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="egorank", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a planted-partition graph")
    p.add_argument("--sbm", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_gen)

    for name, func, helptext in (
        ("extract", cmd_extract, "write the observer's h-hop view"),
        ("rank", cmd_rank, "score the test set with one ranking method"),
        ("classify", cmd_classify, "threshold a ranking into labels"),
        ("compare", cmd_compare, "AUC of the four ranking methods"),
        ("sweep-ev", cmd_sweep_ev, "AUC against restart-set size"),
        ("convergence", cmd_convergence, "solver error against tolerance"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name in ("rank", "classify"):
            p.add_argument("--method", choices=RANK_METHODS, default="ppr_power")
            p.add_argument("--ev-nodes", help="comma-separated restart set (node names)")
        if name == "classify":
            p.add_argument("--prior", type=float)
            p.add_argument("--target-fpr", type=float, default=0.19)
            p.add_argument("--target-tpr", type=float, default=0.9)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, ConvergenceError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
