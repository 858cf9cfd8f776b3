"""Command-line front end: ``sepselect {select,curve,run,stats}``.

Exit codes: 0 success, 1 I/O failure, 2 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import Dataset, load_csv, minmax_normalize, partition_by_class
from .evaluation import EvalConfig, EvaluationCurve, Metric, performance_curve
from .separability import SeparabilityParams, Variant
from .selector import SelectionTrace, select
from .stats import DegenerateFriedmanError, f_critical_value, friedman, nemenyi_cd, q_alpha, rank_rows

log = logging.getLogger("sepselect")

# balancing-parameter grid swept by --grid
PARAM_GRID = (0.0100, 0.0178, 0.0316, 0.0562, 0.1000, 0.1778, 0.3162, 0.5623, 1.0000)


@dataclass
class RunConfig:
    input: str | None = None
    label: str = "#-1"
    normalize: bool = True
    alpha: float = 0.0316
    beta: float = 0.0316
    variant: str = "full"
    k: int = 150
    metrics: list[str] = field(default_factory=lambda: ["knn"])
    knn_k: int = 5
    folds: int = 10
    seed: int = 0
    max_top: int = 150
    grid: bool = False
    ranking: str | None = None
    out: str = "."

    def params(self, alpha: float | None = None, beta: float | None = None) -> SeparabilityParams:
        return SeparabilityParams(self.alpha if alpha is None else alpha,
                                  self.beta if beta is None else beta, Variant(self.variant))

    def eval_config(self) -> EvalConfig:
        return EvalConfig(knn_k=self.knn_k, folds=self.folds, seed=self.seed, max_top=self.max_top)

    def validate(self) -> None:
        if not self.input:
            raise ValueError("--input is required")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        for mname in self.metrics:
            Metric(mname)
        self.params()
        self.eval_config()

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _load(cfg: RunConfig) -> Dataset:
    d = load_csv(cfg.input, cfg.label)
    return minmax_normalize(d) if cfg.normalize else d


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_selection(trace: SelectionTrace, d: Dataset, out: Path) -> None:
    _dump_json(trace.to_dict(d.feature_names), out / "trace.json")
    with (out / "ranking.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "feature_index", "feature_name", "gain"])
        for rank, s in enumerate(trace.steps, start=1):
            w.writerow([rank, s.feature_index, d.feature_names[s.feature_index], repr(s.gain)])
    with (out / "mask.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pixel_index"])
        for f in sorted(trace.features):
            w.writerow([f])


def read_ranking(path: str | Path) -> list[int]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "feature_index" not in rows[0]:
        raise ValueError(f"{path}: expected a ranking CSV with a feature_index column")
    try:
        return [int(r["feature_index"]) for r in rows]
    except ValueError as exc:
        raise ValueError(f"{path}: bad feature_index ({exc})") from None


def write_curves(curves: Sequence[EvaluationCurve], out: Path) -> None:
    for c in curves:
        with (out / f"curve_{c.metric.value}.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "value"])
            for t, v in enumerate(c.values, start=1):
                w.writerow([t, repr(v)])
    _dump_json([c.summary() for c in curves], out / "summary.json")


def _curves(d: Dataset, ranking, cfg: RunConfig) -> list[EvaluationCurve]:
    ecfg = cfg.eval_config()
    return [performance_curve(d, ranking, Metric(mname), ecfg) for mname in cfg.metrics]


def cmd_select(cfg: RunConfig) -> int:
    cfg.validate()
    d = _load(cfg)
    if cfg.k > d.m:
        raise ValueError(f"k ({cfg.k}) exceeds number of features m ({d.m})")
    trace = select(d, partition_by_class(d), cfg.k, cfg.params())
    out = _out_dir(cfg)
    write_selection(trace, d, out)
    _dump_json(asdict(cfg), out / "config.echo.json")
    log.info("selected %d features into %s", len(trace), out)
    return 0


def cmd_curve(cfg: RunConfig) -> int:
    cfg.validate()
    if not cfg.ranking:
        raise ValueError("--ranking is required for curve")
    d = _load(cfg)
    ranking = read_ranking(cfg.ranking)
    out = _out_dir(cfg)
    write_curves(_curves(d, ranking, cfg), out)
    _dump_json(asdict(cfg), out / "config.echo.json")
    return 0


def grid_search(d: Dataset, cfg: RunConfig) -> list[dict]:
    part = partition_by_class(d)
    rows = []
    for a in PARAM_GRID:
        for b in PARAM_GRID:
            trace = select(d, part, cfg.k, cfg.params(a, b))
            for c in _curves(d, trace, cfg):
                rows.append({"alpha": a, "beta": b, **c.summary()})
            log.info("grid cell alpha=%g beta=%g done", a, b)
    return rows


def best_per_metric(rows: list[dict]) -> list[dict]:
    best = []
    for mname in dict.fromkeys(r["metric"] for r in rows):
        cells = [r for r in rows if r["metric"] == mname]
        # first cell in grid order wins exact ties
        by_max = max(cells, key=lambda r: (r["max"], r["ave"]))
        by_ave = max(cells, key=lambda r: (r["ave"], r["max"]))
        best.append({"metric": mname, "best_max": by_max, "best_ave": by_ave})
    return best


def cmd_run(cfg: RunConfig) -> int:
    cfg.validate()
    d = _load(cfg)
    if cfg.k > d.m:
        raise ValueError(f"k ({cfg.k}) exceeds number of features m ({d.m})")
    out = _out_dir(cfg)
    if cfg.grid:
        rows = grid_search(d, cfg)
        with (out / "grid.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, ["alpha", "beta", "metric", "max", "ave"], lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({**r, "max": repr(r["max"]), "ave": repr(r["ave"])})
        _dump_json(best_per_metric(rows), out / "grid_summary.json")
    else:
        trace = select(d, partition_by_class(d), cfg.k, cfg.params())
        write_selection(trace, d, out)
        write_curves(_curves(d, trace, cfg), out)
    _dump_json(asdict(cfg), out / "config.echo.json")
    return 0


def read_score_table(path: str | Path) -> tuple[list[str], list[str], np.ndarray]:
    """Datasets x algorithms CSV; an optional first column holds dataset names."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header and at least one row")
    header, body = rows[0], rows[1:]

    def numeric(cell: str) -> bool:
        try:
            float(cell)
            return True
        except ValueError:
            return False

    named = not all(numeric(r[0]) for r in body)
    algos = header[1:] if named else header
    names = [r[0] for r in body] if named else [str(i) for i in range(len(body))]
    try:
        S = np.array([[float(c) for c in (r[1:] if named else r)] for r in body])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if S.shape[1] != len(algos):
        raise ValueError(f"{path}: {len(algos)} algorithm names but {S.shape[1]} score columns")
    return algos, names, S


def stats_report(S: np.ndarray, algos: Sequence[str], level: float = 0.05,
                 q: float | None = None, higher_is_better: bool = True) -> dict:
    table = rank_rows(S, higher_is_better)
    N, s = table.n_datasets, table.n_algorithms
    q = q_alpha(s, level) if q is None else q
    cv = f_critical_value(s, N, level)
    report = {
        "algorithms": list(algos),
        "n_datasets": N,
        "n_algorithms": s,
        "avg_ranks": [float(r) for r in table.avg_ranks],
        "chi2": None,
        "f_stat": None,
        "dof": [s - 1, (s - 1) * (N - 1)],
        "alpha": level,
        "critical_value": cv,
        "significant": None,
        "q_alpha": q,
        "cd": nemenyi_cd(s, N, q),
        "error": None,
    }
    try:
        res = friedman(table, cv)
        report.update(chi2=res.chi2, f_stat=res.f_stat, significant=res.significant)
    except DegenerateFriedmanError as exc:
        R = table.avg_ranks
        report["chi2"] = 12.0 * N / (s * (s + 1)) * (float(np.sum(R ** 2)) - s * (s + 1) ** 2 / 4.0)
        report["error"] = str(exc)
    return report


def cmd_stats(args: argparse.Namespace) -> int:
    algos, _, S = read_score_table(args.scores)
    report = stats_report(S, algos, args.level, args.q_alpha, not args.lower_is_better)
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "stats.json").write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _add_run_options(sp: argparse.ArgumentParser, selection: bool, evaluation: bool) -> None:
    sp.add_argument("--config", help="JSON config file; explicit flags override it")
    sp.add_argument("--input", help="CSV file with features and one label column")
    sp.add_argument("--label", help="label column: header name or #index (default: last column)")
    sp.add_argument("--normalize", dest="normalize", action="store_true", default=None,
                    help="min-max scale features to [0, 1] (default)")
    sp.add_argument("--no-normalize", dest="normalize", action="store_false")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="output directory")
    if selection:
        sp.add_argument("--alpha", type=float, help="weight of the within-class directional term")
        sp.add_argument("--beta", type=float, help="weight of the between-class directional term")
        sp.add_argument("--variant", choices=[v.value for v in Variant])
        sp.add_argument("--k", type=int, help="number of features to select")
    if evaluation:
        sp.add_argument("--metric", dest="metrics", action="append", choices=[m.value for m in Metric],
                        help="repeatable; default knn")
        sp.add_argument("--knn-k", dest="knn_k", type=int)
        sp.add_argument("--folds", type=int)
        sp.add_argument("--max-top", dest="max_top", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sepselect", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("select", help="rank features by greedy separability gain")
    _add_run_options(sp, selection=True, evaluation=False)

    sp = sub.add_parser("curve", help="evaluate top-t prefixes of a ranking")
    _add_run_options(sp, selection=False, evaluation=True)
    sp.add_argument("--ranking", help="ranking.csv written by select")

    sp = sub.add_parser("run", help="select then evaluate, optionally over the alpha/beta grid")
    _add_run_options(sp, selection=True, evaluation=True)
    sp.add_argument("--grid", action="store_true", default=None,
                    help="sweep alpha and beta over the 9x9 grid")

    sp = sub.add_parser("stats", help="Friedman test and Nemenyi CD for a score table")
    sp.add_argument("--scores", required=True, help="CSV, rows = datasets, columns = algorithms")
    sp.add_argument("--level", type=float, default=0.05, help="significance level (default 0.05)")
    sp.add_argument("--q-alpha", dest="q_alpha", type=float, help="override the tabulated q_alpha")
    sp.add_argument("--lower-is-better", action="store_true")
    sp.add_argument("--out", help="directory for stats.json (default: stdout)")
    return ap


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            setattr(cfg, f.name, v)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "stats":
            return cmd_stats(args)
        cfg = resolve_config(args)
        return {"select": cmd_select, "curve": cmd_curve, "run": cmd_run}[args.command](cfg)
    except OSError as exc:
        print(f"sepselect: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"sepselect: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
