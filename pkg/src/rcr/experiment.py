"""Experiment grids: configuration, seeded repetitions, aggregation and output files.

A grid cell is one (loss kind, cost, repetition) triple on one dataset. Each
cell's randomness is derived from ``(master_seed, dataset, role, ...)`` keys,
so adding a cost or a loss kind never changes the numbers of existing cells.
The data split and the supervised baseline depend only on the repetition and
are shared by every cell of that repetition.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .data import Dataset, StandardizationStats, load_csv, split_indices, standardize, subsample_indices
from .linalg import Rng, key_to_int
from .losses import BinaryLossKind, CostSpec
from .metrics import CSV_COLUMNS, METRIC_NAMES, MetricsReport, aggregate, evaluate, evaluate_outputs, format_value, mse
from .models import ModelSpec, predict
from .oracle import (
    BayesPair,
    SyntheticSpec,
    decision_agreement,
    pointwise_surrogate_minimizer,
    regret_sweep,
    sample_synthetic,
    write_regret_csv,
)
from .trainer import TrainConfig, search_lr, search_lr_supervised

log = logging.getLogger(__name__)

MODES = ("experiment", "verify-theory", "increasing-n")
JOBS_ENV = "RCR_JOBS"


class ConfigError(ValueError):
    """The experiment configuration is invalid."""


def _resolve(base: Path, p) -> Path:
    """Relative paths in a config file are taken relative to the file's directory."""
    p = Path(p)
    return p if p.is_absolute() else base / p


@dataclass(frozen=True)
class DataSource:
    name: str
    csv: Optional[str] = None
    target: Optional[str] = None
    cost_column: Optional[str] = None
    synthetic: Optional[SyntheticSpec] = None
    n_train: int = 0
    n_val: int = 0
    n_test: int = 0

    @classmethod
    def from_dict(cls, d: dict, base: Path) -> "DataSource":
        if "synthetic" in d:
            spec = SyntheticSpec.from_dict(d["synthetic"])
            n = {k: int(d.get(k, 0)) for k in ("n_train", "n_val", "n_test")}
            if min(n.values()) < 1:
                raise ConfigError("synthetic data needs positive n_train, n_val and n_test")
            return cls(name=d.get("name", "synthetic"), synthetic=spec, **n)
        if "csv" not in d or "target" not in d:
            raise ConfigError("dataset needs either 'synthetic' or both 'csv' and 'target'")
        path = _resolve(base, d["csv"])
        return cls(name=d.get("name", path.stem), csv=str(path), target=d["target"], cost_column=d.get("cost_column"))

    def to_dict(self) -> dict:
        if self.synthetic is not None:
            return {"name": self.name, "synthetic": self.synthetic.to_dict(), "n_train": self.n_train,
                    "n_val": self.n_val, "n_test": self.n_test}
        return {"name": self.name, "csv": self.csv, "target": self.target, "cost_column": self.cost_column}


@dataclass(frozen=True)
class VerifyConfig:
    minimizer_samples: int = 500
    regret_samples: int = 10000
    min_gap: float = 0.1
    bayes_seeds: int = 5
    bayes_cost: float = 9.0
    bayes_kind: str = "logistic"
    agreement_samples: int = 20000


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DataSource
    model_h: ModelSpec = ModelSpec()
    model_r: ModelSpec = ModelSpec()
    train: TrainConfig = TrainConfig()
    costs: Tuple[CostSpec, ...] = ()
    loss_kinds: Tuple[BinaryLossKind, ...] = (BinaryLossKind.MAE,)
    repetitions: int = 1
    master_seed: int = 0
    output_dir: str = "results"
    mode: str = "experiment"
    split: Tuple[float, float, float] = (0.6, 0.2, 0.2)
    standardize: bool = True
    fractions: Tuple[float, ...] = (1.0,)
    verify: VerifyConfig = VerifyConfig()
    figures: bool = True
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_dict(cls, d: dict, base: Path = Path(".")) -> "ExperimentConfig":
        try:
            mode = d.get("mode", "experiment")
            if mode not in MODES:
                raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
            if "dataset" not in d and mode != "verify-theory":
                raise ConfigError("config needs a 'dataset' section")
            dataset = DataSource.from_dict(d["dataset"], base) if "dataset" in d else DataSource(name="none")
            train = dict(d.get("train", {}))
            cfg = cls(
                dataset=dataset,
                model_h=ModelSpec.from_dict(d.get("model_h", {})),
                model_r=ModelSpec.from_dict(d.get("model_r", d.get("model_h", {}))),
                train=TrainConfig.from_dict(train),
                costs=tuple(CostSpec.parse(c) for c in d.get("costs", [])),
                loss_kinds=tuple(BinaryLossKind.parse(k) for k in d.get("loss_kinds", ["mae"])),
                repetitions=int(d.get("repetitions", 1)),
                master_seed=int(d.get("master_seed", 0)),
                output_dir=str(_resolve(base, d.get("output_dir", "results"))),
                mode=mode,
                split=tuple(float(r) for r in d.get("split", (0.6, 0.2, 0.2))),
                standardize=bool(d.get("standardize", dataset.synthetic is None)),
                fractions=tuple(float(f) for f in d.get("fractions", [1.0])),
                verify=VerifyConfig(**d.get("verify", {})),
                figures=bool(d.get("figures", True)),
                raw=d,
            )
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(doc, base=path.parent)

    def validate(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.mode in ("experiment", "increasing-n") and not self.costs:
            raise ConfigError("costs must be non-empty")
        if self.mode in ("experiment", "increasing-n") and not self.loss_kinds:
            raise ConfigError("loss_kinds must be non-empty")
        if self.mode == "increasing-n" and (not self.fractions or any(not 0 < f <= 1 for f in self.fractions)):
            raise ConfigError("fractions must be a non-empty subset of (0, 1]")

    def digest(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


# ---------------------------------------------------------------------------
# seeding and data preparation


def cell_seed(master_seed: int, *keys) -> int:
    """Stable 63-bit seed for a grid cell."""
    h = hashlib.sha256(repr((int(master_seed),) + tuple(keys)).encode()).digest()
    return int.from_bytes(h[:8], "little") >> 1


_CSV_CACHE: Dict[tuple, Dataset] = {}


def _load_source(src: DataSource) -> Dataset:
    key = (src.csv, src.target, src.cost_column)
    if key not in _CSV_CACHE:
        _CSV_CACHE[key] = load_csv(src.csv, src.target, src.cost_column)
    return _CSV_CACHE[key]


def repetition_data(cfg: ExperimentConfig, rep: int) -> Tuple[Dataset, Dataset, Dataset]:
    """Train/val/test sets of one repetition (standardised with train statistics if enabled)."""
    src = cfg.dataset
    seed = cell_seed(cfg.master_seed, src.name, "data", rep)
    if src.synthetic is not None:
        rng = Rng(seed)
        parts = [sample_synthetic(src.synthetic, n, rng.fork(part))
                 for part, n in (("train", src.n_train), ("val", src.n_val), ("test", src.n_test))]
    else:
        ds = _load_source(src)
        parts = [ds.take(i) for i in split_indices(ds.n, cfg.split, seed)]
    if cfg.standardize:
        stats = StandardizationStats.fit(parts[0])
        parts = [standardize(stats, p) for p in parts]
    return tuple(parts)


# ---------------------------------------------------------------------------
# grid cells


@dataclass(frozen=True)
class Cell:
    loss_kind: BinaryLossKind
    cost_index: int
    cost: CostSpec
    rep: int
    fraction: float = 1.0


@dataclass
class CellResult:
    cell: Cell
    report: Optional[MetricsReport] = None
    lr: Optional[float] = None
    error: Optional[str] = None


def _sup_baseline(cfg: ExperimentConfig, rep: int, train: Dataset, val: Dataset, test: Dataset, tag=()) -> float:
    seed = cell_seed(cfg.master_seed, cfg.dataset.name, "sup", rep, *tag)
    search = search_lr_supervised(train, val, cfg.model_h, replace(cfg.train, seed=seed))
    return mse(predict(search.model, test.features), test.targets)


def run_cell(cfg: ExperimentConfig, cell: Cell, sup: Optional[float] = None) -> CellResult:
    """Train and evaluate one grid cell; errors are captured, not raised."""
    try:
        train, val, test = repetition_data(cfg, cell.rep)
        if cell.fraction < 1.0:
            sub_seed = cell_seed(cfg.master_seed, cfg.dataset.name, "subsample", cell.fraction, cell.rep)
            train = train.take(subsample_indices(train.n, cell.fraction, sub_seed))
        seed = cell_seed(cfg.master_seed, cfg.dataset.name, "train", cell.loss_kind.value,
                         cell.cost.label, cell.rep, cell.fraction)
        tcfg = replace(cfg.train, loss_kind=cell.loss_kind, cost=cell.cost, seed=seed)
        search = search_lr(train, val, cfg.model_h, cfg.model_r, tcfg)
        report = evaluate(search.pair, test, cell.cost)
        if sup is not None:
            report = report.with_sup(sup)
        return CellResult(cell, report, lr=search.cfg.lr)
    except Exception as exc:  # per-cell isolation
        log.exception("cell %s failed", cell)
        return CellResult(cell, error=f"{type(exc).__name__}: {exc}")


def _sup_task(args):
    cfg, rep = args
    try:
        return rep, _sup_baseline(cfg, rep, *repetition_data(cfg, rep)), None
    except Exception as exc:
        return rep, None, f"{type(exc).__name__}: {exc}"


def _cell_task(args):
    return run_cell(*args)


def resolve_jobs(jobs: Optional[int]) -> int:
    if jobs is None:
        env = os.environ.get(JOBS_ENV)
        jobs = int(env) if env else 1
    return max(1, int(jobs))


def _map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# results


@dataclass
class ResultRow:
    dataset: str
    loss_kind: str
    cost: str
    summary: dict
    reports: List[MetricsReport]
    failures: List[str] = field(default_factory=list)
    fraction: Optional[float] = None
    medians: Optional[dict] = None

    def flat(self) -> dict:
        d = {"dataset": self.dataset, "loss_kind": self.loss_kind}
        if self.fraction is not None:
            d["fraction"] = self.fraction
        d["cost"] = self.cost
        for name in METRIC_NAMES:
            s = self.summary.get(name)
            d[name] = None if s is None else s.mean
            d[f"{name}_std"] = None if s is None else s.std
        if self.medians is not None:
            d["rcr_loss_median"] = self.medians.get("rcr_loss")
            d["al_median"] = self.medians.get("al")
        d["n_total"] = sum(r.n_total for r in self.reports)
        d["n_accepted"] = sum(r.n_accepted for r in self.reports)
        d["repetitions"] = len(self.reports)
        d["failures"] = len(self.failures)
        return d


@dataclass
class ResultsTable:
    rows: List[ResultRow]
    cells: List[CellResult] = field(default_factory=list)
    kind: str = "experiment"

    @property
    def failures(self) -> List[CellResult]:
        return [c for c in self.cells if c.error is not None]

    def row(self, loss_kind, cost, fraction=None) -> ResultRow:
        loss_kind = BinaryLossKind.parse(loss_kind).value
        label = CostSpec.parse(cost).label
        for r in self.rows:
            if r.loss_kind == loss_kind and r.cost == label and (fraction is None or r.fraction == fraction):
                return r
        raise KeyError((loss_kind, label, fraction))


def _build_rows(cfg: ExperimentConfig, results: Sequence[CellResult], by_fraction: bool) -> List[ResultRow]:
    groups: Dict[tuple, List[CellResult]] = {}
    for res in results:
        c = res.cell
        key = (c.loss_kind.value, c.cost_index, c.fraction if by_fraction else None)
        groups.setdefault(key, []).append(res)
    rows = []
    for (kind, ci, frac), members in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] or 0)):
        members.sort(key=lambda r: r.cell.rep)
        reports = [m.report for m in members if m.report is not None]
        failures = [f"rep {m.cell.rep}: {m.error}" for m in members if m.error is not None]
        summary = aggregate(reports) if reports else {}
        medians = None
        if by_fraction and reports:
            medians = {
                "rcr_loss": float(np.median([r.rcr_loss for r in reports])),
                "al": _median([r.al for r in reports]),
            }
        rows.append(ResultRow(cfg.dataset.name, kind, cfg.costs[ci].label, summary, reports, failures,
                              fraction=frac, medians=medians))
    return rows


def _median(values):
    v = [x for x in values if x is not None]
    return float(np.median(v)) if v else None


def _sup_values(cfg: ExperimentConfig, jobs: int) -> Tuple[Dict[int, float], Dict[int, str]]:
    out = _map(_sup_task, [(cfg, rep) for rep in range(cfg.repetitions)], jobs)
    return {rep: v for rep, v, _ in out if v is not None}, {rep: e for rep, _, e in out if e is not None}


def run_experiment(cfg: ExperimentConfig, jobs: Optional[int] = None) -> ResultsTable:
    """Every (loss kind, cost, repetition) cell: lr search, training, test metrics, Sup baseline."""
    jobs = resolve_jobs(jobs)
    # an unreadable data file is a configuration problem, not a per-cell failure
    repetition_data(cfg, 0)
    sup, sup_err = _sup_values(cfg, jobs)
    cells = [Cell(k, ci, c, rep) for k in cfg.loss_kinds for ci, c in enumerate(cfg.costs)
             for rep in range(cfg.repetitions)]
    results = _map(_cell_task, [(cfg, cell, sup.get(cell.rep)) for cell in cells], jobs)
    for res in results:
        if res.cell.rep in sup_err and res.error is None:
            res.error = f"supervised baseline failed: {sup_err[res.cell.rep]}"
    return ResultsTable(_build_rows(cfg, results, by_fraction=False), list(results), kind="experiment")


def run_increasing_n(cfg: ExperimentConfig, jobs: Optional[int] = None) -> ResultsTable:
    """Repeat the grid on seeded subsets of each repetition's training split."""
    jobs = resolve_jobs(jobs)
    # validate all fractions up front so a bad fraction is a config error, not a silent gap
    train, _, _ = repetition_data(cfg, 0)
    for f in cfg.fractions:
        subsample_indices(train.n, f, 0)
    cells = [Cell(k, ci, c, rep, f) for k in cfg.loss_kinds for ci, c in enumerate(cfg.costs)
             for f in cfg.fractions for rep in range(cfg.repetitions)]
    results = _map(_cell_task, [(cfg, cell, None) for cell in cells], jobs)
    return ResultsTable(_build_rows(cfg, results, by_fraction=True), list(results), kind="increasing-n")


# ---------------------------------------------------------------------------
# theory verification


@dataclass
class Check:
    name: str
    passed: int
    total: int
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total


@dataclass
class VerificationReport:
    checks: List[Check]
    regret_results: list = field(default_factory=list)
    bayes_runs: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def random_pointwise_cases(n: int, rng: Rng, min_gap: float = 0.1) -> List[Tuple[float, float, float]]:
    """(mu, var, c) with mu in [-5, 5], var in (0.1, 10], c in (0, 10], |c - var| > min_gap."""
    g = rng.generator
    out = []
    while len(out) < n:
        mu = g.uniform(-5, 5)
        var = 10.0 - g.uniform(0, 9.9)
        c = 10.0 - g.uniform(0, 10)
        if abs(c - var) > min_gap:
            out.append((float(mu), float(var), float(c)))
    return out


def minimizer_sweep(kind, cases, step: float = 0.01) -> Check:
    """Strictly positive losses: regressor at the mean and rejector sign right.
    Other losses: regressor at the mean wherever the reject-side loss is non-zero."""
    from .losses import binary_loss

    kind = BinaryLossKind.parse(kind)
    strict = kind in (BinaryLossKind.LOGISTIC, BinaryLossKind.SIGMOID)
    passed = 0
    for mu, var, c in cases:
        a, t = pointwise_surrogate_minimizer(mu, var, c, kind)
        a_ok = abs(a - mu) <= step + 1e-12
        if strict:
            passed += a_ok and np.sign(t) == np.sign(c - var)
        else:
            passed += a_ok or float(binary_loss(kind, t, -1.0)) <= 1e-6
    label = "consistency+calibration" if strict else "accepted-region consistency"
    return Check(f"pointwise minimiser {label} [{kind.value}]", int(passed), len(cases))


@dataclass
class BayesRun:
    seed: int
    agreement: float
    al: Optional[float]
    bayes_al: Optional[float]
    lr: float


def bayes_recovery(
    spec: SyntheticSpec,
    c: float,
    kind,
    model_h: ModelSpec,
    model_r: ModelSpec,
    train_cfg: TrainConfig,
    n_train: int,
    n_val: int,
    n_test: int,
    seeds: Sequence[int],
    agreement_samples: int = 20000,
) -> List[BayesRun]:
    """Train on synthetic data and compare with the known optimal pair."""
    runs = []
    for seed in seeds:
        rng = Rng(seed)
        train, val, test = (sample_synthetic(spec, n, rng.fork(p))
                            for p, n in (("train", n_train), ("val", n_val), ("test", n_test)))
        tcfg = replace(train_cfg, loss_kind=BinaryLossKind.parse(kind), cost=CostSpec(constant=c), seed=seed)
        search = search_lr(train, val, model_h, model_r, tcfg)
        rep = evaluate(search.pair, test, tcfg.cost)
        bayes = evaluate(BayesPair(spec, c), test, tcfg.cost)
        agree = decision_agreement(search.pair, spec, c, agreement_samples, rng.fork("agreement"))
        runs.append(BayesRun(seed, agree, rep.al, bayes.al, search.cfg.lr))
    return runs


def run_theory_verification(cfg: ExperimentConfig) -> VerificationReport:
    v = cfg.verify
    if v.minimizer_samples <= 0 and v.regret_samples <= 0 and (cfg.dataset.synthetic is None or v.bayes_seeds <= 0):
        raise ConfigError("nothing to verify")
    root = Rng(cfg.master_seed, ("verify",))
    checks: List[Check] = []
    if v.minimizer_samples > 0:
        cases = random_pointwise_cases(v.minimizer_samples, root.fork("pointwise"), v.min_gap)
        for kind in BinaryLossKind:
            checks.append(minimizer_sweep(kind, cases))
    regret_results = []
    if v.regret_samples > 0:
        for kind in (BinaryLossKind.HINGE, BinaryLossKind.SIGMOID, BinaryLossKind.LOGISTIC, BinaryLossKind.SQUARE):
            res = regret_sweep(kind, v.regret_samples, root.fork("regret", kind.value))
            regret_results += res
            checks.append(Check(f"regret transfer bound [{kind.value}]", sum(r.holds for r in res), len(res)))
    bayes_runs = []
    src = cfg.dataset
    if src.synthetic is not None and v.bayes_seeds > 0:
        seeds = [cell_seed(cfg.master_seed, src.name, "bayes", i) for i in range(v.bayes_seeds)]
        bayes_runs = bayes_recovery(src.synthetic, v.bayes_cost, v.bayes_kind, cfg.model_h, cfg.model_r,
                                    cfg.train, src.n_train, src.n_val, src.n_test, seeds, v.agreement_samples)
        agree = float(np.median([r.agreement for r in bayes_runs]))
        ratio = float(np.median([r.al / r.bayes_al for r in bayes_runs if r.al is not None and r.bayes_al]))
        checks.append(Check("bayes decision agreement (median >= 0.90)", int(agree >= 0.90), 1, f"median={agree:.4f}"))
        checks.append(Check("accepted loss vs optimal pair (median ratio <= 1.25)", int(ratio <= 1.25), 1,
                            f"median ratio={ratio:.4f}"))
    return VerificationReport(checks, regret_results, bayes_runs)


# ---------------------------------------------------------------------------
# output


def _write_table_csv(rows: List[dict], path: Path, columns: Sequence[str]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([format_value(r.get(c)) for c in columns])


def table_columns(kind: str) -> List[str]:
    cols = ["dataset", "loss_kind"] + (["fraction"] if kind == "increasing-n" else []) + ["cost"]
    for name in METRIC_NAMES:
        cols += [name, f"{name}_std"]
    if kind == "increasing-n":
        cols += ["rcr_loss_median", "al_median"]
    return cols + ["n_total", "n_accepted", "repetitions", "failures"]


RUN_COLUMNS = ("dataset", "loss_kind", "fraction", "repetition", "lr") + CSV_COLUMNS + ("error",)


def emit_results(table: ResultsTable, out_dir, formats=("csv", "json"), cfg: Optional[ExperimentConfig] = None) -> List[Path]:
    """Write the aggregated table, the per-repetition runs and a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = "results" if table.kind == "experiment" else table.kind.replace("-", "_")
    rows = [r.flat() for r in table.rows]
    paths = []
    if "csv" in formats:
        p = out / f"{stem}.csv"
        _write_table_csv(rows, p, table_columns(table.kind))
        paths.append(p)
        p = out / f"{stem}_runs.csv"
        runs = []
        for res in sorted(table.cells, key=lambda r: (r.cell.loss_kind.value, r.cell.cost_index, r.cell.fraction, r.cell.rep)):
            d = {"dataset": cfg.dataset.name if cfg else "", "loss_kind": res.cell.loss_kind.value,
                 "fraction": res.cell.fraction, "repetition": res.cell.rep, "lr": res.lr, "error": res.error,
                 "cost": res.cell.cost.label}
            if res.report is not None:
                d.update({k: v for k, v in res.report.to_dict().items() if k != "cost"})
            runs.append(d)
        _write_table_csv(runs, p, RUN_COLUMNS)
        paths.append(p)
    if "json" in formats:
        p = out / f"{stem}.json"
        p.write_text(json.dumps(rows, indent=1, sort_keys=False) + "\n")
        paths.append(p)
    paths.append(write_manifest(out, cfg, [p.name for p in paths]))
    return paths


def write_manifest(out: Path, cfg: Optional[ExperimentConfig], files: Sequence[str]) -> Path:
    p = out / "manifest.json"
    doc = {
        "config_sha256": cfg.digest() if cfg else None,
        "master_seed": cfg.master_seed if cfg else None,
        "mode": cfg.mode if cfg else None,
        "versions": {"rcr": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "files": list(files),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    p.write_text(json.dumps(doc, indent=1) + "\n")
    return p


def emit_verification(report: VerificationReport, out_dir, cfg: Optional[ExperimentConfig] = None) -> List[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    p = out / "verification.csv"
    _write_table_csv(
        [{"check": c.name, "passed": c.passed, "total": c.total, "ok": str(c.ok).lower(), "detail": c.detail}
         for c in report.checks],
        p, ("check", "passed", "total", "ok", "detail"))
    paths.append(p)
    if report.regret_results:
        paths.append(write_regret_csv(report.regret_results, out / "regret_sweep.csv"))
    if report.bayes_runs:
        p = out / "bayes_recovery.csv"
        _write_table_csv([r.__dict__ for r in report.bayes_runs], p, ("seed", "agreement", "al", "bayes_al", "lr"))
        paths.append(p)
    paths.append(write_manifest(out, cfg, [p.name for p in paths]))
    return paths
