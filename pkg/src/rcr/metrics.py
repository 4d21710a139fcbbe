"""Evaluation of a regressor/rejector pair under cost-based rejection.

Metrics (a sample is accepted iff the rejector output is > 0):

rcr_loss  mean of squared error on accepted and cost on rejected samples
rej       fraction rejected
al / rl   mean squared error over accepted / rejected samples
ar        rejected fraction among samples whose squared error is below the cost
ra        accepted fraction among samples whose squared error is >= the cost
sup       MSE of a plainly supervised baseline, attached by the caller
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .losses import CostSpec

CSV_COLUMNS = ("cost", "sup", "rcr_loss", "al", "rl", "rej", "ar", "ra", "n_total", "n_accepted")
METRIC_NAMES = ("sup", "rcr_loss", "al", "rl", "rej", "ar", "ra")


@dataclass(frozen=True)
class MetricsReport:
    rcr_loss: float
    rej: float
    al: Optional[float]
    rl: Optional[float]
    ar: Optional[float]
    ra: Optional[float]
    n_total: int
    n_accepted: int
    n_rejected: int
    sup: Optional[float] = None
    cost: Optional[str] = None

    def with_sup(self, sup: float) -> "MetricsReport":
        return replace(self, sup=float(sup))

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def csv_row(self) -> List[str]:
        d = self.to_dict()
        return [format_value(d[k]) for k in CSV_COLUMNS]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _mean_or_none(x: np.ndarray) -> Optional[float]:
    return float(x.mean()) if x.size else None


def evaluate_outputs(h_pred, y, r_out, costs, cost_label: Optional[str] = None) -> MetricsReport:
    """Metrics from raw predictions, rejector outputs and per-example costs."""
    h_pred = np.asarray(h_pred, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    r_out = np.asarray(r_out, dtype=np.float64).reshape(-1)
    costs = np.broadcast_to(np.asarray(costs, dtype=np.float64), y.shape)
    n = y.size
    if n == 0:
        raise ValueError("cannot evaluate on an empty test set")
    if not (h_pred.size == n and r_out.size == n):
        raise ValueError("prediction, rejector output and target lengths differ")
    if np.any(costs < 0):
        raise ValueError("rejection cost must be >= 0")
    sq = (h_pred - y) ** 2
    acc = r_out > 0
    n_acc = int(acc.sum())
    rcr = float((sq[acc].sum() + costs[~acc].sum()) / n)
    keep = sq < costs  # should be accepted
    ar = float((keep & ~acc).sum() / keep.sum()) if keep.any() else None
    ra = float((~keep & acc).sum() / (~keep).sum()) if (~keep).any() else None
    return MetricsReport(
        rcr_loss=rcr,
        rej=(n - n_acc) / n,
        al=_mean_or_none(sq[acc]),
        rl=_mean_or_none(sq[~acc]),
        ar=ar,
        ra=ra,
        n_total=n,
        n_accepted=n_acc,
        n_rejected=n - n_acc,
        cost=cost_label,
    )


def evaluate(pair, test, cost: CostSpec) -> MetricsReport:
    """Evaluate a trained :class:`~rcr.models.RcRPair` on ``test``."""
    cost = CostSpec.parse(cost)
    if test.n == 0:
        raise ValueError("cannot evaluate on an empty test set")
    h_pred, r_out = pair.predict(test.features)
    return evaluate_outputs(h_pred, test.targets, r_out, cost.resolve(test), cost.label)


def mse(pred, y) -> float:
    pred = np.asarray(pred, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    return float(np.mean((pred - y) ** 2))


@dataclass(frozen=True)
class Summary:
    mean: Optional[float]
    std: Optional[float]
    count: int


def aggregate(reports: Sequence[MetricsReport]) -> Dict[str, Summary]:
    """Per-metric mean and sample standard deviation (n - 1; 0 for one value).

    Absent values are dropped from that metric only; ``count`` says how many remained.
    """
    if not reports:
        raise ValueError("nothing to aggregate")
    out = {}
    for name in METRIC_NAMES:
        vals = np.array([getattr(r, name) for r in reports if getattr(r, name) is not None], dtype=np.float64)
        if vals.size == 0:
            out[name] = Summary(None, None, 0)
            continue
        std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
        out[name] = Summary(float(vals.mean()), std, int(vals.size))
    return out


def stderr(values) -> float:
    v = np.asarray(values, dtype=np.float64)
    return float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
