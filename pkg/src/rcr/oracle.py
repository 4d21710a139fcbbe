"""Ground truth for checking learned pairs and the surrogate's theory.

Synthetic distributions here have a known conditional mean ``mu(x)`` and
variance ``var(x)``, so the optimal pair is known in closed form: predict
``mu(x)`` and accept iff ``c(x) > var(x)``. Ties reject, like the target loss.

For a fixed ``x`` the expected surrogate loss of predicting ``a`` with
rejector output ``t`` is::

    ((a - mu)**2 + var) * l(t, -1) + c * l(t, +1)

which is what the pointwise grid minimiser and the regret check work with.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .data import Dataset
from .linalg import Rng
from .losses import BinaryLossKind, binary_loss

GRID_STEP = 0.01
T_RANGE = 8.0


class SpecError(ValueError):
    """Invalid synthetic distribution description."""


@dataclass(frozen=True)
class SyntheticSpec:
    """Uniform-box inputs with Gaussian noise of input-dependent variance.

    ``mean_fn``: ``{"type": "linear", "w": [...], "b": b}`` or
    ``{"type": "sine", "amplitude": A, "frequency": f}`` (on feature 0).
    ``var_fn``: ``{"type": "constant", "v": v}``,
    ``{"type": "step", "threshold": t, "v_low": a, "v_high": b}`` (feature 0;
    ``v_low`` for ``x0 <= t``; a null threshold means the box midpoint, i.e.
    the median of feature 0) or ``{"type": "quadratic", "a": a, "b": b}``.
    """

    x_dim: int = 1
    low: float = -1.0
    high: float = 1.0
    mean_fn: dict = field(default_factory=lambda: {"type": "linear", "w": [1.0], "b": 0.0})
    var_fn: dict = field(default_factory=lambda: {"type": "constant", "v": 1.0})

    def __post_init__(self):
        if self.x_dim < 1:
            raise SpecError("x_dim must be >= 1")
        if not self.low < self.high:
            raise SpecError("sampler box needs low < high")
        mt = self.mean_fn.get("type")
        if mt == "linear":
            w = self.mean_fn.get("w", [])
            if len(w) != self.x_dim:
                raise SpecError(f"linear mean needs {self.x_dim} weights, got {len(w)}")
        elif mt != "sine":
            raise SpecError(f"unknown mean_fn type {mt!r}")
        vt = self.var_fn.get("type")
        if vt not in ("constant", "step", "quadratic"):
            raise SpecError(f"unknown var_fn type {vt!r}")
        if self.min_variance() <= 0:
            raise SpecError("variance must be positive on the whole sampler box")

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        return cls(
            x_dim=int(d.get("x_dim", 1)),
            low=float(d.get("low", -1.0)),
            high=float(d.get("high", 1.0)),
            mean_fn=dict(d.get("mean_fn", {"type": "linear", "w": [1.0] * int(d.get("x_dim", 1)), "b": 0.0})),
            var_fn=dict(d.get("var_fn", {"type": "constant", "v": 1.0})),
        )

    def to_dict(self) -> dict:
        return {"x_dim": self.x_dim, "low": self.low, "high": self.high, "mean_fn": self.mean_fn, "var_fn": self.var_fn}

    @property
    def threshold(self) -> float:
        t = self.var_fn.get("threshold")
        return 0.5 * (self.low + self.high) if t is None else float(t)

    def min_variance(self) -> float:
        v = self.var_fn
        if v["type"] == "constant":
            return float(v["v"])
        if v["type"] == "step":
            return min(float(v["v_low"]), float(v["v_high"]))
        a, b = float(v["a"]), float(v["b"])
        # ||x||^2 over the box ranges over [lo2, hi2]
        per_dim = [self.low**2, self.high**2] + ([0.0] if self.low <= 0 <= self.high else [])
        lo2, hi2 = self.x_dim * min(per_dim), self.x_dim * max(per_dim)
        return min(a * lo2 + b, a * hi2 + b)

    def mean(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        m = self.mean_fn
        if m["type"] == "linear":
            return x @ np.asarray(m["w"], dtype=np.float64) + float(m.get("b", 0.0))
        return float(m["amplitude"]) * np.sin(float(m["frequency"]) * x[:, 0])

    def variance(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        v = self.var_fn
        if v["type"] == "constant":
            return np.full(x.shape[0], float(v["v"]))
        if v["type"] == "step":
            return np.where(x[:, 0] <= self.threshold, float(v["v_low"]), float(v["v_high"]))
        return float(v["a"]) * np.sum(x * x, axis=1) + float(v["b"])

    def sample_x(self, n: int, rng: Rng) -> np.ndarray:
        return rng.uniform_array(self.low, self.high, size=(n, self.x_dim))


def sample_synthetic(spec: SyntheticSpec, n: int, rng: Rng) -> Dataset:
    if n < 1:
        raise SpecError("need at least one sample")
    x = spec.sample_x(n, rng.fork("x"))
    noise = rng.fork("noise").normal(0.0, 1.0, size=n)
    y = spec.mean(x) + np.sqrt(spec.variance(x)) * noise
    return Dataset(features=x, targets=y, column_names=tuple(f"x{i}" for i in range(spec.x_dim)))


def bayes_pair(spec: SyntheticSpec, x, c: float):
    """Optimal prediction and accept decision at a single point ``x``."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if x.shape[1] != spec.x_dim:
        raise SpecError(f"point has {x.shape[1]} coordinates, spec has {spec.x_dim}")
    return float(spec.mean(x)[0]), bool(c - spec.variance(x)[0] > 0)


class BayesPair:
    """The optimal pair as a frozen predictor (rejector output ``c - var(x)``)."""

    def __init__(self, spec: SyntheticSpec, c: float):
        self.spec, self.c = spec, float(c)

    def predict(self, x):
        return self.spec.mean(x), self.c - self.spec.variance(x)


def conditional_surrogate_risk(a, t, mu, var, c, kind):
    return ((a - mu) ** 2 + var) * binary_loss(kind, t, -1.0) + c * binary_loss(kind, t, 1.0)


def conditional_target_risk(a, t, mu, var, c):
    return np.where(np.asarray(t) > 0, (np.asarray(a) - mu) ** 2 + var, c)


def default_t_grid(step: float = GRID_STEP, bound: float = T_RANGE) -> np.ndarray:
    k = int(round(bound / step))
    return np.arange(-k, k + 1) * step


def default_a_grid(mu: float, var: float, step: float = GRID_STEP) -> np.ndarray:
    k = int(math.ceil(5.0 * math.sqrt(var) / step))
    return mu + np.arange(-k, k + 1) * step


def pointwise_surrogate_minimizer(
    mu: float,
    var: float,
    c: float,
    kind,
    a_grid: Optional[Sequence[float]] = None,
    t_grid: Optional[Sequence[float]] = None,
):
    """Exact argmin of the conditional surrogate risk over the grid ``a_grid x t_grid``.

    Ties go to the smallest ``|t|`` and then the smallest ``a``. The risk is
    separable: for each ``t`` the best ``a`` minimises ``(a - mu)**2`` unless
    ``l(t, -1) == 0``, so the search costs ``O(|a| + |t|)`` yet returns the
    same point as a full sweep of the product grid.
    """
    kind = BinaryLossKind.parse(kind)
    if not var > 0:
        raise ValueError("variance must be positive")
    if c < 0:
        raise ValueError("cost must be >= 0")
    a = np.asarray(default_a_grid(mu, var) if a_grid is None else a_grid, dtype=np.float64)
    t = np.asarray(default_t_grid() if t_grid is None else t_grid, dtype=np.float64)
    if a.size == 0 or t.size == 0:
        raise ValueError("grids must be non-empty")
    if np.any(np.diff(a) < 0) or np.any(np.diff(t) < 0):
        raise ValueError("grids must be sorted")
    e_min = np.min((a - mu) ** 2)
    risk_t = (e_min + var) * binary_loss(kind, t, -1.0) + c * binary_loss(kind, t, 1.0)
    best = risk_t.min()
    cand = np.flatnonzero(risk_t == best)
    ti = cand[np.lexsort((t[cand], np.abs(t[cand])))[0]]
    risk_a = conditional_surrogate_risk(a, t[ti], mu, var, c, kind)
    ai = int(np.flatnonzero(risk_a == risk_a.min())[0])
    return float(a[ai]), float(t[ti])


def xi_bound(kind, u: float, M: float, C: float) -> float:
    """Regret transfer function: ``|u|`` for hinge and sigmoid,
    ``min(2u, 2 sqrt((M + C) u))`` for logistic and square."""
    kind = BinaryLossKind.parse(kind)
    if u < 0:
        raise ValueError(f"regret must be >= 0, got {u}")
    if kind in (BinaryLossKind.HINGE, BinaryLossKind.SIGMOID):
        return abs(u)
    if kind in (BinaryLossKind.LOGISTIC, BinaryLossKind.SQUARE):
        return min(2.0 * u, 2.0 * math.sqrt((M + C) * u))
    raise ValueError(f"no regret transfer bound is available for {kind.value}")


@dataclass(frozen=True)
class RegretSample:
    mu: float
    var: float
    c: float
    h_val: float
    r_val: float

    def __post_init__(self):
        if not self.var > 0:
            raise ValueError("var must be > 0")
        if self.c < 0:
            raise ValueError("c must be >= 0")


@dataclass(frozen=True)
class RegretResult:
    kind: str
    target_regret: float
    surrogate_regret: float
    bound: float
    holds: bool


def regret_check(sample: RegretSample, kind, t_grid: Optional[np.ndarray] = None) -> RegretResult:
    """Pointwise target regret against the transfer bound of the surrogate regret."""
    kind = BinaryLossKind.parse(kind)
    if kind is BinaryLossKind.MAE:
        raise ValueError("no regret transfer bound is available for mae")
    s = sample
    t = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=np.float64)
    sq = (s.h_val - s.mu) ** 2 + s.var
    target = float(conditional_target_risk(s.h_val, s.r_val, s.mu, s.var, s.c)) - min(s.var, s.c)
    risk = float(conditional_surrogate_risk(s.h_val, s.r_val, s.mu, s.var, s.c, kind))
    opt = float(np.min(s.var * binary_loss(kind, t, -1.0) + s.c * binary_loss(kind, t, 1.0)))
    surrogate = max(risk - opt, 0.0)
    bound = xi_bound(kind, surrogate, M=sq, C=s.c)
    return RegretResult(kind.value, target, surrogate, bound, bool(target <= bound + 1e-9))


def random_regret_samples(n: int, rng: Rng) -> list:
    """Uniform draws over mu in [-5, 5], var in (0, 10], c in [0, 10], h in [-10, 10], r in [-5, 5]."""
    g = rng.generator
    mu = g.uniform(-5, 5, n)
    var = 10.0 - g.uniform(0, 10, n)  # (0, 10]
    c = g.uniform(0, 10, n)
    h = g.uniform(-10, 10, n)
    r = g.uniform(-5, 5, n)
    return [RegretSample(*map(float, row)) for row in zip(mu, var, c, h, r)]


def regret_sweep(kind, n: int, rng: Rng) -> list:
    t = default_t_grid()
    return [regret_check(s, kind, t) for s in random_regret_samples(n, rng)]


def write_regret_csv(results: Iterable[RegretResult], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "target_regret", "surrogate_regret", "bound", "holds"])
        for r in results:
            w.writerow([r.kind, repr(r.target_regret), repr(r.surrogate_regret), repr(r.bound), str(r.holds).lower()])
    return path


def decision_agreement(pair, spec: SyntheticSpec, c: float, n_test: int, rng: Rng) -> float:
    """Fraction of fresh inputs on which the pair's accept decision matches the optimal one."""
    if n_test < 1:
        raise ValueError("n_test must be >= 1")
    x = spec.sample_x(n_test, rng)
    r_out = np.asarray(pair.predict(x)[1]).reshape(-1)
    optimal = c - spec.variance(x) > 0
    return float(np.mean((r_out > 0) == optimal))
