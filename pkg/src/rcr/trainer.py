"""Minibatch Adam training of a regressor/rejector pair.

The first ``slow_start_epochs`` epochs fit only the regressor on plain MSE
while the rejector stays at its initial weights; the remaining epochs descend
the minibatch mean of the surrogate loss in both models.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import losses
from .data import Dataset
from .linalg import Rng, ShapeError
from .losses import BinaryLossKind, CostSpec
from .metrics import evaluate_outputs, mse
from .models import ModelParams, ModelSpec, RcRPair, backward, forward, init_params, predict

DEFAULT_LR_GRID = (1e-1, 1e-2, 1e-3)


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss or parameter."""

    def __init__(self, epoch: int, what: str = "loss"):
        super().__init__(f"training diverged at epoch {epoch}: non-finite {what}")
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    loss_kind: BinaryLossKind = BinaryLossKind.MAE
    cost: CostSpec = field(default_factory=lambda: CostSpec(constant=1.0))
    lr: float = 1e-3
    lr_grid: Tuple[float, ...] = DEFAULT_LR_GRID
    epochs: int = 1000
    slow_start_epochs: int = 200
    batch_size: int = 1024
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "loss_kind", BinaryLossKind.parse(self.loss_kind))
        object.__setattr__(self, "cost", CostSpec.parse(self.cost))
        object.__setattr__(self, "lr_grid", tuple(float(v) for v in self.lr_grid))
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0 <= self.slow_start_epochs <= self.epochs:
            raise ValueError("slow_start_epochs must lie in [0, epochs]")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.lr > 0 or any(v <= 0 for v in self.lr_grid):
            raise ValueError("learning rates must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown training options: {sorted(unknown)}")
        return cls(**d)


@dataclass
class AdamState:
    m: List[np.ndarray]
    v: List[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "AdamState":
        arrays = params.arrays()
        return cls([np.zeros_like(a) for a in arrays], [np.zeros_like(a) for a in arrays])


def adam_step(
    params: ModelParams,
    grads: Sequence[np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> Tuple[ModelParams, AdamState]:
    """One bias-corrected Adam update, applied in place (and returned)."""
    arrays = params.arrays()
    if len(grads) != len(arrays) or any(g.shape != a.shape for g, a in zip(grads, arrays)):
        raise ShapeError("gradient shapes do not match parameters")
    state.t += 1
    bc1 = 1.0 - beta1**state.t
    bc2 = 1.0 - beta2**state.t
    for a, g, m, v in zip(arrays, grads, state.m, state.v):
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        a -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
    return params, state


@dataclass
class TrainHistory:
    train_surrogate_risk: List[float] = field(default_factory=list)
    val_rcr_loss: List[float] = field(default_factory=list)
    val_rej_rate: List[float] = field(default_factory=list)
    train_mse: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.train_surrogate_risk)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "train_surrogate_risk", "val_rcr_loss", "val_rej_rate"])
            for i in range(len(self)):
                w.writerow(
                    [i + 1, repr(self.train_surrogate_risk[i]), repr(self.val_rcr_loss[i]), repr(self.val_rej_rate[i])]
                )
        return path


def _batches(rng: Rng, epoch: int, n: int, batch_size: int):
    perm = rng.fork("shuffle", epoch).permutation(n)
    for start in range(0, n, batch_size):
        yield perm[start : start + batch_size]


def _all_finite(params: ModelParams) -> bool:
    return all(np.all(np.isfinite(a)) for a in params.arrays())


def _check_train(train: Dataset):
    if train is None or train.n == 0:
        raise ValueError("training set is empty")


def train_rcr(
    train: Dataset,
    val: Dataset,
    spec_h: ModelSpec,
    spec_r: ModelSpec,
    cfg: TrainConfig,
) -> Tuple[RcRPair, TrainHistory]:
    """Fit the pair under the surrogate risk with the slow-start schedule.

    Raises :class:`DivergenceError` as soon as an epoch yields a non-finite
    loss or parameter.
    """
    _check_train(train)
    spec_h = spec_h.with_input_dim(train.d)
    spec_r = spec_r.with_input_dim(train.d)
    costs = cfg.cost.resolve(train)
    val_costs = cfg.cost.resolve(val)
    rng = Rng(cfg.seed)
    h = init_params(spec_h, rng.fork("init", "h"))
    r = init_params(spec_r, rng.fork("init", "r"))
    opt_h, opt_r = AdamState.zeros_like(h), AdamState.zeros_like(r)
    adam = dict(beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    kind = cfg.loss_kind
    x, y, n = train.features, train.targets, train.n
    hist = TrainHistory()

    for epoch in range(cfg.epochs):
        joint = epoch >= cfg.slow_start_epochs
        risk_sum = sq_sum = 0.0
        for idx in _batches(rng, epoch, n, cfg.batch_size):
            xb, yb, cb = x[idx], y[idx], costs[idx]
            m = idx.size
            hp, h_cache = forward(h, xb)
            rp, r_cache = forward(r, xb)
            hp, rp = hp[:, 0], rp[:, 0]
            if not (np.all(np.isfinite(hp)) and np.all(np.isfinite(rp))):
                raise DivergenceError(epoch + 1, "model output")
            risk_sum += float(losses.surrogate_loss(hp, yb, rp, cb, kind).sum())
            sq_sum += float(((hp - yb) ** 2).sum())
            if joint:
                d_h, d_r = losses.surrogate_grads(hp, yb, rp, cb, kind)
                adam_step(h, backward(h, h_cache, d_h / m), opt_h, cfg.lr, **adam)
                adam_step(r, backward(r, r_cache, d_r / m), opt_r, cfg.lr, **adam)
            else:
                adam_step(h, backward(h, h_cache, 2.0 * (hp - yb) / m), opt_h, cfg.lr, **adam)
        if not (math.isfinite(risk_sum) and _all_finite(h) and _all_finite(r)):
            raise DivergenceError(epoch + 1)
        hist.train_surrogate_risk.append(risk_sum / n)
        hist.train_mse.append(sq_sum / n)
        rep = evaluate_outputs(predict(h, val.features), val.targets, predict(r, val.features), val_costs)
        hist.val_rcr_loss.append(rep.rcr_loss)
        hist.val_rej_rate.append(rep.rej)
    return RcRPair(h, r), hist


def fit_regressor(train: Dataset, spec: ModelSpec, cfg: TrainConfig) -> Tuple[ModelParams, List[float]]:
    """Plain MSE fit; returns the parameters and per-epoch mean training MSE.

    Uses the same initialisation and shuffling streams as the regressor in
    :func:`train_rcr`, so the two coincide while the rejector is frozen.
    """
    _check_train(train)
    spec = spec.with_input_dim(train.d)
    rng = Rng(cfg.seed)
    h = init_params(spec, rng.fork("init", "h"))
    opt = AdamState.zeros_like(h)
    adam = dict(beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    x, y, n = train.features, train.targets, train.n
    trace = []
    for epoch in range(cfg.epochs):
        sq_sum = 0.0
        for idx in _batches(rng, epoch, n, cfg.batch_size):
            xb, yb = x[idx], y[idx]
            hp, cache = forward(h, xb)
            hp = hp[:, 0]
            if not np.all(np.isfinite(hp)):
                raise DivergenceError(epoch + 1, "model output")
            sq_sum += float(((hp - yb) ** 2).sum())
            adam_step(h, backward(h, cache, 2.0 * (hp - yb) / idx.size), opt, cfg.lr, **adam)
        if not (math.isfinite(sq_sum) and _all_finite(h)):
            raise DivergenceError(epoch + 1)
        trace.append(sq_sum / n)
    return h, trace


def train_supervised(train: Dataset, spec: ModelSpec, cfg: TrainConfig) -> ModelParams:
    """The fully supervised MSE baseline."""
    return fit_regressor(train, spec, cfg)[0]


@dataclass
class LrSearch:
    cfg: TrainConfig
    scores: Dict[float, float]
    pair: Optional[RcRPair] = None
    history: Optional[TrainHistory] = None
    model: Optional[ModelParams] = None


def _pick(scores: Dict[float, float]) -> float:
    # ties go to the smaller learning rate
    best = min(scores.items(), key=lambda kv: (kv[1], kv[0]))
    if not math.isfinite(best[1]):
        raise DivergenceError(0, "loss at every learning rate in the grid")
    return best[0]


def search_lr(train, val, spec_h, spec_r, cfg: TrainConfig) -> LrSearch:
    """Train once per grid point; keep the run with the lowest final validation RcR loss."""
    if not cfg.lr_grid:
        raise ValueError("learning-rate grid is empty")
    scores, runs = {}, {}
    for lr in cfg.lr_grid:
        try:
            pair, hist = train_rcr(train, val, spec_h, spec_r, replace(cfg, lr=lr))
        except DivergenceError:
            scores[lr] = math.inf
            continue
        score = hist.val_rcr_loss[-1]
        scores[lr] = score if math.isfinite(score) else math.inf
        runs[lr] = (pair, hist)
    lr = _pick(scores)
    pair, hist = runs[lr]
    return LrSearch(replace(cfg, lr=lr), scores, pair=pair, history=hist)


def select_lr(train, val, spec_h, spec_r, cfg: TrainConfig) -> TrainConfig:
    return search_lr(train, val, spec_h, spec_r, cfg).cfg


def search_lr_supervised(train, val, spec: ModelSpec, cfg: TrainConfig) -> LrSearch:
    """Grid search for the MSE baseline, scored by validation MSE."""
    if not cfg.lr_grid:
        raise ValueError("learning-rate grid is empty")
    scores, models = {}, {}
    for lr in cfg.lr_grid:
        try:
            model = train_supervised(train, spec, replace(cfg, lr=lr))
        except DivergenceError:
            scores[lr] = math.inf
            continue
        score = mse(predict(model, val.features), val.targets)
        scores[lr] = score if math.isfinite(score) else math.inf
        models[lr] = model
    lr = _pick(scores)
    return LrSearch(replace(cfg, lr=lr), scores, model=models[lr])
