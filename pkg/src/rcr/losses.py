"""Binary losses for the rejector, the cost-based rejection loss and its surrogate.

All functions broadcast over numpy arrays. The surrogate couples the squared
regression error with a binary loss on the rejector output::

    psi = (h - y)**2 * l(r, -1) + c * l(r, +1)

where ``l(r, +1)`` is the loss of declaring "accept" and ``l(r, -1)`` of
declaring "reject"; ``r > 0`` means accept.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit


class BinaryLossKind(str, enum.Enum):
    MAE = "mae"
    HINGE = "hinge"
    LOGISTIC = "logistic"
    SQUARE = "square"
    SIGMOID = "sigmoid"

    @classmethod
    def parse(cls, value) -> "BinaryLossKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown binary loss {value!r}; expected one of {names}") from None

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CostSpec:
    """Rejection cost: a constant, or a named per-example column of a dataset."""

    constant: Optional[float] = None
    column: Optional[str] = None

    def __post_init__(self):
        if (self.constant is None) == (self.column is None):
            raise ValueError("CostSpec needs exactly one of constant or column")
        if self.constant is not None and not (np.isfinite(self.constant) and self.constant >= 0):
            raise ValueError(f"rejection cost must be finite and >= 0, got {self.constant}")

    @classmethod
    def parse(cls, value) -> "CostSpec":
        """Accept a number, ``{"constant": c}`` or ``{"column": name}``."""
        if isinstance(value, CostSpec):
            return value
        if isinstance(value, (int, float)):
            return cls(constant=float(value))
        if isinstance(value, dict):
            return cls(constant=value.get("constant"), column=value.get("column"))
        raise ValueError(f"cannot interpret cost {value!r}")

    @property
    def label(self) -> str:
        return f"{self.constant:g}" if self.constant is not None else f"col:{self.column}"

    def resolve(self, dataset) -> np.ndarray:
        """Per-example cost vector for ``dataset``."""
        n = dataset.n
        if self.constant is not None:
            return np.full(n, float(self.constant))
        if dataset.costs is None:
            raise ValueError(f"cost column {self.column!r} requested but dataset has no costs")
        if dataset.cost_column is not None and dataset.cost_column != self.column:
            raise ValueError(
                f"cost column {self.column!r} requested but dataset carries {dataset.cost_column!r}"
            )
        return _check_cost(dataset.costs)


def _check_finite(x, name):
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} must be finite")
    return x


def _check_cost(c):
    c = _check_finite(c, "cost")
    if np.any(c < 0):
        raise ValueError("rejection cost must be >= 0")
    return c


def _check_label(z):
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.abs(z) == 1):
        raise ValueError("binary label must be +1 or -1")
    return z


def binary_loss(kind, r, z):
    """Value of the binary loss ``l(r, z)`` for label ``z`` in {+1, -1}."""
    kind = BinaryLossKind.parse(kind)
    r = _check_finite(r, "rejector output")
    z = _check_label(z)
    m = z * r
    if kind is BinaryLossKind.HINGE:
        return np.maximum(0.0, 1.0 - m)
    if kind is BinaryLossKind.LOGISTIC:
        # log(1 + exp(-m)) without overflow for large |m|
        return np.logaddexp(0.0, -m)
    if kind is BinaryLossKind.SQUARE:
        return (r - z) ** 2
    if kind is BinaryLossKind.SIGMOID:
        return expit(-m)
    # MAE: L1 distance between the one-hot label and the two-class softmax of (r, 0).
    return 2.0 * expit(-m)


def binary_loss_grad(kind, r, z):
    """Derivative of ``l(r, z)`` with respect to ``r``.

    The hinge kink (``z * r == 1``) gets subgradient 0.
    """
    kind = BinaryLossKind.parse(kind)
    r = _check_finite(r, "rejector output")
    z = _check_label(z)
    m = z * r
    if kind is BinaryLossKind.HINGE:
        return np.where(m < 1.0, -z, 0.0)
    if kind is BinaryLossKind.LOGISTIC:
        return -z * expit(-m)
    if kind is BinaryLossKind.SQUARE:
        return 2.0 * (r - z)
    s = expit(-m)
    g = -z * s * (1.0 - s)
    return 2.0 * g if kind is BinaryLossKind.MAE else g


def target_loss(h_pred, y, r_out, c):
    """Cost-based rejection loss: squared error if accepted (r > 0), else the cost."""
    h_pred = _check_finite(h_pred, "prediction")
    y = _check_finite(y, "target")
    r_out = _check_finite(r_out, "rejector output")
    c = _check_cost(c)
    return np.where(r_out > 0, (h_pred - y) ** 2, c)


def surrogate_loss(h_pred, y, r_out, c, kind):
    h_pred = _check_finite(h_pred, "prediction")
    y = _check_finite(y, "target")
    c = _check_cost(c)
    sq = (h_pred - y) ** 2
    return sq * binary_loss(kind, r_out, -1.0) + c * binary_loss(kind, r_out, 1.0)


def surrogate_grads(h_pred, y, r_out, c, kind):
    """Partial derivatives ``(d psi / d h_pred, d psi / d r_out)``."""
    h_pred = _check_finite(h_pred, "prediction")
    y = _check_finite(y, "target")
    c = _check_cost(c)
    diff = h_pred - y
    d_h = 2.0 * diff * binary_loss(kind, r_out, -1.0)
    d_r = diff**2 * binary_loss_grad(kind, r_out, -1.0) + c * binary_loss_grad(kind, r_out, 1.0)
    return d_h, d_r
