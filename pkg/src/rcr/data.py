"""Tabular datasets: CSV ingestion, seeded splits and z-scoring."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .linalg import Rng


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    targets: np.ndarray
    costs: Optional[np.ndarray] = None
    column_names: Optional[tuple] = None
    target_name: str = "y"
    cost_column: Optional[str] = None

    def __post_init__(self):
        x = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.targets, dtype=np.float64).reshape(-1)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DataError(f"features {x.shape} do not match {y.shape[0]} targets")
        if y.shape[0] < 1:
            raise DataError("dataset is empty")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DataError("dataset contains non-finite values")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "targets", y)
        if self.costs is not None:
            c = np.asarray(self.costs, dtype=np.float64).reshape(-1)
            if c.shape != y.shape:
                raise DataError("costs length differs from targets")
            if not np.all(np.isfinite(c)) or np.any(c < 0):
                raise DataError("costs must be finite and >= 0")
            object.__setattr__(self, "costs", c)
        if self.column_names is not None:
            names = tuple(self.column_names)
            if len(names) != x.shape[1]:
                raise DataError("column_names length differs from feature count")
            object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def take(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return replace(
            self,
            features=self.features[idx],
            targets=self.targets[idx],
            costs=None if self.costs is None else self.costs[idx],
        )


def load_csv(path, target_column: str, cost_column: Optional[str] = None) -> Dataset:
    """Read a comma-delimited file with a header row.

    Every column other than the target and the optional cost column becomes
    a feature; all of them must parse as finite numbers.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        for col in (target_column, cost_column):
            if col is not None and col not in header:
                raise DataError(f"{path}: column {col!r} not in header {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            values = []
            for name, cell in zip(header, row):
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(f"{path}:{lineno}: column {name!r}: not a number: {cell!r}") from None
                if not math.isfinite(v):
                    raise DataError(f"{path}:{lineno}: column {name!r}: non-finite value {cell!r}")
                values.append(v)
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no data rows")
    table = np.array(rows, dtype=np.float64)
    ti = header.index(target_column)
    ci = header.index(cost_column) if cost_column is not None else None
    feat_idx = [i for i in range(len(header)) if i not in (ti, ci)]
    costs = table[:, ci] if ci is not None else None
    if costs is not None and np.any(costs < 0):
        bad = int(np.argmax(costs < 0)) + 2
        raise DataError(f"{path}:{bad}: column {cost_column!r}: negative cost")
    return Dataset(
        features=table[:, feat_idx],
        targets=table[:, ti],
        costs=costs,
        column_names=tuple(header[i] for i in feat_idx),
        target_name=target_column,
        cost_column=cost_column,
    )


def write_csv(ds: Dataset, path) -> Path:
    """Write ``ds`` in the format :func:`load_csv` reads (values round-trip exactly)."""
    path = Path(path)
    names = list(ds.column_names or (f"x{i}" for i in range(ds.d)))
    header = names + [ds.target_name]
    if ds.costs is not None:
        header.append(ds.cost_column or "cost")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(ds.n):
            row = [repr(float(v)) for v in ds.features[i]] + [repr(float(ds.targets[i]))]
            if ds.costs is not None:
                row.append(repr(float(ds.costs[i])))
            w.writerow(row)
    return path


def split_sizes(n: int, ratios: Sequence[float]) -> tuple[int, int, int]:
    n_train = int(math.floor(ratios[0] * n + 1e-9))
    n_val = int(math.floor(ratios[1] * n + 1e-9))
    return n_train, n_val, n - n_train - n_val


def split_indices(n: int, ratios=(0.6, 0.2, 0.2), seed: int = 0):
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1) > 1e-9:
        raise DataError(f"split ratios must be three positive numbers summing to 1, got {ratios}")
    if n < 3:
        raise DataError(f"need at least 3 rows to split, got {n}")
    n_train, n_val, _ = split_sizes(n, ratios)
    perm = Rng(seed, ("split",)).permutation(n)
    return perm[:n_train], perm[n_train : n_train + n_val], perm[n_train + n_val :]


def split(ds: Dataset, ratios=(0.6, 0.2, 0.2), seed: int = 0):
    """Seeded permutation, then contiguous train/val/test slices (floor, floor, rest)."""
    tr, va, te = split_indices(ds.n, ratios, seed)
    return ds.take(tr), ds.take(va), ds.take(te)


def subsample_indices(n: int, fraction: float, seed: int, minimum: int = 10) -> np.ndarray:
    """Sorted seeded subset of ``floor(fraction * n)`` row indices."""
    if not 0 < fraction <= 1:
        raise DataError(f"fraction must lie in (0, 1], got {fraction}")
    k = int(math.floor(fraction * n + 1e-9))
    if k < minimum:
        raise DataError(f"fraction {fraction} keeps {k} of {n} rows; need at least {minimum}")
    return np.sort(Rng(seed, ("subsample",)).permutation(n)[:k])


@dataclass(frozen=True, eq=False)
class StandardizationStats:
    mean: np.ndarray
    std: np.ndarray = field()

    @classmethod
    def fit(cls, ds: Dataset) -> "StandardizationStats":
        mean = ds.features.mean(axis=0)
        std = ds.features.std(axis=0)
        # constant features pass through centred
        std = np.where(std > 0, std, 1.0)
        return cls(mean=mean, std=std)


def standardize(stats: StandardizationStats, ds: Dataset) -> Dataset:
    if stats.mean.shape[0] != ds.d:
        raise DataError(f"stats cover {stats.mean.shape[0]} features, dataset has {ds.d}")
    return replace(ds, features=(ds.features - stats.mean) / stats.std)


def destandardize(stats: StandardizationStats, ds: Dataset) -> Dataset:
    if stats.mean.shape[0] != ds.d:
        raise DataError(f"stats cover {stats.mean.shape[0]} features, dataset has {ds.d}")
    return replace(ds, features=ds.features * stats.std + stats.mean)


ABALONE_SEX_LEVELS = ("M", "F", "I")
ABALONE_NUMERIC = (
    "length",
    "diameter",
    "height",
    "whole_weight",
    "shucked_weight",
    "viscera_weight",
    "shell_weight",
)


def encode_abalone(src, dst) -> Path:
    """One-hot encode the raw Abalone file's ``Sex`` column.

    ``src`` is either the original headerless ``abalone.data`` or a copy with a
    header row. The output has columns ``sex_M, sex_F, sex_I``, the seven
    measurements and ``rings``.
    """
    src, dst = Path(src), Path(dst)
    with src.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and rows[0][0].strip() not in ABALONE_SEX_LEVELS:
        rows = rows[1:]
    header = [f"sex_{s}" for s in ABALONE_SEX_LEVELS] + list(ABALONE_NUMERIC) + ["rings"]
    with dst.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for lineno, row in enumerate(rows, start=1):
            if len(row) != 9:
                raise DataError(f"{src}: record {lineno} has {len(row)} fields, expected 9")
            sex = row[0].strip()
            if sex not in ABALONE_SEX_LEVELS:
                raise DataError(f"{src}: record {lineno}: unknown sex {sex!r}")
            onehot = ["1" if sex == s else "0" for s in ABALONE_SEX_LEVELS]
            # some redistributed copies carry float noise (0.10099999999999999)
            nums = [repr(round(float(v), 6)) for v in row[1:8]]
            w.writerow(onehot + nums + [str(int(float(row[8])))])
    return dst
