"""Dense float64 kernels and seeded, forkable randomness.

Matrices are plain 2-D ``numpy.float64`` arrays. Randomness goes through
:class:`Rng`, a thin wrapper around numpy's counter-based Philox generator
whose substreams are addressed by a tuple of keys, so that a repetition or
grid cell can derive its own reproducible stream from a master seed.
"""

from __future__ import annotations

import hashlib
from typing import Union

import numpy as np

Key = Union[int, str, float]


class ShapeError(ValueError):
    """Raised when array shapes do not conform."""


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D float64 array."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def matmul(a, b) -> np.ndarray:
    """Matrix product with a shape check that names both operands."""
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def key_to_int(key: Key) -> int:
    """Stable 64-bit integer for a stream key (independent of PYTHONHASHSEED)."""
    if isinstance(key, (int, np.integer)) and not isinstance(key, bool) and key >= 0:
        return int(key)
    digest = hashlib.sha256(repr(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class Rng:
    """Seeded random stream.

    ``Rng(seed)`` and ``Rng(seed).fork("a", 3)`` are independent streams;
    each is fully determined by the seed and its key path.
    """

    def __init__(self, seed: int, path: tuple = ()):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = int(seed)
        self.path = tuple(path)
        ss = np.random.SeedSequence(
            entropy=self.seed, spawn_key=tuple(key_to_int(k) for k in self.path)
        )
        self.generator = np.random.Generator(np.random.Philox(ss))

    def fork(self, *keys: Key) -> "Rng":
        return Rng(self.seed, self.path + tuple(keys))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, path={self.path!r})"

    # Vectorised draws used by the rest of the package.
    def normal(self, mean=0.0, std=1.0, size=None) -> np.ndarray:
        return self.generator.normal(mean, std, size)

    def uniform_array(self, lo, hi, size=None) -> np.ndarray:
        return self.generator.uniform(lo, hi, size)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)


def gauss(rng: Rng, mean: float, std: float) -> float:
    """One draw from N(mean, std**2); ``std == 0`` returns ``mean`` exactly."""
    if not std >= 0:
        raise ValueError(f"std must be non-negative, got {std}")
    z = rng.generator.standard_normal()
    if std == 0:
        return float(mean)
    return float(mean + std * z)


def uniform(rng: Rng, lo: float, hi: float) -> float:
    """One draw from U[lo, hi)."""
    if lo > hi:
        raise ValueError(f"empty interval: lo={lo} > hi={hi}")
    u = rng.generator.random()
    if lo == hi:
        return float(lo)
    return float(lo + (hi - lo) * u)
