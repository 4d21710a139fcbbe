"""Linear and ReLU-MLP scalar-output models with exact backpropagation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple

import numpy as np

from .linalg import Rng, ShapeError

DEFAULT_HIDDEN = (20, 30, 10)


@dataclass(frozen=True)
class ModelSpec:
    kind: str = "mlp"  # "linear" or "mlp"
    input_dim: int = 1
    hidden_dims: Tuple[int, ...] = DEFAULT_HIDDEN

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in ("linear", "mlp"):
            raise ValueError(f"model kind must be 'linear' or 'mlp', got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        hidden = () if kind == "linear" else tuple(int(h) for h in self.hidden_dims)
        if any(h < 1 for h in hidden):
            raise ValueError(f"hidden layer widths must be >= 1, got {hidden}")
        object.__setattr__(self, "hidden_dims", hidden)

    @property
    def layer_sizes(self) -> Tuple[int, ...]:
        return (self.input_dim, *self.hidden_dims, 1)

    def with_input_dim(self, d: int) -> "ModelSpec":
        return ModelSpec(self.kind, d, self.hidden_dims)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "input_dim": self.input_dim, "hidden_dims": list(self.hidden_dims)}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(
            kind=d.get("kind", "mlp"),
            input_dim=int(d.get("input_dim", 1)),
            hidden_dims=tuple(d.get("hidden_dims", DEFAULT_HIDDEN)),
        )


@dataclass
class ModelParams:
    """Weights ``W[i]`` of shape (fan_in, fan_out) and biases ``b[i]`` per layer."""

    spec: ModelSpec
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def arrays(self) -> List[np.ndarray]:
        """Parameter arrays in a fixed order (W0, b0, W1, b1, ...)."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> "ModelParams":
        return ModelParams(self.spec, [w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def set_flat(self, v: np.ndarray) -> None:
        i = 0
        for a in self.arrays():
            a[...] = v[i : i + a.size].reshape(a.shape)
            i += a.size

    def equals(self, other: "ModelParams") -> bool:
        return self.spec == other.spec and all(
            np.array_equal(a, b) for a, b in zip(self.arrays(), other.arrays())
        )


@dataclass
class RcRPair:
    h: ModelParams
    r: ModelParams

    def __post_init__(self):
        if self.h.spec.input_dim != self.r.spec.input_dim:
            raise ShapeError("regressor and rejector take different input dimensions")

    def predict(self, x) -> Tuple[np.ndarray, np.ndarray]:
        """Regressor and rejector outputs, each of shape (n,)."""
        return predict(self.h, x), predict(self.r, x)


def init_params(spec: ModelSpec, rng: Rng) -> ModelParams:
    """Kaiming-uniform weights (bound sqrt(6 / fan_in)), zero biases."""
    sizes = spec.layer_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform_array(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return ModelParams(spec, weights, biases)


@dataclass
class Cache:
    params_id: int
    shapes: tuple
    activations: list = field(default_factory=list)  # inputs to each layer
    pre: list = field(default_factory=list)  # hidden pre-activations


def _shapes(params: ModelParams) -> tuple:
    return tuple(a.shape for a in params.arrays())


def forward(params: ModelParams, x) -> Tuple[np.ndarray, Cache]:
    """Outputs of shape (n, 1) and the activation record needed by :func:`backward`."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.shape[1] != params.spec.input_dim:
        raise ShapeError(f"model expects {params.spec.input_dim} features, batch has {x.shape[1]}")
    cache = Cache(id(params), _shapes(params))
    a = x
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        cache.activations.append(a)
        z = a @ w + b
        if i < last:
            cache.pre.append(z)
            a = np.maximum(z, 0.0)
        else:
            a = z
    return a, cache


def predict(params: ModelParams, x) -> np.ndarray:
    return forward(params, x)[0][:, 0]


def backward(params: ModelParams, cache: Cache, upstream) -> List[np.ndarray]:
    """Gradients of ``sum_i upstream_i * output_i`` in :meth:`ModelParams.arrays` order.

    ReLU has derivative 0 at exactly 0.
    """
    if cache.params_id != id(params) or cache.shapes != _shapes(params):
        raise ShapeError("cache was not produced by forward() on these parameters")
    g = np.asarray(upstream, dtype=np.float64).reshape(-1, 1)
    if g.shape[0] != cache.activations[0].shape[0]:
        raise ShapeError(f"upstream has {g.shape[0]} rows, batch had {cache.activations[0].shape[0]}")
    n_layers = len(params.weights)
    grads: List[np.ndarray] = [None] * (2 * n_layers)
    for i in range(n_layers - 1, -1, -1):
        a = cache.activations[i]
        grads[2 * i] = a.T @ g
        grads[2 * i + 1] = g.sum(axis=0)
        if i > 0:
            g = (g @ params.weights[i].T) * (cache.pre[i - 1] > 0)
    return grads


def save_params(params: ModelParams, path) -> Path:
    """Checkpoint to ``.json`` (value-exact floats) or ``.npz`` (bit-exact)."""
    path = Path(path)
    if path.suffix == ".json":
        doc = {
            "spec": params.spec.to_dict(),
            "shapes": [list(a.shape) for a in params.arrays()],
            "values": params.flat().tolist(),
        }
        path.write_text(json.dumps(doc))
    elif path.suffix == ".npz":
        spec = json.dumps(params.spec.to_dict())
        np.savez(path, spec=np.array(spec), values=params.flat())
    else:
        raise ValueError(f"unsupported checkpoint extension {path.suffix!r}; use .json or .npz")
    return path


def load_params(path) -> ModelParams:
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        spec, values = ModelSpec.from_dict(doc["spec"]), np.asarray(doc["values"], dtype=np.float64)
    elif path.suffix == ".npz":
        with np.load(path) as z:
            spec = ModelSpec.from_dict(json.loads(str(z["spec"])))
            values = z["values"].astype(np.float64)
    else:
        raise ValueError(f"unsupported checkpoint extension {path.suffix!r}")
    params = init_params(spec, Rng(0))
    if values.size != params.flat().size:
        raise ShapeError(f"checkpoint holds {values.size} values, spec needs {params.flat().size}")
    params.set_flat(values)
    return params
