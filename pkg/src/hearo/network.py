"""Parametrized fully-connected network: forward pass, cost, backprop.

Shapes follow the column-per-example convention: a batch ``A_0`` is
``n_input x nb``, ``W_i`` is ``n_i x n_{i-1}`` and ``b_i`` is ``n_i x 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Sequence

import numpy as np

from . import linalg as la
from .linalg import Matrix, ShapeError
from .rng import Xoshiro256

LEAKY_SLOPE = 0.01
LOG_CLAMP = 1e-12


class Activation(IntEnum):
    RELU = 1
    SIGMOID = 2
    TANH = 3
    LEAKY_RELU = 4


def as_activation(kind) -> Activation:
    try:
        return Activation(int(kind))
    except (ValueError, TypeError):
        raise ValueError(f"unknown activation kind {kind!r}; expected 1..4") from None


@dataclass(frozen=True)
class HyperParams:
    """One point of the configuration vector ``[L, n1..nL, s1..sL, lr, alpha, nb, epochs]``."""

    layer_sizes: tuple[int, ...]
    activations: tuple[Activation, ...]
    learning_rate: float
    reg_alpha: float
    batch_size: int
    epochs: int

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        object.__setattr__(self, "activations", tuple(as_activation(a) for a in self.activations))
        if not self.layer_sizes:
            raise ValueError("at least one layer is required")
        if len(self.layer_sizes) != len(self.activations):
            raise ValueError(
                f"{len(self.layer_sizes)} layer sizes but {len(self.activations)} activations"
            )
        if any(n < 1 for n in self.layer_sizes):
            raise ValueError(f"layer sizes must be positive: {self.layer_sizes}")
        if self.layer_sizes[-1] != 1 or self.activations[-1] != Activation.SIGMOID:
            raise ValueError("the output layer must be a single sigmoid unit")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if not (math.isfinite(self.reg_alpha) and self.reg_alpha >= 0):
            raise ValueError(f"reg_alpha must be non-negative, got {self.reg_alpha}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be positive, got {self.batch_size}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}")

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes)

    def to_vector(self) -> list:
        return [
            self.n_layers, *self.layer_sizes, *(int(a) for a in self.activations),
            self.learning_rate, self.reg_alpha, self.batch_size, self.epochs,
        ]

    @classmethod
    def from_vector(cls, vec: Sequence) -> "HyperParams":
        n = int(vec[0])
        if len(vec) != 2 * n + 5:
            raise ValueError(f"vector for L={n} needs {2 * n + 5} entries, got {len(vec)}")
        return cls(
            tuple(int(v) for v in vec[1:n + 1]),
            tuple(int(v) for v in vec[n + 1:2 * n + 1]),
            float(vec[2 * n + 1]), float(vec[2 * n + 2]), int(vec[2 * n + 3]), int(vec[2 * n + 4]),
        )

    def __str__(self) -> str:
        n = self.n_layers
        v = self.to_vector()
        parts = [str(v[0]), ",".join(map(str, v[1:n + 1])), ",".join(map(str, v[n + 1:2 * n + 1])),
                 *(str(x) for x in v[2 * n + 1:])]
        return "[" + ", ".join(parts) + "]"


@dataclass(frozen=True, eq=False)
class Model:
    weights: tuple[Matrix, ...]
    biases: tuple[Matrix, ...]
    hp: HyperParams
    n_input: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "biases", tuple(self.biases))
        if len(self.weights) != self.hp.n_layers or len(self.biases) != self.hp.n_layers:
            raise ShapeError("one weight matrix and one bias per layer is required")
        prev = self.n_input
        for i, (w, b, n) in enumerate(zip(self.weights, self.biases, self.hp.layer_sizes), start=1):
            if w.shape != (n, prev) or b.shape != (n, 1):
                raise ShapeError(
                    f"layer {i}: expected W {n}x{prev} and b {n}x1, got W {w.shape} and b {b.shape}"
                )
            w.flags.writeable = False
            b.flags.writeable = False
            prev = n

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (
            self.hp == other.hp and self.n_input == other.n_input
            and all(np.array_equal(a, b) for a, b in zip(self.weights, other.weights))
            and all(np.array_equal(a, b) for a, b in zip(self.biases, other.biases))
        )


@dataclass(frozen=True)
class ForwardTrace:
    z: tuple[Matrix, ...]  # Z_1..Z_L
    a: tuple[Matrix, ...]  # A_0..A_L

    @property
    def output(self) -> Matrix:
        return self.a[-1]


@dataclass(frozen=True)
class GradientSet:
    dw: tuple[Matrix, ...]
    db: tuple[Matrix, ...]


def init_model(hp: HyperParams, n_input: int, seed: int) -> Model:
    """Gaussian weights (He scale for ReLU-family layers, 1/fan-in otherwise), zero biases.

    Normals are drawn from :class:`~hearo.rng.Xoshiro256` (seed) layer by layer
    in row-major order.
    """
    if n_input < 1:
        raise ValueError(f"n_input must be >= 1, got {n_input}")
    rng = Xoshiro256(seed)
    weights, biases = [], []
    prev = n_input
    for n, act in zip(hp.layer_sizes, hp.activations):
        gain = 2.0 if act in (Activation.RELU, Activation.LEAKY_RELU) else 1.0
        std = math.sqrt(gain / prev)
        w = np.array([rng.normal() for _ in range(n * prev)]).reshape(n, prev) * std
        weights.append(w)
        biases.append(la.zeros(n, 1))
        prev = n
    return Model(tuple(weights), tuple(biases), hp, n_input)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def activation(kind, z: Matrix) -> Matrix:
    kind = as_activation(kind)
    if kind == Activation.RELU:
        return np.maximum(z, 0.0)
    if kind == Activation.SIGMOID:
        return _sigmoid(z)
    if kind == Activation.TANH:
        return np.tanh(z)
    return np.where(z > 0, z, LEAKY_SLOPE * z)


def activation_derivative(kind, z: Matrix) -> Matrix:
    """Elementwise derivative at ``z``; ReLU-family kinks take the right-hand value."""
    kind = as_activation(kind)
    if kind == Activation.RELU:
        return (z >= 0).astype(np.float64)
    if kind == Activation.SIGMOID:
        s = _sigmoid(z)
        return s * (1.0 - s)
    if kind == Activation.TANH:
        t = np.tanh(z)
        return 1.0 - t * t
    return np.where(z >= 0, 1.0, LEAKY_SLOPE)


def forward(m: Model, x_batch: Matrix) -> ForwardTrace:
    if x_batch.ndim != 2 or x_batch.shape[0] != m.n_input:
        raise ShapeError(f"model expects {m.n_input} input rows, batch has shape {x_batch.shape}")
    zs, acts = [], [x_batch]
    for w, b, kind in zip(m.weights, m.biases, m.hp.activations):
        z = la.add_broadcast_col(la.gemm(w, acts[-1]), b)
        zs.append(z)
        acts.append(activation(kind, z))
    return ForwardTrace(tuple(zs), tuple(acts))


def penalty(m: Model) -> float:
    """Squared L2 norm of every weight and bias."""
    return sum(la.frobenius_sq(w) for w in m.weights) + sum(la.frobenius_sq(b) for b in m.biases)


def cost(a_l: Matrix, y: Matrix, m: Model, alpha: float) -> float:
    """Mean binary cross-entropy plus ``alpha / (2 nb)`` times the squared parameter norm."""
    if a_l.shape != y.shape or a_l.ndim != 2 or a_l.shape[0] != 1:
        raise ShapeError(f"cost: prediction {a_l.shape} and labels {y.shape} must both be 1 x nb")
    nb = a_l.shape[1]
    p = np.maximum(a_l, LOG_CLAMP)
    q = np.maximum(1.0 - a_l, LOG_CLAMP)
    ce = -float(np.sum(y * np.log(p) + (1.0 - y) * np.log(q))) / nb
    if alpha:
        ce += alpha / (2.0 * nb) * penalty(m)
    return ce


def backward(m: Model, trace: ForwardTrace, y: Matrix, alpha: float) -> GradientSet:
    out = trace.output
    if y.shape != out.shape:
        raise ShapeError(f"backward: labels {y.shape} do not match output {out.shape}")
    nb = out.shape[1]
    n_layers = m.hp.n_layers
    dws: list[Matrix] = [None] * n_layers
    dbs: list[Matrix] = [None] * n_layers
    dz = la.sub(out, y)
    for i in range(n_layers - 1, -1, -1):
        dw = la.scale(la.gemm(dz, la.transpose(trace.a[i])), 1.0 / nb)
        db = la.scale(la.row_sums(dz), 1.0 / nb)
        if alpha:
            # The penalty covers biases too, so they get the same decay term.
            dw = la.add(dw, la.scale(m.weights[i], alpha / nb))
            db = la.add(db, la.scale(m.biases[i], alpha / nb))
        dws[i], dbs[i] = dw, db
        if i > 0:
            dz = la.hadamard(
                la.gemm(la.transpose(m.weights[i]), dz),
                activation_derivative(m.hp.activations[i - 1], trace.z[i - 1]),
            )
    return GradientSet(tuple(dws), tuple(dbs))


# Model text format
#   line 1: L n_input n_1 .. n_L s_1 .. s_L
#   line 2: learning_rate reg_alpha batch_size epochs
#   then for i = 1..L:  "W i rows cols" + rows lines, "b i rows 1" + rows lines
# Reals are written with repr(), which round-trips float64 exactly.

def dumps_model(m: Model) -> str:
    hp = m.hp
    lines = [
        " ".join(map(str, [hp.n_layers, m.n_input, *hp.layer_sizes, *(int(a) for a in hp.activations)])),
        f"{hp.learning_rate!r} {hp.reg_alpha!r} {hp.batch_size} {hp.epochs}",
    ]
    for i, (w, b) in enumerate(zip(m.weights, m.biases), start=1):
        for tag, mat in (("W", w), ("b", b)):
            lines.append(f"{tag} {i} {mat.shape[0]} {mat.shape[1]}")
            lines.extend(" ".join(repr(float(v)) for v in row) for row in mat)
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> Model:
    lines = text.splitlines()
    try:
        head = [int(t) for t in lines[0].split()]
        n_layers, n_input = head[0], head[1]
        if len(head) != 2 + 2 * n_layers:
            raise ValueError("header length does not match L")
        lr, alpha, nb, epochs = lines[1].split()
        hp = HyperParams(tuple(head[2:2 + n_layers]), tuple(head[2 + n_layers:]),
                         float(lr), float(alpha), int(nb), int(epochs))
        pos = 2
        mats: dict[str, list[Matrix]] = {"W": [], "b": []}
        for i in range(1, n_layers + 1):
            for tag in ("W", "b"):
                t, idx, rows, cols = lines[pos].split()
                if t != tag or int(idx) != i:
                    raise ValueError(f"expected block '{tag} {i}', found {lines[pos]!r}")
                rows, cols = int(rows), int(cols)
                data = [[float(v) for v in lines[pos + 1 + r].split()] for r in range(rows)]
                if any(len(r) != cols for r in data):
                    raise ValueError(f"block '{tag} {i}' has a row of the wrong length")
                mats[tag].append(np.array(data, dtype=np.float64).reshape(rows, cols))
                pos += 1 + rows
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed model file: {exc}") from None
    return Model(tuple(mats["W"]), tuple(mats["b"]), hp, n_input)


def save_model(m: Model, path: str | Path) -> None:
    Path(path).write_text(dumps_model(m))


def load_model(path: str | Path) -> Model:
    return loads_model(Path(path).read_text())
