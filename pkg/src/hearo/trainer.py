"""Mini-batch gradient-descent training loop."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg as la
from .dataset import Dataset
from .linalg import Matrix, NonFiniteError
from .network import GradientSet, HyperParams, Model, backward, cost, forward, init_model
from .rng import Xoshiro256

logger = logging.getLogger(__name__)

HISTORY_HEADER = ("epoch", "cost", "train_acc", "test_acc")


class DivergenceError(RuntimeError):
    """Training produced a non-finite cost or parameter."""

    def __init__(self, epoch: int, last_cost: float | None, fold: int | None = None):
        self.epoch = epoch
        self.last_cost = last_cost
        self.fold = fold
        where = f"fold {fold}, " if fold is not None else ""
        super().__init__(
            f"training diverged ({where}epoch {epoch}); last finite cost {last_cost}; "
            "try a smaller learning rate"
        )


@dataclass(frozen=True)
class TrainConfig:
    hp: HyperParams
    seed: int = 0
    record_every: int = 100

    def __post_init__(self):
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass(frozen=True)
class HistoryEntry:
    epoch: int
    cost: float
    train_acc: float
    test_acc: float | None = None


@dataclass
class TrainHistory:
    entries: list[HistoryEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def costs(self) -> list[float]:
        return [e.cost for e in self.entries]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HISTORY_HEADER)
        for e in self.entries:
            w.writerow([e.epoch, repr(e.cost), repr(e.train_acc),
                        "" if e.test_acc is None else repr(e.test_acc)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TrainHistory":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != HISTORY_HEADER:
            raise ValueError("history CSV must start with header " + ",".join(HISTORY_HEADER))
        return cls([
            HistoryEntry(int(r[0]), float(r[1]), float(r[2]), float(r[3]) if r[3] else None)
            for r in rows[1:] if r
        ])

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())


def batch_bounds(n: int, nb: int) -> list[tuple[int, int]]:
    """Contiguous ``[start, stop)`` batches of width ``nb`` over ``n`` examples.

    A trailing remainder shorter than ``nb`` is folded into the preceding
    batch, so every batch holds at least ``min(nb, n)`` examples.
    """
    nb = min(nb, n)
    count = n // nb
    bounds = [(i * nb, (i + 1) * nb) for i in range(count)]
    bounds[-1] = (bounds[-1][0], n)
    return bounds


def predict(m: Model, x: Matrix) -> Matrix:
    """Class labels: 1 where the output is >= 0.5, else 0."""
    return (forward(m, x).output >= 0.5).astype(np.float64)


def accuracy_on(m: Model, d: Dataset) -> float:
    return float(np.mean(predict(m, d.x) == d.y))


def apply_update(m: Model, grads: GradientSet, lr: float) -> Model:
    weights = tuple(la.sub(w, la.scale(dw, lr)) for w, dw in zip(m.weights, grads.dw))
    biases = tuple(la.sub(b, la.scale(db, lr)) for b, db in zip(m.biases, grads.db))
    return Model(weights, biases, m.hp, m.n_input)


def train_step(m: Model, x: Matrix, y: Matrix) -> tuple[Model, GradientSet, float]:
    """One forward/backward/update on a batch; returns (new model, gradients, pre-update cost)."""
    alpha = m.hp.reg_alpha
    trace = forward(m, x)
    j = cost(trace.output, y, m, alpha)
    grads = backward(m, trace, y, alpha)
    return apply_update(m, grads, m.hp.learning_rate), grads, j


def full_cost(m: Model, d: Dataset) -> float:
    return cost(forward(m, d.x).output, d.y, m, m.hp.reg_alpha)


def train(d_train: Dataset, cfg: TrainConfig, d_eval: Dataset | None = None) -> tuple[Model, TrainHistory]:
    """Train a fresh model on ``d_train``.

    Examples are reshuffled every epoch with a generator derived from
    ``cfg.seed`` (one jump ahead of the stream used for weight init); when
    the whole set fits in one batch the shuffle is skipped since it cannot
    change the batch. History is sampled after epoch 1, every
    ``record_every`` epochs after that, and after the last epoch.
    """
    hp = cfg.hp
    n = d_train.n_examples
    if n == 0:
        raise ValueError("training set is empty")
    if hp.batch_size > n:
        logger.warning("batch size %d exceeds %d training examples; clamped", hp.batch_size, n)
    model = init_model(hp, d_train.n_features, cfg.seed)
    history = TrainHistory()
    if hp.epochs == 0:
        return model, history

    bounds = batch_bounds(n, hp.batch_size)
    shuffle_rng = Xoshiro256(cfg.seed).jumped()
    order = list(range(n))
    x_all, y_all = d_train.x, d_train.y
    batches = [(x_all, y_all)] if len(bounds) == 1 else None
    last_finite: float | None = None

    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(hp.epochs):
            try:
                if len(bounds) > 1:
                    shuffle_rng.shuffle(order)
                    idx = np.asarray(order)
                    xs, ys = x_all[:, idx], y_all[:, idx]
                    batches = [(xs[:, a:b], ys[:, a:b]) for a, b in bounds]
                for xb, yb in batches:
                    model, _, j = train_step(model, xb, yb)
                    if not math.isfinite(j):
                        raise NonFiniteError("cost")
                    last_finite = j
                if epoch % cfg.record_every == 0 or epoch == hp.epochs - 1:
                    j = full_cost(model, d_train)
                    if not math.isfinite(j):
                        raise NonFiniteError("cost")
                    history.entries.append(HistoryEntry(
                        epoch + 1, j, accuracy_on(model, d_train),
                        None if d_eval is None else accuracy_on(model, d_eval),
                    ))
            except NonFiniteError:
                raise DivergenceError(epoch + 1, last_finite) from None
    return model, history
