"""Confusion matrix and the scalar scores derived from it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import ShapeError

REPORT_HEADER = ("tp", "tn", "fp", "fn", "accuracy", "mcc", "precision", "recall", "f1")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError(f"counts must be non-negative: {self}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class EvalReport:
    cm: ConfusionMatrix
    accuracy: float
    mcc: float
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_confusion(cls, cm: ConfusionMatrix) -> "EvalReport":
        return cls(cm, accuracy(cm), mcc(cm), precision(cm), recall(cm), f1(cm))

    def csv_row(self) -> list[str]:
        c = self.cm
        return [str(c.tp), str(c.tn), str(c.fp), str(c.fn),
                *(repr(v) for v in (self.accuracy, self.mcc, self.precision, self.recall, self.f1))]

    def to_text(self) -> str:
        c = self.cm
        rows = [
            ("TP", str(c.tp)), ("TN", str(c.tn)), ("FP", str(c.fp)), ("FN", str(c.fn)),
            ("accuracy", f"{self.accuracy:.4f}"), ("MCC", f"{self.mcc:.4f}"),
            ("precision", f"{self.precision:.4f}"), ("recall", f"{self.recall:.4f}"),
            ("F1", f"{self.f1:.4f}"),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v:>8}" for k, v in rows)


def confusion(predicted, actual) -> ConfusionMatrix:
    p = np.asarray(predicted)
    a = np.asarray(actual)
    if p.shape != a.shape:
        raise ShapeError(f"predicted {p.shape} and actual {a.shape} differ in shape")
    if not (np.isin(p, (0, 1)).all() and np.isin(a, (0, 1)).all()):
        raise ValueError("confusion needs binary (0/1) entries")
    p = p.astype(bool).ravel()
    a = a.astype(bool).ravel()
    return ConfusionMatrix(
        tp=int(np.count_nonzero(p & a)),
        tn=int(np.count_nonzero(~p & ~a)),
        fp=int(np.count_nonzero(p & ~a)),
        fn=int(np.count_nonzero(~p & a)),
    )


def mcc(cm: ConfusionMatrix) -> float:
    """Matthews correlation; 0 when any marginal is empty.

    Products are formed on Python ints so large counts cannot overflow
    before the single square root.
    """
    tp, tn, fp, fn = cm.tp, cm.tn, cm.fp, cm.fn
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    value = (tp * tn - fp * fn) / math.sqrt(denom)
    return max(-1.0, min(1.0, value))


def _require_total(cm: ConfusionMatrix) -> None:
    if cm.total == 0:
        raise ValueError("no examples were evaluated")


def accuracy(cm: ConfusionMatrix) -> float:
    _require_total(cm)
    return (cm.tp + cm.tn) / cm.total


def precision(cm: ConfusionMatrix) -> float:
    _require_total(cm)
    d = cm.tp + cm.fp
    return cm.tp / d if d else 0.0


def recall(cm: ConfusionMatrix) -> float:
    _require_total(cm)
    d = cm.tp + cm.fn
    return cm.tp / d if d else 0.0


def f1(cm: ConfusionMatrix) -> float:
    p, r = precision(cm), recall(cm)
    return 2 * p * r / (p + r) if p + r else 0.0
