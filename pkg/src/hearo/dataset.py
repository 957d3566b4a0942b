"""Cleveland heart-disease ingestion and preprocessing.

Pipeline (fixed order):

1. parse the 14-field UCI records; ``?`` marks a missing value;
2. replace missing values with -1 and remember where they were;
3. collapse the outcome ``num`` (0..4) to a binary label (0 vs >= 1);
4. scale every feature row of ``X`` (13 x N) to unit L2 norm across examples.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .rng import Xoshiro256

logger = logging.getLogger(__name__)

FEATURE_NAMES = (
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg",
    "thalach", "exang", "oldpeak", "slope", "ca", "thal",
)
OUTCOME_NAME = "num"
N_FIELDS = len(FEATURE_NAMES) + 1
MISSING = "?"
MISSING_VALUE = -1.0

_NUMERAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class RawRecord:
    values: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Features ``x`` (features x examples), labels ``y`` (1 x examples)."""

    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_NAMES
    missing_mask: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.float64))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if self.x.ndim != 2 or self.y.ndim != 2 or self.y.shape[0] != 1:
            raise ValueError(f"bad dataset shapes x={self.x.shape} y={self.y.shape}")
        if self.x.shape[1] != self.y.shape[1]:
            raise ValueError(f"x has {self.x.shape[1]} examples but y has {self.y.shape[1]}")
        if len(self.feature_names) != self.x.shape[0]:
            raise ValueError("feature_names length does not match x rows")
        if not np.isin(self.y, (0.0, 1.0)).all():
            raise ValueError("labels must be exactly 0.0 or 1.0")
        mask = self.missing_mask
        if mask is None:
            mask = np.zeros(self.x.shape, dtype=bool)
        elif mask.shape != self.x.shape:
            raise ValueError("missing_mask shape must match x")
        object.__setattr__(self, "missing_mask", mask)
        for arr in (self.x, self.y, self.missing_mask):
            arr.flags.writeable = False

    @property
    def n_examples(self) -> int:
        return self.x.shape[1]

    @property
    def n_features(self) -> int:
        return self.x.shape[0]

    def subset(self, indices: Sequence[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(
            np.array(self.x[:, idx]), np.array(self.y[:, idx]),
            self.feature_names, np.array(self.missing_mask[:, idx]),
        )

    def class_counts(self) -> tuple[int, int]:
        ones = int(self.y.sum())
        return self.n_examples - ones, ones

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.feature_names == other.feature_names
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.missing_mask, other.missing_mask)
        )


@dataclass(frozen=True)
class SplitSpec:
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]
    seed: int


def parse_cleveland(source: str | TextIO) -> list[RawRecord]:
    """Parse comma-separated Cleveland records; blank lines are skipped."""
    text = source if isinstance(source, str) else source.read()
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        tokens = [t.strip() for t in line.split(",")]
        if len(tokens) != N_FIELDS:
            raise ParseError(f"expected {N_FIELDS} fields, found {len(tokens)}", lineno)
        for col, tok in enumerate(tokens, start=1):
            if tok != MISSING and not _NUMERAL.match(tok):
                raise ParseError(f"invalid token {tok!r}", lineno, col)
        records.append(RawRecord(tuple(tokens)))
    return records


def preprocess(records: Sequence[RawRecord]) -> Dataset:
    if not records:
        raise ValueError("preprocess needs at least one record")
    n = len(records)
    nf = len(FEATURE_NAMES)
    x = np.empty((nf, n))
    mask = np.zeros((nf, n), dtype=bool)
    y = np.empty((1, n))
    for j, rec in enumerate(records):
        if len(rec.values) != N_FIELDS:
            raise ValueError(f"record {j} has {len(rec.values)} fields, expected {N_FIELDS}")
        for i, tok in enumerate(rec.values[:nf]):
            if tok == MISSING:
                x[i, j] = MISSING_VALUE
                mask[i, j] = True
            else:
                x[i, j] = float(tok)
        outcome = rec.values[nf]
        if outcome == MISSING:
            raise ValueError(f"record {j} has a missing outcome")
        num = float(outcome)
        if num < 0:
            raise ValueError(f"record {j} has a negative outcome {outcome!r}")
        y[0, j] = 0.0 if num == 0 else 1.0
    norms = np.sqrt((x * x).sum(axis=1))
    for i, norm in enumerate(norms):
        if norm == 0.0:
            logger.warning("feature %r is identically zero; left unscaled", FEATURE_NAMES[i])
        else:
            x[i] /= norm
    return Dataset(x, y, FEATURE_NAMES, mask)


def load_cleveland(path: str | Path | None = None) -> Dataset:
    """Parse and preprocess a Cleveland file (defaults to the bundled copy)."""
    if path is None:
        text = resources.files("hearo.data").joinpath("processed.cleveland.data").read_text()
    else:
        text = Path(path).read_text()
    return preprocess(parse_cleveland(text))


def split(d: Dataset, train_fraction: float, seed: int) -> SplitSpec:
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = d.n_examples
    n_train = math.floor(train_fraction * n + 0.5)
    if n_train == 0 or n_train == n:
        raise ValueError(f"fraction {train_fraction} leaves an empty side for {n} examples")
    perm = Xoshiro256(seed).permutation(n)
    return SplitSpec(tuple(sorted(perm[:n_train])), tuple(sorted(perm[n_train:])), seed)


def k_fold_partition(n: int, k: int, seed: int) -> list[tuple[int, ...]]:
    """Shuffle ``0..n-1`` and cut into ``k`` folds; the first ``n % k`` get one extra."""
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = Xoshiro256(seed).permutation(n)
    base, extra = divmod(n, k)
    folds, start = [], 0
    for f in range(k):
        size = base + (1 if f < extra else 0)
        folds.append(tuple(sorted(perm[start:start + size])))
        start += size
    return folds


# Canonical preprocessed CSV: header = feature names, "label", "missing";
# the missing column lists substituted feature names joined by ";".

def dumps_preprocessed(d: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*d.feature_names, "label", "missing"])
    for j in range(d.n_examples):
        missing = ";".join(d.feature_names[i] for i in np.flatnonzero(d.missing_mask[:, j]))
        w.writerow([*(repr(float(v)) for v in d.x[:, j]), str(int(d.y[0, j])), missing])
    return buf.getvalue()


def loads_preprocessed(text: str) -> Dataset:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError("empty preprocessed file", 1)
    header = rows[0]
    if len(header) < 3 or header[-2:] != ["label", "missing"]:
        raise ParseError("header must end with 'label,missing'", 1)
    names = tuple(header[:-2])
    nf = len(names)
    body = [r for r in rows[1:] if r]
    if not body:
        raise ParseError("no examples", 2)
    x = np.empty((nf, len(body)))
    y = np.empty((1, len(body)))
    mask = np.zeros((nf, len(body)), dtype=bool)
    index = {name: i for i, name in enumerate(names)}
    for j, row in enumerate(body):
        lineno = j + 2
        if len(row) != nf + 2:
            raise ParseError(f"expected {nf + 2} fields, found {len(row)}", lineno)
        try:
            x[:, j] = [float(v) for v in row[:nf]]
            y[0, j] = float(row[nf])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if row[nf + 1]:
            for name in row[nf + 1].split(";"):
                if name not in index:
                    raise ParseError(f"unknown feature {name!r} in missing column", lineno)
                mask[index[name], j] = True
    return Dataset(x, y, names, mask)


def write_preprocessed(d: Dataset, path: str | Path) -> None:
    Path(path).write_text(dumps_preprocessed(d))


def read_preprocessed(path: str | Path) -> Dataset:
    return loads_preprocessed(Path(path).read_text())

