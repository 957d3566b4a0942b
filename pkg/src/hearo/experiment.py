"""Seed sweeps on a fixed configuration and the regularization contrast."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Iterable

from .dataset import Dataset, split
from .metrics import REPORT_HEADER, EvalReport
from .network import HyperParams
from .trainer import TrainConfig, train
from .validation import evaluate


@dataclass(frozen=True)
class SeedRun:
    seed: int
    train_report: EvalReport
    test_report: EvalReport


def run_seed(d: Dataset, hp: HyperParams, seed: int, train_fraction: float = 2 / 3) -> SeedRun:
    """Split with ``seed``, train with ``seed`` and score both sides."""
    s = split(d, train_fraction, seed)
    d_train, d_test = d.subset(s.train_indices), d.subset(s.test_indices)
    model, _ = train(d_train, TrainConfig(hp, seed))
    return SeedRun(seed, evaluate(model, d_train), evaluate(model, d_test))


def seed_sweep(d: Dataset, hp: HyperParams, seeds: Iterable[int], train_fraction: float = 2 / 3) -> list[SeedRun]:
    return [run_seed(d, hp, s, train_fraction) for s in seeds]


def best_run(runs: list[SeedRun]) -> SeedRun:
    """Highest test accuracy, then test MCC, then lowest seed."""
    return min(runs, key=lambda r: (-r.test_report.accuracy, -r.test_report.mcc, r.seed))


def alpha_contrast(d: Dataset, hp: HyperParams, seed: int, train_fraction: float = 2 / 3) -> tuple[SeedRun, SeedRun]:
    """The same split and seed trained without and with regularization."""
    return (
        run_seed(d, replace(hp, reg_alpha=0.0), seed, train_fraction),
        run_seed(d, hp, seed, train_fraction),
    )


def sweep_to_csv(runs: list[SeedRun]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["seed", "side", *REPORT_HEADER])
    for r in runs:
        w.writerow([r.seed, "train", *r.train_report.csv_row()])
        w.writerow([r.seed, "test", *r.test_report.csv_row()])
    return buf.getvalue()
