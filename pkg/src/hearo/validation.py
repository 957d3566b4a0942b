"""Hold-out evaluation and k-fold cross-validation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

from .dataset import Dataset, k_fold_partition, split
from .linalg import ShapeError
from .metrics import REPORT_HEADER, EvalReport, confusion
from .network import Model
from .trainer import DivergenceError, TrainConfig, predict, train


@dataclass(frozen=True)
class CvResult:
    fold_reports: tuple[EvalReport, ...]
    test_folds: tuple[tuple[int, ...], ...]
    mean_accuracy: float
    mean_mcc: float
    holdout_report: EvalReport | None = None

    def to_csv(self) -> str:
        """One row per fold, a ``mean`` row, and a ``holdout`` row when present."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["fold", "n_test", *REPORT_HEADER])
        for f, (rep, fold) in enumerate(zip(self.fold_reports, self.test_folds)):
            w.writerow([f, len(fold), *rep.csv_row()])
        n = sum(len(f) for f in self.test_folds)
        w.writerow(["mean", n, "", "", "", "", repr(self.mean_accuracy), repr(self.mean_mcc), "", "", ""])
        if self.holdout_report is not None:
            w.writerow(["holdout", self.holdout_report.cm.total, *self.holdout_report.csv_row()])
        return buf.getvalue()


def evaluate(m: Model, d: Dataset) -> EvalReport:
    if d.n_examples == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    if d.n_features != m.n_input:
        raise ShapeError(f"model expects {m.n_input} features, dataset has {d.n_features}")
    return EvalReport.from_confusion(confusion(predict(m, d.x), d.y))


def holdout(d: Dataset, cfg: TrainConfig, train_fraction: float, seed: int) -> EvalReport:
    """Train on a seeded ``train_fraction`` split and score the remainder."""
    s = split(d, train_fraction, seed)
    model, _ = train(d.subset(s.train_indices), replace(cfg, seed=seed))
    return evaluate(model, d.subset(s.test_indices))


def cross_validate(
    d: Dataset,
    cfg: TrainConfig,
    k: int,
    seed: int,
    holdout_fraction: float | None = None,
) -> CvResult:
    """k-fold CV; fold ``f`` trains with seed ``seed ^ f`` and tests on fold ``f``.

    ``cfg.seed`` is ignored in favour of the per-fold seeds. With
    ``holdout_fraction`` a single seeded split is scored as well.
    """
    folds = k_fold_partition(d.n_examples, k, seed)
    reports = []
    for f, test_idx in enumerate(folds):
        held = set(test_idx)
        train_idx = [i for i in range(d.n_examples) if i not in held]
        try:
            model, _ = train(d.subset(train_idx), replace(cfg, seed=seed ^ f))
        except DivergenceError as exc:
            raise DivergenceError(exc.epoch, exc.last_cost, fold=f) from None
        reports.append(evaluate(model, d.subset(test_idx)))
    hold = None
    if holdout_fraction is not None:
        hold = holdout(d, cfg, holdout_fraction, seed)
    return CvResult(
        tuple(reports), tuple(folds),
        sum(r.accuracy for r in reports) / k,
        sum(r.mcc for r in reports) / k,
        hold,
    )
