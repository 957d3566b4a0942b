"""Empirical hyperparameter search and the shipped presets.

Configurations of a :class:`SearchSpace` are numbered in a fixed
lexicographic order: layer count ascending, then the hidden-width tuple
(lexicographic over ascending widths), then learning rate and
regularization strength in their declared order. Both strategies work on
these numbers, so a configuration can be rebuilt from its index alone.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dataset import Dataset
from .network import Activation, HyperParams
from .rng import Xoshiro256
from .trainer import DivergenceError, TrainConfig
from .validation import cross_validate, holdout

RELU, SIGMOID = Activation.RELU, Activation.SIGMOID


def _pattern(n_layers: int) -> tuple[Activation, ...]:
    return (RELU,) * (n_layers - 1) + (SIGMOID,)


def hearo5_preset() -> HyperParams:
    return HyperParams((9, 7, 5, 3, 1), _pattern(5), 0.01, 0.7, 200, 6000)


# The 2- and 7-layer comparison networks have no published widths. These are
# reconstructions: hidden widths step down by 2 and end at 3, like HEARO-5,
# and they run unregularized as in the depth comparison.
PRESETS = {
    "hearo5": hearo5_preset(),
    "hearo2": HyperParams((3, 1), _pattern(2), 0.01, 0.0, 200, 6000),
    "hearo7": HyperParams((13, 11, 9, 7, 5, 3, 1), _pattern(7), 0.01, 0.0, 200, 6000),
}


def preset(name: str) -> HyperParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


class SearchSpaceTooLarge(ValueError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"exhaustive search over {size} configurations exceeds the cap of {cap}")
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class SearchSpace:
    """Grid of candidate configurations.

    Hidden layers use ReLU and the single output unit uses sigmoid.
    ``batch_size=None`` means full batch (nb equal to the training-set
    size). ``monotone`` keeps only non-increasing hidden widths.
    """

    l_values: tuple[int, ...] = tuple(range(2, 11))
    hidden_sizes: tuple[int, ...] = tuple(range(1, 14))
    lambdas: tuple[float, ...] = (0.001, 0.01, 0.1)
    alphas: tuple[float, ...] = (0.0, 0.7, 1.0)
    batch_size: int | None = None
    epochs: int = 6000
    monotone: bool = False

    def __post_init__(self):
        object.__setattr__(self, "l_values", tuple(sorted(set(self.l_values))))
        object.__setattr__(self, "hidden_sizes", tuple(sorted(set(self.hidden_sizes))))
        if not self.l_values or min(self.l_values) < 1:
            raise ValueError("layer counts must be >= 1")
        if not self.hidden_sizes or min(self.hidden_sizes) < 1:
            raise ValueError("hidden sizes must be >= 1")
        if not self.lambdas or not self.alphas:
            raise ValueError("at least one learning rate and one alpha are required")

    def _hidden_count(self, n_hidden: int) -> int:
        u = len(self.hidden_sizes)
        return math.comb(u + n_hidden - 1, n_hidden) if self.monotone else u ** n_hidden

    def size(self) -> int:
        per = len(self.lambdas) * len(self.alphas)
        return sum(self._hidden_count(n - 1) for n in self.l_values) * per

    def _unrank_hidden(self, index: int, n_hidden: int) -> tuple[int, ...]:
        vals = self.hidden_sizes
        u = len(vals)
        if not self.monotone:
            digits = []
            for _ in range(n_hidden):
                index, r = divmod(index, u)
                digits.append(vals[r])
            return tuple(reversed(digits))
        out, jmax = [], u - 1
        for pos in range(n_hidden):
            rest = n_hidden - pos - 1
            for j in range(jmax + 1):
                c = math.comb(j + rest, rest)
                if index < c:
                    out.append(vals[j])
                    jmax = j
                    break
                index -= c
        return tuple(out)

    def config_at(self, index: int, full_batch: int | None = None) -> HyperParams:
        if not 0 <= index < self.size():
            raise IndexError(f"configuration index {index} out of range")
        per = len(self.lambdas) * len(self.alphas)
        for n_layers in self.l_values:
            block = self._hidden_count(n_layers - 1) * per
            if index < block:
                break
            index -= block
        h_index, rest = divmod(index, per)
        li, ai = divmod(rest, len(self.alphas))
        nb = self.batch_size if self.batch_size is not None else full_batch
        if nb is None:
            raise ValueError("full-batch spaces need the training-set size")
        return HyperParams(
            self._unrank_hidden(h_index, n_layers - 1) + (1,), _pattern(n_layers),
            self.lambdas[li], self.alphas[ai], nb, self.epochs,
        )

    def contains(self, hp: HyperParams) -> bool:
        hidden = hp.layer_sizes[:-1]
        return (
            hp.n_layers in self.l_values
            and hp.layer_sizes[-1] == 1
            and all(n in self.hidden_sizes for n in hidden)
            and (not self.monotone or all(a >= b for a, b in zip(hidden, hidden[1:])))
            and hp.activations == _pattern(hp.n_layers)
            and hp.learning_rate in self.lambdas
            and hp.reg_alpha in self.alphas
            and (self.batch_size is None or hp.batch_size == self.batch_size)
            and hp.epochs == self.epochs
        )


def hearo5_neighborhood() -> SearchSpace:
    """A small monotone space around the HEARO-5 preset (which it contains)."""
    return SearchSpace(
        l_values=(4, 5, 6), hidden_sizes=(3, 5, 7, 9, 11),
        batch_size=200, monotone=True,
    )


@dataclass(frozen=True)
class Exhaustive:
    cap: int = 100_000


@dataclass(frozen=True)
class RandomSample:
    budget: int
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")


@dataclass(frozen=True)
class Holdout:
    fraction: float = 2 / 3
    seed: int = 0

    def train_size(self, n: int) -> int:
        return math.floor(self.fraction * n + 0.5)


@dataclass(frozen=True)
class KFold:
    k: int = 3
    seed: int = 0

    def train_size(self, n: int) -> int:
        # Smallest training set over the folds.
        return n - math.ceil(n / self.k)


def enumerate_configs(space: SearchSpace, strategy, full_batch: int | None = None) -> list[HyperParams]:
    size = space.size()
    if isinstance(strategy, Exhaustive):
        if size > strategy.cap:
            raise SearchSpaceTooLarge(size, strategy.cap)
        return [space.config_at(i, full_batch) for i in range(size)]
    if isinstance(strategy, RandomSample):
        if strategy.budget > size:
            raise ValueError(f"budget {strategy.budget} exceeds the {size} configurations available")
        rng = Xoshiro256(strategy.seed)
        seen: set[int] = set()
        picks = []
        while len(picks) < strategy.budget:
            i = rng.below(size)
            if i not in seen:
                seen.add(i)
                picks.append(i)
        return [space.config_at(i, full_batch) for i in picks]
    raise TypeError(f"unknown strategy {strategy!r}")


@dataclass(frozen=True)
class TunerRecord:
    hp: HyperParams
    config_index: int
    status: str  # "completed" | "diverged"
    score_accuracy: float | None = None
    score_mcc: float | None = None

    def rank_key(self) -> tuple:
        if self.status != "completed":
            return (1, 0.0, 0.0, self.config_index)
        return (0, -self.score_accuracy, -self.score_mcc, self.config_index)


def score(d: Dataset, hp: HyperParams, protocol) -> tuple[float, float]:
    """(accuracy, MCC) of one configuration under a hold-out or k-fold protocol."""
    if isinstance(protocol, Holdout):
        rep = holdout(d, TrainConfig(hp, protocol.seed), protocol.fraction, protocol.seed)
        return rep.accuracy, rep.mcc
    if isinstance(protocol, KFold):
        res = cross_validate(d, TrainConfig(hp, protocol.seed), protocol.k, protocol.seed)
        return res.mean_accuracy, res.mean_mcc
    raise TypeError(f"unknown protocol {protocol!r}")


def _run_job(args) -> TunerRecord:
    d, hp, protocol, index = args
    try:
        acc, m = score(d, hp, protocol)
    except DivergenceError:
        return TunerRecord(hp, index, "diverged")
    return TunerRecord(hp, index, "completed", acc, m)


def rank(records: Iterable[TunerRecord]) -> list[TunerRecord]:
    return sorted(records, key=TunerRecord.rank_key)


def tune_configs(d: Dataset, configs: Sequence[HyperParams], protocol=Holdout(), jobs: int = 1) -> list[TunerRecord]:
    """Score every configuration and return records best first."""
    if not configs:
        raise ValueError("nothing to tune: the configuration list is empty")
    jobs_args = [(d, hp, protocol, i) for i, hp in enumerate(configs)]
    if jobs <= 1:
        records = [_run_job(a) for a in jobs_args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_job, jobs_args))
    return rank(records)


def tune(
    d: Dataset,
    space: SearchSpace,
    strategy,
    protocol=Holdout(),
    jobs: int = 1,
    include: Sequence[HyperParams] = (),
) -> list[TunerRecord]:
    """Enumerate ``space`` with ``strategy`` and rank the results.

    ``include`` appends extra configurations (e.g. a preset) after the
    enumerated ones unless already present; being last, they lose ties.
    """
    configs = enumerate_configs(space, strategy, protocol.train_size(d.n_examples))
    configs += [hp for hp in include if hp not in configs]
    return tune_configs(d, configs, protocol, jobs)


TUNER_HEADER = ("rank", "config_index", "hparams", "accuracy", "mcc", "status")


def records_to_csv(records: Sequence[TunerRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TUNER_HEADER)
    for r, rec in enumerate(records, start=1):
        w.writerow([
            r, rec.config_index, str(rec.hp),
            "" if rec.score_accuracy is None else repr(rec.score_accuracy),
            "" if rec.score_mcc is None else repr(rec.score_mcc),
            rec.status,
        ])
    return buf.getvalue()


def top_table(records: Sequence[TunerRecord], n: int = 10) -> str:
    lines = [f"{'rank':>4}  {'idx':>5}  {'accuracy':>8}  {'mcc':>7}  hparams"]
    for r, rec in enumerate(records[:n], start=1):
        if rec.status == "completed":
            lines.append(f"{r:>4}  {rec.config_index:>5}  {rec.score_accuracy:>8.4f}  {rec.score_mcc:>7.4f}  {rec.hp}")
        else:
            lines.append(f"{r:>4}  {rec.config_index:>5}  {'diverged':>8}  {'':>7}  {rec.hp}")
    return "\n".join(lines)
