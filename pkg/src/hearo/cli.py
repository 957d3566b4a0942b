"""Command-line interface: preprocess | train | eval | cv | tune | reproduce | rerun.

Every command that writes files also writes a ``key=value`` manifest next
to its primary output (``<output>.manifest``); ``hearo rerun <manifest>``
replays the recorded command line.
"""

from __future__ import annotations

import argparse
import logging
import shlex
import sys
import time
from pathlib import Path
from typing import Sequence

from . import __version__
from .dataset import (
    ParseError, load_cleveland, read_preprocessed, split, write_preprocessed,
)
from .experiment import alpha_contrast, best_run, seed_sweep, sweep_to_csv
from .linalg import ShapeError
from .metrics import REPORT_HEADER
from .network import HyperParams, load_model, save_model
from .trainer import DivergenceError, TrainConfig, train
from .tuner import (
    PRESETS, Exhaustive, Holdout, KFold, RandomSample, SearchSpace,
    SearchSpaceTooLarge, preset, records_to_csv, top_table, tune,
)
from .validation import cross_validate, evaluate

logger = logging.getLogger("hearo")


class CliError(Exception):
    pass


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(" ", "").split(",") if t)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(" ", "").split(",") if t)


def _int_range(text: str) -> tuple[int, ...]:
    """``"2-10"`` or ``"3,5,7"``."""
    if "-" in text and "," not in text:
        lo, hi = text.split("-", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return _ints(text)


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


_CONFIG_KEYS = {"L", "n", "sigma", "lambda", "alpha", "nb", "epochs"}


def resolve_hparams(args) -> HyperParams:
    """Preset (default hearo5), then ``--config``, then individual flags."""
    base = preset(args.preset or "hearo5")
    fields = {
        "layer_sizes": base.layer_sizes, "activations": base.activations,
        "learning_rate": base.learning_rate, "reg_alpha": base.reg_alpha,
        "batch_size": base.batch_size, "epochs": base.epochs,
    }
    if args.config:
        cfg = read_config_file(args.config)
        unknown = set(cfg) - _CONFIG_KEYS
        if unknown:
            raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "n" in cfg:
            fields["layer_sizes"] = _ints(cfg["n"])
        if "sigma" in cfg:
            fields["activations"] = _ints(cfg["sigma"])
        if "lambda" in cfg:
            fields["learning_rate"] = float(cfg["lambda"])
        if "alpha" in cfg:
            fields["reg_alpha"] = float(cfg["alpha"])
        if "nb" in cfg:
            fields["batch_size"] = int(cfg["nb"])
        if "epochs" in cfg:
            fields["epochs"] = int(cfg["epochs"])
        if "L" in cfg and int(cfg["L"]) != len(fields["layer_sizes"]):
            raise CliError(f"config L={cfg['L']} disagrees with n={cfg.get('n')}")
    if args.layers is not None:
        fields["layer_sizes"] = _ints(args.layers)
    if args.activations is not None:
        fields["activations"] = _ints(args.activations)
    if args.lr is not None:
        fields["learning_rate"] = args.lr
    if args.alpha is not None:
        fields["reg_alpha"] = args.alpha
    if args.batch_size is not None:
        fields["batch_size"] = args.batch_size
    if args.epochs is not None:
        fields["epochs"] = args.epochs
    if len(fields["activations"]) != len(fields["layer_sizes"]):
        if args.activations is None and (args.layers is not None or args.config):
            n = len(fields["layer_sizes"])
            fields["activations"] = (1,) * (n - 1) + (2,)
    return HyperParams(**fields)


def _add_hp_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("hyperparameters")
    g.add_argument("--preset", choices=sorted(PRESETS), help="named configuration (default hearo5)")
    g.add_argument("--config", help="key=value file with L, n, sigma, lambda, alpha, nb, epochs")
    g.add_argument("--layers", help="layer sizes n1..nL, comma separated (last must be 1)")
    g.add_argument("--activations", help="activation codes 1=relu 2=sigmoid 3=tanh 4=leaky")
    g.add_argument("--lambda", dest="lr", type=float, help="learning rate")
    g.add_argument("--alpha", type=float, help="L2 regularization strength")
    g.add_argument("--batch-size", type=int, help="batch size nb")
    g.add_argument("--epochs", type=int)


class Manifest:
    def __init__(self, command: str, argv: Sequence[str]):
        self.command = command
        self.argv = list(argv)
        self.params: dict[str, object] = {}
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.seed: int | None = None
        self._t0 = time.perf_counter()

    def write(self, path: str | Path) -> None:
        lines = [
            f"command={self.command}",
            f"version={__version__}",
            f"argv={shlex.join(['hearo', *self.argv])}",
            f"seed={'' if self.seed is None else self.seed}",
        ]
        lines += [f"input.{k}={v}" for k, v in self.inputs.items()]
        lines += [f"output.{k}={v}" for k, v in self.outputs.items()]
        lines += [f"param.{k}={v}" for k, v in self.params.items()]
        lines.append(f"duration_seconds={time.perf_counter() - self._t0:.3f}")
        Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path: str | Path) -> dict[str, str]:
    return read_config_file(path)


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text)


def cmd_preprocess(args, manifest: Manifest) -> int:
    d = load_cleveland(args.input)
    write_preprocessed(d, args.out)
    zeros, ones = d.class_counts()
    print(f"{d.n_examples} records, {zeros}/{ones} classes, {int(d.missing_mask.sum())} missing cells")
    manifest.inputs["cleveland"] = args.input
    manifest.outputs["preprocessed"] = args.out
    manifest.write(args.out + ".manifest")
    return 0


def cmd_train(args, manifest: Manifest) -> int:
    d = read_preprocessed(args.data)
    hp = resolve_hparams(args)
    if hp.epochs == 0:
        logger.warning("epochs=0: the written model is untrained")
    if args.split is not None:
        s = split(d, args.split, args.seed)
        d_train, d_test = d.subset(s.train_indices), d.subset(s.test_indices)
    else:
        d_train, d_test = d, None
    cfg = TrainConfig(hp, args.seed, args.record_every)
    model, history = train(d_train, cfg, d_test)
    save_model(model, args.model_out)
    history.write(args.history_out)
    rep = evaluate(model, d_train)
    print(f"train: accuracy {rep.accuracy:.4f}  MCC {rep.mcc:.4f}  (n={d_train.n_examples})")
    if d_test is not None:
        rep = evaluate(model, d_test)
        print(f"test:  accuracy {rep.accuracy:.4f}  MCC {rep.mcc:.4f}  (n={d_test.n_examples})")
    manifest.seed = args.seed
    manifest.params.update(hparams=str(hp), split=args.split, record_every=args.record_every)
    manifest.inputs["data"] = args.data
    manifest.outputs.update(model=args.model_out, history=args.history_out)
    manifest.write(args.model_out + ".manifest")
    return 0


def cmd_eval(args, manifest: Manifest) -> int:
    model = load_model(args.model)
    d = read_preprocessed(args.data)
    rep = evaluate(model, d)
    print(rep.to_text())
    if args.out:
        _write_text(args.out, ",".join(REPORT_HEADER) + "\n" + ",".join(rep.csv_row()) + "\n")
        manifest.inputs.update(model=args.model, data=args.data)
        manifest.outputs["report"] = args.out
        manifest.write(args.out + ".manifest")
    return 0


def cmd_cv(args, manifest: Manifest) -> int:
    d = read_preprocessed(args.data)
    hp = resolve_hparams(args)
    res = cross_validate(d, TrainConfig(hp, args.seed), args.k, args.seed, args.holdout)
    for f, rep in enumerate(res.fold_reports):
        print(f"fold {f}: accuracy {rep.accuracy:.4f}  MCC {rep.mcc:.4f}")
    print(f"mean:   accuracy {res.mean_accuracy:.4f}  MCC {res.mean_mcc:.4f}")
    if res.holdout_report is not None:
        print(f"holdout: accuracy {res.holdout_report.accuracy:.4f}  MCC {res.holdout_report.mcc:.4f}")
    _write_text(args.out, res.to_csv())
    manifest.seed = args.seed
    manifest.params.update(hparams=str(hp), k=args.k, holdout=args.holdout)
    manifest.inputs["data"] = args.data
    manifest.outputs["cv"] = args.out
    manifest.write(args.out + ".manifest")
    return 0


def cmd_tune(args, manifest: Manifest) -> int:
    d = read_preprocessed(args.data)
    space = SearchSpace(
        l_values=_int_range(args.l_values), hidden_sizes=_int_range(args.hidden_sizes),
        lambdas=_floats(args.lambdas), alphas=_floats(args.alphas),
        batch_size=args.batch_size, epochs=args.epochs, monotone=args.monotone,
    )
    if args.strategy == "exhaustive":
        strategy = Exhaustive(args.cap)
    else:
        if args.budget is None:
            raise CliError("--strategy random needs --budget")
        strategy = RandomSample(args.budget, args.seed)
    if args.protocol == "holdout":
        protocol = Holdout(args.fraction, args.seed)
    else:
        protocol = KFold(args.k, args.seed)
    include = [preset(name) for name in args.include_preset or ()]
    records = tune(d, space, strategy, protocol, jobs=args.jobs, include=include)
    _write_text(args.out, records_to_csv(records))
    print(top_table(records))
    manifest.seed = args.seed
    manifest.params.update(
        space=repr(space), strategy=repr(strategy), protocol=repr(protocol),
        include=",".join(args.include_preset or ()), jobs=args.jobs,
    )
    manifest.inputs["data"] = args.data
    manifest.outputs["tuner"] = args.out
    manifest.write(args.out + ".manifest")
    return 0


def cmd_reproduce(args, manifest: Manifest) -> int:
    d = read_preprocessed(args.data)
    hp = resolve_hparams(args)
    seeds = _int_range(args.seeds)
    runs = seed_sweep(d, hp, seeds, args.split)
    for r in runs:
        print(f"seed {r.seed}: train {r.train_report.accuracy:.4f}  "
              f"test {r.test_report.accuracy:.4f}  test MCC {r.test_report.mcc:.4f}")
    best = best_run(runs)
    print(f"best seed {best.seed} (test):")
    print(best.test_report.to_text())
    no_reg, reg = alpha_contrast(d, hp, best.seed, args.split)
    print(f"alpha=0: train {no_reg.train_report.accuracy:.4f}  test {no_reg.test_report.accuracy:.4f}")
    print(f"alpha={hp.reg_alpha}: train {reg.train_report.accuracy:.4f}  test {reg.test_report.accuracy:.4f}")
    _write_text(args.out, sweep_to_csv(runs))
    manifest.seed = best.seed
    manifest.params.update(hparams=str(hp), seeds=args.seeds, split=args.split)
    manifest.inputs["data"] = args.data
    manifest.outputs["sweep"] = args.out
    manifest.write(args.out + ".manifest")
    return 0


def cmd_rerun(args, manifest: Manifest) -> int:
    recorded = read_manifest(args.manifest).get("argv")
    if not recorded:
        raise CliError(f"{args.manifest} has no argv entry")
    words = shlex.split(recorded)
    if words[:1] != ["hearo"] or words[1:2] == ["rerun"]:
        raise CliError(f"{args.manifest} does not record a replayable command")
    return main(words[1:])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hearo",
        description="Train and evaluate fully-connected DNNs on the Cleveland heart-disease data.",
    )
    parser.add_argument("--version", action="version", version=f"hearo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="Cleveland CSV -> canonical preprocessed CSV")
    p.add_argument("--in", dest="input", required=True, help="processed.cleveland.data")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="train one configuration")
    p.add_argument("--data", required=True, help="preprocessed CSV")
    _add_hp_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", type=float, help="train fraction for a hold-out split (e.g. 0.667)")
    p.add_argument("--record-every", type=int, default=100)
    p.add_argument("--model-out", required=True)
    p.add_argument("--history-out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a saved model on a preprocessed CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="write the report as a one-row CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cv", help="k-fold cross-validation")
    p.add_argument("--data", required=True)
    _add_hp_flags(p)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--holdout", type=float, help="also score a hold-out split with this train fraction")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("tune", help="hyperparameter search")
    p.add_argument("--data", required=True)
    p.add_argument("--l-values", default="2-10", help="layer counts, e.g. 2-10 or 4,5,6")
    p.add_argument("--hidden-sizes", default="1-13", help="allowed hidden widths")
    p.add_argument("--lambdas", default="0.001,0.01,0.1")
    p.add_argument("--alphas", default="0,0.7,1")
    p.add_argument("--batch-size", type=int, help="default: full batch")
    p.add_argument("--epochs", type=int, default=6000)
    p.add_argument("--monotone", action="store_true", help="only non-increasing hidden widths")
    p.add_argument("--strategy", choices=("exhaustive", "random"), default="random")
    p.add_argument("--budget", type=int)
    p.add_argument("--cap", type=int, default=100_000, help="refuse exhaustive searches above this size")
    p.add_argument("--protocol", choices=("holdout", "kfold"), default="holdout")
    p.add_argument("--fraction", type=float, default=2 / 3)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--include-preset", action="append", choices=sorted(PRESETS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("reproduce", help="hold-out seed sweep of one configuration")
    p.add_argument("--data", required=True)
    _add_hp_flags(p)
    p.add_argument("--seeds", default="0-9", help="seeds, e.g. 0-9 or 1,4,7")
    p.add_argument("--split", type=float, default=2 / 3, help="train fraction")
    p.add_argument("--out", required=True, help="per-seed report CSV")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("rerun", help="replay the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_rerun)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    manifest = Manifest(args.command, argv)
    try:
        return args.func(args, manifest)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return 1
    except (ParseError, ShapeError, SearchSpaceTooLarge, CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
