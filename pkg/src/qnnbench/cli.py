"""Command-line front end: one subcommand per benchmark experiment.

Configuration resolves in three layers: built-in defaults, then a JSON
config file (--config), then individual flags, with later layers winning.
Exit codes: 0 for completed runs (non-convergence is a result, not an
error), 1 for configuration or I/O problems, 2 for argument parse errors.
"""

import argparse
import json
import sys

from .errors import DatasetFormatError, DatasetIntegrityError, ValidationError
from .reporting import emit_report
from .runner import NETS, ExperimentConfig, run_experiment

# Flags that feed per-net hyperparameters, with the nets they can apply to.
_LR_NETS = ("rvnn", "qnn")
_HIDDEN_NETS = ("rvnn", "cvnn")


def _split_csv(text: str):
    return tuple(part.strip() for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnnbench",
        description=(
            "Benchmark real-valued, complex-valued, and simulated quantum "
            "neural networks on logic gates, Iris, and an entanglement witness."
        ),
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, extra in (
        ("gates", "six logic-gate truth tables"),
        ("iris", "Iris classification on a stratified split"),
        ("entanglement", "pure-state entanglement witness regression"),
    ):
        p = sub.add_parser(name, help=f"run the {name} experiment: {extra}")
        p.add_argument("--nets", default=None, help="comma list from rvnn,cvnn,qnn")
        p.add_argument("--seeds", default=None, help="comma list of integer seeds")
        if name != "gates":
            p.add_argument("--train-size", type=int, default=None)
        p.add_argument("--epochs", type=int, default=None, help="max epochs for every selected net")
        p.add_argument("--lr", type=float, default=None, help="learning rate for rvnn and qnn")
        p.add_argument("--hidden", type=int, default=None, help="hidden width for rvnn and cvnn")
        p.add_argument("--slices", type=int, default=None, help="qnn schedule slices")
        p.add_argument("--tf", type=float, default=None, help="qnn total evolution time")
        p.add_argument("--format", choices=("csv", "markdown"), default=None)
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        p.add_argument("--config", default=None, help="JSON ExperimentConfig; flags override it")
        p.add_argument("--timing", action="store_true", help="record wall-clock times")
        if name == "iris":
            p.add_argument("--iris-csv", default=None, help="alternate Iris CSV path")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(payload, dict):
        raise ValidationError("config file must hold a JSON object")
    return payload


def _merge_net_params(base: dict, net: str, key: str, value) -> None:
    base.setdefault(net, {})[key] = value


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    experiment = args.experiment
    file_cfg = _load_config_file(args.config) if args.config else {}
    if "experiment" in file_cfg and file_cfg["experiment"] != experiment:
        raise ValidationError(
            f"config file is for {file_cfg['experiment']!r}, "
            f"but the subcommand is {experiment!r}"
        )

    nets = tuple(file_cfg.get("nets", NETS))
    if args.nets is not None:
        nets = _split_csv(args.nets)

    seeds = tuple(file_cfg.get("seeds", (0,)))
    if args.seeds is not None:
        raw = _split_csv(args.seeds)
        try:
            seeds = tuple(int(s) for s in raw)
        except ValueError:
            raise ValidationError(f"seeds must be integers, got {args.seeds!r}")

    train_size = file_cfg.get("train_size")
    if getattr(args, "train_size", None) is not None:
        train_size = args.train_size

    output_format = file_cfg.get("output_format", "csv")
    if args.format is not None:
        output_format = args.format

    net_params = {
        net: dict(overrides)
        for net, overrides in file_cfg.get("net_params", {}).items()
    }
    selected = [n for n in NETS if n in nets]
    if args.epochs is not None:
        for net in selected:
            _merge_net_params(net_params, net, "max_epochs", args.epochs)
    if args.lr is not None:
        targets = [n for n in selected if n in _LR_NETS]
        if not targets:
            raise ValidationError("--lr applies to rvnn and qnn only")
        for net in targets:
            _merge_net_params(net_params, net, "learning_rate", args.lr)
    if args.hidden is not None:
        targets = [n for n in selected if n in _HIDDEN_NETS]
        if not targets:
            raise ValidationError("--hidden applies to rvnn and cvnn only")
        for net in targets:
            _merge_net_params(net_params, net, "hidden", args.hidden)
    if args.slices is not None or args.tf is not None:
        if "qnn" not in selected:
            raise ValidationError("--slices/--tf apply to the qnn only")
        if args.slices is not None:
            _merge_net_params(net_params, "qnn", "slices", args.slices)
        if args.tf is not None:
            _merge_net_params(net_params, "qnn", "t_f", args.tf)

    iris_path = file_cfg.get("iris_path")
    if getattr(args, "iris_csv", None) is not None:
        iris_path = args.iris_csv

    return ExperimentConfig(
        experiment=experiment,
        nets=nets,
        seeds=seeds,
        train_size=train_size,
        output_format=output_format,
        net_params=net_params,
        iris_path=iris_path,
        timing=bool(args.timing or file_cfg.get("timing", False)),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        reports = run_experiment(config)
        text = emit_report(reports, config.output_format, args.out)
    except (ValidationError, DatasetFormatError, DatasetIntegrityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
