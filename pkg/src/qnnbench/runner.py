"""Experiment orchestration: configure nets, run seeded trials, score them.

Every stochastic choice in a trial (weight init, dataset split, sampling)
draws from a stream derived from the trial's root seed and a fixed role tag,
so one integer reproduces a whole table and trials stay independent of the
order they run in. Role tags 1 (iris split), 2 (witness training sampler),
and 3 (witness test set) live in the tasks module; this module adds 4 for
network initialization, further split by net and task variant.

Wall-clock timing is off by default so that repeated runs of the same
config serialize to identical bytes; pass timing=True to record it.
"""

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import cvnn, qnn, rvnn, tasks
from .errors import ValidationError
from .reporting import (
    RunReport,
    accuracy_percent,
    nearest_mean_rule,
    onehot_rule,
    rms_percent,
)

EXPERIMENTS = ("gates", "iris", "entanglement")
NETS = ("rvnn", "cvnn", "qnn")

ROLE_NET_INIT = 4

# Per-net hyperparameter defaults for each experiment. Classical "hidden"
# None means a single-layer net (no hidden layer). The CVNN update rule has
# no learning rate, so none is configurable for it.
DEFAULTS = {
    "gates": {
        "rvnn": {"hidden": None, "learning_rate": 2.0, "max_epochs": 1_000_000, "rms_target": 0.01},
        "cvnn": {"hidden": None, "max_epochs": 5_000, "rms_target": 0.01},
        "qnn": {"learning_rate": 20.0, "max_epochs": 500, "rms_target": 0.01, "slices": 4, "t_f": 1.0},
    },
    "iris": {
        "rvnn": {"hidden": 8, "learning_rate": 0.25, "max_epochs": 50_000, "rms_target": 0.01},
        "cvnn": {"hidden": 100, "max_epochs": 1_000, "rms_target": 0.01},
        "qnn": {"learning_rate": 2.0, "max_epochs": 100, "rms_target": 0.01, "slices": 4, "t_f": 1.0},
    },
    "entanglement": {
        "rvnn": {"hidden": 8, "learning_rate": 1.0, "max_epochs": 5_000, "rms_target": 0.01},
        "cvnn": {"hidden": 8, "max_epochs": 1_000, "rms_target": 0.01},
        "qnn": {"learning_rate": 8.0, "max_epochs": 2_000, "rms_target": 0.01, "slices": 1, "t_f": 1.5},
    },
}

DEFAULT_TRAIN_SIZE = {"iris": 75, "entanglement": 4}
WITNESS_TEST_SIZE = 25


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    nets: Tuple[str, ...] = NETS
    seeds: Tuple[int, ...] = (0,)
    train_size: Optional[int] = None
    output_format: str = "csv"
    net_params: Dict[str, Dict[str, object]] = field(default_factory=dict)
    iris_path: Optional[str] = None
    timing: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(f"unknown experiment {self.experiment!r}")
        if not self.nets:
            raise ValidationError("nets must be nonempty")
        for net in self.nets:
            if net not in NETS:
                raise ValidationError(f"unknown net {net!r}")
        if len(set(self.nets)) != len(self.nets):
            raise ValidationError("nets must not repeat")
        if not self.seeds:
            raise ValidationError("seeds must be nonempty")
        for seed in self.seeds:
            if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
                raise ValidationError("seeds must be integers")
            if seed < 0:
                raise ValidationError("seeds must be >= 0")
        if self.train_size is not None:
            if self.experiment == "gates":
                raise ValidationError("gates has a fixed 4-row training set")
            if self.train_size < 1:
                raise ValidationError("train_size must be >= 1")
        if self.output_format not in ("csv", "markdown"):
            raise ValidationError(f"unknown output format {self.output_format!r}")
        for net, overrides in self.net_params.items():
            if net not in NETS:
                raise ValidationError(f"net_params for unknown net {net!r}")
            allowed = set(DEFAULTS[self.experiment][net])
            for key in overrides:
                if key not in allowed:
                    raise ValidationError(
                        f"{net} does not accept parameter {key!r}"
                    )

    def resolved(self, net: str) -> Dict[str, object]:
        params = dict(DEFAULTS[self.experiment][net])
        params.update(self.net_params.get(net, {}))
        return params


def _init_rng(seed: int, net: str, variant: int = 0):
    entropy = (seed, ROLE_NET_INIT, NETS.index(net), variant)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def _clock(enabled: bool):
    return time.perf_counter() if enabled else 0.0


def _elapsed_ms(enabled: bool, start: float) -> float:
    return (time.perf_counter() - start) * 1000.0 if enabled else 0.0


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------

def _gate_trial(gate_idx: int, task, net: str, seed: int, config) -> RunReport:
    params = config.resolved(net)
    label = f"gates:{task.name}"
    rng = _init_rng(seed, net, gate_idx)
    start = _clock(config.timing)
    if net == "rvnn":
        pairs = tasks.gate_encode_rvnn(task)
        sizes = (2, 1) if params["hidden"] is None else (2, params["hidden"], 1)
        stack = rvnn.random_stack(sizes, params["learning_rate"], rng)
        result = rvnn.train_to_threshold(
            stack, pairs, params["rms_target"], params["max_epochs"]
        )
        outs = [rvnn.forward(result.net, x) for x, _ in pairs]
        train_rms = rms_percent(outs, [t for _, t in pairs])
    elif net == "cvnn":
        pairs, readout = tasks.gate_encode_cvnn(task)
        sizes = (2, 1) if params["hidden"] is None else (2, params["hidden"], 1)
        stack = cvnn.random_stack(sizes, rng)
        result = cvnn.train_to_threshold(
            stack, pairs, params["rms_target"], params["max_epochs"], readout=readout
        )
        outs = [[readout(z) for z in cvnn.forward(result.net, x)] for x, _ in pairs]
        train_rms = rms_percent(outs, [[float(t)] for _, t in task.pairs])
    else:
        pairs, readout = tasks.gate_encode_qnn(task)
        schedule = qnn.random_schedule(params["slices"], params["t_f"], rng)
        cfg = qnn.QnnConfig(
            learning_rate=params["learning_rate"],
            max_epochs=params["max_epochs"],
            rms_target=params["rms_target"],
            seed=seed,
        )
        result = qnn.train(pairs, cfg, schedule, readout=readout)
        rhos = qnn.states_to_rhos([s for s, _ in pairs])
        outs = qnn.batch_outputs(rhos, result.schedule, readout)
        train_rms = rms_percent(outs, [t for _, t in pairs])
    return RunReport(
        experiment=label,
        net=net,
        seed=seed,
        epochs_used=result.epochs_used,
        converged=result.converged,
        train_rms_pct=train_rms,
        wall_time_ms=_elapsed_ms(config.timing, start),
        hyperparameters=params,
    )


def run_gates(config: ExperimentConfig) -> List[RunReport]:
    """Train every net on all six gates for every seed."""
    reports = []
    for gate_idx, name in enumerate(tasks.GATE_NAMES):
        task = tasks.gate_dataset(name)
        for net in config.nets:
            for seed in config.seeds:
                reports.append(_gate_trial(gate_idx, task, net, seed, config))
    return reports


# ---------------------------------------------------------------------------
# Iris
# ---------------------------------------------------------------------------

def _iris_classical(net, train, test, bounds, params, rng):
    encode = tasks.iris_encode_onehot if net == "rvnn" else tasks.iris_encode_cvnn
    train_pairs = [encode(r, bounds) for r in train]
    test_pairs = [encode(r, bounds) for r in test]
    sizes = (4, params["hidden"], 3)
    if net == "rvnn":
        stack = rvnn.random_stack(sizes, params["learning_rate"], rng)
        result = rvnn.train_to_threshold(
            stack, train_pairs, params["rms_target"], params["max_epochs"]
        )
        predict = lambda x: rvnn.forward(result.net, x)
    else:
        stack = cvnn.random_stack(sizes, rng)
        result = cvnn.train_to_threshold(
            stack, train_pairs, params["rms_target"], params["max_epochs"]
        )
        predict = lambda x: np.array(
            [cvnn.unmap(z) for z in cvnn.forward(result.net, x)]
        )
    # Outputs come from each net's own encoded inputs; scores compare them
    # against the plain one-hot targets either way.
    train_targets = [tasks.iris_encode_onehot(r, bounds)[1] for r in train]
    test_targets = [tasks.iris_encode_onehot(r, bounds)[1] for r in test]
    train_outs = [predict(x) for x, _ in train_pairs]
    test_outs = [predict(x) for x, _ in test_pairs]
    train_rms = rms_percent(train_outs, train_targets)
    test_rms = rms_percent(test_outs, test_targets)
    accuracy = accuracy_percent(test_outs, test_targets, onehot_rule)
    return result, train_rms, test_rms, accuracy


def _iris_qnn(train, test, params, rng, seed):
    train_pairs = [tasks.iris_encode_qnn(r) for r in train]
    test_pairs = [tasks.iris_encode_qnn(r) for r in test]
    schedule = qnn.random_schedule(params["slices"], params["t_f"], rng)
    cfg = qnn.QnnConfig(
        learning_rate=params["learning_rate"],
        max_epochs=params["max_epochs"],
        rms_target=params["rms_target"],
        seed=seed,
    )
    result = qnn.train(train_pairs, cfg, schedule)
    train_rhos = qnn.states_to_rhos([s for s, _ in train_pairs])
    test_rhos = qnn.states_to_rhos([s for s, _ in test_pairs])
    train_outs = qnn.batch_outputs(train_rhos, result.schedule)
    test_outs = qnn.batch_outputs(test_rhos, result.schedule)
    train_rms = rms_percent(train_outs, [t for _, t in train_pairs])
    test_rms = rms_percent(test_outs, [t for _, t in test_pairs])
    # Scalar outputs turn into classes through cuts at the midpoints of the
    # per-species mean training outputs.
    train_labels = np.array([tasks.species_index(r) for r in train])
    means = [
        float(np.mean(train_outs[train_labels == k])) for k in range(3)
    ]
    rule = nearest_mean_rule(means)
    test_labels = [tasks.species_index(r) for r in test]
    accuracy = accuracy_percent(list(test_outs), test_labels, rule)
    return result, train_rms, test_rms, accuracy


def run_iris(config: ExperimentConfig) -> List[RunReport]:
    """Stratified-split Iris classification for every net and seed."""
    records = tasks.load_iris(config.iris_path)
    bounds = tasks.feature_bounds(records)
    n_train = config.train_size or DEFAULT_TRAIN_SIZE["iris"]
    label = f"iris:{n_train}"
    reports = []
    for seed in config.seeds:
        train, test = tasks.split_stratified(records, n_train, seed)
        for net in config.nets:
            params = config.resolved(net)
            rng = _init_rng(seed, net)
            start = _clock(config.timing)
            if net == "qnn":
                result, train_rms, test_rms, accuracy = _iris_qnn(
                    train, test, params, rng, seed
                )
            else:
                result, train_rms, test_rms, accuracy = _iris_classical(
                    net, train, test, bounds, params, rng
                )
            reports.append(
                RunReport(
                    experiment=label,
                    net=net,
                    seed=seed,
                    epochs_used=result.epochs_used,
                    converged=result.converged,
                    train_rms_pct=train_rms,
                    test_rms_pct=test_rms,
                    accuracy_pct=accuracy,
                    wall_time_ms=_elapsed_ms(config.timing, start),
                    hyperparameters=params,
                )
            )
    return reports


# ---------------------------------------------------------------------------
# Entanglement witness
# ---------------------------------------------------------------------------

def _witness_classical(net, train_pairs_raw, test_pairs_raw, params, rng):
    encode = (
        tasks.witness_encode_rvnn if net == "rvnn" else tasks.witness_encode_cvnn
    )
    train_pairs = [encode(p) for p in train_pairs_raw]
    test_pairs = [encode(p) for p in test_pairs_raw]
    sizes = (16, params["hidden"], 1)
    if net == "rvnn":
        stack = rvnn.random_stack(sizes, params["learning_rate"], rng)
        result = rvnn.train_to_threshold(
            stack, train_pairs, params["rms_target"], params["max_epochs"]
        )
        predict = lambda x: float(rvnn.forward(result.net, x)[0])
    else:
        stack = cvnn.random_stack(sizes, rng)
        result = cvnn.train_to_threshold(
            stack, train_pairs, params["rms_target"], params["max_epochs"]
        )
        predict = lambda x: cvnn.unmap(cvnn.forward(result.net, x)[0])
    train_outs = [predict(x) for x, _ in train_pairs]
    test_outs = [predict(x) for x, _ in test_pairs]
    train_tgts = [p.target for p in train_pairs_raw]
    test_tgts = [p.target for p in test_pairs_raw]
    return result, rms_percent(train_outs, train_tgts), rms_percent(test_outs, test_tgts)


def _witness_qnn(train_pairs_raw, test_pairs_raw, params, rng, seed):
    train_pairs = [tasks.witness_encode_qnn(p) for p in train_pairs_raw]
    schedule = qnn.random_schedule(params["slices"], params["t_f"], rng)
    cfg = qnn.QnnConfig(
        learning_rate=params["learning_rate"],
        max_epochs=params["max_epochs"],
        rms_target=params["rms_target"],
        seed=seed,
    )
    result = qnn.train(train_pairs, cfg, schedule)
    train_rhos = qnn.states_to_rhos([s for s, _ in train_pairs])
    test_rhos = qnn.states_to_rhos([p.state for p in test_pairs_raw])
    train_outs = qnn.batch_outputs(train_rhos, result.schedule)
    test_outs = qnn.batch_outputs(test_rhos, result.schedule)
    train_rms = rms_percent(train_outs, [t for _, t in train_pairs])
    test_rms = rms_percent(test_outs, [p.target for p in test_pairs_raw])
    return result, train_rms, test_rms


def run_entanglement(config: ExperimentConfig) -> List[RunReport]:
    """Witness regression: train on n pure states, test on a fixed 25."""
    n_train = config.train_size or DEFAULT_TRAIN_SIZE["entanglement"]
    label = f"entanglement:{n_train}"
    reports = []
    for seed in config.seeds:
        train_pairs = tasks.witness_dataset(n_train, seed)
        test_pairs = tasks.witness_testset(WITNESS_TEST_SIZE, seed)
        for net in config.nets:
            params = config.resolved(net)
            rng = _init_rng(seed, net)
            start = _clock(config.timing)
            if net == "qnn":
                result, train_rms, test_rms = _witness_qnn(
                    train_pairs, test_pairs, params, rng, seed
                )
            else:
                result, train_rms, test_rms = _witness_classical(
                    net, train_pairs, test_pairs, params, rng
                )
            reports.append(
                RunReport(
                    experiment=label,
                    net=net,
                    seed=seed,
                    epochs_used=result.epochs_used,
                    converged=result.converged,
                    train_rms_pct=train_rms,
                    test_rms_pct=test_rms,
                    wall_time_ms=_elapsed_ms(config.timing, start),
                    hyperparameters=params,
                )
            )
    return reports


def run_experiment(config: ExperimentConfig) -> List[RunReport]:
    runner = {
        "gates": run_gates,
        "iris": run_iris,
        "entanglement": run_entanglement,
    }[config.experiment]
    return runner(config)
