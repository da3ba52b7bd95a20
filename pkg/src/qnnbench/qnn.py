"""Quantum network: a trainable Hamiltonian schedule read out by measurement.

The forward pass prepares a two-qubit density matrix, propagates it through
the piecewise-constant schedule, and measures. The default readout is the
squared two-qubit correlation Tr(rho ZZ)^2; tasks may substitute any Hermitian
observable, optionally unsquared, through a Readout value. A projector readout
is what makes valence-style gates (AND, OR and their negations) reachable:
summed over the four basis inputs, the ZZ expectation after any one unitary is
the trace of ZZ, which is zero, so under the squared-correlation readout those
four truth tables can never all be matched at once.

Training is plain full-batch gradient descent where the gradient comes from
central finite differences on the mean squared error, five parameters per
slice. One epoch is one gradient step. No randomness enters after the initial
schedule is drawn, so runs are reproducible from the seed alone.
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .quantum import (
    HamiltonianSchedule,
    PureState,
    ZZ,
    correlation_squared,
    propagate,
    pure_to_density,
    schedule_propagator,
)

MAX_FD_STEP = 1e-2
DEFAULT_FD_STEP = 1e-3

TrainPair = Tuple[PureState, float]


@dataclass(frozen=True)
class QnnConfig:
    learning_rate: float
    max_epochs: int
    rms_target: float = 0.01
    fd_step: float = DEFAULT_FD_STEP
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ValidationError("learning rate must be positive")
        if self.max_epochs < 1:
            raise ValidationError("max_epochs must be at least 1")
        if not 0 < self.rms_target < 1:
            raise ValidationError("rms_target must lie in (0, 1)")
        if not 0 < self.fd_step <= MAX_FD_STEP:
            raise ValidationError(f"fd_step must lie in (0, {MAX_FD_STEP}]")


@dataclass(frozen=True)
class Readout:
    """Measurement functional: expectation of an observable, optionally
    squared, clipped into [0, 1]."""

    observable: np.ndarray
    square: bool = True

    def __post_init__(self):
        obs = np.asarray(self.observable, dtype=complex)
        if obs.shape != (4, 4) or np.max(np.abs(obs - obs.conj().T)) > 1e-12:
            raise ValidationError("observable must be 4x4 Hermitian")
        object.__setattr__(self, "observable", obs)

    def values(self, rhos: np.ndarray) -> np.ndarray:
        """Measure a stack of density matrices, shape (n, 4, 4) -> (n,)."""
        expect = np.einsum("nij,ji->n", rhos, self.observable).real
        if self.square:
            expect = expect**2
        return np.clip(expect, 0.0, 1.0)


CORRELATION = Readout(ZZ, square=True)


def basis_projector(*indices: int) -> Readout:
    """Unsquared readout projecting onto a set of computational basis states."""
    diag = np.zeros(4)
    for i in indices:
        if i not in (0, 1, 2, 3):
            raise ValidationError("basis indices run from 0 to 3")
        diag[i] = 1.0
    return Readout(np.diag(diag).astype(complex), square=False)


def random_schedule(n_slices: int, total_time: float, rng) -> HamiltonianSchedule:
    """Initial schedule with every parameter uniform in [-1, 1]."""
    rng = np.random.default_rng(rng)
    return HamiltonianSchedule.from_array(
        rng.uniform(-1.0, 1.0, 5 * n_slices), total_time
    )


def forward(state: PureState, schedule: HamiltonianSchedule) -> float:
    return correlation_squared(propagate(pure_to_density(state), schedule))


def witness(state: PureState, schedule: HamiltonianSchedule) -> float:
    """Read the trained correlation output as an entanglement estimate."""
    return forward(state, schedule)


def states_to_rhos(states: Sequence[PureState]) -> np.ndarray:
    return np.stack([pure_to_density(s).entries for s in states])


def batch_outputs(rhos, schedule, readout: Readout = CORRELATION) -> np.ndarray:
    u = schedule_propagator(schedule)
    evolved = np.matmul(np.matmul(u, rhos), u.conj().T)
    return readout.values(evolved)


def _loss_from_array(params, total_time, rhos, targets, readout):
    schedule = HamiltonianSchedule.from_array(params, total_time)
    outs = batch_outputs(rhos, schedule, readout)
    return float(np.mean((outs - targets) ** 2))


def batch_loss(batch: Sequence[TrainPair], schedule, readout=CORRELATION) -> float:
    rhos = states_to_rhos([s for s, _ in batch])
    targets = np.array([t for _, t in batch], dtype=float)
    return _loss_from_array(
        schedule.as_array(), schedule.total_time, rhos, targets, readout
    )


def gradient(
    schedule: HamiltonianSchedule,
    batch: Sequence[TrainPair],
    fd_step: float = DEFAULT_FD_STEP,
    readout: Readout = CORRELATION,
) -> np.ndarray:
    """Central finite differences of the batch loss over all slice parameters."""
    if not batch:
        raise ValidationError("gradient needs a nonempty batch")
    if not 0 < fd_step <= MAX_FD_STEP:
        raise ValidationError(f"fd_step must lie in (0, {MAX_FD_STEP}]")
    rhos = states_to_rhos([s for s, _ in batch])
    targets = np.array([t for _, t in batch], dtype=float)
    params = schedule.as_array()
    grad = np.empty_like(params)
    for p in range(params.size):
        saved = params[p]
        params[p] = saved + fd_step
        up = _loss_from_array(params, schedule.total_time, rhos, targets, readout)
        params[p] = saved - fd_step
        down = _loss_from_array(params, schedule.total_time, rhos, targets, readout)
        params[p] = saved
        grad[p] = (up - down) / (2.0 * fd_step)
    return grad


class TrainResult(NamedTuple):
    schedule: HamiltonianSchedule
    epochs_used: int
    converged: bool
    rms_history: List[float]


def train(
    trainset: Sequence[TrainPair],
    config: QnnConfig,
    initial_schedule: HamiltonianSchedule,
    readout: Readout = CORRELATION,
) -> TrainResult:
    """Full-batch descent; one epoch is one gradient step, and the epoch RMS
    (a fraction) is measured after the step."""
    if not trainset:
        raise ValidationError("cannot train on an empty set")
    rhos = states_to_rhos([s for s, _ in trainset])
    targets = np.array([t for _, t in trainset], dtype=float)
    params = initial_schedule.as_array()
    total_time = initial_schedule.total_time
    history = []
    for epoch in range(1, config.max_epochs + 1):
        schedule = HamiltonianSchedule.from_array(params, total_time)
        step = gradient(schedule, trainset, config.fd_step, readout)
        params -= config.learning_rate * step
        rms = np.sqrt(_loss_from_array(params, total_time, rhos, targets, readout))
        history.append(float(rms))
        if rms <= config.rms_target:
            return TrainResult(
                HamiltonianSchedule.from_array(params, total_time),
                epoch,
                True,
                history,
            )
    return TrainResult(
        HamiltonianSchedule.from_array(params, total_time),
        config.max_epochs,
        False,
        history,
    )
