"""Real-valued feed-forward network with sigmoid units and per-pair gradient descent.

The network is a plain layer stack: every layer computes sigmoid(W x + b).
Training visits pairs in order and applies one gradient step per pair, and the
epoch error is accumulated from each forward pass before its update, so a zero
learning rate reports exactly the static error of the starting weights.

All RMS values handled here are fractions of full scale in [0, 1]; reporting
code multiplies by 100 where percentages are wanted.
"""

import json
from dataclasses import dataclass, field
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import ValidationError

Pair = Tuple[np.ndarray, np.ndarray]


def sigmoid(t):
    out = np.empty_like(t, dtype=float)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


@dataclass
class RealLayerStack:
    """Weights, biases, and the step size used when training the stack.

    The stated contract wants a positive learning rate, but a zero rate is
    accepted so that a no-op training epoch stays expressible; only negative
    rates are rejected.
    """

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    learning_rate: float = field(default=0.1)

    def __post_init__(self):
        if not self.weights or len(self.weights) != len(self.biases):
            raise ValidationError("need one bias vector per weight matrix")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ValidationError(f"layer {k}: weight/bias shapes disagree")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValidationError(f"layer {k}: non-finite parameters")
            if k > 0 and w.shape[1] != self.weights[k - 1].shape[0]:
                raise ValidationError(f"layer {k}: input width breaks the chain")
        if not np.isfinite(self.learning_rate) or self.learning_rate < 0:
            raise ValidationError("learning rate must be finite and >= 0")

    @property
    def sizes(self):
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)


def random_stack(sizes: Sequence[int], learning_rate: float, rng) -> RealLayerStack:
    """Build a stack with all parameters drawn uniformly from [-0.5, 0.5)."""
    rng = np.random.default_rng(rng)
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.uniform(-0.5, 0.5, (n_out, n_in)))
        biases.append(rng.uniform(-0.5, 0.5, n_out))
    return RealLayerStack(weights, biases, learning_rate)


def forward(net: RealLayerStack, x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.shape != (net.sizes[0],):
        raise ValidationError(f"expected input of length {net.sizes[0]}")
    for w, b in zip(net.weights, net.biases):
        a = sigmoid(w @ a + b)
    return a


def _activations(net, x):
    acts = [np.asarray(x, dtype=float)]
    for w, b in zip(net.weights, net.biases):
        acts.append(sigmoid(w @ acts[-1] + b))
    return acts


def pair_gradients(net: RealLayerStack, x, t):
    """Gradients of 0.5*sum((out - t)^2) for one pair, by backpropagation."""
    acts = _activations(net, x)
    delta = (acts[-1] - t) * acts[-1] * (1.0 - acts[-1])
    grad_w, grad_b = [], []
    for k in range(len(net.weights) - 1, -1, -1):
        grad_w.append(np.outer(delta, acts[k]))
        grad_b.append(delta)
        if k > 0:
            delta = (net.weights[k].T @ delta) * acts[k] * (1.0 - acts[k])
    grad_w.reverse()
    grad_b.reverse()
    return grad_w, grad_b, acts[-1]


def batch_loss(net: RealLayerStack, pairs: Sequence[Pair]) -> float:
    total = 0.0
    for x, t in pairs:
        out = forward(net, x)
        total += 0.5 * float(np.sum((out - np.asarray(t, dtype=float)) ** 2))
    return total


def batch_gradients(net: RealLayerStack, pairs: Sequence[Pair]):
    """Summed analytic gradients over a batch, without touching the net."""
    grad_w = [np.zeros_like(w) for w in net.weights]
    grad_b = [np.zeros_like(b) for b in net.biases]
    for x, t in pairs:
        gw, gb, _ = pair_gradients(net, x, np.asarray(t, dtype=float))
        for acc, g in zip(grad_w, gw):
            acc += g
        for acc, g in zip(grad_b, gb):
            acc += g
    return grad_w, grad_b


def train_epoch(net: RealLayerStack, pairs: Sequence[Pair]):
    """One in-order pass; returns the net and the epoch RMS as a fraction."""
    if not pairs:
        raise ValidationError("cannot train on an empty pair list")
    lr = net.learning_rate
    sq_sum = 0.0
    n_components = 0
    for x, t in pairs:
        target = np.asarray(t, dtype=float)
        gw, gb, out = pair_gradients(net, x, target)
        sq_sum += float(np.sum((out - target) ** 2))
        n_components += target.size
        for w, g in zip(net.weights, gw):
            w -= lr * g
        for b, g in zip(net.biases, gb):
            b -= lr * g
    return net, np.sqrt(sq_sum / n_components)


class TrainResult(NamedTuple):
    net: RealLayerStack
    epochs_used: int
    converged: bool
    rms_history: List[float]


def train_to_threshold(net, pairs, rms_target, max_epochs) -> TrainResult:
    """Run epochs until the fractional RMS drops to rms_target or epochs run out."""
    if not 0 < rms_target < 1:
        raise ValidationError("rms_target must lie in (0, 1)")
    if max_epochs < 1:
        raise ValidationError("max_epochs must be at least 1")
    history = []
    for epoch in range(1, max_epochs + 1):
        _, rms = train_epoch(net, pairs)
        history.append(rms)
        if rms <= rms_target:
            return TrainResult(net, epoch, True, history)
    return TrainResult(net, max_epochs, False, history)


class SweepEntry(NamedTuple):
    rate: float
    epochs_used: int
    converged: bool


def sweep_learning_rates(sizes, pairs, rates, rms_target, max_epochs, seed):
    """Train one fresh net per candidate rate and rank by epochs to threshold.

    Every candidate starts from the same seeded initialization so the sweep
    isolates the rate. Returns (best_rate, entries); non-converged rates lose
    to any converged one.
    """
    entries = []
    for rate in rates:
        net = random_stack(sizes, rate, np.random.default_rng(seed))
        result = train_to_threshold(net, pairs, rms_target, max_epochs)
        entries.append(SweepEntry(rate, result.epochs_used, result.converged))
    best = min(entries, key=lambda e: (not e.converged, e.epochs_used, e.rate))
    return best.rate, entries


def stack_to_json(net: RealLayerStack) -> str:
    payload = {
        "layers": [
            {"w": w.tolist(), "b": b.tolist()}
            for w, b in zip(net.weights, net.biases)
        ],
        "lr": net.learning_rate,
    }
    return json.dumps(payload)


def stack_from_json(text: str) -> RealLayerStack:
    payload = json.loads(text)
    weights = [np.array(layer["w"], dtype=float) for layer in payload["layers"]]
    biases = [np.array(layer["b"], dtype=float) for layer in payload["layers"]]
    return RealLayerStack(weights, biases, payload["lr"])
