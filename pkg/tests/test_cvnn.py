import cmath
import json
import math

import numpy as np
import pytest

from qnnbench.errors import DegenerateActivationError, ValidationError
from qnnbench import cvnn

BITS = [(0, 0), (0, 1), (1, 0), (1, 1)]


def gate_pairs(table, periodic=False):
    pairs = []
    for (b1, b2), t in zip(BITS, table):
        x = np.array([cvnn.map_scalar(b1), cvnn.map_scalar(b2)])
        spec = [cvnn.periodic_candidates(t)] if periodic else [cvnn.map_scalar(t)]
        pairs.append((x, spec))
    return pairs


# ---------------------------------------------------------------------------
# Circle mapping
# ---------------------------------------------------------------------------

def test_map_scalar_endpoints_and_midpoint():
    assert cvnn.map_scalar(0.0) == pytest.approx(1.0 + 0.0j)
    assert cvnn.map_scalar(1.0) == pytest.approx(-1.0 + 0.0j, abs=1e-15)
    assert cvnn.map_scalar(0.5) == pytest.approx(1.0j, abs=1e-15)


def test_map_scalar_rejects_out_of_range():
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(ValidationError):
            cvnn.map_scalar(bad)


def test_unmap_reference_points():
    assert cvnn.unmap(1.0 + 0.0j) == pytest.approx(0.0)
    assert cvnn.unmap(1.0j) == pytest.approx(0.5)
    assert cvnn.unmap(-1.0 + 0.0j) == pytest.approx(1.0)


def test_unmap_rejects_origin():
    with pytest.raises(ValidationError):
        cvnn.unmap(0.0 + 0.0j)


def test_map_unmap_round_trip():
    for r in np.linspace(0.0, 1.0, 101):
        assert abs(cvnn.unmap(cvnn.map_scalar(r)) - r) < 1e-12


def test_unmap_reflects_lower_half_plane():
    # Conjugate points read back identically.
    for angle in (0.3, 1.1, 2.9):
        z = cmath.exp(1j * angle)
        assert cvnn.unmap(z.conjugate()) == pytest.approx(cvnn.unmap(z))


# ---------------------------------------------------------------------------
# Activation
# ---------------------------------------------------------------------------

def test_activation_reference_points():
    assert cvnn.activation(1 + 1j) == pytest.approx(cmath.exp(1j * math.pi / 4))
    assert cvnn.activation(-3 + 0j) == pytest.approx(-1.0 + 0.0j)
    assert cvnn.activation(5j) == pytest.approx(1.0j)


def test_activation_rejects_origin():
    with pytest.raises(DegenerateActivationError):
        cvnn.activation(0j)


def test_activation_preserves_argument():
    rng = np.random.default_rng(1)
    for _ in range(100):
        z = complex(rng.standard_normal(), rng.standard_normal())
        if z == 0:
            continue
        out = cvnn.activation(z)
        assert abs(abs(out) - 1.0) < 1e-12
        assert cmath.phase(out) == pytest.approx(cmath.phase(z))


# ---------------------------------------------------------------------------
# Forward pass
# ---------------------------------------------------------------------------

def test_forward_single_neuron_sum():
    net = cvnn.ComplexLayerStack([np.array([[1.0 + 0j, 1.0 + 0j]])], use_bias=False)
    out = cvnn.forward(net, np.array([1.0 + 0j, 1.0j]))
    assert out[0] == pytest.approx(cmath.exp(1j * math.pi / 4))


def test_forward_positive_real_product():
    net = cvnn.ComplexLayerStack([np.array([[2.0 - 1.0j]])], use_bias=False)
    x = np.array([(2.0 + 1.0j) / 5.0])  # w*x = 1
    assert cvnn.forward(net, x)[0] == pytest.approx(1.0 + 0.0j)


def test_forward_two_layer_unit_weights():
    net = cvnn.ComplexLayerStack(
        [np.array([[1.0 + 0j]]), np.array([[1.0 + 0j]])], use_bias=False
    )
    assert cvnn.forward(net, np.array([1.0 + 0j]))[0] == pytest.approx(1.0 + 0.0j)


def test_forward_outputs_on_unit_circle():
    rng = np.random.default_rng(3)
    net = cvnn.random_stack((4, 6, 3), rng)
    for _ in range(50):
        x = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
        out = cvnn.forward(net, x)
        assert np.max(np.abs(np.abs(out) - 1.0)) < 1e-12


def test_forward_degenerate_sum_raises():
    net = cvnn.ComplexLayerStack([np.array([[1.0 + 0j, 1.0 + 0j]])], use_bias=False)
    with pytest.raises(DegenerateActivationError):
        cvnn.forward(net, np.array([1.0 + 0j, -1.0 + 0j]))


def test_stack_validation():
    with pytest.raises(ValidationError):
        cvnn.ComplexLayerStack([])
    with pytest.raises(ValidationError):
        cvnn.ComplexLayerStack(
            [np.ones((2, 2), dtype=complex), np.ones((1, 4), dtype=complex)],
            use_bias=False,
        )


# ---------------------------------------------------------------------------
# Output-neuron correction
# ---------------------------------------------------------------------------

def test_update_zero_error_is_identity():
    w = np.array([0.3 + 0.2j, -0.5 + 1j])
    x = np.array([1.0 + 0j, 1.0j])
    t = np.dot(w, x)
    assert np.allclose(cvnn.update_output_neuron(w, x, t), w)


def test_update_single_weight_reference():
    new = cvnn.update_output_neuron(
        np.array([1.0 + 0j]), np.array([1.0 + 0j]), 1.0j
    )
    assert new[0] == pytest.approx(1.0j)


def test_update_two_weight_reference():
    w = np.array([1.0 + 0j, 1.0 + 0j])
    x = np.array([1.0 + 0j, 1.0j])
    t = 0.5 * np.dot(w, x)
    new = cvnn.update_output_neuron(w, x, t)
    assert np.dot(new, x) == pytest.approx(t, abs=1e-12)


def test_update_is_exact_correction():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x = np.exp(1j * rng.uniform(0, 2 * np.pi, n)) * rng.uniform(0.2, 2.0, n)
        t = complex(rng.standard_normal(), rng.standard_normal())
        new = cvnn.update_output_neuron(w, x, t)
        worst = max(worst, abs(np.dot(new, x) - t))
    assert worst < 1e-10


def test_update_rejects_zero_input():
    with pytest.raises(ValidationError):
        cvnn.update_output_neuron(
            np.array([1.0 + 0j, 1.0 + 0j]), np.array([0j, 1.0 + 0j]), 1.0j
        )


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

def test_zero_error_pairs_leave_net_unchanged():
    net = cvnn.random_stack((2, 1), np.random.default_rng(31))
    inputs = [x for x, _ in gate_pairs([0, 0, 0, 1])]
    pairs = [(x, [cvnn.forward(net, x)[0]]) for x in inputs]
    before = net.weights[0].copy()
    _, rms, skipped = cvnn.train_epoch(net, pairs)
    assert np.array_equal(net.weights[0], before)
    assert rms == pytest.approx(0.0, abs=1e-12)
    assert skipped == 0


@pytest.mark.parametrize(
    "table,periodic",
    [
        ([0, 0, 0, 1], False),
        ([1, 1, 1, 0], False),
        ([0, 1, 1, 1], False),
        ([1, 0, 0, 0], False),
        ([0, 1, 1, 0], True),
        ([1, 0, 0, 1], True),
    ],
    ids=["and", "nand", "or", "nor", "xor", "xnor"],
)
def test_single_layer_converges_each_gate(table, periodic):
    readout = cvnn.doubled_angle_readout if periodic else cvnn.unmap
    net = cvnn.random_stack((2, 1), np.random.default_rng(0))
    result = cvnn.train_to_threshold(
        net, gate_pairs(table, periodic), 0.01, 5000, readout=readout
    )
    assert result.converged
    assert result.epochs_used <= 200


def test_hidden_layer_converges_on_xor_with_plain_targets():
    net = cvnn.random_stack((2, 4, 1), np.random.default_rng(0))
    result = cvnn.train_to_threshold(net, gate_pairs([0, 1, 1, 0]), 0.01, 2000)
    assert result.converged


def test_already_correct_net_stops_immediately():
    net = cvnn.ComplexLayerStack([np.array([[1.0 + 0j, 1.0 + 0j, 1.0 + 0j]])])
    result = cvnn.train_to_threshold(net, gate_pairs([0, 0, 0, 1]), 0.01, 100)
    assert result.converged and result.epochs_used == 1


def test_degenerate_pair_is_skipped_and_counted():
    net = cvnn.ComplexLayerStack([np.array([[1.0 + 0j, 1.0 + 0j]])], use_bias=False)
    bad = (np.array([1.0 + 0j, -1.0 + 0j]), [cvnn.map_scalar(1)])
    before = net.weights[0].copy()
    with pytest.warns(UserWarning):
        _, _, skipped = cvnn.train_epoch(net, [bad])
    assert skipped == 1
    assert np.array_equal(net.weights[0], before)
    # Since the skip restores the weights, the pair degenerates every epoch;
    # an all-skipped epoch reports full-scale RMS instead of claiming success.
    with pytest.warns(UserWarning):
        result = cvnn.train_to_threshold(net, [bad], 0.5, 3)
    assert not result.converged
    assert result.skipped == 3
    assert result.rms_history == [1.0, 1.0, 1.0]


def test_training_is_deterministic_per_seed():
    histories = []
    for _ in range(2):
        net = cvnn.random_stack((2, 1), np.random.default_rng(11))
        result = cvnn.train_to_threshold(net, gate_pairs([0, 1, 1, 1]), 0.01, 500)
        histories.append(result.rms_history)
    assert histories[0] == histories[1]


def test_threshold_argument_validation():
    net = cvnn.random_stack((2, 1), np.random.default_rng(0))
    pairs = gate_pairs([0, 0, 0, 1])
    with pytest.raises(ValidationError):
        cvnn.train_to_threshold(net, pairs, 0.0, 10)
    with pytest.raises(ValidationError):
        cvnn.train_to_threshold(net, pairs, 0.01, 0)
    with pytest.raises(ValidationError):
        cvnn.train_epoch(net, [])


def test_initial_weights_avoid_origin():
    rng = np.random.default_rng(17)
    for _ in range(20):
        net = cvnn.random_stack((3, 5, 2), rng)
        for w in net.weights:
            mods = np.abs(w)
            assert np.all(mods >= 0.1) and np.all(mods <= 0.5)


# ---------------------------------------------------------------------------
# Periodic codec
# ---------------------------------------------------------------------------

def test_periodic_candidates_are_antipodal_and_read_back():
    for bit in (0, 1):
        a, b = cvnn.periodic_candidates(bit)
        assert a == pytest.approx(-b)
        assert cvnn.doubled_angle_readout(a) == pytest.approx(float(bit), abs=1e-12)
        assert cvnn.doubled_angle_readout(b) == pytest.approx(float(bit), abs=1e-12)
    with pytest.raises(ValidationError):
        cvnn.periodic_candidates(2)


def test_nearest_target_selection():
    spec = cvnn.periodic_candidates(1)  # (i, -i)
    assert cvnn.nearest_target(spec, 0.9j) == pytest.approx(1.0j)
    assert cvnn.nearest_target(spec, -0.9j) == pytest.approx(-1.0j)
    assert cvnn.nearest_target(0.5 + 0j, 123.0 + 0j) == pytest.approx(0.5 + 0j)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def test_json_round_trip_with_bias():
    net = cvnn.random_stack((3, 4, 2), np.random.default_rng(23))
    text = cvnn.stack_to_json(net)
    parsed = json.loads(text)
    assert set(parsed) == {"layers", "lr"}
    assert parsed["lr"] is None
    restored = cvnn.stack_from_json(text)
    assert restored.use_bias
    for a, b in zip(restored.weights, net.weights):
        assert np.array_equal(a, b)


def test_json_round_trip_without_bias():
    net = cvnn.random_stack((2, 2), np.random.default_rng(29), bias=False)
    restored = cvnn.stack_from_json(cvnn.stack_to_json(net))
    assert not restored.use_bias
    assert np.array_equal(restored.weights[0], net.weights[0])
