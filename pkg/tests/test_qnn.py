"""Tests for the quantum network: forward readouts, finite-difference
gradients, and full-batch training."""

import numpy as np
import pytest

from qnnbench import qnn, tasks
from qnnbench.errors import ValidationError
from qnnbench.quantum import (
    DensityMatrix,
    HamiltonianSchedule,
    PureState,
    SliceParams,
    correlation_squared,
    pure_to_density,
    reference_propagate,
)


def zero_schedule(n_slices=1, total_time=1.0):
    return HamiltonianSchedule.from_array(np.zeros(5 * n_slices), total_time)


def single_tunneling_schedule(k_a, total_time):
    return HamiltonianSchedule((SliceParams(k_a, 0.0, 0.0, 0.0, 0.0),), total_time)


BASIS_00 = PureState(1.0, 0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# Forward pass
# ---------------------------------------------------------------------------

class TestForward:
    def test_untrained_zero_schedule_on_basis_state_reads_one(self):
        assert qnn.forward(BASIS_00, zero_schedule()) == pytest.approx(1.0)

    def test_single_qubit_tunneling_full_flip_period(self):
        # One slice driving qubit A alone turns the correlation into
        # cos^2(2 k t); at k=1, t=pi/2 the square comes back to exactly 1.
        out = qnn.forward(BASIS_00, single_tunneling_schedule(1.0, np.pi / 2))
        assert out == pytest.approx(1.0, abs=1e-12)

    def test_single_qubit_tunneling_quarter_period_reads_zero(self):
        out = qnn.forward(BASIS_00, single_tunneling_schedule(1.0, np.pi / 4))
        assert out == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("t_f", [0.3, np.pi / 4, np.pi / 2, 1.7])
    def test_tunneling_output_matches_time_stepped_integrator(self, t_f):
        schedule = single_tunneling_schedule(1.0, t_f)
        rho = DensityMatrix(reference_propagate(pure_to_density(BASIS_00), schedule))
        assert qnn.forward(BASIS_00, schedule) == pytest.approx(
            correlation_squared(rho), abs=1e-9
        )
        assert qnn.forward(BASIS_00, schedule) == pytest.approx(
            np.cos(2.0 * t_f) ** 2, abs=1e-9
        )

    def test_witness_is_the_forward_output(self):
        schedule = qnn.random_schedule(3, 1.0, np.random.default_rng(7))
        state = PureState(0.5, 0.5, 0.5, 0.5)
        assert qnn.witness(state, schedule) == qnn.forward(state, schedule)

    def test_batch_outputs_match_single_forward(self):
        rng = np.random.default_rng(3)
        schedule = qnn.random_schedule(4, 1.0, rng)
        states = [tasks.sample_pure_state(rng) for _ in range(6)]
        batch = qnn.batch_outputs(qnn.states_to_rhos(states), schedule)
        singles = [qnn.forward(s, schedule) for s in states]
        assert np.allclose(batch, singles, atol=1e-12)

    def test_projector_readout_solves_and_gate_at_identity(self):
        pairs, readout = tasks.gate_encode_qnn(tasks.gate_dataset("AND"))
        rhos = qnn.states_to_rhos([s for s, _ in pairs])
        outs = qnn.batch_outputs(rhos, zero_schedule(), readout)
        assert np.allclose(outs, [0.0, 0.0, 0.0, 1.0], atol=1e-12)

    def test_unsquared_readout_is_linear_in_the_state(self):
        rng = np.random.default_rng(11)
        readout = qnn.basis_projector(1, 2)
        r1 = qnn.states_to_rhos([tasks.sample_pure_state(rng)])
        r2 = qnn.states_to_rhos([tasks.sample_pure_state(rng)])
        mix = 0.3 * r1 + 0.7 * r2
        expected = 0.3 * readout.values(r1) + 0.7 * readout.values(r2)
        assert readout.values(mix) == pytest.approx(expected, abs=1e-12)


# ---------------------------------------------------------------------------
# Gradients
# ---------------------------------------------------------------------------

class TestGradient:
    def test_zero_at_an_exact_fit(self):
        rng = np.random.default_rng(5)
        schedule = qnn.random_schedule(2, 1.0, rng)
        states = [tasks.sample_pure_state(rng) for _ in range(4)]
        rhos = qnn.states_to_rhos(states)
        outs = qnn.batch_outputs(rhos, schedule)
        batch = list(zip(states, outs))
        grad = qnn.gradient(schedule, batch, fd_step=3e-5)
        assert np.max(np.abs(grad)) < 1e-7

    def test_duplicating_the_batch_leaves_the_mean_gradient_alone(self):
        rng = np.random.default_rng(8)
        schedule = qnn.random_schedule(2, 1.0, rng)
        batch = [(tasks.sample_pure_state(rng), 0.4), (tasks.sample_pure_state(rng), 0.7)]
        grad_once = qnn.gradient(schedule, batch)
        grad_twice = qnn.gradient(schedule, batch + batch)
        assert np.allclose(grad_once, grad_twice, atol=1e-12)

    def test_points_downhill(self):
        rng = np.random.default_rng(9)
        schedule = qnn.random_schedule(3, 1.0, rng)
        batch = [
            (tasks.sample_pure_state(rng), 0.2),
            (tasks.sample_pure_state(rng), 0.9),
            (tasks.sample_pure_state(rng), 0.5),
        ]
        grad = qnn.gradient(schedule, batch)
        assert np.linalg.norm(grad) > 1e-6
        before = qnn.batch_loss(batch, schedule)
        stepped = HamiltonianSchedule.from_array(
            schedule.as_array() - 1e-4 * grad, schedule.total_time
        )
        assert qnn.batch_loss(batch, stepped) < before

    def test_central_differences_are_second_order(self):
        # Richardson: halving the step should shrink the finite-difference
        # error by about 4 on every parameter with a healthy derivative.
        rng = np.random.default_rng(13)
        schedule = qnn.random_schedule(1, 1.0, rng)
        batch = [(tasks.sample_pure_state(rng), 0.3), (tasks.sample_pure_state(rng), 0.8)]
        h = 8e-3
        g_h = qnn.gradient(schedule, batch, fd_step=h)
        g_h2 = qnn.gradient(schedule, batch, fd_step=h / 2)
        g_h4 = qnn.gradient(schedule, batch, fd_step=h / 4)
        checked = 0
        for i in range(g_h.size):
            coarse = g_h[i] - g_h2[i]
            fine = g_h2[i] - g_h4[i]
            if abs(fine) < 1e-10 or abs(g_h2[i]) < 1e-6:
                continue
            checked += 1
            assert coarse / fine == pytest.approx(4.0, rel=0.25)
        assert checked >= 2

    def test_rejects_empty_batch_and_bad_step(self):
        schedule = zero_schedule()
        with pytest.raises(ValidationError):
            qnn.gradient(schedule, [])
        batch = [(BASIS_00, 1.0)]
        for step in (0.0, -1e-3, 2e-2):
            with pytest.raises(ValidationError):
                qnn.gradient(schedule, batch, fd_step=step)


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

class TestTrain:
    def test_xnor_converges_under_the_squared_correlation(self):
        pairs, readout = tasks.gate_encode_qnn(tasks.gate_dataset("XNOR"))
        schedule = qnn.random_schedule(4, 1.0, np.random.default_rng(1))
        config = qnn.QnnConfig(learning_rate=20.0, max_epochs=500, seed=1)
        result = qnn.train(pairs, config, schedule, readout=readout)
        assert result.converged
        assert result.rms_history[-1] <= 0.01

    def test_already_solved_task_stops_after_one_epoch(self):
        pairs, readout = tasks.gate_encode_qnn(tasks.gate_dataset("AND"))
        config = qnn.QnnConfig(learning_rate=1.0, max_epochs=50)
        result = qnn.train(pairs, config, zero_schedule(), readout=readout)
        assert result.converged and result.epochs_used == 1

    def test_training_is_deterministic(self):
        pairs, readout = tasks.gate_encode_qnn(tasks.gate_dataset("XOR"))
        config = qnn.QnnConfig(learning_rate=20.0, max_epochs=40, seed=2)
        runs = []
        for _ in range(2):
            schedule = qnn.random_schedule(4, 1.0, np.random.default_rng(2))
            runs.append(qnn.train(pairs, config, schedule, readout=readout))
        assert runs[0].rms_history == runs[1].rms_history
        assert np.array_equal(
            runs[0].schedule.as_array(), runs[1].schedule.as_array()
        )

    def test_witness_training_reaches_the_exact_family(self):
        # A single slice can express the witness exactly, so a seed known to
        # land in the right basin drives the test error far below the train
        # threshold.
        train_pairs = [
            tasks.witness_encode_qnn(p) for p in tasks.witness_dataset(4, seed=0)
        ]
        schedule = qnn.random_schedule(1, 1.5, np.random.default_rng(6))
        config = qnn.QnnConfig(learning_rate=8.0, max_epochs=2000, seed=6)
        result = qnn.train(train_pairs, config, schedule)
        assert result.converged
        test_pairs = tasks.witness_testset(25, seed=0)
        outs = qnn.batch_outputs(
            qnn.states_to_rhos([p.state for p in test_pairs]), result.schedule
        )
        targets = [p.target for p in test_pairs]
        rms = float(np.sqrt(np.mean((outs - np.array(targets)) ** 2)))
        assert rms <= 0.05

    def test_rejects_empty_trainset(self):
        config = qnn.QnnConfig(learning_rate=1.0, max_epochs=10)
        with pytest.raises(ValidationError):
            qnn.train([], config, zero_schedule())


# ---------------------------------------------------------------------------
# Config and readout validation
# ---------------------------------------------------------------------------

class TestValidation:
    def test_config_rejects_bad_fields(self):
        with pytest.raises(ValidationError):
            qnn.QnnConfig(learning_rate=0.0, max_epochs=10)
        with pytest.raises(ValidationError):
            qnn.QnnConfig(learning_rate=1.0, max_epochs=0)
        with pytest.raises(ValidationError):
            qnn.QnnConfig(learning_rate=1.0, max_epochs=10, rms_target=1.5)
        with pytest.raises(ValidationError):
            qnn.QnnConfig(learning_rate=1.0, max_epochs=10, fd_step=0.5)

    def test_readout_requires_hermitian_observable(self):
        skew = np.zeros((4, 4), dtype=complex)
        skew[0, 1] = 1.0
        with pytest.raises(ValidationError):
            qnn.Readout(skew)

    def test_basis_projector_rejects_out_of_range_index(self):
        with pytest.raises(ValidationError):
            qnn.basis_projector(4)
