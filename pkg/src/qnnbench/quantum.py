"""Two-qubit state algebra.

Pure states, density matrices, Hamiltonian construction, piecewise-constant
time propagation and the measurement functionals used as network readouts.
All operations are pure functions; hbar = 1 throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# Pauli operators; qubit A is the left tensor factor, basis order
# |00>, |01>, |10>, |11>.
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
IDENTITY_2 = np.eye(2)

X_A = np.kron(PAULI_X, IDENTITY_2)
X_B = np.kron(IDENTITY_2, PAULI_X)
Z_A = np.kron(PAULI_Z, IDENTITY_2)
Z_B = np.kron(IDENTITY_2, PAULI_Z)
ZZ = np.kron(PAULI_Z, PAULI_Z)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
NORM_TOL = 1e-9

DEFAULT_SLICE_COUNT = 4
DEFAULT_TOTAL_TIME = 1.0


@dataclass(frozen=True)
class PureState:
    """Two-qubit pure state with nonnegative amplitudes and explicit phases.

    The state vector is (a, b e^{i theta1}, c e^{i theta2}, d e^{i theta3});
    amplitudes carry the magnitudes, phases carry all sign information.
    """

    a: float
    b: float
    c: float
    d: float
    theta1: float = 0.0
    theta2: float = 0.0
    theta3: float = 0.0

    def __post_init__(self):
        amps = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in amps + self.phases()):
            raise ValidationError("pure state has non-finite components")
        if any(v < 0 for v in amps):
            raise ValidationError("amplitudes must be nonnegative")
        norm_sq = sum(v * v for v in amps)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValidationError(
                f"state not normalized: |amplitudes|^2 = {norm_sq!r}"
            )

    def phases(self):
        return (self.theta1, self.theta2, self.theta3)

    @classmethod
    def from_amplitudes(cls, raw, phases=(0.0, 0.0, 0.0)):
        """Normalize a raw nonnegative 4-vector into a PureState."""
        raw = np.asarray(raw, dtype=float)
        norm = float(np.linalg.norm(raw))
        if norm == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        a, b, c, d = (raw / norm).tolist()
        return cls(a, b, c, d, *phases)

    def ket(self):
        """Complex state vector in the |00>,|01>,|10>,|11> basis."""
        return np.array(
            [
                self.a,
                self.b * np.exp(1j * self.theta1),
                self.c * np.exp(1j * self.theta2),
                self.d * np.exp(1j * self.theta3),
            ]
        )


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 complex Hermitian unit-trace positive-semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise ValidationError(f"density matrix must be 4x4, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise ValidationError("density matrix trace differs from 1")
        if np.min(np.linalg.eigvalsh(m)) < PSD_TOL:
            raise ValidationError("density matrix has a negative eigenvalue")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    def purity(self):
        return float(np.trace(self.entries @ self.entries).real)


@dataclass(frozen=True)
class SliceParams:
    """Hamiltonian parameters held constant over one time slice.

    k_a, k_b are the tunneling amplitudes, eps_a, eps_b the biases and
    zeta the qubit-qubit coupling.
    """

    k_a: float
    k_b: float
    eps_a: float
    eps_b: float
    zeta: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValidationError("Hamiltonian parameters must be finite")

    def as_tuple(self):
        return (self.k_a, self.k_b, self.eps_a, self.eps_b, self.zeta)


@dataclass(frozen=True)
class HamiltonianSchedule:
    """Piecewise-constant Hamiltonian parameters over equal-length slices."""

    slices: tuple
    total_time: float = DEFAULT_TOTAL_TIME

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))
        if len(self.slices) < 1:
            raise ValidationError("schedule needs at least one slice")
        if not (math.isfinite(self.total_time) and self.total_time > 0):
            raise ValidationError("total_time must be positive")

    @property
    def dt(self):
        return self.total_time / len(self.slices)

    def as_array(self):
        """Flat parameter vector, slice-major, 5 entries per slice."""
        return np.array([v for s in self.slices for v in s.as_tuple()])

    @classmethod
    def from_array(cls, values, total_time=DEFAULT_TOTAL_TIME):
        values = np.asarray(values, dtype=float)
        if values.size == 0 or values.size % 5 != 0:
            raise ValidationError("parameter vector length must be a positive multiple of 5")
        slices = tuple(
            SliceParams(*values[5 * i : 5 * i + 5]) for i in range(values.size // 5)
        )
        return cls(slices, total_time)

    def to_json(self):
        return json.dumps(
            {
                "total_time": self.total_time,
                "slices": [
                    {
                        "K_A": s.k_a,
                        "K_B": s.k_b,
                        "eps_A": s.eps_a,
                        "eps_B": s.eps_b,
                        "zeta": s.zeta,
                    }
                    for s in self.slices
                ],
            }
        )

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        slices = tuple(
            SliceParams(s["K_A"], s["K_B"], s["eps_A"], s["eps_B"], s["zeta"])
            for s in data["slices"]
        )
        return cls(slices, float(data["total_time"]))


def pure_to_density(state: PureState) -> DensityMatrix:
    """Outer product |psi><psi| of a pure state."""
    psi = state.ket()
    return DensityMatrix(np.outer(psi, psi.conj()))


def build_hamiltonian(params: SliceParams) -> np.ndarray:
    """Two-qubit Hamiltonian with X tunneling, Z bias and ZZ coupling terms.

    Real symmetric by construction (every term is a real Pauli word).
    """
    return (
        params.k_a * X_A
        + params.k_b * X_B
        + params.eps_a * Z_A
        + params.eps_b * Z_B
        + params.zeta * ZZ
    )


def slice_propagator(params: SliceParams, dt: float) -> np.ndarray:
    """Unitary exp(-i H dt) via eigendecomposition of the real symmetric H."""
    if not (math.isfinite(dt) and dt > 0):
        raise ValidationError("dt must be positive")
    evals, evecs = np.linalg.eigh(build_hamiltonian(params))
    return (evecs * np.exp(-1j * dt * evals)) @ evecs.T.conj()


def schedule_propagator(schedule: HamiltonianSchedule) -> np.ndarray:
    """Total propagator, later slices applied on the left."""
    u = np.eye(4, dtype=complex)
    for params in schedule.slices:
        u = slice_propagator(params, schedule.dt) @ u
    return u


def propagate(rho: DensityMatrix, schedule: HamiltonianSchedule) -> DensityMatrix:
    """Evolve a density matrix through the full schedule: U rho U^dagger."""
    u = schedule_propagator(schedule)
    return DensityMatrix(u @ rho.entries @ u.conj().T)


def reference_propagate(
    rho: DensityMatrix, schedule: HamiltonianSchedule, substeps: int = 400
) -> np.ndarray:
    """Slow reference evolution: RK4 on d(rho)/dt = -i[H, rho].

    Deliberately avoids the eigendecomposition route so it can serve as an
    independent cross-check of `propagate`. Returns a bare matrix.
    """
    m = np.array(rho.entries, dtype=complex)
    for params in schedule.slices:
        h = build_hamiltonian(params).astype(complex)
        step = schedule.dt / substeps

        def rate(x):
            return -1j * (h @ x - x @ h)

        for _ in range(substeps):
            k1 = rate(m)
            k2 = rate(m + 0.5 * step * k1)
            k3 = rate(m + 0.5 * step * k2)
            k4 = rate(m + step * k3)
            m = m + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return m


def correlation_squared(rho: DensityMatrix) -> float:
    """Squared two-qubit correlation (Tr(rho Z_A Z_B))^2, in [0, 1]."""
    val = float(np.trace(rho.entries @ ZZ).real)
    return min(1.0, val * val)


def eof_pure(state: PureState) -> float:
    """Closed-form two-qubit pure-state entanglement, in [0, 1].

    Equals the squared concurrence 4 |a d e^{i theta3} - b c e^{i(theta1 +
    theta2)}|^2 of the state, which depends on the phases only through
    theta3 - theta2 - theta1.
    """
    a, b, c, d = state.a, state.b, state.c, state.d
    phase = state.theta3 - state.theta2 - state.theta1
    value = 4 * a * a * d * d + 4 * b * b * c * c - 8 * a * b * c * d * math.cos(phase)
    return min(1.0, max(0.0, value))
