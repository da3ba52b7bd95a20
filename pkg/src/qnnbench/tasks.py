"""Benchmark task definitions: gate tables, Iris ingestion, witness datasets.

Each task knows how to present itself to the three network families. Gates
feed raw bits to the real net, circle-mapped bits to the complex net, and
computational basis states to the quantum net. The quantum gate encodings also
carry the measurement functional the task is read out with: the parity gates
keep the squared-correlation readout, while AND/OR/NAND/NOR use basis-state
projectors, because the squared correlation summed over the four basis inputs
is invariant under any schedule and those four tables are unreachable with it.
"""

import importlib.resources
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import cvnn, qnn
from .errors import DatasetFormatError, DatasetIntegrityError, ValidationError
from .quantum import PureState, eof_pure

BIT_ROWS = ((0, 0), (0, 1), (1, 0), (1, 1))

GATE_TABLES: Dict[str, Tuple[int, int, int, int]] = {
    "AND": (0, 0, 0, 1),
    "NAND": (1, 1, 1, 0),
    "OR": (0, 1, 1, 1),
    "NOR": (1, 0, 0, 0),
    "XOR": (0, 1, 1, 0),
    "XNOR": (1, 0, 0, 1),
}

GATE_NAMES = tuple(GATE_TABLES)

# Gates whose truth table is a parity of the inputs; they stay on the
# correlation readout (QNN) and the doubled-angle target codec (CVNN).
PARITY_GATES = ("XOR", "XNOR")

SPECIES_ORDER = ("setosa", "versicolor", "virginica")

_BASIS_STATES = (
    PureState(1.0, 0.0, 0.0, 0.0),
    PureState(0.0, 1.0, 0.0, 0.0),
    PureState(0.0, 0.0, 1.0, 0.0),
    PureState(0.0, 0.0, 0.0, 1.0),
)

# Projector readouts picking out exactly the basis states a gate maps to 1.
_GATE_READOUTS = {
    "AND": qnn.basis_projector(3),
    "NAND": qnn.basis_projector(0, 1, 2),
    "OR": qnn.basis_projector(1, 2, 3),
    "NOR": qnn.basis_projector(0),
}


@dataclass(frozen=True)
class GateTask:
    name: str
    pairs: Tuple[Tuple[Tuple[int, int], int], ...]

    def __post_init__(self):
        if self.name not in GATE_TABLES:
            raise ValidationError(f"unknown gate {self.name!r}")
        if tuple(bits for bits, _ in self.pairs) != BIT_ROWS:
            raise ValidationError("gate rows must cover 00,01,10,11 in order")
        if any(t not in (0, 1) for _, t in self.pairs):
            raise ValidationError("gate targets must be bits")


def gate_dataset(name: str) -> GateTask:
    if name not in GATE_TABLES:
        raise ValidationError(f"unknown gate {name!r}")
    table = GATE_TABLES[name]
    return GateTask(name, tuple(zip(BIT_ROWS, table)))


def gate_encode_rvnn(task: GateTask):
    return [
        (np.array(bits, dtype=float), np.array([float(t)]))
        for bits, t in task.pairs
    ]


def gate_encode_cvnn(task: GateTask):
    """Returns (pairs, readout). Parity gates get the two-candidate doubled
    angle codec; a single layer cannot separate them on plain targets."""
    periodic = task.name in PARITY_GATES
    pairs = []
    for (b1, b2), t in task.pairs:
        x = np.array([cvnn.map_scalar(b1), cvnn.map_scalar(b2)])
        spec = [cvnn.periodic_candidates(t)] if periodic else [cvnn.map_scalar(t)]
        pairs.append((x, spec))
    readout = cvnn.doubled_angle_readout if periodic else cvnn.unmap
    return pairs, readout


def gate_encode_qnn(task: GateTask):
    """Returns (pairs, readout): bit pair (p,q) becomes the basis state |pq>."""
    pairs = [
        (_BASIS_STATES[2 * p + q], float(t)) for (p, q), t in task.pairs
    ]
    readout = _GATE_READOUTS.get(task.name, qnn.CORRELATION)
    return pairs, readout


# ---------------------------------------------------------------------------
# Iris
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IrisRecord:
    sepal_length: float
    sepal_width: float
    petal_length: float
    petal_width: float
    species: str

    def features(self) -> np.ndarray:
        return np.array(
            [self.sepal_length, self.sepal_width, self.petal_length, self.petal_width]
        )


def bundled_iris_path():
    return importlib.resources.files("qnnbench").joinpath("data/iris.csv")


def _parse_species(raw: str, line_no: int) -> str:
    name = raw.strip().lower()
    if name.startswith("iris-"):
        name = name[len("iris-"):]
    if name not in SPECIES_ORDER:
        raise DatasetFormatError(f"unknown species {raw.strip()!r}", line_no)
    return name


def load_iris(path=None) -> List[IrisRecord]:
    """Parse the Iris CSV (header optional) and check the canonical totals."""
    source = bundled_iris_path() if path is None else path
    with open(source, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    records = []
    seen_content = False
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if not seen_content and fields and not _is_number(fields[0]):
            seen_content = True
            continue  # optional header row
        seen_content = True
        if len(fields) != 5:
            raise DatasetFormatError(f"expected 5 fields, got {len(fields)}", line_no)
        try:
            values = [float(f) for f in fields[:4]]
        except ValueError:
            raise DatasetFormatError(f"non-numeric feature in {line!r}", line_no)
        if any(not np.isfinite(v) or v <= 0 for v in values):
            raise DatasetFormatError("features must be positive", line_no)
        species = _parse_species(fields[4], line_no)
        records.append(IrisRecord(*values, species))
    if len(records) != 150:
        raise DatasetIntegrityError(f"expected 150 records, found {len(records)}")
    for species in SPECIES_ORDER:
        count = sum(1 for r in records if r.species == species)
        if count != 50:
            raise DatasetIntegrityError(f"expected 50 {species}, found {count}")
    return records


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def split_stratified(records, n_train: int, seed: int):
    """Seeded per-species split: n_train/3 to train, the complement (capped
    at 25 per species) to test, so shrinking the training set keeps a fixed
    75-record test set whenever enough records remain."""
    if n_train % 3 != 0:
        raise ValidationError("n_train must divide evenly across 3 species")
    if not 3 <= n_train <= 147:
        raise ValidationError("n_train must lie in [3, 147]")
    per_species = n_train // 3
    rng = np.random.default_rng(np.random.SeedSequence((seed, 1)))
    train, test = [], []
    for species in SPECIES_ORDER:
        group = [r for r in records if r.species == species]
        order = rng.permutation(len(group))
        chosen = [group[i] for i in order]
        train.extend(chosen[:per_species])
        test.extend(chosen[per_species : per_species + 25])
    return train, test


def feature_bounds(records):
    """Per-feature (min, max) over the full dataset; frozen before splitting
    so the scaling cannot drift when the training size changes."""
    table = np.array([r.features() for r in records])
    return table.min(axis=0), table.max(axis=0)


def iris_encode_onehot(record: IrisRecord, bounds):
    mins, maxs = bounds
    scaled = (record.features() - mins) / (maxs - mins)
    target = np.zeros(3)
    target[SPECIES_ORDER.index(record.species)] = 1.0
    return scaled, target


def iris_encode_cvnn(record: IrisRecord, bounds):
    scaled, target = iris_encode_onehot(record, bounds)
    x = np.array([cvnn.map_scalar(v) for v in scaled])
    spec = [cvnn.map_scalar(v) for v in target]
    return x, spec


QNN_TARGET_WEIGHTS = (0.01, 0.01, 1.0, 1.8)


def iris_encode_qnn(record: IrisRecord):
    """Features become the amplitudes of a phase-free pure state; the target
    is a fixed quadratic score of the normalized amplitudes that happens to
    order the species setosa < versicolor < virginica."""
    state = PureState.from_amplitudes(record.features(), (0.0, 0.0, 0.0))
    amps2 = np.array([state.a, state.b, state.c, state.d]) ** 2
    target = float(np.dot(QNN_TARGET_WEIGHTS, amps2))
    return state, target


def species_index(record: IrisRecord) -> int:
    return SPECIES_ORDER.index(record.species)


# ---------------------------------------------------------------------------
# Entanglement witness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessPair:
    state: PureState
    target: float

    def __post_init__(self):
        if abs(self.target - eof_pure(self.state)) > 1e-12:
            raise ValidationError("witness target disagrees with the state")


INV_SQRT2 = 1.0 / np.sqrt(2.0)

_CANONICAL_WITNESS_STATES = (
    PureState(1.0, 0.0, 0.0, 0.0),
    PureState(INV_SQRT2, 0.0, 0.0, INV_SQRT2),
    PureState(0.5, 0.5, 0.5, 0.5),
    PureState(np.sqrt(0.8), 0.0, 0.0, np.sqrt(0.2)),
)


def sample_pure_state(rng, zero_phases: bool = False) -> PureState:
    """Amplitudes are the absolute values of a 4-dimensional standard normal,
    normalized; phases are uniform turns unless suppressed."""
    rng = np.random.default_rng(rng)
    amps = np.abs(rng.standard_normal(4))
    if zero_phases:
        phases = (0.0, 0.0, 0.0)
    else:
        phases = tuple(rng.uniform(0.0, 2.0 * np.pi, 3))
    return PureState.from_amplitudes(amps, phases)


def witness_dataset(n: int, seed: int) -> List[WitnessPair]:
    """The canonical quartet (unentangled, Bell, product superposition,
    partially entangled), padded with seeded zero-phase samples beyond 4."""
    if n < 1:
        raise ValidationError("need at least one witness pair")
    states = list(_CANONICAL_WITNESS_STATES[:n])
    rng = np.random.default_rng(np.random.SeedSequence((seed, 2)))
    while len(states) < n:
        states.append(sample_pure_state(rng, zero_phases=True))
    return [WitnessPair(s, eof_pure(s)) for s in states]


def witness_testset(n: int, seed: int) -> List[WitnessPair]:
    rng = np.random.default_rng(np.random.SeedSequence((seed, 3)))
    states = [sample_pure_state(rng, zero_phases=True) for _ in range(n)]
    return [WitnessPair(s, eof_pure(s)) for s in states]


def witness_encode_rvnn(pair: WitnessPair):
    """The 16 density-matrix entries, flattened; real parts only, which loses
    nothing here because witness states carry no phases."""
    from .quantum import pure_to_density

    entries = pure_to_density(pair.state).entries.real.reshape(-1)
    return entries, np.array([pair.target])


def witness_encode_cvnn(pair: WitnessPair):
    """Zero-phase pure-state entries all lie in [0, 1], so each entry rides
    the unit circle through the scalar mapping; a raw complex encoding would
    put sparse states' zero entries at the origin, where the inverse-signal
    rule cannot update."""
    entries, target = witness_encode_rvnn(pair)
    x = np.array([cvnn.map_scalar(min(1.0, max(0.0, v))) for v in entries])
    spec = [cvnn.map_scalar(float(target[0]))]
    return x, spec


def witness_encode_qnn(pair: WitnessPair):
    return pair.state, pair.target
