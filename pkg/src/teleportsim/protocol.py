"""Full 7-qubit teleportation schedules, initial states, and the heralded
Bell measurement.

Protocol phases: Bell-pair creation on qubit pairs (2,5), (3,4), (6,7)
during [0, t1]; encoding on qubits 1-3 with the conjugate decoding on
qubits 4-6 during [t1, t2]; measurement-basis rotations (CNOT then HAD)
during [t2, t3]; then projection of the measured pair onto |00>, which
heralds the Bell state (|00> + |11>)/sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import gates
from .evolution import EvolutionConfig, NoiseModel, evolve_array
from .tensor_core import DensityMatrix

NUM_QUBITS = 7
POSTSELECTION_EPS = 1e-12

MEASUREMENT_PAIRS = ((3, 4), (2, 5), (1, 6))


class EncodingKind(Enum):
    SCRAMBLING = "scrambling"
    SWAP = "swap"


class PostselectionImpossibleError(RuntimeError):
    """The heralded outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class InputState:
    """A labeled single-qubit pure state to teleport."""

    label: str
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex)
        if v.shape != (2,):
            raise ValueError("input state must be a single-qubit vector")
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError(f"input state {self.label!r} is not normalized")
        object.__setattr__(self, "vector", v)


_SQ = 1 / np.sqrt(2)
PAULI_EIGENSTATES = (
    InputState("X+", np.array([_SQ, _SQ])),
    InputState("X-", np.array([_SQ, -_SQ])),
    InputState("Y+", np.array([_SQ, 1j * _SQ])),
    InputState("Y-", np.array([_SQ, -1j * _SQ])),
    InputState("Z+", np.array([1.0, 0.0])),
    InputState("Z-", np.array([0.0, 1.0])),
)


@dataclass(frozen=True)
class MeasurementOutcome:
    """Renormalized post-projection state and the heralding probability."""

    post_state: DensityMatrix
    success_probability: float


@dataclass
class ProtocolSchedule:
    """Ordered gate segments plus the protocol checkpoints."""

    kind: EncodingKind
    alpha: float
    segments: list[gates.GateSegment]
    t1: float
    t2: float
    t3: float
    measurement_pair: tuple[int, int] = (3, 4)

    def __post_init__(self):
        if not 0 < self.t1 < self.t2 < self.t3:
            raise ValueError("checkpoints must satisfy 0 < t1 < t2 < t3")
        for seg in self.segments:
            if seg.start_time < -1e-9 or seg.end_time > self.t3 + 1e-9:
                raise ValueError(
                    f"segment on sites {seg.sites} lies outside [0, t3]"
                )
        self._check_no_overlap()

    def _check_no_overlap(self):
        for i, a in enumerate(self.segments):
            for b in self.segments[i + 1:]:
                if not set(a.sites) & set(b.sites):
                    continue
                if (a.start_time < b.end_time - 1e-9
                        and b.start_time < a.end_time - 1e-9):
                    raise ValueError(
                        f"segments on sites {a.sites} and {b.sites} overlap "
                        f"in time"
                    )


def build_schedule(kind: EncodingKind, alpha: float,
                   measurement_pair: tuple[int, int] = (3, 4)) -> ProtocolSchedule:
    """Instantiate the packaged schedule for one protocol at a given alpha.

    measurement_pair retargets the CNOT/HAD rotations (and the subsequent
    projection) to one of the pairs (3,4), (2,5), (1,6).
    """
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    pair = tuple(measurement_pair)
    if pair not in MEASUREMENT_PAIRS:
        raise ValueError(f"measurement pair must be one of {MEASUREMENT_PAIRS}")
    parsed = gates.load_schedule(kind.value)
    segments = []
    for entry in parsed.entries:
        if entry.name == "CNOT":
            entry = gates.ScheduleEntry(entry.name, pair, entry.start,
                                        entry.duration, entry.param)
        elif entry.name == "HAD":
            entry = gates.ScheduleEntry(entry.name, (pair[0],), entry.start,
                                        entry.duration, entry.param)
        segments.append(gates.entry_segment(entry, alpha))
    return ProtocolSchedule(kind, alpha, segments, parsed.t1, parsed.t2,
                            parsed.t3, pair)


def initial_state(phi: InputState) -> DensityMatrix:
    """rho(0) = |phi><phi| on qubit 1, all other qubits in |0>."""
    vec = phi.vector
    rest = np.zeros(2 ** (NUM_QUBITS - 1), dtype=complex)
    rest[0] = 1.0
    return DensityMatrix.from_pure(np.kron(vec, rest))


def _pair_projector_mask(pair: tuple[int, int], n: int = NUM_QUBITS) -> np.ndarray:
    """Boolean basis mask where both qubits of the pair read |0>."""
    idx = np.arange(2 ** n)
    keep = np.ones(2 ** n, dtype=bool)
    for q in pair:
        keep &= ((idx >> (n - q)) & 1) == 0
    return keep


def project_pair(matrix: np.ndarray, pair: tuple[int, int]) -> tuple[np.ndarray, float]:
    """Project onto |00> of the pair; returns (renormalized matrix, probability)."""
    keep = _pair_projector_mask(pair)
    prob = float(np.real(np.sum(matrix[keep, keep])))
    if prob < POSTSELECTION_EPS:
        raise PostselectionImpossibleError(
            f"heralded outcome on pair {pair} has probability {prob:.3e}"
        )
    post = np.zeros_like(matrix)
    block = np.ix_(keep, keep)
    post[block] = matrix[block] / prob
    return post, prob


def bell_measurement(rho: DensityMatrix,
                     pair: tuple[int, int] = (3, 4)) -> MeasurementOutcome:
    """Heralded projection of the (already rotated) pair onto |00>."""
    post, prob = project_pair(rho.matrix, tuple(pair))
    return MeasurementOutcome(DensityMatrix(post, rho.num_qubits), prob)


@dataclass
class Trajectory:
    """Checkpoint states of one protocol run."""

    schedule: ProtocolSchedule
    rho_t1: DensityMatrix
    rho_t2: DensityMatrix
    rho_t3_pre: DensityMatrix
    outcome: MeasurementOutcome
    input_state: InputState


def run_protocol(kind: EncodingKind, alpha: float, gamma: float,
                 phi: InputState, cfg: EvolutionConfig | None = None,
                 rate_convention: str = "kraus",
                 measurement_pair: tuple[int, int] = (3, 4)) -> Trajectory:
    """Evolve one input state through the full protocol; deterministic."""
    cfg = cfg or EvolutionConfig()
    sched = build_schedule(kind, alpha, measurement_pair)
    noise = NoiseModel(gamma, NUM_QUBITS, rate_convention)
    rho = initial_state(phi).matrix
    rho1 = evolve_array(rho, sched.segments, noise, cfg, 0.0, sched.t1)
    rho2 = evolve_array(rho1, sched.segments, noise, cfg, sched.t1, sched.t2)
    rho3 = evolve_array(rho2, sched.segments, noise, cfg, sched.t2, sched.t3)
    outcome = bell_measurement(DensityMatrix(rho3, NUM_QUBITS),
                               sched.measurement_pair)
    return Trajectory(
        sched,
        DensityMatrix(rho1, NUM_QUBITS),
        DensityMatrix(rho2, NUM_QUBITS),
        DensityMatrix(rho3, NUM_QUBITS),
        outcome,
        phi,
    )
