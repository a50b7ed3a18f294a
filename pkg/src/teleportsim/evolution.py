"""Trotterized Lindblad time stepping.

Each time bin applies a unitary sandwich update followed by a dephasing
channel on every qubit. The dephasing channel is applied in closed form:
conjugating by the per-qubit Kraus pair on all n qubits multiplies the
matrix element rho[a, b] by exp(-r * dt * hamming(a, b)), where r is the
per-step coherence decay rate. This is exact, not an approximation, since
the local Kraus operators are diagonal and commute.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import GateSegment
from .tensor_core import DensityMatrix, embed

TIME_GRID_ATOL = 1e-9

_RATE_FACTOR = {"kraus": 1.0, "lindblad": 0.5}


@dataclass(frozen=True)
class KrausPair:
    """The two single-qubit dephasing Kraus operators for one time bin."""

    k1: np.ndarray
    k2: np.ndarray


def dephasing_kraus(gamma: float, dt: float) -> KrausPair:
    """Kraus pair K1 = diag(e^{-gamma dt}, 1), K2 = diag(sqrt(1-e^{-2 gamma dt}), 0).

    Completeness K1'K1 + K2'K2 = I holds exactly in closed form.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    decay = np.exp(-gamma * dt)
    k1 = np.diag([decay, 1.0]).astype(complex)
    k2 = np.diag([np.sqrt(max(0.0, 1.0 - decay ** 2)), 0.0]).astype(complex)
    return KrausPair(k1, k2)


@dataclass(frozen=True)
class NoiseModel:
    """Uniform per-qubit dephasing with jump operators n_i = (1 + Z_i)/2.

    rate_convention fixes how gamma maps to the coherence decay rate:
    'kraus' gives e^{-gamma t}, 'lindblad' gives e^{-gamma t / 2}.
    """

    gamma: float
    num_qubits: int = 7
    rate_convention: str = "kraus"

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        if self.rate_convention not in _RATE_FACTOR:
            raise ValueError(
                f"rate_convention must be one of {sorted(_RATE_FACTOR)}, "
                f"got {self.rate_convention!r}"
            )

    @property
    def coherence_rate(self) -> float:
        """Decay rate r of single-qubit coherences, rho_01(t) ~ e^{-r t}."""
        return self.gamma * _RATE_FACTOR[self.rate_convention]

    def jump_operator(self) -> np.ndarray:
        """The single-qubit jump operator n = (1 + Z)/2 = diag(1, 0)."""
        return np.diag([1.0, 0.0]).astype(complex)

    def kraus_pair(self, dt: float) -> KrausPair:
        return dephasing_kraus(self.coherence_rate, dt)


@dataclass(frozen=True)
class EvolutionConfig:
    """Trotter step size; segments must begin and end on the step grid."""

    dt: float = 0.01

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    def on_grid(self, t: float) -> bool:
        return abs(t / self.dt - round(t / self.dt)) * self.dt <= TIME_GRID_ATOL

    def steps_between(self, t_from: float, t_to: float) -> int:
        for t in (t_from, t_to):
            if not self.on_grid(t):
                raise ValueError(f"time {t} is not on the dt={self.dt} step grid")
        return round((t_to - t_from) / self.dt)


_HAMMING_CACHE: dict[int, np.ndarray] = {}


def hamming_matrix(n: int) -> np.ndarray:
    """Pairwise Hamming distances between all n-bit basis indices."""
    h = _HAMMING_CACHE.get(n)
    if h is None:
        idx = np.arange(2 ** n)
        h = np.zeros((2 ** n, 2 ** n))
        for b in range(n):
            bit = (idx >> b) & 1
            h += bit[:, None] != bit[None, :]
        _HAMMING_CACHE[n] = h
    return h


def dephasing_mask(noise: NoiseModel, dt: float) -> np.ndarray:
    """Elementwise factor applied to rho by one dissipative step on all qubits."""
    return np.exp(-noise.coherence_rate * dt * hamming_matrix(noise.num_qubits))


def dissipative_step(rho: DensityMatrix, noise: NoiseModel, dt: float) -> DensityMatrix:
    """One dephasing bin on every qubit; populations are left unchanged."""
    if noise.num_qubits != rho.num_qubits:
        raise ValueError(
            f"noise model is for {noise.num_qubits} qubits, state has "
            f"{rho.num_qubits}"
        )
    return DensityMatrix(rho.matrix * dephasing_mask(noise, dt), rho.num_qubits)


def _check_disjoint(segments) -> None:
    seen: set[int] = set()
    for seg in segments:
        overlap = seen & set(seg.sites)
        if overlap:
            raise ValueError(
                f"concurrent segments share qubit(s) {sorted(overlap)}"
            )
        seen |= set(seg.sites)


def slot_unitary(segments: list[GateSegment], dt: float, n: int) -> np.ndarray:
    """Product of the embedded per-segment step unitaries for one time slot."""
    _check_disjoint(segments)
    u = np.eye(2 ** n, dtype=complex)
    for seg in segments:
        u = embed(seg.step_unitary(dt), seg.sites, n) @ u
    return u


def unitary_step(rho: DensityMatrix, segments: list[GateSegment],
                 dt: float) -> DensityMatrix:
    """One unitary bin: rho -> U rho U' with U the product of step unitaries."""
    u = slot_unitary(segments, dt, rho.num_qubits)
    return DensityMatrix(u @ rho.matrix @ u.conj().T, rho.num_qubits)


def _slot_edges(segments, t_from: float, t_to: float) -> list[float]:
    edges = {t_from, t_to}
    for seg in segments:
        for t in (seg.start_time, seg.end_time):
            if t_from + TIME_GRID_ATOL < t < t_to - TIME_GRID_ATOL:
                edges.add(t)
    return sorted(edges)


def evolve_array(rho: np.ndarray, segments, noise: NoiseModel,
                 cfg: EvolutionConfig, t_from: float, t_to: float) -> np.ndarray:
    """Batched raw-array evolution; rho has shape (..., 2^n, 2^n)."""
    if t_from >= t_to:
        raise ValueError(f"need t_from < t_to, got {t_from} >= {t_to}")
    n = noise.num_qubits
    mask = dephasing_mask(noise, cfg.dt) if noise.gamma > 0 else None
    edges = _slot_edges(segments, t_from, t_to)
    for a, b in zip(edges, edges[1:]):
        nsteps = cfg.steps_between(a, b)
        active = [s for s in segments if s.active_at(a)]
        u = slot_unitary(active, cfg.dt, n)
        udag = u.conj().T
        for _ in range(nsteps):
            if active:
                rho = u @ rho @ udag
            if mask is not None:
                rho = rho * mask
    return rho


def evolve(rho: DensityMatrix, schedule, noise: NoiseModel,
           cfg: EvolutionConfig, t_from: float, t_to: float) -> DensityMatrix:
    """Alternate unitary and dissipative bins from t_from to t_to.

    `schedule` is anything with a `segments` attribute, or a plain list of
    GateSegment. Segment boundaries must sit on the dt grid.
    """
    segments = getattr(schedule, "segments", schedule)
    out = evolve_array(rho.matrix, segments, noise, cfg, t_from, t_to)
    return DensityMatrix(out, rho.num_qubits)
