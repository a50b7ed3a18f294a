"""Observables: teleportation fidelity, purity, logarithmic negativity
(single-cut and summed over all contiguous cuts), entanglement deltas,
and averaging over the six Pauli-eigenstate inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import protocol
from .evolution import EvolutionConfig, NoiseModel, evolve_array
from .protocol import (EncodingKind, InputState, PAULI_EIGENSTATES,
                       PostselectionImpossibleError, Trajectory)
from .tensor_core import (DensityMatrix, hermitian_eigenvalues,
                          partial_trace, partial_transpose)

NEGATIVITY_EIGENVALUE_CUTOFF = 1e-12


def fidelity(rho7: DensityMatrix, phi: InputState) -> float:
    """Overlap <phi| rho7 |phi> of the teleported qubit with the input."""
    if rho7.num_qubits != 1:
        raise ValueError("fidelity expects a single-qubit state")
    v = phi.vector
    return float(np.real(v.conj() @ rho7.matrix @ v))


def purity(rho: DensityMatrix) -> float:
    """Tr rho^2, in [1/d, 1]."""
    m = rho.matrix
    # Tr rho^2 = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(m) ** 2))


def _neg_log(two_n_plus_1: float, log_base: float) -> float:
    if log_base == 2:
        return math.log2(two_n_plus_1)
    return math.log(two_n_plus_1) / math.log(log_base)


def log_negativity(rho: DensityMatrix, subsystem_b, log_base: float = 2) -> float:
    """log(1 + 2N) with N the absolute sum of negative eigenvalues of rho^T_B.

    Eigenvalues smaller than 1e-12 in magnitude are treated as zero.
    """
    ev = hermitian_eigenvalues(partial_transpose(rho, subsystem_b))
    ev = ev[np.abs(ev) >= NEGATIVITY_EIGENVALUE_CUTOFF]
    n = float(np.sum((np.abs(ev) - ev) / 2))
    return _neg_log(1 + 2 * n, log_base)


def total_negativity(rho: DensityMatrix, log_base: float = 2) -> float:
    """Sum of log negativities over the contiguous cuts (1..k | k+1..n)."""
    n = rho.num_qubits
    return sum(
        log_negativity(rho, tuple(range(k + 1, n + 1)), log_base)
        for k in range(1, n)
    )


def pairwise_total_negativity(rho: DensityMatrix, log_base: float = 2) -> float:
    """Alternative accounting: negativities of neighboring two-qubit
    reduced states, summed over the n-1 neighbor pairs."""
    n = rho.num_qubits
    total = 0.0
    for k in range(1, n):
        red = partial_trace(rho, (k, k + 1))
        total += log_negativity(red, (2,), log_base)
    return total


def delta_E(traj: Trajectory, which: str, log_base: float = 2) -> float:
    """Change of the summed cut negativity across a protocol phase.

    which='U': between the t1 and t2 checkpoints (the encode/decode
    unitaries). which='M': between t2 and the renormalized post-projection
    state (the Bell measurement).
    """
    if which == "U":
        return (total_negativity(traj.rho_t2, log_base)
                - total_negativity(traj.rho_t1, log_base))
    if which == "M":
        return (total_negativity(traj.outcome.post_state, log_base)
                - total_negativity(traj.rho_t2, log_base))
    raise ValueError(f"which must be 'U' or 'M', got {which!r}")


@dataclass
class MetricsRecord:
    """Input-averaged observables of one (protocol, alpha, gamma) point."""

    kind: EncodingKind
    alpha: float
    gamma: float
    fidelity_avg: float
    purity_avg: float
    purity_of_mean: float
    neg_cut34: float
    neg_total_t1: float
    neg_total_t2: float
    neg_total_t3: float
    delta_E_U: float
    delta_E_M: float
    success_prob_avg: float
    failed_inputs: list[str] = field(default_factory=list)


def average_over_inputs(kind: EncodingKind, alpha: float, gamma: float,
                        cfg: EvolutionConfig | None = None,
                        rate_convention: str = "kraus",
                        log_base: float = 2,
                        measurement_pair: tuple[int, int] = (3, 4)) -> MetricsRecord:
    """Run all six Pauli-eigenstate inputs and average each observable.

    The six inputs are evolved as one batched array; inputs whose heralded
    outcome is impossible are excluded from the averages and listed in
    failed_inputs.
    """
    cfg = cfg or EvolutionConfig()
    sched = protocol.build_schedule(kind, alpha, measurement_pair)
    noise = NoiseModel(gamma, protocol.NUM_QUBITS, rate_convention)
    batch = np.stack([protocol.initial_state(phi).matrix
                      for phi in PAULI_EIGENSTATES])
    rho1 = evolve_array(batch, sched.segments, noise, cfg, 0.0, sched.t1)
    rho2 = evolve_array(rho1, sched.segments, noise, cfg, sched.t1, sched.t2)
    rho3 = evolve_array(rho2, sched.segments, noise, cfg, sched.t2, sched.t3)

    cut_b = tuple(range(sched.measurement_pair[1], protocol.NUM_QUBITS + 1))
    fids, purs, negs, probs, dus, dms = [], [], [], [], [], []
    post_sum = np.zeros_like(rho3[0])
    failed = []
    for i, phi in enumerate(PAULI_EIGENSTATES):
        try:
            post, prob = protocol.project_pair(rho3[i], sched.measurement_pair)
        except PostselectionImpossibleError:
            failed.append(phi.label)
            continue
        dm_post = DensityMatrix(post, protocol.NUM_QUBITS)
        rho7 = partial_trace(dm_post, (protocol.NUM_QUBITS,))
        fids.append(fidelity(rho7, phi))
        purs.append(purity(dm_post))
        negs.append(log_negativity(dm_post, cut_b, log_base))
        probs.append(prob)
        n1 = total_negativity(DensityMatrix(rho1[i], protocol.NUM_QUBITS), log_base)
        n2 = total_negativity(DensityMatrix(rho2[i], protocol.NUM_QUBITS), log_base)
        n3 = total_negativity(dm_post, log_base)
        dus.append((n1, n2, n3))
        post_sum += post
    if not fids:
        raise PostselectionImpossibleError(
            "heralded outcome impossible for every input state"
        )
    n1a, n2a, n3a = (float(np.mean([d[j] for d in dus])) for j in range(3))
    mean_post = post_sum / len(fids)
    return MetricsRecord(
        kind=kind,
        alpha=alpha,
        gamma=gamma,
        fidelity_avg=float(np.mean(fids)),
        purity_avg=float(np.mean(purs)),
        purity_of_mean=purity(DensityMatrix(mean_post, protocol.NUM_QUBITS)),
        neg_cut34=float(np.mean(negs)),
        neg_total_t1=n1a,
        neg_total_t2=n2a,
        neg_total_t3=n3a,
        delta_E_U=n2a - n1a,
        delta_E_M=n3a - n2a,
        success_prob_avg=float(np.mean(probs)),
        failed_inputs=failed,
    )
