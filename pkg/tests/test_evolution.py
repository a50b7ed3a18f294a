import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teleportsim.evolution import (EvolutionConfig, NoiseModel,
                                   dephasing_kraus, dephasing_mask,
                                   dissipative_step, evolve, hamming_matrix,
                                   unitary_step)
from teleportsim.gates import rz_gate, segmentize, xx_gate
from teleportsim.tensor_core import DensityMatrix, embed


def random_density(rng, n):
    d = 2 ** n
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a @ a.conj().T
    return DensityMatrix(m / np.trace(m), n)


def kraus_oracle(rho, gamma, dt, n, order=None):
    """Explicit per-qubit Kraus conjugation, the slow reference path."""
    pair = dephasing_kraus(gamma, dt)
    m = rho.copy()
    for q in order or range(1, n + 1):
        k1 = embed(pair.k1, (q,), n)
        k2 = embed(pair.k2, (q,), n)
        m = k1 @ m @ k1.conj().T + k2 @ m @ k2.conj().T
    return m


def test_kraus_pair_values():
    pair = dephasing_kraus(0.0, 0.01)
    assert np.allclose(pair.k1, np.eye(2))
    assert np.allclose(pair.k2, np.zeros((2, 2)))
    pair = dephasing_kraus(0.06, 0.01)
    decay = np.exp(-0.06 * 0.01)
    assert np.allclose(pair.k1, np.diag([decay, 1]))
    assert np.allclose(pair.k2, np.diag([np.sqrt(1 - decay ** 2), 0]))


def test_kraus_completeness():
    pair = dephasing_kraus(0.06, 0.01)
    total = pair.k1.conj().T @ pair.k1 + pair.k2.conj().T @ pair.k2
    assert np.max(np.abs(total - np.eye(2))) < 1e-14


def test_kraus_rejects_bad_args():
    with pytest.raises(ValueError):
        dephasing_kraus(-0.1, 0.01)
    with pytest.raises(ValueError):
        dephasing_kraus(0.1, 0.0)


def test_repeated_kraus_gives_exponential_coherence_decay():
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    rho = np.outer(plus, plus.conj())
    gamma, dt, steps = 0.06, 0.01, 100
    for _ in range(steps):
        rho = kraus_oracle(rho, gamma, dt, 1)
    assert abs(rho[0, 1]) == pytest.approx(0.5 * np.exp(-0.06), abs=1e-14)


def test_dissipative_step_matches_kraus_oracle():
    rng = np.random.default_rng(7)
    rho = random_density(rng, 3)
    noise = NoiseModel(0.05, 3)
    fast = dissipative_step(rho, noise, 0.02).matrix
    slow = kraus_oracle(rho.matrix, 0.05, 0.02, 3)
    assert np.max(np.abs(fast - slow)) < 1e-14


def test_dissipative_step_kraus_order_irrelevant():
    rng = np.random.default_rng(8)
    rho = random_density(rng, 3).matrix
    a = kraus_oracle(rho, 0.05, 0.02, 3, order=(1, 2, 3))
    b = kraus_oracle(rho, 0.05, 0.02, 3, order=(3, 1, 2))
    assert np.max(np.abs(a - b)) < 1e-14


def test_dissipative_step_fixes_diagonal():
    diag = DensityMatrix(np.diag([0.5, 0.25, 0.125, 0.125]).astype(complex), 2)
    out = dissipative_step(diag, NoiseModel(0.06, 2), 0.01)
    assert np.max(np.abs(out.matrix - diag.matrix)) < 1e-15


def test_dissipative_step_gamma_zero_is_identity():
    rng = np.random.default_rng(9)
    rho = random_density(rng, 2)
    out = dissipative_step(rho, NoiseModel(0.0, 2), 0.01)
    assert np.array_equal(out.matrix, rho.matrix)


def test_dissipative_step_preserves_trace_and_populations():
    rng = np.random.default_rng(10)
    rho = random_density(rng, 3)
    out = dissipative_step(rho, NoiseModel(0.06, 3), 0.01)
    assert abs(out.trace() - 1) < 1e-12
    assert np.allclose(np.diag(out.matrix), np.diag(rho.matrix))


def test_rate_conventions_differ_by_factor_two():
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    rho = DensityMatrix.from_pure(plus)
    kraus = dissipative_step(rho, NoiseModel(0.06, 1, "kraus"), 1.0)
    lind = dissipative_step(rho, NoiseModel(0.06, 1, "lindblad"), 1.0)
    assert abs(kraus.matrix[0, 1]) == pytest.approx(0.5 * np.exp(-0.06))
    assert abs(lind.matrix[0, 1]) == pytest.approx(0.5 * np.exp(-0.03))


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(-0.1)
    with pytest.raises(ValueError):
        NoiseModel(0.1, 7, "other")
    n = NoiseModel(0.1)
    j = n.jump_operator()
    assert np.array_equal(j @ j, j)


def test_hamming_matrix_small():
    h = hamming_matrix(2)
    expect = np.array([[0, 1, 1, 2], [1, 0, 2, 1], [1, 2, 0, 1], [2, 1, 1, 0]])
    assert np.array_equal(h, expect)


def test_dephasing_mask_closed_form():
    noise = NoiseModel(0.05, 2)
    mask = dephasing_mask(noise, 0.1)
    assert np.allclose(mask, np.exp(-0.05 * 0.1 * hamming_matrix(2)))


def test_unitary_step_no_segments_is_identity():
    rng = np.random.default_rng(11)
    rho = random_density(rng, 2)
    out = unitary_step(rho, [], 0.01)
    assert np.array_equal(out.matrix, rho.matrix)


def test_unitary_step_rejects_overlapping_sites():
    seg1 = segmentize(xx_gate(0.3), (1, 2), 0.0, 1.0)
    seg2 = segmentize(rz_gate(0.3), (2,), 0.0, 1.0)
    rho = DensityMatrix(np.eye(4) / 4, 2)
    with pytest.raises(ValueError):
        unitary_step(rho, [seg1, seg2], 0.01)


def test_unitary_step_preserves_purity():
    rng = np.random.default_rng(12)
    rho = random_density(rng, 2)
    before = np.real(np.trace(rho.matrix @ rho.matrix))
    seg = segmentize(xx_gate(1.1), (1, 2), 0.0, 1.0)
    out = unitary_step(rho, [seg], 0.01)
    after = np.real(np.trace(out.matrix @ out.matrix))
    assert abs(before - after) < 1e-12


def test_full_segment_reproduces_gate_action():
    seg = segmentize(rz_gate(np.pi / 2), (1,), 0.0, 1.0)
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    rho = DensityMatrix.from_pure(plus)
    out = evolve(rho, [seg], NoiseModel(0.0, 1), EvolutionConfig(0.01), 0.0, 1.0)
    expect = rz_gate(np.pi / 2) @ rho.matrix @ rz_gate(np.pi / 2).conj().T
    assert np.max(np.abs(out.matrix - expect)) < 1e-10


def test_evolve_noiseless_preserves_purity():
    rng = np.random.default_rng(13)
    plus = np.array([1, 1j], dtype=complex) / np.sqrt(2)
    psi = np.kron(plus, np.array([1, 0], dtype=complex))
    rho = DensityMatrix.from_pure(psi)
    segs = [segmentize(xx_gate(0.9), (1, 2), 0.0, 1.0),
            segmentize(rz_gate(0.4), (1,), 1.0, 1.0)]
    out = evolve(rho, segs, NoiseModel(0.0, 2), EvolutionConfig(0.01), 0.0, 2.0)
    assert np.real(np.trace(out.matrix @ out.matrix)) == pytest.approx(1, abs=1e-10)


def test_evolve_empty_schedule_diagonal_fixed_point():
    diag = DensityMatrix(np.diag([0.5, 0.3, 0.1, 0.1]).astype(complex), 2)
    out = evolve(diag, [], NoiseModel(0.06, 2), EvolutionConfig(0.01), 0.0, 1.0)
    assert np.max(np.abs(out.matrix - diag.matrix)) < 1e-14


def test_evolve_rejects_off_grid_times():
    rho = DensityMatrix(np.eye(2) / 2, 1)
    with pytest.raises(ValueError):
        evolve(rho, [], NoiseModel(0.06, 1), EvolutionConfig(0.01), 0.0, 0.005)
    with pytest.raises(ValueError):
        evolve(rho, [], NoiseModel(0.06, 1), EvolutionConfig(0.01), 1.0, 0.5)


def test_evolve_cptp_per_step():
    rng = np.random.default_rng(14)
    rho = random_density(rng, 2)
    segs = [segmentize(xx_gate(0.8), (1, 2), 0.0, 1.0)]
    noise = NoiseModel(0.06, 2)
    cfg = EvolutionConfig(0.01)
    out = evolve(rho, segs, noise, cfg, 0.0, 1.0)
    assert abs(out.trace() - 1) < 1e-12
    out.validate()


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 0.1), st.integers(0, 10 ** 9))
def test_dissipative_step_is_cptp(gamma, seed):
    rho = random_density(np.random.default_rng(seed), 2)
    out = dissipative_step(rho, NoiseModel(gamma, 2), 0.01)
    assert abs(out.trace() - 1) < 1e-12
    out.validate()
