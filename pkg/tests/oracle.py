"""Independent noiseless reference implementation used only by the tests.

State-vector based, with gates applied as exact closed-form matrices via
tensordot (no matrix exponentials, no Trotter stepping), so it shares no
numerics with the package under test.
"""

import numpy as np

N = 7


def apply_gate(psi: np.ndarray, gate: np.ndarray, sites) -> np.ndarray:
    """Apply a k-site gate to a 7-qubit state vector (qubit 1 = MSB)."""
    k = len(sites)
    axes = [s - 1 for s in sites]
    t = psi.reshape((2,) * N)
    g = np.asarray(gate, dtype=complex).reshape((2,) * (2 * k))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), axes))
    t = np.moveaxis(t, range(k), axes)
    return t.reshape(-1)


def xx(phi):
    m = np.cos(phi / 2) * np.eye(4, dtype=complex)
    anti = np.fliplr(np.eye(4, dtype=complex))
    return m + 1j * np.sin(phi / 2) * anti


def rz(phi):
    return np.diag([np.exp(1j * phi / 2), np.exp(-1j * phi / 2)])


def cnot():
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )


def had():
    return 1j / np.sqrt(2) * np.array([[1, 1], [1, -1]], dtype=complex)


def pswap(c):
    """exp[c * ln SWAP]: the core S satisfies S^2 = 2S, so the exponential
    closes as I + (e^{i pi c} - 1)/2 * S."""
    s = np.array([[0, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]],
                 dtype=complex)
    return np.eye(4, dtype=complex) + (np.exp(1j * np.pi * c) - 1) / 2 * s


def gate_sequence(kind: str, alpha: float):
    """Time-ordered (gate, sites) list for one protocol, phases 1-3."""
    seq = [(xx(np.pi / 2), (2, 5)), (xx(np.pi / 2), (3, 4)),
           (xx(np.pi / 2), (6, 7)),
           (rz(np.pi / 2), (2,)), (rz(np.pi / 2), (3,)), (rz(np.pi / 2), (6,))]
    if kind == "scrambling":
        a = alpha * np.pi / 2
        pairs = ((1, 2), (2, 3), (1, 3))
        for rz_sign in (-1, 1):
            for p in pairs:
                seq.append((xx(-np.pi / 2), p))
                seq.append((xx(np.pi / 2), (7 - p[0], 7 - p[1])))
            for q in (1, 2, 3):
                seq.append((rz(rz_sign * a), (q,)))
                seq.append((rz(-rz_sign * a), (7 - q,)))
    else:
        seq += [(pswap(alpha), (1, 2)), (pswap(-alpha), (6, 5)),
                (pswap(alpha), (2, 3)), (pswap(-alpha), (5, 4))]
    return seq


def initial_vector(phi2: np.ndarray) -> np.ndarray:
    vec = np.asarray(phi2, dtype=complex)
    for _ in range(N - 1):
        vec = np.kron(vec, np.array([1, 0], dtype=complex))
    return vec


def run(kind: str, alpha: float, phi2: np.ndarray,
        pair: tuple[int, int] = (3, 4)):
    """Noiseless protocol; returns dict of checkpoint vectors and the
    heralding probability."""
    psi = initial_vector(phi2)
    seq = gate_sequence(kind, alpha)
    # phase 1 = first 6 gates (Bell-pair creation)
    for g, s in seq[:6]:
        psi = apply_gate(psi, g, s)
    psi_t1 = psi.copy()
    for g, s in seq[6:]:
        psi = apply_gate(psi, g, s)
    psi_t2 = psi.copy()
    psi = apply_gate(psi, cnot(), pair)
    psi = apply_gate(psi, had(), (pair[0],))
    psi_t3 = psi.copy()
    idx = np.arange(2 ** N)
    keep = np.ones(2 ** N, dtype=bool)
    for q in pair:
        keep &= ((idx >> (N - q)) & 1) == 0
    proj = np.where(keep, psi, 0)
    prob = float(np.real(np.vdot(proj, proj)))
    post = proj / np.sqrt(prob) if prob > 0 else proj
    return {"t1": psi_t1, "t2": psi_t2, "t3": psi_t3, "post": post,
            "prob": prob}


def pure_log_negativity(psi: np.ndarray, cut: int) -> float:
    """E_N of a pure 7-qubit state across cut (1..cut | cut+1..7):
    2 log2 of the sum of Schmidt coefficients."""
    m = psi.reshape(2 ** cut, 2 ** (N - cut))
    sv = np.linalg.svd(m, compute_uv=False)
    return float(2 * np.log2(np.sum(sv)))


def pure_total_negativity(psi: np.ndarray) -> float:
    return sum(pure_log_negativity(psi, c) for c in range(1, N))
