"""Dense complex-matrix primitives on multi-qubit Hilbert spaces.

Qubit convention: qubits are numbered 1..n and qubit 1 is the most
significant tensor factor, i.e. basis index b of the 2^n space decodes to
the bit string (q1 q2 ... qn).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-8
PSD_ATOL = 1e-8


class NonHermitianError(ValueError):
    """Raised when an operation requires a Hermitian matrix but got none."""


def _as_sites(sites) -> tuple[int, ...]:
    sites = tuple(int(s) for s in sites)
    if len(set(sites)) != len(sites):
        raise ValueError(f"qubit sites must be unique, got {sites}")
    return sites


def check_sites(sites, n: int) -> tuple[int, ...]:
    """Validate a subset of qubit sites against an n-qubit register."""
    sites = _as_sites(sites)
    for s in sites:
        if not 1 <= s <= n:
            raise ValueError(f"qubit site {s} out of range 1..{n}")
    return sites


@dataclass
class DensityMatrix:
    """An n-qubit density matrix: Hermitian, PSD, unit trace."""

    matrix: np.ndarray
    num_qubits: int

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        d = 2 ** self.num_qubits
        if self.matrix.shape != (d, d):
            raise ValueError(
                f"expected {d}x{d} matrix for {self.num_qubits} qubits, "
                f"got {self.matrix.shape}"
            )

    @classmethod
    def from_pure(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        n = int(round(np.log2(psi.size)))
        if 2 ** n != psi.size:
            raise ValueError(f"state vector length {psi.size} is not a power of 2")
        return cls(np.outer(psi, psi.conj()), n)

    @property
    def dim(self) -> int:
        return 2 ** self.num_qubits

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def validate(self, herm_atol=HERMITICITY_ATOL, trace_atol=TRACE_ATOL,
                 psd_atol=PSD_ATOL) -> None:
        """Check the density-matrix invariants; raise ValueError on violation."""
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T))
        if herm > herm_atol:
            raise NonHermitianError(f"not Hermitian: max deviation {herm:.3e}")
        tr = abs(np.trace(m) - 1.0)
        if tr > trace_atol:
            raise ValueError(f"trace deviates from 1 by {tr:.3e}")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -psd_atol:
            raise ValueError(f"not PSD: min eigenvalue {lo:.3e}")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(np.asarray(a), np.asarray(b))


def embed(op: np.ndarray, sites, n: int) -> np.ndarray:
    """Lift a k-site operator to the full 2^n space.

    The operator acts on the listed sites (in listed order) and as the
    identity elsewhere. Sites need not be contiguous or sorted.
    """
    op = np.asarray(op, dtype=complex)
    sites = check_sites(sites, n)
    k = len(sites)
    if op.shape != (2 ** k, 2 ** k):
        raise ValueError(
            f"operator of shape {op.shape} does not act on {k} site(s)"
        )
    if k == n and sites == tuple(range(1, n + 1)):
        return op.copy()
    rest = [q for q in range(1, n + 1) if q not in sites]
    big = np.kron(op, np.eye(2 ** (n - k))).reshape((2,) * (2 * n))
    # row/col axes are currently ordered (sites..., rest...); permute to 1..n
    current = list(sites) + rest
    perm = [current.index(q) for q in range(1, n + 1)]
    big = big.transpose(perm + [p + n for p in perm])
    return np.ascontiguousarray(big.reshape(2 ** n, 2 ** n))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all qubits not in `keep`."""
    n = rho.num_qubits
    keep = check_sites(keep, n)
    if not keep:
        raise ValueError("keep set must be nonempty")
    keep = tuple(sorted(keep))
    t = rho.matrix.reshape((2,) * (2 * n))
    row = list(range(n))
    # traced-out qubits share their row index in the column slot
    col = [n + q - 1 if q in keep else q - 1 for q in range(1, n + 1)]
    out = [q - 1 for q in keep] + [n + q - 1 for q in keep]
    reduced = np.einsum(t, row + col, out)
    return DensityMatrix(reduced.reshape(2 ** len(keep), 2 ** len(keep)), len(keep))


def partial_transpose(rho: DensityMatrix, subsystem_b) -> np.ndarray:
    """Transpose the indices of subsystem B, leaving A untouched."""
    n = rho.num_qubits
    b = check_sites(subsystem_b, n)
    if not b or len(b) == n:
        raise ValueError("subsystem B must be a nonempty proper subset")
    t = rho.matrix.reshape((2,) * (2 * n))
    perm = list(range(2 * n))
    for q in b:
        perm[q - 1], perm[n + q - 1] = perm[n + q - 1], perm[q - 1]
    return np.ascontiguousarray(t.transpose(perm).reshape(rho.dim, rho.dim))


def hermitian_eigenvalues(m: np.ndarray, herm_atol=HERMITICITY_ATOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending."""
    m = np.asarray(m)
    dev = np.max(np.abs(m - m.conj().T))
    if dev > herm_atol:
        raise NonHermitianError(f"matrix not Hermitian: max deviation {dev:.3e}")
    return np.linalg.eigvalsh(m)
