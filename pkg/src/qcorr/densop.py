"""Dense complex linear algebra for small registers (dimension <= 16).

Matrices are plain ``numpy.ndarray`` objects of complex dtype. The helpers
here validate shapes, provide a deterministic cyclic Jacobi eigensolver for
Hermitian matrices, partial traces over bipartitions, and entropy
primitives in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

MAX_DIM = 16
HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
CLAMP_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when matrix shapes are inconsistent or too large."""


class NotHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}

for _m in PAULI.values():
    _m.flags.writeable = False


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a square complex matrix of dimension <= 16."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    return a


def dagger(m) -> np.ndarray:
    return np.asarray(m).conj().T


def hermiticity_error(m) -> float:
    a = np.asarray(m)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_error(m) <= tol


def require_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_matrix(m)
    err = hermiticity_error(a)
    if err > tol:
        raise NotHermitianError(f"matrix is not Hermitian: max|M - M^dag| = {err:.3e}")
    return a


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a @ b


def kron(a, b) -> np.ndarray:
    """Kronecker product; the first factor varies slowest."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise DimensionError(
            f"kron result dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)


def kron_all(*factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = kron(out, f)
    return out


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def operator_on(op, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """Embed ``op`` acting on qubits ``targets`` (in that order) into ``n_qubits``.

    Qubit 0 is the leftmost tensor factor.
    """
    op = np.asarray(op, dtype=complex)
    k = len(targets)
    if op.shape != (2**k, 2**k):
        raise DimensionError(f"operator shape {op.shape} does not match {k} target qubit(s)")
    if len(set(targets)) != k or any(t < 0 or t >= n_qubits for t in targets):
        raise DimensionError(f"invalid target qubits {tuple(targets)} for {n_qubits} qubits")
    if 2**n_qubits > MAX_DIM:
        raise DimensionError(f"{n_qubits} qubits exceeds dimension {MAX_DIM}")
    rest = [q for q in range(n_qubits) if q not in targets]
    full = np.kron(op, np.eye(2 ** len(rest), dtype=complex))
    # full acts on the ordering targets + rest; permute back to 0..n-1
    order = list(targets) + rest
    t = full.reshape([2] * (2 * n_qubits))
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n_qubits + i for i in inv])
    return t.reshape(2**n_qubits, 2**n_qubits)


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    b = a[p, q]
    mag = abs(b)
    if mag == 0.0:
        return
    phase = b / mag
    theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    if theta == 0.0:
        t = 1.0
    elif abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
    idx = [p, q]
    a[:, idx] = a[:, idx] @ g
    a[idx, :] = g.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, idx] = v[:, idx] @ g


def hermitian_eig(m) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Eigenvalues are returned ascending with matching eigenvector columns.
    Raises ``NotHermitianError`` if ``m`` is not Hermitian within 1e-10 and
    ``ConvergenceError`` after 100 sweeps without convergence.
    """
    a = require_hermitian(m).copy()
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    offdiag = ~np.eye(n, dtype=bool)
    scale = np.linalg.norm(a)
    threshold = JACOBI_TOL * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a[offdiag])
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q)
    else:
        raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def eigvalsh(m) -> np.ndarray:
    return hermitian_eig(m).eigenvalues


def partial_trace(m, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Reduce a bipartite operator on ``dims = (dA, dB)`` to subsystem ``keep`` (0 or 1)."""
    a = as_matrix(m)
    da, db = dims
    if da < 1 or db < 1 or da * db != a.shape[0]:
        raise DimensionError(f"dims {dims} inconsistent with matrix dimension {a.shape[0]}")
    if keep not in (0, 1):
        raise ValueError(f"keep must be 0 or 1, got {keep}")
    t = a.reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def shannon_entropy(p) -> float:
    """Shannon entropy in bits with 0 log 0 = 0.

    Entries down to -1e-12 are treated as numerical noise and clamped; the
    vector is renormalized after clamping.
    """
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("empty probability vector")
    if np.any(p < -1e-12):
        raise ValueError(f"negative probability {p.min():.3e}")
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    p = np.clip(p, 0.0, 1.0)
    p = p / p.sum()
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)) + 0.0)


def clamp_spectrum(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if np.any(w < -CLAMP_TOL):
        raise ValueError(f"eigenvalue {w.min():.3e} is below -{CLAMP_TOL:g}")
    return np.where(w < 0, 0.0, w)


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits; accepts a ``DensityMatrix`` or an array."""
    mat = getattr(rho, "mat", rho)
    w = clamp_spectrum(eigvalsh(mat))
    return shannon_entropy(w / w.sum())


def binary_entropy(p: float) -> float:
    return shannon_entropy([p, 1.0 - p])


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Complete set of orthogonal projectors."""

    projectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        projs = tuple(as_matrix(p) for p in self.projectors)
        if not projs:
            raise ValueError("measurement needs at least one projector")
        d = projs[0].shape[0]
        for i, p in enumerate(projs):
            if p.shape[0] != d:
                raise DimensionError("projectors have different dimensions")
            if np.max(np.abs(p @ p - p)) > HERMITIAN_TOL or not is_hermitian(p):
                raise ValueError(f"projector {i} is not a Hermitian idempotent")
            for j in range(i):
                if np.max(np.abs(p @ projs[j])) > HERMITIAN_TOL:
                    raise ValueError(f"projectors {j} and {i} are not orthogonal")
        if np.max(np.abs(sum(projs) - np.eye(d))) > HERMITIAN_TOL:
            raise ValueError("projectors do not sum to identity")
        for p in projs:
            p.flags.writeable = False
        object.__setattr__(self, "projectors", projs)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @classmethod
    def computational(cls, dim: int = 2) -> "ProjectiveMeasurement":
        eye = np.eye(dim, dtype=complex)
        return cls(tuple(np.outer(eye[i], eye[i]) for i in range(dim)))

    @classmethod
    def from_basis(cls, vectors) -> "ProjectiveMeasurement":
        return cls(tuple(np.outer(v, np.conj(v)) for v in vectors))
