"""Density matrices and the state families used throughout the package."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .densop import (
    I2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    as_matrix,
    eigvalsh,
    hermiticity_error,
    kron,
)

TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9
NORM_TOL = 1e-9


class InvalidStateError(ValueError):
    """A matrix failed one of the density-matrix checks.

    ``check`` names the failing test (``"hermitian"``, ``"trace"``,
    ``"positivity"``, ``"dimension"``) and ``value`` holds the offending
    magnitude.
    """

    def __init__(self, check: str, value: float, message: str):
        super().__init__(message)
        self.check = check
        self.value = value


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite state of 1 to 4 qubits."""

    mat: np.ndarray

    def __post_init__(self):
        try:
            m = np.array(as_matrix(self.mat), dtype=complex)
        except ValueError as exc:
            raise InvalidStateError("dimension", float("nan"), str(exc)) from exc
        d = m.shape[0]
        if d < 2 or d & (d - 1):
            raise InvalidStateError("dimension", d, f"dimension {d} is not 2, 4, 8 or 16")
        herm = hermiticity_error(m)
        if herm > 1e-10:
            raise InvalidStateError("hermitian", herm, f"not Hermitian: max|M - M^dag| = {herm:.3e}")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError("trace", tr, f"trace is {tr:.12g}, expected 1")
        lo = float(eigvalsh(m)[0])
        if lo < -POSITIVITY_TOL:
            raise InvalidStateError("positivity", lo, f"minimum eigenvalue {lo:.3e} is negative")
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def qubits(self) -> int:
        return self.dim.bit_length() - 1

    @cached_property
    def spectrum(self) -> np.ndarray:
        return eigvalsh(self.mat)

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix(qubits={self.qubits})"


def ensure_state(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def _ket(ket) -> np.ndarray:
    v = np.asarray(ket, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"ket norm is {norm:.12g}, expected 1")
    return v


def basis_ket(bits: str) -> np.ndarray:
    """Computational basis ket from a bit string, e.g. ``"01"``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
BELL_KETS = {"psi-": PSI_MINUS, "phi-": PHI_MINUS, "phi+": PHI_PLUS, "psi+": PSI_PLUS}


def pure(ket) -> DensityMatrix:
    v = _ket(ket)
    return DensityMatrix(np.outer(v, v.conj()))


def maximally_mixed(qubits: int) -> DensityMatrix:
    if not 1 <= qubits <= 4:
        raise ValueError(f"qubits must be in 1..4, got {qubits}")
    d = 2**qubits
    return DensityMatrix(np.eye(d, dtype=complex) / d)


def pseudopure(ket, eps: float) -> DensityMatrix:
    """``(1 - eps) * I/d + eps * |ket><ket|`` with ``d`` the ket dimension."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    v = _ket(ket)
    d = v.size
    return DensityMatrix((1 - eps) * np.eye(d) / d + eps * np.outer(v, v.conj()))


def werner(eps: float) -> DensityMatrix:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    return DensityMatrix((1 - eps) / 4 * np.eye(4) + eps * np.outer(PSI_MINUS, PSI_MINUS.conj()))


@dataclass(frozen=True)
class BellDiagonalParams:
    """Correlation triple ``r`` of ``(I + sum_j r_j s_j x s_j) / 4``."""

    r: tuple[float, float, float]

    def __post_init__(self):
        r = tuple(float(x) for x in self.r)
        if len(r) != 3:
            raise ValueError("Bell-diagonal parameters need exactly three components")
        object.__setattr__(self, "r", r)
        lam = self.eigenvalues
        if lam.min() < -1e-9 or lam.max() > 1 + 1e-9:
            raise ValueError(f"Bell-diagonal spectrum {lam} leaves [0, 1]")

    @property
    def eigenvalues(self) -> np.ndarray:
        """Weights on (psi-, phi-, phi+, psi+)."""
        r1, r2, r3 = self.r
        return np.array(
            [
                1 - r1 - r2 - r3,
                1 - r1 + r2 + r3,
                1 + r1 - r2 + r3,
                1 + r1 + r2 - r3,
            ]
        ) / 4

    @classmethod
    def from_weights(cls, lam) -> "BellDiagonalParams":
        """Inverse of ``eigenvalues``: weights on (psi-, phi-, phi+, psi+)."""
        l1, l2, l3, l4 = lam
        return cls((-l1 - l2 + l3 + l4, -l1 + l2 - l3 + l4, -l1 + l2 + l3 - l4))


def bell_diagonal(params) -> DensityMatrix:
    if not isinstance(params, BellDiagonalParams):
        params = BellDiagonalParams(tuple(params))
    m = np.eye(4, dtype=complex)
    for rj, s in zip(params.r, (SIGMA_X, SIGMA_Y, SIGMA_Z)):
        m = m + rj * kron(s, s)
    return DensityMatrix(m / 4)


_SIGMAS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True, eq=False)
class BlochForm:
    """Local Bloch vectors ``x`` (qubit A), ``y`` (qubit B) and correlation matrix ``T``."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def reassemble(self) -> np.ndarray:
        m = np.eye(4, dtype=complex)
        for i, s in enumerate(_SIGMAS):
            m = m + self.x[i] * kron(s, I2) + self.y[i] * kron(I2, s)
            for j, t in enumerate(_SIGMAS):
                m = m + self.T[i, j] * kron(s, t)
        return m / 4

    def swapped(self) -> "BlochForm":
        """Same state with the roles of A and B exchanged."""
        return BlochForm(self.y, self.x, self.T.T)


def bloch_decompose(rho) -> BlochForm:
    rho = ensure_state(rho)
    if rho.qubits != 2:
        raise ValueError(f"Bloch decomposition needs two qubits, got {rho.qubits}")
    m = rho.mat
    x = np.array([np.trace(m @ kron(s, I2)).real for s in _SIGMAS])
    y = np.array([np.trace(m @ kron(I2, s)).real for s in _SIGMAS])
    T = np.array([[np.trace(m @ kron(s, t)).real for t in _SIGMAS] for s in _SIGMAS])
    return BlochForm(x, y, T)


def _nonlocal_rotation(theta: float) -> np.ndarray:
    # real rotation in span{|00>, |psi->}, identity on the complement
    ket00 = basis_ket("00")
    k = np.outer(PSI_MINUS, ket00) - np.outer(ket00, PSI_MINUS)
    p = np.outer(ket00, ket00) + np.outer(PSI_MINUS, PSI_MINUS)
    return np.eye(4) - p + np.cos(theta) * p + np.sin(theta) * k


def werner_family(theta: float, eps: float) -> DensityMatrix:
    """Pseudopure ``|00>`` state rotated by a nonlocal unitary of angle ``theta``.

    ``theta = 0`` leaves the pseudopure state unchanged; odd multiples of
    ``pi/2`` give ``werner(eps)``.
    """
    u = _nonlocal_rotation(theta)
    rho0 = pseudopure(basis_ket("00"), eps).mat
    return DensityMatrix(u @ rho0 @ u.conj().T)


def random_density_matrix(qubits: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-ensemble random state, ``G G^dag / Tr``."""
    d = 2**qubits
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def swap_subsystems(rho) -> DensityMatrix:
    """Exchange the two qubits of a two-qubit state."""
    m = ensure_state(rho).mat
    return DensityMatrix(m.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4))
