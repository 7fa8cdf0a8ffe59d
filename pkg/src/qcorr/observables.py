"""Pauli-string observables, the Mermin-Peres square and the pseudo-spin CHSH set."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .densop import (
    I2,
    PAULI,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    as_matrix,
    commutator,
    hermitian_eig,
    kron,
    require_hermitian,
)

COMMUTE_TOL = 1e-12
# signs of the line products: every row and the first two columns give +I
LINE_SIGNS = {"r1": 1, "r2": 1, "r3": 1, "c1": 1, "c2": 1, "c3": -1}


@dataclass(frozen=True)
class PauliObservable:
    """Signed tensor product of single-qubit Paulis; letter ``k`` acts on qubit ``k``."""

    letters: str
    sign: int = 1

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or any(ch not in PAULI for ch in letters):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "PauliObservable":
        """Parse ``"+XZ"``, ``"-IY"`` or an unsigned ``"ZZ"``."""
        text = text.strip()
        sign = 1
        if text[:1] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        return cls(text, sign)

    @property
    def qubits(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        m = reduce(kron, (PAULI[ch] for ch in self.letters))
        return self.sign * m

    def __neg__(self) -> "PauliObservable":
        return PauliObservable(self.letters, -self.sign)

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.letters


def observable_matrix(obs) -> np.ndarray:
    if isinstance(obs, PauliObservable):
        return obs.matrix()
    if isinstance(obs, str):
        return PauliObservable.parse(obs).matrix()
    return as_matrix(obs)


def expectation(rho, obs) -> float:
    """``Tr[rho O]`` for a Hermitian observable; rejects a residual imaginary part above 1e-10."""
    m = getattr(rho, "mat", None)
    if m is None:
        m = as_matrix(rho)
    o = require_hermitian(observable_matrix(obs))
    if o.shape != m.shape:
        raise ValueError(f"dimension mismatch: state {m.shape[0]}, observable {o.shape[0]}")
    val = np.trace(m @ o)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def commutes(a, b, tol: float = COMMUTE_TOL) -> bool:
    a, b = observable_matrix(a), observable_matrix(b)
    return float(np.max(np.abs(commutator(a, b)))) <= tol


def product(*obs) -> np.ndarray:
    """Operator product ``O1 O2 ... Ok`` in the given order."""
    return reduce(np.matmul, (observable_matrix(o) for o in obs))


@dataclass(frozen=True)
class MerminSquare:
    """3x3 grid of two-qubit Pauli observables with commuting rows and columns."""

    grid: tuple[tuple[PauliObservable, ...], ...]

    def rows(self) -> list[tuple[PauliObservable, ...]]:
        return [tuple(r) for r in self.grid]

    def columns(self) -> list[tuple[PauliObservable, ...]]:
        return [tuple(self.grid[i][j] for i in range(3)) for j in range(3)]

    def lines(self) -> list[tuple[str, tuple[PauliObservable, ...]]]:
        """The six contexts labelled r1..r3, c1..c3."""
        out = [(f"r{i + 1}", r) for i, r in enumerate(self.rows())]
        out += [(f"c{j + 1}", c) for j, c in enumerate(self.columns())]
        return out

    def line_product(self, line) -> np.ndarray:
        return product(*line)

    def verify(self) -> None:
        for name, line in self.lines():
            for a in range(3):
                for b in range(a + 1, 3):
                    if not commutes(line[a], line[b]):
                        raise AssertionError(f"{name}: {line[a]} and {line[b]} do not commute")
        for name, line in self.lines():
            sign = LINE_SIGNS[name]
            if np.max(np.abs(self.line_product(line) - sign * np.eye(4))) > COMMUTE_TOL:
                raise AssertionError(f"{name} product is not {sign:+d} * identity")


def mermin_square() -> MerminSquare:
    """The square with rows (ZI, IZ, ZZ), (IX, XI, XX), (ZX, XZ, YY)."""
    p = PauliObservable
    grid = (
        (p("ZI"), p("IZ"), p("ZZ")),
        (p("IX"), p("XI"), p("XX")),
        (p("ZX"), p("XZ"), p("YY")),
    )
    sq = MerminSquare(grid)
    sq.verify()
    return sq


@dataclass(frozen=True, eq=False)
class PseudoSpinSet:
    gamma: tuple[np.ndarray, np.ndarray, np.ndarray]
    gamma_prime: tuple[np.ndarray, np.ndarray, np.ndarray]


def pseudo_spins() -> PseudoSpinSet:
    """Two mutually commuting su(2) copies on a pair of qubits."""
    gamma = (kron(SIGMA_X, I2), kron(SIGMA_Z, SIGMA_Y), -kron(SIGMA_Y, SIGMA_Y))
    gamma_prime = (kron(SIGMA_X, SIGMA_Z), kron(I2, SIGMA_Y), -kron(SIGMA_X, SIGMA_X))
    return PseudoSpinSet(gamma, gamma_prime)


def chsh_observables(beta: float, eta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Dichotomic observables ``(A, B, C, D)`` at measurement angles ``beta`` and ``eta``."""
    ps = pseudo_spins()
    gx, _, gz = ps.gamma
    gxp, _, gzp = ps.gamma_prime
    a = gx
    b = np.cos(beta) * gxp + np.sin(beta) * gzp
    c = gz
    d = np.cos(eta) * gxp + np.sin(eta) * gzp
    return a, b, c, d


def chsh_operator(beta: float, eta: float) -> np.ndarray:
    a, b, c, d = chsh_observables(beta, eta)
    return a @ b + b @ c + c @ d - a @ d


def chsh_value(rho, beta: float, eta: float) -> float:
    """``<AB> + <BC> + <CD> - <AD>``; the noncontextual bound is 2."""
    m = getattr(rho, "mat", rho)
    if np.shape(m) != (4, 4):
        raise ValueError("CHSH value needs a two-qubit state")
    return expectation(m, chsh_operator(beta, eta))


def chsh_correlators(rho) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient vectors ``(u, v)`` with ``I(beta, eta) = u . (cos b, sin b) + v . (cos e, sin e)``.

    Expanding the observables makes the CHSH value separable in the two angles.
    """
    ps = pseudo_spins()
    gx, _, gz = ps.gamma
    gxp, _, gzp = ps.gamma_prime
    e = lambda o: expectation(rho, o)  # noqa: E731
    ax, az = e(gx @ gxp), e(gx @ gzp)
    cx, cz = e(gz @ gxp), e(gz @ gzp)
    return np.array([ax + cx, az + cz]), np.array([cx - ax, cz - az])


def pseudo_spin_bell_states() -> list[np.ndarray]:
    """Joint eigenvectors of the commuting pair ``Gx Gx'`` and ``Gz Gz'``.

    These are maximally correlated in the pseudo-spin factorization; in the
    qubit factorization they happen to be product states.
    """
    ps = pseudo_spins()
    xx = ps.gamma[0] @ ps.gamma_prime[0]
    zz = ps.gamma[2] @ ps.gamma_prime[2]
    # distinct weights split the joint (+-1, +-1) eigenspaces
    vecs = hermitian_eig(xx + 2 * zz).eigenvectors
    return [vecs[:, k].copy() for k in range(4)]


SIGMAS = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
