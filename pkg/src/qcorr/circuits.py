"""Gate-level density-matrix simulation of the ancilla-assisted measurement protocols.

Qubit 0 is the leftmost tensor factor. In the two-qubit protocols the
ancilla is qubit 0 and the system is qubit 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .densop import (
    I2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DimensionError,
    ProjectiveMeasurement,
    as_matrix,
    operator_on,
)
from .observables import commutes, observable_matrix
from .states import PLUS, DensityMatrix, ensure_state, maximally_mixed

P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_AXES = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
PROB_FLOOR = 1e-12


def _rotation(axis: str, angle: float) -> np.ndarray:
    return math.cos(angle / 2) * I2 - 1j * math.sin(angle / 2) * _AXES[axis]


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int

    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)

    def kraus(self, n: int) -> list[np.ndarray]:
        u = np.kron(P0, I2) + np.kron(P1, SIGMA_X)
        return [operator_on(u, [self.control, self.target], n)]

    def to_text(self) -> str:
        return f"CNOT {self.control} {self.target}"


@dataclass(frozen=True)
class AntiCNOT:
    """Flips the target when the control is ``|0>``."""

    control: int
    target: int

    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)

    def kraus(self, n: int) -> list[np.ndarray]:
        u = np.kron(P0, SIGMA_X) + np.kron(P1, I2)
        return [operator_on(u, [self.control, self.target], n)]

    def to_text(self) -> str:
        return f"ACNOT {self.control} {self.target}"


@dataclass(frozen=True)
class AxisRotation:
    """``exp(-i angle sigma_axis / 2)`` on one qubit."""

    qubit: int
    axis: str
    angle: float

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(f"axis must be x, y or z, got {self.axis!r}")

    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    def kraus(self, n: int) -> list[np.ndarray]:
        return [operator_on(_rotation(self.axis, self.angle), [self.qubit], n)]

    def to_text(self) -> str:
        return f"R{self.axis.upper()} {self.qubit} {float(self.angle)!r}"


@dataclass(frozen=True)
class FreePrecession:
    """Evolution under ``(omega / 2) sigma_z`` for ``duration``."""

    qubit: int
    omega: float
    duration: float

    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    def kraus(self, n: int) -> list[np.ndarray]:
        phi = self.omega * self.duration / 2
        u = np.diag([np.exp(-1j * phi), np.exp(1j * phi)])
        return [operator_on(u, [self.qubit], n)]

    def to_text(self) -> str:
        return f"FREE {self.qubit} omega={float(self.omega)!r} t={float(self.duration)!r}"


@dataclass(frozen=True)
class Dephase:
    """Phase-flip channel; off-diagonal elements shrink by ``1 - 2 * strength``."""

    qubit: int
    strength: float

    def __post_init__(self):
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError(f"dephasing strength must be in [0, 1], got {self.strength}")

    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    def single_qubit_kraus(self) -> list[np.ndarray]:
        p = self.strength
        return [math.sqrt(1 - p) * I2, math.sqrt(p) * SIGMA_Z]

    def kraus(self, n: int) -> list[np.ndarray]:
        return [operator_on(k, [self.qubit], n) for k in self.single_qubit_kraus()]

    def to_text(self) -> str:
        return f"DEPHASE {self.qubit} {float(self.strength)!r}"


@dataclass(frozen=True, eq=False)
class ControlledU:
    """Applies ``U`` to ``targets`` when ``control`` is ``|1>``."""

    control: int
    targets: tuple[int, ...]
    U: np.ndarray = field(repr=False)

    def __post_init__(self):
        targets = (self.targets,) if isinstance(self.targets, int) else tuple(self.targets)
        u = as_matrix(self.U)
        if u.shape[0] != 2 ** len(targets):
            raise DimensionError(f"U of dimension {u.shape[0]} does not fit {len(targets)} target(s)")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "U", u)

    def qubits(self) -> tuple[int, ...]:
        return (self.control, *self.targets)

    def kraus(self, n: int) -> list[np.ndarray]:
        d = self.U.shape[0]
        u = np.kron(P0, np.eye(d)) + np.kron(P1, self.U)
        return [operator_on(u, [self.control, *self.targets], n)]

    def to_text(self) -> str:
        entries = " ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in self.U.ravel())
        return f"CU {self.control} {','.join(map(str, self.targets))} {entries}"


Gate = Union[CNOT, AntiCNOT, AxisRotation, FreePrecession, Dephase, ControlledU]


@dataclass(frozen=True)
class Circuit:
    qubits: int
    gates: tuple = ()

    def __post_init__(self):
        gates = tuple(self.gates)
        if not 1 <= self.qubits <= 4:
            raise ValueError(f"circuit width must be 1..4 qubits, got {self.qubits}")
        for g in gates:
            bad = [q for q in g.qubits() if not 0 <= q < self.qubits]
            if bad:
                raise IndexError(f"{g.to_text()!r} addresses qubit {bad[0]} of a {self.qubits}-qubit register")
        object.__setattr__(self, "gates", gates)

    def then(self, *gates: Gate) -> "Circuit":
        return Circuit(self.qubits, self.gates + gates)

    def to_text(self) -> str:
        return "\n".join([f"QUBITS {self.qubits}"] + [g.to_text() for g in self.gates]) + "\n"

    @classmethod
    def from_text(cls, text: str, qubits: int | None = None) -> "Circuit":
        gates = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                head, *args = line.split()
                head = head.upper()
                if head == "QUBITS":
                    qubits = int(args[0])
                else:
                    gates.append(_parse_gate(head, args))
            except (ValueError, IndexError, KeyError) as exc:
                raise ValueError(f"line {lineno}: cannot parse {raw!r}: {exc}") from exc
        if qubits is None:
            qubits = 1 + max((q for g in gates for q in g.qubits()), default=0)
        return cls(qubits, tuple(gates))


def _parse_gate(head: str, args: list[str]) -> Gate:
    if head == "CNOT":
        return CNOT(int(args[0]), int(args[1]))
    if head == "ACNOT":
        return AntiCNOT(int(args[0]), int(args[1]))
    if head in ("RX", "RY", "RZ"):
        return AxisRotation(int(args[0]), head[1].lower(), float(args[1]))
    if head == "FREE":
        kw = dict(a.split("=", 1) for a in args[1:])
        return FreePrecession(int(args[0]), float(kw["omega"]), float(kw["t"]))
    if head == "DEPHASE":
        return Dephase(int(args[0]), float(args[1]))
    if head == "CU":
        targets = tuple(int(t) for t in args[1].split(","))
        vals = [float(v) for v in args[2:]]
        d = 2 ** len(targets)
        if len(vals) != 2 * d * d:
            raise ValueError(f"CU needs {2 * d * d} matrix entries, got {len(vals)}")
        u = (np.array(vals[0::2]) + 1j * np.array(vals[1::2])).reshape(d, d)
        return ControlledU(int(args[0]), targets, u)
    raise ValueError(f"unknown gate {head!r}")


def apply_raw(circuit: Circuit, m: np.ndarray) -> np.ndarray:
    n = circuit.qubits
    if m.shape != (2**n, 2**n):
        raise DimensionError(f"state dimension {m.shape[0]} does not match {n}-qubit circuit")
    for g in circuit.gates:
        ks = g.kraus(n)
        m = sum(k @ m @ k.conj().T for k in ks)
    return m


def apply(circuit: Circuit, rho) -> DensityMatrix:
    """Apply the gates in order: unitaries as ``U rho U^dag``, channels as Kraus sums."""
    m = getattr(rho, "mat", None)
    if m is None:
        m = as_matrix(rho)
    return DensityMatrix(apply_raw(circuit, m))


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    basis: ProjectiveMeasurement
    outcome_probs: np.ndarray
    postmeasurement_states: tuple


def measure(rho, basis: ProjectiveMeasurement, targets: Sequence[int] | None = None) -> MeasurementRecord:
    """Lueders measurement of ``basis`` on ``targets`` (all qubits by default)."""
    rho = ensure_state(rho)
    n = rho.qubits
    targets = list(range(n)) if targets is None else list(targets)
    probs, posts = [], []
    for proj in basis.projectors:
        p_full = operator_on(proj, targets, n)
        unnorm = p_full @ rho.mat @ p_full
        p = float(np.trace(unnorm).real)
        probs.append(p)
        posts.append(DensityMatrix(unnorm / p) if p > PROB_FLOOR else None)
    return MeasurementRecord(basis, np.array(probs), tuple(posts))


def _ancilla_plus(rho_s: np.ndarray) -> np.ndarray:
    return np.kron(np.outer(PLUS, PLUS.conj()), rho_s)


def _ancilla_x(m: np.ndarray, n: int) -> float:
    return float(np.trace(m @ operator_on(SIGMA_X, [0], n)).real)


def _system(rho_s, qubits: int = 1) -> np.ndarray:
    if rho_s is None:
        return maximally_mixed(qubits).mat
    rho_s = ensure_state(rho_s)
    if rho_s.qubits != qubits:
        raise ValueError(f"system state must have {qubits} qubit(s), got {rho_s.qubits}")
    return rho_s.mat


def dephase_strength(dt: float, t2: float) -> float:
    """Phase-flip probability giving coherence decay ``exp(-dt / t2)``."""
    if t2 <= 0:
        raise ValueError(f"t2 must be positive, got {t2}")
    if math.isinf(t2):
        return 0.0
    return (1.0 - math.exp(-dt / t2)) / 2.0


def moussa_circuit(omega: float, t_i: float, t_j: float, t2: float | None = None) -> Circuit:
    """Ancilla-controlled sigma_x at ``t_i`` and ``t_j`` with free precession between."""
    if t_j < t_i:
        raise ValueError(f"t_j ({t_j}) must not precede t_i ({t_i})")
    gates: list[Gate] = [
        FreePrecession(1, omega, t_i),
        ControlledU(0, (1,), SIGMA_X),
        FreePrecession(1, omega, t_j - t_i),
    ]
    if t2 is not None:
        gates.append(Dephase(1, dephase_strength(t_j - t_i, t2)))
    gates.append(ControlledU(0, (1,), SIGMA_X))
    return Circuit(2, tuple(gates))


def moussa_ttcc(omega: float, t_i: float, t_j: float, rho_s=None) -> float:
    """Two-time correlation of sigma_x read out as the ancilla's ``<sigma_x>``."""
    m = apply_raw(moussa_circuit(omega, t_i, t_j), _ancilla_plus(_system(rho_s)))
    return _ancilla_x(m, 2)


def dephase_ttcc(omega: float, t_i: float, t_j: float, t2: float, rho_s=None) -> float:
    """Moussa correlation with a dephasing channel acting during the delay.

    Equals ``cos(omega dt) exp(-dt / t2)``.
    """
    m = apply_raw(moussa_circuit(omega, t_i, t_j, t2), _ancilla_plus(_system(rho_s)))
    return _ancilla_x(m, 2)


def dephase_ttcc_analytic(omega: float, dt: float, t2: float) -> float:
    if t2 <= 0:
        raise ValueError(f"t2 must be positive, got {t2}")
    return math.cos(omega * dt) * math.exp(-dt / t2)


def moussa_row_expectation(rho, observables: Sequence) -> float:
    """Product of three commuting observables measured through one ancilla.

    The ancilla (qubit 0, prepared in ``|+>``) controls each observable in
    turn on the two system qubits; its final ``<sigma_x>`` is the expectation
    of the operator product.
    """
    mats = [observable_matrix(o) for o in observables]
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            if not commutes(mats[a], mats[b]):
                raise ValueError(f"observables {a} and {b} do not commute")
    rho = ensure_state(rho)
    if rho.qubits != 2:
        raise ValueError("row expectation needs a two-qubit state")
    circ = Circuit(3, tuple(ControlledU(0, (1, 2), o) for o in mats))
    m = apply_raw(circ, _ancilla_plus(rho.mat))
    return _ancilla_x(m, 3)


def basis_change(axis: str) -> tuple[Gate, ...]:
    """Rotation on the system taking the ``axis`` eigenbasis to the computational basis."""
    if axis == "x":
        return (AxisRotation(1, "y", -math.pi / 2),)
    if axis == "y":
        return (AxisRotation(1, "x", math.pi / 2),)
    if axis == "z":
        return ()
    raise ValueError(f"axis must be x, y or z, got {axis!r}")


def _inverse(gates: tuple[Gate, ...]) -> tuple[Gate, ...]:
    return tuple(AxisRotation(g.qubit, g.axis, -g.angle) for g in reversed(gates))


def inrm_circuit(omega: float, t_i: float, t_j: float, axis: str, anti: bool) -> Circuit:
    """One arm of the negative-result measurement of ``Q(t_i)`` followed by a readout of ``Q(t_j)``.

    The system (qubit 1) controls a flip of the ancilla (qubit 0, starting in
    ``|0>``). In the CNOT arm the ancilla stays in ``|0>`` exactly when
    ``Q(t_i) = +1``; in the anti-CNOT arm, when ``Q(t_i) = -1``. In both arms
    that branch is the one where the gate did nothing to the register.
    """
    if t_j < t_i:
        raise ValueError(f"t_j ({t_j}) must not precede t_i ({t_i})")
    v = basis_change(axis)
    entangler = AntiCNOT(1, 0) if anti else CNOT(1, 0)
    gates = (
        (FreePrecession(1, omega, t_i),)
        + v
        + (entangler,)
        + _inverse(v)
        + (FreePrecession(1, omega, t_j - t_i),)
        + v
    )
    return Circuit(2, gates)


def inrm_joint_probs(omega: float, t_i: float, t_j: float, axis: str = "x", rho_s=None) -> np.ndarray:
    """Joint table ``P[a, b] = P(Q(t_i) = a, Q(t_j) = b)`` with index 0 for +1 and 1 for -1.

    Assembled from the postselected ancilla-``|0>`` subspace of the CNOT arm
    (``a = +1``) and of the anti-CNOT arm (``a = -1``).
    """
    init = np.kron(P0, _system(rho_s))
    table = np.zeros((2, 2))
    for a, anti in ((0, False), (1, True)):
        m = apply_raw(inrm_circuit(omega, t_i, t_j, axis, anti), init)
        diag = np.diag(m).real.reshape(2, 2)  # [ancilla, system]
        p_sub = diag[0].sum()
        if p_sub < PROB_FLOOR:
            raise ValueError(f"postselected subspace for Q(t_i) = {1 - 2 * a:+d} has zero probability")
        table[a] = diag[0]
    return table


def single_time_probs(omega: float, t: float, axis: str = "x", rho_s=None) -> np.ndarray:
    """``P(Q(t) = +1), P(Q(t) = -1)`` by evolving to ``t`` and reading out in the rotated basis."""
    gates = (FreePrecession(0, omega, t),) + tuple(
        AxisRotation(0, g.axis, g.angle) for g in basis_change(axis)
    )
    m = apply_raw(Circuit(1, gates), _system(rho_s))
    return np.diag(m).real.copy()


@dataclass(frozen=True, eq=False)
class ElgiTables:
    """Single-time tables ``single[k]`` and joint tables ``joint[(k, l)]`` for ``t_k = k dt``."""

    n: int
    dt: float
    single: dict
    joint: dict


def elgi_probabilities(omega: float, n: int, dt: float, axis: str = "x", rho_s=None) -> ElgiTables:
    if n < 3:
        raise ValueError(f"need at least three measurement times, got n={n}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    single = {k: single_time_probs(omega, k * dt, axis, rho_s) for k in range(n)}
    joint = {
        (k, l): inrm_joint_probs(omega, k * dt, l * dt, axis, rho_s)
        for k in range(n)
        for l in range(k + 1, n)
    }
    return ElgiTables(n, dt, single, joint)
