"""Contextuality tests on two qubits: Mermin-Peres/Cabello, Peres' singlet argument, pseudo-spin CHSH."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .circuits import moussa_row_expectation
from .observables import (
    LINE_SIGNS,
    PauliObservable,
    chsh_correlators,
    chsh_value,
    expectation,
    mermin_square,
    product,
)
from .states import PSI_MINUS, ensure_state, pure

TSIRELSON = 2 * math.sqrt(2)
NONCONTEXTUAL_BOUND = 4.0


def cabello_beta(rho, visibility: float = 1.0) -> float:
    """Signed sum of the six Mermin-square line expectations.

    Each line is measured through the ancilla protocol and scaled by
    ``visibility`` (1 for ideal measurements). Noncontextual models obey
    ``beta <= 4``; quantum mechanics gives 6 for every state.
    """
    rho = ensure_state(rho)
    sq = mermin_square()
    return sum(
        LINE_SIGNS[name] * visibility * moussa_row_expectation(rho, line) for name, line in sq.lines()
    )


def cabello_operator() -> np.ndarray:
    sq = mermin_square()
    return sum(LINE_SIGNS[name] * product(*line) for name, line in sq.lines())


@dataclass(frozen=True)
class AssignmentSearchResult:
    total_assignments: int
    satisfying: int
    witness: tuple[int, ...] | None
    max_satisfied: int


def noncontextual_assignment_search(line_signs: dict | None = None) -> AssignmentSearchResult:
    """Enumerate every +-1 value assignment to the nine square entries.

    An assignment satisfies a line when the product of its three values
    equals the line's sign. ``line_signs`` defaults to the quantum products
    (+1 for all rows and the first two columns, -1 for the last column).
    """
    signs = LINE_SIGNS if line_signs is None else line_signs
    lines = [("r1", (0, 1, 2)), ("r2", (3, 4, 5)), ("r3", (6, 7, 8)),
             ("c1", (0, 3, 6)), ("c2", (1, 4, 7)), ("c3", (2, 5, 8))]
    total = satisfying = best = 0
    witness = None
    for values in itertools.product((1, -1), repeat=9):
        total += 1
        ok = sum(values[a] * values[b] * values[c] == signs[name] for name, (a, b, c) in lines)
        best = max(best, ok)
        if ok == len(lines):
            satisfying += 1
            if witness is None:
                witness = values
    return AssignmentSearchResult(total, satisfying, witness, best)


@dataclass(frozen=True)
class PeresReport:
    xx: float
    yy: float
    zz: float
    xy_yx: float


def peres_singlet_report() -> PeresReport:
    """Singlet correlations behind Peres' contradiction.

    ``xy_yx`` is the expectation of the product ``(s1x s2y)(s1y s2x)``, which
    reduces to ``s1z s2z``.
    """
    rho = pure(PSI_MINUS)
    p = PauliObservable
    return PeresReport(
        xx=expectation(rho, p("XX")),
        yy=expectation(rho, p("YY")),
        zz=expectation(rho, p("ZZ")),
        xy_yx=expectation(rho, product(p("XY"), p("YX"))),
    )


@dataclass(frozen=True)
class ChshScanResult:
    index: int
    beta: float
    eta: float
    value: float


def angle_grid(resolution: int) -> np.ndarray:
    if resolution < 2:
        raise ValueError(f"grid resolution must be at least 2, got {resolution}")
    return np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)


def _refine(f, x0: float, h: float) -> tuple[float, float]:
    # golden-section search on the bracketing grid cell
    try:
        res = minimize_scalar(lambda x: -f(x), bracket=(x0 - h, x0, x0 + h), method="golden",
                              options={"xtol": 1e-10})
    except ValueError:
        # flat or tied neighbourhood: no bracket, keep the grid point
        return x0, f(x0)
    if -res.fun >= f(x0):
        return float(res.x) % (2 * np.pi), float(-res.fun)
    return x0, f(x0)


def chsh_scan(rho, resolution: int = 360) -> tuple[float, float, float]:
    """Grid maximum of the CHSH value over both angles, refined per angle.

    Returns ``(beta, eta, value)``; ``value`` is re-evaluated with
    ``chsh_value`` at the located angles.
    """
    u, v = chsh_correlators(rho)
    grid = angle_grid(resolution)
    fb = u[0] * np.cos(grid) + u[1] * np.sin(grid)
    fe = v[0] * np.cos(grid) + v[1] * np.sin(grid)
    total = fb[:, None] + fe[None, :]
    ib, ie = np.unravel_index(int(np.argmax(total)), total.shape)
    h = grid[1] - grid[0]
    beta, _ = _refine(lambda b: u[0] * np.cos(b) + u[1] * np.sin(b), grid[ib], h)
    eta, _ = _refine(lambda e: v[0] * np.cos(e) + v[1] * np.sin(e), grid[ie], h)
    return beta, eta, chsh_value(rho, beta, eta)


def qho_chsh_scan(states: Sequence, resolution: int = 360) -> ChshScanResult:
    """Best CHSH value over a list of two-qubit states."""
    if not states:
        raise ValueError("need at least one state")
    best = None
    for k, rho in enumerate(states):
        rho = ensure_state(rho)
        if rho.qubits != 2:
            raise ValueError(f"state {k} is not a two-qubit state")
        beta, eta, value = chsh_scan(rho, resolution)
        if best is None or value > best.value:
            best = ChshScanResult(k, beta, eta, value)
    return best
