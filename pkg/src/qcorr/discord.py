"""Quantum discord of two-qubit states: numerical maximization, closed forms, geometric discord.

Classical correlation is maximized over rank-1 projective measurements on
one qubit, parametrized by the Bloch direction ``(theta, phi)``. The search
is a uniform grid followed by Nelder-Mead refinement from the best cells;
the located value is a lower bound on the supremum, so numerical discord is
an upper bound on the true discord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import xlogy

from .densop import (
    ProjectiveMeasurement,
    eigvalsh,
    operator_on,
    partial_trace,
    von_neumann_entropy,
)
from .states import (
    BellDiagonalParams,
    DensityMatrix,
    bloch_decompose,
    ensure_state,
    swap_subsystems,
    werner,
)

LN2 = math.log(2.0)
GRID_THETA = 64
GRID_PHI = 128
N_STARTS = 5
SIMPLEX_TOL = 1e-7


@dataclass(frozen=True)
class BasisAngles:
    """Measurement along ``+-(sin t cos p, sin t sin p, cos t)``."""

    theta: float
    phi: float

    @property
    def direction(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def measurement(self) -> ProjectiveMeasurement:
        return qubit_measurement(self.theta, self.phi)

    def canonical(self) -> "BasisAngles":
        """Equivalent angles with ``theta`` in ``[0, pi]`` and ``phi`` in ``[0, 2 pi)``."""
        x, y, z = self.direction
        theta = math.acos(max(-1.0, min(1.0, z)))
        phi = math.atan2(y, x) % (2 * math.pi) if math.hypot(x, y) > 1e-15 else 0.0
        return BasisAngles(theta, phi)


def _projector_batch(theta, phi) -> np.ndarray:
    """Projectors ``(I + s n.sigma) / 2`` for s = +1, -1; shape ``(N, 2, 2, 2)``."""
    theta = np.atleast_1d(theta)
    phi = np.atleast_1d(phi)
    nx = np.sin(theta) * np.cos(phi)
    ny = np.sin(theta) * np.sin(phi)
    nz = np.cos(theta)
    out = np.empty(theta.shape + (2, 2, 2), dtype=complex)
    for k, s in enumerate((1.0, -1.0)):
        out[:, k, 0, 0] = (1 + s * nz) / 2
        out[:, k, 1, 1] = (1 - s * nz) / 2
        out[:, k, 0, 1] = s * (nx - 1j * ny) / 2
        out[:, k, 1, 0] = s * (nx + 1j * ny) / 2
    return out


def qubit_measurement(theta: float, phi: float) -> ProjectiveMeasurement:
    projs = _projector_batch(theta, phi)[0]
    return ProjectiveMeasurement((projs[0], projs[1]))


def _entropy_2x2(m: np.ndarray) -> np.ndarray:
    """Entropy in bits of a batch of unit-trace Hermitian 2x2 matrices."""
    a = m[..., 0, 0].real
    d = m[..., 1, 1].real
    b = np.abs(m[..., 0, 1])
    r = np.sqrt(((a - d) / 2) ** 2 + b**2)
    lp = np.clip((a + d) / 2 + r, 0.0, 1.0)
    lm = np.clip((a + d) / 2 - r, 0.0, 1.0)
    return -(xlogy(lp, lp) + xlogy(lm, lm)) / LN2


def _conditional_entropy_batch(rho: np.ndarray, theta, phi) -> np.ndarray:
    """``sum_i p_i S(rho_B | i)`` after measuring qubit A along each direction."""
    r = rho.reshape(2, 2, 2, 2)  # [a, b, a', b']
    projs = _projector_batch(theta, phi)
    # Lueders collapse on A then trace over A: sigma_B = Tr_A[(P x I) rho]
    sig = np.einsum("nkca,abcd->nkbd", projs, r)
    p = np.einsum("nkbb->nk", sig).real
    safe = np.where(p > 1e-15, p, 1.0)
    s = _entropy_2x2(sig / safe[..., None, None])
    return np.sum(np.where(p > 1e-15, p * s, 0.0), axis=1)


def measured_conditional_entropy(rho, measurement: ProjectiveMeasurement) -> float:
    """``sum_i p_i S(rho_B|i)`` via explicit Lueders collapse of qubit A.

    Straightforward matrix route, independent of the batched grid evaluation.
    """
    rho = ensure_state(rho)
    total = 0.0
    for proj in measurement.projectors:
        p_full = operator_on(proj, [0], 2)
        post = p_full @ rho.mat @ p_full
        p = float(np.trace(post).real)
        if p > 1e-15:
            total += p * von_neumann_entropy(partial_trace(post / p, (2, 2), keep=1))
    return total


def mutual_info(rho) -> float:
    """``S(A) + S(B) - S(AB)`` in bits."""
    rho = ensure_state(rho)
    if rho.qubits != 2:
        raise ValueError("mutual information needs a two-qubit state")
    sa = von_neumann_entropy(partial_trace(rho.mat, (2, 2), keep=0))
    sb = von_neumann_entropy(partial_trace(rho.mat, (2, 2), keep=1))
    return sa + sb - von_neumann_entropy(rho.mat)


def _oriented(rho, side: str) -> DensityMatrix:
    rho = ensure_state(rho)
    if rho.qubits != 2:
        raise ValueError("discord needs a two-qubit state")
    if side == "A":
        return rho
    if side == "B":
        return swap_subsystems(rho)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def classical_correlation(
    rho,
    side: str = "A",
    grid: tuple[int, int] = (GRID_THETA, GRID_PHI),
    starts: int = N_STARTS,
    tol: float = SIMPLEX_TOL,
) -> tuple[float, BasisAngles]:
    """Maximal ``S(unmeasured) - sum_i p_i S(unmeasured | i)`` over projective measurements on ``side``.

    Returns the located maximum and the measurement direction achieving it.
    """
    rho = _oriented(rho, side)
    m = rho.mat
    s_b = von_neumann_entropy(partial_trace(m, (2, 2), keep=1))

    thetas = np.linspace(0.0, np.pi, grid[0])
    phis = np.linspace(0.0, 2 * np.pi, grid[1], endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    cond = _conditional_entropy_batch(m, tt.ravel(), pp.ravel())
    # stable sort keeps grid order among ties, so starts are deterministic
    order = np.argsort(cond, kind="stable")[:starts]

    def objective(x):
        return float(_conditional_entropy_batch(m, x[0], x[1])[0])

    best_val = float(cond[order[0]])
    best_x = np.array([tt.ravel()[order[0]], pp.ravel()[order[0]]])
    step = (np.pi / (grid[0] - 1), 2 * np.pi / grid[1])
    for idx in order:
        x0 = np.array([tt.ravel()[idx], pp.ravel()[idx]])
        simplex = np.array([x0, x0 + [step[0], 0.0], x0 + [0.0, step[1]]])
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": tol, "fatol": 1e-15, "maxiter": 4000},
        )
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    angles = BasisAngles(float(best_x[0]), float(best_x[1])).canonical()
    return s_b - best_val, angles


@dataclass(frozen=True)
class DiscordResult:
    mutual_info: float
    classical_corr: float
    discord: float
    argmax: BasisAngles

    def as_dict(self) -> dict:
        return {
            "mutual_info": self.mutual_info,
            "classical_corr": self.classical_corr,
            "discord": self.discord,
            "theta": self.argmax.theta,
            "phi": self.argmax.phi,
        }


def discord(rho, side: str = "A") -> DiscordResult:
    """Discord with measurement on ``side``: ``D(B|A)`` for ``side="A"``, ``D(A|B)`` for ``"B"``."""
    rho = _oriented(rho, side)
    mi = mutual_info(rho)
    j, angles = classical_correlation(rho, "A")
    return DiscordResult(mi, j, mi - j, angles)


def _xlog2x(x):
    return xlogy(x, x) / LN2


def bd_discord_analytic(params) -> float:
    """Closed-form discord of a Bell-diagonal state."""
    if not isinstance(params, BellDiagonalParams):
        params = BellDiagonalParams(tuple(params))
    lam = np.clip(params.eigenvalues, 0.0, None)
    r = max(abs(x) for x in params.r)
    r = min(r, 1.0)
    return float(
        2.0 + np.sum(_xlog2x(lam)) - (xlogy((1 - r) / 2, 1 - r) + xlogy((1 + r) / 2, 1 + r)) / LN2
    )


def werner_discord(eps: float) -> float:
    """Discord of the Werner state, ``~ eps^2 / ln 2`` for small ``eps``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    # ((1-e) log(1-e) + (1+3e) log(1+3e)) / 4 - (1+e) log(1+e) / 2, with log1p for small e
    a = (1 - eps) * math.log1p(-eps) if eps < 1 else 0.0
    b = (1 + 3 * eps) * math.log1p(3 * eps)
    c = (1 + eps) * math.log1p(eps)
    return (a / 4 + b / 4 - c / 2) / LN2


def geometric_discord(rho, side: str = "A") -> float:
    """``(|x|^2 + |T|^2 - eta_max) / 4`` from the Bloch form, measured side first."""
    form = bloch_decompose(ensure_state(rho))
    if side == "B":
        form = form.swapped()
    elif side != "A":
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    x, t = form.x, form.T
    k = np.outer(x, x) + t @ t.T
    eta_max = float(eigvalsh(k)[-1])
    return 0.25 * (float(x @ x) + float(np.sum(t * t)) - eta_max)


def _ball(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v if n == 0 else v * (math.tanh(n) / n)


def _unpack(params: np.ndarray):
    theta, phi = params[0], params[1]
    n = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    p = 1.0 / (1.0 + math.exp(-params[2]))
    return n, p, _ball(params[3:6]), _ball(params[6:9])


def classical_candidate(params: np.ndarray) -> np.ndarray:
    """Matrix of ``p P+ x rho1 + (1 - p) P- x rho2`` for a 9-component parameter vector."""
    n, p, b1, b2 = _unpack(params)
    projs = _projector_batch(params[0], params[1])[0]

    def qubit(b):
        return 0.5 * np.array([[1 + b[2], b[0] - 1j * b[1]], [b[0] + 1j * b[1], 1 - b[2]]])

    return p * np.kron(projs[0], qubit(b1)) + (1 - p) * np.kron(projs[1], qubit(b2))


def _candidate_distance(form, params: np.ndarray) -> float:
    # Hilbert-Schmidt distance in Bloch coordinates: Tr[(rho - chi)^2] = (|dx|^2 + |dy|^2 + |dT|^2) / 4
    n, p, b1, b2 = _unpack(params)
    dx = form.x - (2 * p - 1) * n
    dy = form.y - (p * b1 + (1 - p) * b2)
    dt = form.T - np.outer(n, p * b1 - (1 - p) * b2)
    return 0.25 * (float(dx @ dx) + float(dy @ dy) + float(np.sum(dt * dt)))


def nearest_classical_check(rho, samples: int = 32, seed: int = 0) -> float:
    """Smallest ``Tr[(rho - chi)^2]`` found over classical-quantum states ``chi``.

    ``chi = p P+ x rho1 + (1 - p) P- x rho2`` is searched from ``samples``
    seeded random starts; the result bounds the geometric discord from above.
    """
    form = bloch_decompose(ensure_state(rho))
    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(samples):
        x0 = np.concatenate(
            [[rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), rng.normal()], rng.normal(size=6)]
        )
        res = minimize(lambda x: _candidate_distance(form, x), x0, method="L-BFGS-B",
                       options={"ftol": 1e-15, "gtol": 1e-10})
        best = min(best, float(res.fun))
    return best


@dataclass(frozen=True)
class PuritySweepRow:
    eps: float
    discord: float
    geometric: float
    gap: float


def discord_vs_purity_sweep(eps_grid) -> list[PuritySweepRow]:
    """Werner discord, geometric discord and ``|D - 2 D_G|`` along ``eps_grid``."""
    eps_grid = list(eps_grid)
    if not eps_grid:
        raise ValueError("empty eps grid")
    rows = []
    for eps in eps_grid:
        d = werner_discord(float(eps))
        g = geometric_discord(werner(float(eps)))
        rows.append(PuritySweepRow(float(eps), d, g, abs(d - 2 * g)))
    return rows


def classical_state(probs, basis: ProjectiveMeasurement, conditionals) -> DensityMatrix:
    """``sum_i p_i Pi_i x rho_i`` for a qubit basis on A and qubit states on B."""
    m = sum(p * np.kron(proj, getattr(c, "mat", c)) for p, proj, c in zip(probs, basis.projectors, conditionals))
    return DensityMatrix(m)

