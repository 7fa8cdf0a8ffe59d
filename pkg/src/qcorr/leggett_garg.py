"""Leggett-Garg strings, their macrorealist bounds, and the entropic information deficit."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .circuits import dephase_ttcc, elgi_probabilities, moussa_ttcc
from .densop import binary_entropy, shannon_entropy

MAX_N = 64


@dataclass(frozen=True)
class LgConfig:
    """``n`` equally spaced measurements, ``dt`` apart, of a spin precessing at ``omega``."""

    n: int
    omega: float
    dt: float

    def __post_init__(self):
        if not 3 <= self.n <= MAX_N:
            raise ValueError(f"n must be in 3..{MAX_N}, got {self.n}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def phase(self) -> float:
        return self.omega * self.dt

    @classmethod
    def from_phase(cls, n: int, phase: float) -> "LgConfig":
        """Unit time step, ``omega = phase``."""
        return cls(n, phase, 1.0)


@dataclass(frozen=True)
class LgBounds:
    lower: float
    upper: float


def lg_bounds(n: int) -> LgBounds:
    """Macrorealist bounds: ``n - 2`` above; ``-n`` (odd n) or ``-(n - 2)`` (even n) below."""
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    lower = -n if n % 2 else -(n - 2)
    return LgBounds(float(lower), float(n - 2))


def ttcc_analytic(omega: float, dt: float) -> float:
    return math.cos(omega * dt)


def kn_from_phase(n, phase):
    """``(n - 1) cos(phase) - cos((n - 1) phase)``; broadcasts over arrays."""
    return (n - 1) * np.cos(phase) - np.cos((n - 1) * phase)


def kn_analytic(config: LgConfig) -> float:
    return float(kn_from_phase(config.n, config.phase))


def kn_circuit(config: LgConfig, rho_s=None, t2: float | None = None) -> float:
    """K_n assembled from simulated two-time correlations, optionally with dephasing."""
    times = [k * config.dt for k in range(config.n)]

    def corr(ti, tj):
        if t2 is None:
            return moussa_ttcc(config.omega, ti, tj, rho_s)
        return dephase_ttcc(config.omega, ti, tj, t2, rho_s)

    adjacent = sum(corr(times[k], times[k + 1]) for k in range(config.n - 1))
    return adjacent - corr(times[0], times[-1])


def kn_decay_analytic(n: int, phase: float, dt_over_t2: float) -> float:
    """K_n with every correlation damped by ``exp(-elapsed / t2)``."""
    return (n - 1) * math.cos(phase) * math.exp(-dt_over_t2) - math.cos((n - 1) * phase) * math.exp(
        -(n - 1) * dt_over_t2
    )


def phase_grid(resolution: int) -> np.ndarray:
    """``resolution`` phases covering ``[0, 2 pi)``."""
    if resolution < 2:
        raise ValueError(f"phase resolution must be at least 2, got {resolution}")
    return np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)


def violation_margin(n: int, kn) -> np.ndarray:
    """Signed distance beyond the nearest macrorealist bound; positive means violation."""
    b = lg_bounds(n)
    kn = np.asarray(kn, dtype=float)
    return np.maximum(kn - b.upper, b.lower - kn)


@dataclass(frozen=True, eq=False)
class ViolationMap:
    ns: np.ndarray
    phases: np.ndarray
    kn: np.ndarray
    margin: np.ndarray

    @property
    def violating(self) -> np.ndarray:
        # ties at a bound count as non-violating
        return self.margin > 0

    def rows(self):
        for i, n in enumerate(self.ns):
            b = lg_bounds(int(n))
            for j, ph in enumerate(self.phases):
                yield int(n), float(ph), float(self.kn[i, j]), b.lower, b.upper, float(self.margin[i, j])


def violation_map(n_range, resolution: int = 512) -> ViolationMap:
    ns = np.array(list(n_range), dtype=int)
    phases = phase_grid(resolution)
    kn = kn_from_phase(ns[:, None], phases[None, :])
    margin = np.vstack([violation_margin(int(n), kn[i]) for i, n in enumerate(ns)])
    return ViolationMap(ns, phases, kn, margin)


def kn_extrema(n: int, resolution: int = 512) -> tuple[float, float]:
    """Quantum minimum and maximum of K_n over the phase, grid search plus golden refinement."""
    phases = phase_grid(resolution)
    h = phases[1] - phases[0]
    vals = kn_from_phase(n, phases)
    out = []
    for sign in (1.0, -1.0):
        k = int(np.argmin(sign * vals))
        x0 = phases[k]
        try:
            res = minimize_scalar(lambda x: sign * kn_from_phase(n, x), bracket=(x0 - h, x0, x0 + h),
                                  method="golden", options={"xtol": 1e-12})
            refined = float(res.fun)
        except ValueError:
            refined = math.inf  # no valid bracket; keep the grid value
        out.append(sign * min(refined, sign * float(vals[k])))
    return out[0], out[1]


def macrorealist_kn(n: int, trials: int, rng: np.random.Generator, flip_prob: float | None = None) -> np.ndarray:
    """K_n from predetermined +-1 outcome sequences of a hidden two-state trajectory.

    Each trial draws an initial value and flips it between successive times
    with probability ``flip_prob`` (drawn uniformly per trial when None).
    Returns the per-trial string values; their mean is the ensemble K_n.
    """
    q0 = rng.choice([-1, 1], size=trials)
    p = rng.random(trials) if flip_prob is None else np.full(trials, flip_prob)
    flips = rng.random((trials, n - 1)) < p[:, None]
    steps = np.where(flips, -1, 1)
    q = np.concatenate([q0[:, None], q0[:, None] * np.cumprod(steps, axis=1)], axis=1)
    return (q[:, :-1] * q[:, 1:]).sum(axis=1) - q[:, 0] * q[:, -1]


def conditional_entropy(joint, marginal) -> float:
    """``H(Q_j | Q_i) = H(Q_i, Q_j) - H(Q_i)``; ``marginal`` is the distribution of ``Q_i`` (rows of ``joint``)."""
    joint = np.asarray(joint, dtype=float).reshape(2, 2)
    marginal = np.asarray(marginal, dtype=float).ravel()
    if np.max(np.abs(joint.sum(axis=1) - marginal)) > 1e-9:
        raise ValueError("marginal is inconsistent with the joint table")
    return shannon_entropy(joint.ravel()) - shannon_entropy(marginal)


@dataclass(frozen=True)
class ElgiResult:
    deficit: float
    h_step: float
    h_total: float
    h_adjacent: tuple[float, ...]


def elgi(config: LgConfig, spin: float = 0.5, axis: str = "x", rho_s=None) -> ElgiResult:
    """Information deficit from circuit-extracted single-time and joint probabilities."""
    if spin != 0.5:
        raise ValueError(f"only spin 1/2 is supported, got {spin}")
    tables = elgi_probabilities(config.omega, config.n, config.dt, axis, rho_s)
    n = config.n
    adjacent = tuple(
        conditional_entropy(tables.joint[(k, k + 1)], tables.single[k]) for k in range(n - 1)
    )
    h_total = conditional_entropy(tables.joint[(0, n - 1)], tables.single[0])
    h_step = adjacent[0]
    deficit = ((n - 1) * h_step - h_total) / math.log2(2 * spin + 1)
    return ElgiResult(deficit, h_step, h_total, adjacent)


def elgi_deficit(config: LgConfig, spin: float = 0.5) -> float:
    return elgi(config, spin).deficit


def elgi_deficit_oracle(n: int, phase: float) -> float:
    """Closed form for a maximally mixed spin-1/2: ``h(tau) = H_bin((1 + cos omega tau) / 2)``."""
    hb = lambda x: binary_entropy((1 + math.cos(x)) / 2)  # noqa: E731
    return (n - 1) * hb(phase) - hb((n - 1) * phase)


def markov_deficit(n: int, flip_prob: float, initial=(0.5, 0.5)) -> float:
    """Information deficit of a classical two-state Markov chain.

    Uses the chain's exact single-time and joint tables; with a non-uniform
    initial distribution the adjacent conditional entropies are summed
    individually.
    """
    t = np.array([[1 - flip_prob, flip_prob], [flip_prob, 1 - flip_prob]])
    dist = [np.asarray(initial, dtype=float)]
    for _ in range(n - 1):
        dist.append(dist[-1] @ t)
    adjacent = sum(conditional_entropy(dist[k][:, None] * t, dist[k]) for k in range(n - 1))
    total = conditional_entropy(dist[0][:, None] * np.linalg.matrix_power(t, n - 1), dist[0])
    return adjacent - total


def elgi_theta_sweep(n: int, points: int = 181) -> list[tuple[int, float, float]]:
    """Deficit against ``theta = (n - 1) omega dt`` on ``[0, pi]``, unit time step."""
    rows = []
    for theta in np.linspace(0.0, np.pi, points):
        cfg = LgConfig(n, theta / (n - 1), 1.0)
        rows.append((n, float(theta), elgi(cfg).deficit))
    return rows
