"""The ten acceptance criteria, each with its tolerance and runtime limit.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
"""

import contextlib
import math
import time

import numpy as np

from qcorr import report as rp
from qcorr.cli import main
from qcorr.contextuality import TSIRELSON, cabello_beta, cabello_operator, noncontextual_assignment_search, qho_chsh_scan
from qcorr.discord import (
    bd_discord_analytic,
    classical_state,
    discord,
    discord_vs_purity_sweep,
    geometric_discord,
    qubit_measurement,
    werner_discord,
)
from qcorr.leggett_garg import (
    LgConfig,
    elgi_deficit,
    elgi_deficit_oracle,
    elgi_theta_sweep,
    kn_analytic,
    kn_circuit,
    kn_extrema,
    lg_bounds,
    macrorealist_kn,
    markov_deficit,
)
from qcorr.observables import pseudo_spin_bell_states
from qcorr.states import (
    BELL_KETS,
    BellDiagonalParams,
    bell_diagonal,
    pure,
    random_density_matrix,
    random_unitary,
    werner,
    werner_family,
)

RESULTS = {}


@contextlib.contextmanager
def criterion(number, title, limit):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        RESULTS[number] = f"FAIL  {number:>2}. {title} ({elapsed:.2f} s): {exc}"
        raise
    RESULTS[number] = f"PASS  {number:>2}. {title} ({elapsed:.2f} s)"


def test_01_mermin_cabello():
    with criterion(1, "Cabello beta = 6, operator identity, visibility model", 5):
        rng = np.random.default_rng(1)
        for _ in range(100):
            assert abs(cabello_beta(random_density_matrix(2, rng)) - 6) <= 1e-9
        assert np.max(np.abs(cabello_operator() - 6 * np.eye(4))) <= 1e-12
        rho = random_density_matrix(2, rng)
        assert abs(cabello_beta(rho, visibility=5.2 / 6) - 5.2) <= 1e-9


def test_02_noncontextual_refutation():
    with criterion(2, "512 assignments, 0 satisfying, max 5 constraints", 1):
        res = noncontextual_assignment_search()
        assert res.total_assignments == 512
        assert res.satisfying == 0
        assert res.max_satisfied == 5


def test_03_pseudo_spin_chsh():
    with criterion(3, "CHSH maximum 2 sqrt 2 on Bell states, never above", 10):
        states = [pure(v) for v in pseudo_spin_bell_states()] + [pure(v) for v in BELL_KETS.values()]
        best = qho_chsh_scan(states, 360)
        assert abs(best.value - TSIRELSON) <= 1e-3
        assert best.value <= TSIRELSON + 1e-6
        rng = np.random.default_rng(3)
        others = [random_density_matrix(2, rng, rank=1) for _ in range(20)]
        assert qho_chsh_scan(others, 360).value <= TSIRELSON + 1e-6


def test_04_lgi_closed_form_vs_circuits():
    with criterion(4, "K_n circuits = closed form, K3/K4 maxima, macrorealist bounds", 30):
        for n in range(3, 9):
            for phase in np.linspace(0, 2 * math.pi, 50):
                cfg = LgConfig(n, phase, 1.0)
                assert abs(kn_circuit(cfg) - kn_analytic(cfg)) <= 1e-9
        assert abs(kn_extrema(3)[1] - 1.5) <= 1e-6
        assert abs(kn_extrema(4)[1] - 2 * math.sqrt(2)) <= 1e-6
        rng = np.random.default_rng(4)
        for n in range(3, 9):
            b = lg_bounds(n)
            vals = macrorealist_kn(n, 100_000, rng)
            assert vals.max() <= b.upper and vals.min() >= b.lower


def test_05_decay():
    with criterion(5, "K3 decays monotonically with dt/t2 and drops below the bound", 5):
        phase, t2 = math.pi / 3, 1.0
        xs = np.linspace(0.01, 3.0, 60)
        k3 = [kn_circuit(LgConfig(3, phase / x, x), t2=t2) for x in xs]
        assert np.all(np.diff(k3) < 0)
        bound = lg_bounds(3).upper
        assert k3[0] > bound and k3[-1] < bound


def test_06_elgi():
    with criterion(6, "ELGI circuit = binary-entropy oracle, Markov >= 0, violation in sweep", 10):
        for n in (3, 4, 5):
            for phase in np.linspace(0.02, math.pi, 25):
                assert abs(elgi_deficit(LgConfig(n, phase, 1.0)) - elgi_deficit_oracle(n, phase)) <= 1e-9
        for n in (3, 4, 6):
            for q in np.linspace(0, 1, 41):
                assert markov_deficit(n, q) >= -1e-9
                assert markov_deficit(n, q, (0.8, 0.2)) >= -1e-9
        assert min(d for _, _, d in elgi_theta_sweep(3, 181)) < 0


def test_07_discord_closed_forms():
    with criterion(7, "numeric discord = Bell-diagonal closed form, Werner limits", 60):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(200):
            params = BellDiagonalParams.from_weights(rng.dirichlet(np.ones(4)))
            worst = max(worst, abs(discord(bell_diagonal(params)).discord - bd_discord_analytic(params)))
        assert worst <= 1e-4, worst
        assert werner_discord(0.0) == 0.0
        assert abs(werner_discord(1.0) - 1.0) <= 1e-12
        assert abs(werner_discord(1e-3) / (1e-6 / math.log(2)) - 1) <= 0.01


def test_08_geometric_discord():
    with criterion(8, "D_G(Werner) = eps^2/2, gap <= 0.028, local-unitary invariance", 10):
        grid = np.linspace(0, 1, 101)
        for eps in grid:
            assert abs(geometric_discord(werner(eps)) - eps**2 / 2) <= 1e-12
        assert max(r.gap for r in discord_vs_purity_sweep(grid)) <= 0.028
        rng = np.random.default_rng(8)
        for _ in range(20):
            rho = random_density_matrix(2, rng)
            g = geometric_discord(rho)
            for _ in range(50):
                u = np.kron(random_unitary(2, rng), random_unitary(2, rng))
                assert abs(geometric_discord(u @ rho.mat @ u.conj().T) - g) <= 1e-9


def test_09_zero_discord():
    with criterion(9, "classical states have zero discord, Werner-family shape", 30):
        rng = np.random.default_rng(9)
        for _ in range(50):
            p = rng.random()
            basis = qubit_measurement(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            rho = classical_state([p, 1 - p], basis, [random_density_matrix(1, rng) for _ in range(2)])
            assert discord(rho).discord <= 1e-5
            assert geometric_discord(rho) <= 1e-9
        eps = 0.3
        values = [discord(werner_family(t, eps)).discord for t in np.linspace(0, math.pi / 2, 51)]
        assert abs(values[0]) <= 1e-6
        assert abs(values[-1] - werner_discord(eps)) <= 1e-4
        assert np.all(np.diff(values) >= -1e-6)


def test_10_figures(tmp_path, capsys):
    with criterion(10, "figures all emits four CSVs with spot values, deterministic", 60):
        for sub in ("a", "b"):
            assert main(["figures", "all", "--out", str(tmp_path / sub), "--seed", "10"]) == 0
        capsys.readouterr()
        for name in rp.FIGURES:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        _, rows = rp.read_csv(tmp_path / "a" / "kstring.csv")
        spot = [r for r in rows if r[0] == 4 and abs(r[1] - math.pi / 4) < 1e-9]
        assert len(spot) == 1 and abs(spot[0][2] - 2 * math.sqrt(2)) <= 1e-9
        _, rows = rp.read_csv(tmp_path / "a" / "discord_purity.csv")
        assert max(r[3] for r in rows) <= 0.028
        _, rows = rp.read_csv(tmp_path / "a" / "elgi.csv")
        assert any(r[1] < 0 for r in rows)
        _, rows = rp.read_csv(tmp_path / "a" / "lgi_decay.csv")
        assert len(rows) > 0
