import itertools
import math

import numpy as np
import pytest

from qcorr.contextuality import (
    NONCONTEXTUAL_BOUND,
    TSIRELSON,
    angle_grid,
    cabello_beta,
    cabello_operator,
    chsh_scan,
    noncontextual_assignment_search,
    peres_singlet_report,
    qho_chsh_scan,
)
from qcorr.observables import chsh_value, pseudo_spin_bell_states
from qcorr.states import maximally_mixed, pure, random_density_matrix


def test_cabello_examples(rng):
    assert cabello_beta(maximally_mixed(2)) == pytest.approx(6.0, abs=1e-9)
    for _ in range(100):
        assert cabello_beta(random_density_matrix(2, rng)) == pytest.approx(6.0, abs=1e-9)
    assert cabello_beta(maximally_mixed(2), visibility=5.2 / 6) == pytest.approx(5.2, abs=1e-9)
    assert cabello_beta(maximally_mixed(2), visibility=0.8667) == pytest.approx(5.2, abs=1e-3)


def test_cabello_operator_identity():
    assert np.max(np.abs(cabello_operator() - 6 * np.eye(4))) <= 1e-12


def test_assignment_search():
    res = noncontextual_assignment_search()
    assert res.total_assignments == 512
    assert res.satisfying == 0
    assert res.witness is None
    assert res.max_satisfied == 5
    # best noncontextual beta: five lines agree, one disagrees
    assert 5 - 1 == NONCONTEXTUAL_BOUND


def test_assignment_search_relaxed():
    relaxed = {name: 1 for name in ("r1", "r2", "r3", "c1", "c2", "c3")}
    res = noncontextual_assignment_search(relaxed)
    assert res.satisfying >= 1
    assert res.witness == (1,) * 9


def test_assignment_search_against_parity_oracle():
    # an assignment satisfies all six lines only if the product of all line signs is +1,
    # since every entry appears in exactly one row and one column
    for signs in itertools.product((1, -1), repeat=6):
        names = ("r1", "r2", "r3", "c1", "c2", "c3")
        res = noncontextual_assignment_search(dict(zip(names, signs)))
        if math.prod(signs) == -1:
            assert res.satisfying == 0
        else:
            assert res.satisfying == 16


def test_peres_report():
    rep = peres_singlet_report()
    assert rep.xx == pytest.approx(-1.0, abs=1e-15)
    assert rep.yy == pytest.approx(-1.0, abs=1e-15)
    assert rep.zz == pytest.approx(-1.0, abs=1e-15)
    assert rep.xy_yx == pytest.approx(-1.0, abs=1e-15)


def test_angle_grid():
    g = angle_grid(360)
    assert len(g) == 360 and g[0] == 0.0 and g[-1] < 2 * math.pi
    with pytest.raises(ValueError):
        angle_grid(1)


def test_chsh_bell_states_reach_tsirelson():
    states = [pure(v) for v in pseudo_spin_bell_states()]
    best = qho_chsh_scan(states, 360)
    assert best.value == pytest.approx(TSIRELSON, abs=1e-3)
    assert best.value <= TSIRELSON + 1e-6
    assert chsh_value(states[best.index], best.beta, best.eta) == pytest.approx(best.value, abs=1e-12)


def test_chsh_scan_against_brute_force(rng):
    # a direct 360 x 360 evaluation of the full operator trace bounds the refined result from below
    rho = random_density_matrix(2, rng)
    g = angle_grid(72)
    brute = max(chsh_value(rho, b, e) for b in g for e in g)
    _, _, value = chsh_scan(rho, 72)
    assert value >= brute - 1e-12
    assert value <= brute + 0.01


def test_chsh_never_exceeds_tsirelson(rng):
    states = [random_density_matrix(2, rng, rank=1) for _ in range(30)]
    for rho in states:
        assert chsh_scan(rho, 90)[2] <= TSIRELSON + 1e-6


def test_separable_state_violates():
    # the pseudo-spin Bell states are product states in the qubit factorization
    v = pseudo_spin_bell_states()[0]
    assert np.count_nonzero(np.abs(v) > 1e-12) == 1
    assert chsh_scan(pure(v), 360)[2] > 2


def test_maximally_mixed_gives_zero():
    for b, e in ((0.0, 0.0), (1.0, 2.0), (math.pi, 5.0)):
        assert chsh_value(maximally_mixed(2), b, e) == pytest.approx(0.0, abs=1e-15)
    assert qho_chsh_scan([maximally_mixed(2)], 36).value == pytest.approx(0.0, abs=1e-12)


def test_qho_scan_errors():
    with pytest.raises(ValueError):
        qho_chsh_scan([])
    with pytest.raises(ValueError):
        qho_chsh_scan([maximally_mixed(1)])
