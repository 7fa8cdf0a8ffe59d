import itertools
import math

import numpy as np
import pytest

from qcorr.densop import I2, SIGMA_X, SIGMA_Y, SIGMA_Z, NotHermitianError, kron
from qcorr.observables import (
    PauliObservable,
    chsh_correlators,
    chsh_observables,
    chsh_value,
    commutes,
    expectation,
    mermin_square,
    product,
    pseudo_spin_bell_states,
    pseudo_spins,
)
from qcorr.states import PSI_MINUS, maximally_mixed, pure, random_density_matrix

EYE4 = np.eye(4)


def born_pair_expectation(rho, a, b):
    """``<AB>`` for commuting dichotomic A, B as ``sum_ab a b P(a, b)`` over joint eigenprojectors."""
    m = rho.mat if hasattr(rho, "mat") else rho
    total = 0.0
    for sa, sb in itertools.product((1, -1), repeat=2):
        pa = (EYE4 + sa * a) / 2
        pb = (EYE4 + sb * b) / 2
        total += sa * sb * np.trace(pa @ pb @ m).real
    return total


def test_pauli_parse_and_matrix():
    o = PauliObservable.parse("-XZ")
    assert o.sign == -1 and o.letters == "XZ" and str(o) == "-XZ"
    assert np.array_equal(o.matrix(), -kron(SIGMA_X, SIGMA_Z))
    assert str(-o) == "+XZ"
    with pytest.raises(ValueError):
        PauliObservable("XQ")


def test_every_pauli_string_is_dichotomic():
    for letters in itertools.product("IXYZ", repeat=2):
        for sign in (1, -1):
            m = PauliObservable("".join(letters), sign).matrix()
            assert np.allclose(m @ m, EYE4, atol=0)
            assert np.allclose(m, m.conj().T, atol=0)
            w = np.linalg.eigvalsh(m)
            assert np.allclose(np.abs(w), 1.0)


def test_expectation_examples():
    singlet = pure(PSI_MINUS)
    assert expectation(singlet, "XX") == pytest.approx(-1.0, abs=1e-15)
    composite = product(PauliObservable("XY"), PauliObservable("YX"))
    assert np.allclose(composite, kron(SIGMA_Z, SIGMA_Z))
    assert expectation(singlet, composite) == pytest.approx(-1.0, abs=1e-15)
    mixed = maximally_mixed(2)
    for letters in ("XI", "YZ", "ZZ", "IY"):
        assert expectation(mixed, letters) == pytest.approx(0.0, abs=1e-15)


def test_expectation_errors():
    with pytest.raises(ValueError):
        expectation(maximally_mixed(1), "XX")
    with pytest.raises(NotHermitianError):
        expectation(maximally_mixed(2), np.triu(np.ones((4, 4))))


def test_expectation_is_linear(rng):
    for _ in range(50):
        r1, r2 = random_density_matrix(2, rng), random_density_matrix(2, rng)
        a = rng.random()
        o1, o2 = PauliObservable("XY").matrix(), PauliObservable("ZI").matrix()
        c = rng.normal()
        mix = a * r1.mat + (1 - a) * r2.mat
        lhs = expectation(mix, o1 + c * o2)
        rhs = a * (expectation(r1, o1) + c * expectation(r1, o2)) + (1 - a) * (
            expectation(r2, o1) + c * expectation(r2, o2)
        )
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_mermin_square_layout_and_products():
    sq = mermin_square()
    assert [str(o) for o in sq.grid[0]] == ["+ZI", "+IZ", "+ZZ"]
    cols = sq.columns()
    assert np.allclose(sq.line_product(cols[2]), -EYE4, atol=1e-12)
    assert np.allclose(sq.line_product(sq.rows()[1]), EYE4, atol=1e-12)
    for name, line in sq.lines():
        for a, b in itertools.combinations(line, 2):
            assert commutes(a, b)
    sq.verify()


def test_pseudo_spin_definitions():
    ps = pseudo_spins()
    expected = (kron(SIGMA_X, I2), kron(SIGMA_Z, SIGMA_Y), -kron(SIGMA_Y, SIGMA_Y))
    expected_p = (kron(SIGMA_X, SIGMA_Z), kron(I2, SIGMA_Y), -kron(SIGMA_X, SIGMA_X))
    for got, want in zip(ps.gamma + ps.gamma_prime, expected + expected_p):
        assert np.array_equal(got, want)


def test_pseudo_spin_algebra():
    ps = pseudo_spins()
    for g in (ps.gamma, ps.gamma_prime):
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            assert np.max(np.abs(g[a] @ g[b] - 1j * g[c])) <= 1e-12
    for a in ps.gamma:
        for b in ps.gamma_prime:
            assert np.max(np.abs(a @ b - b @ a)) <= 1e-12


def test_chsh_observables_properties():
    ps = pseudo_spins()
    a, b, c, d = chsh_observables(0.0, 1.0)
    assert np.array_equal(b, ps.gamma_prime[0])
    for beta, eta in ((0.3, 2.1), (math.pi / 4, 3 * math.pi / 4), (5.0, -1.0)):
        obs = chsh_observables(beta, eta)
        for o in obs:
            assert np.max(np.abs(o @ o - EYE4)) <= 1e-12
        a, b, c, d = obs
        assert np.max(np.abs(a @ b - b @ a)) <= 1e-12


def test_chsh_value_against_born_rule(rng):
    states = [maximally_mixed(2)] + [random_density_matrix(2, rng) for _ in range(5)]
    for rho in states:
        for beta, eta in ((math.pi / 4, 3 * math.pi / 4), (0.7, 4.0)):
            a, b, c, d = chsh_observables(beta, eta)
            oracle = (
                born_pair_expectation(rho, a, b)
                + born_pair_expectation(rho, b, c)
                + born_pair_expectation(rho, c, d)
                - born_pair_expectation(rho, a, d)
            )
            assert chsh_value(rho, beta, eta) == pytest.approx(oracle, abs=1e-12)
    assert chsh_value(maximally_mixed(2), math.pi / 4, 3 * math.pi / 4) == pytest.approx(0.0, abs=1e-15)


def test_chsh_correlators_reproduce_value(rng):
    rho = random_density_matrix(2, rng)
    u, v = chsh_correlators(rho)
    for beta, eta in rng.uniform(0, 2 * math.pi, size=(10, 2)):
        sep = u @ [math.cos(beta), math.sin(beta)] + v @ [math.cos(eta), math.sin(eta)]
        assert sep == pytest.approx(chsh_value(rho, beta, eta), abs=1e-12)


def test_pseudo_spin_bell_states_are_joint_eigenstates():
    ps = pseudo_spins()
    xx = ps.gamma[0] @ ps.gamma_prime[0]
    zz = ps.gamma[2] @ ps.gamma_prime[2]
    for v in pseudo_spin_bell_states():
        for op in (xx, zz):
            w = v.conj() @ op @ v
            assert abs(abs(w) - 1) <= 1e-12
            assert np.allclose(op @ v, w * v, atol=1e-12)
