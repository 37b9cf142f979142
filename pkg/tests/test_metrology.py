import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lqu.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, DimensionError, ValidationError, tensor
from lqu.metrology import (
    BoundViolation,
    estimation_bound,
    evolution_speed,
    evolve_phase,
    qfi,
    qfi_fidelity,
    shot_noise_threshold,
    spin_probe_lqu_formula,
)
from lqu.states import classical_quantum, pure_state, random_density_matrix, restricted_jz, spin_probe
from lqu.uncertainty import lqu_bruteforce, lqu_closed_form, skew_information, variance

seeds = st.integers(0, 2 ** 32 - 1)


def jz_local(j):
    return tensor(restricted_jz(j), np.eye(2))


def test_evolve_phase_identity_and_group_law():
    rho = random_density_matrix(2, 3, seed=1)
    np.testing.assert_allclose(evolve_phase(rho, SIGMA_Z, 0.0).matrix, rho.matrix, atol=1e-15)
    twice = evolve_phase(evolve_phase(rho, SIGMA_Z, 0.4), SIGMA_Z, 1.1)
    once = evolve_phase(rho, SIGMA_Z, 1.5)
    assert np.max(np.abs(twice.matrix - once.matrix)) <= 1e-10
    np.testing.assert_allclose(once.eig.values, rho.eig.values, atol=1e-14)
    with pytest.raises(DimensionError):
        evolve_phase(rho, np.eye(3), 0.1)


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0, 2 * math.pi))
def test_skew_and_qfi_phase_independent(seed, phi):
    rho = random_density_matrix(2, 3, seed=seed)
    h = tensor(SIGMA_Z, np.eye(3))
    moved = evolve_phase(rho, SIGMA_Z, phi)
    assert abs(skew_information(moved, h) - skew_information(rho, h)) <= 1e-9
    assert abs(qfi(moved, h) - qfi(rho, h)) <= 1e-9


def test_qfi_examples():
    assert abs(qfi(np.eye(4) / 4, tensor(SIGMA_Z, SIGMA_X))) <= 1e-15
    psi = pure_state([0.6, 0.8j])
    assert qfi(psi, SIGMA_X) == pytest.approx(4 * variance(psi, SIGMA_X), abs=1e-12)
    assert qfi(spin_probe(1, 0.6), jz_local(1)) == pytest.approx(1.44, abs=1e-12)
    with pytest.raises(DimensionError):
        qfi(psi, np.eye(3))


@pytest.mark.parametrize("j,r", [(0.5, 0.3), (1, 0.6), (2, 1.0), (7.5, 0.25)])
def test_qfi_spin_probe_three_ways(j, r):
    probe = spin_probe(j, r)
    target = 4 * j ** 2 * r ** 2
    assert abs(qfi(probe, jz_local(j)) - target) <= 1e-8
    assert abs(qfi_fidelity(probe, jz_local(j)) - target) <= 1e-8


@pytest.mark.parametrize("seed", range(4))
def test_qfi_fidelity_oracle_full_rank(seed):
    rho = random_density_matrix(2, 2, seed=seed)
    h = tensor(SIGMA_Z, np.eye(2))
    exact = qfi(rho, h)
    assert abs(qfi_fidelity(rho, h) - exact) <= 1e-10 * max(1.0, exact)
    assert abs(qfi_fidelity(rho, h, delta=1e-4) - exact) <= 1e-4 * exact


def test_qfi_fidelity_pure_state():
    psi = pure_state([1, 0, 0, 1j], dims=(2, 2))
    h = tensor(SIGMA_Z, np.eye(2))
    assert abs(qfi_fidelity(psi, h) - 4 * variance(psi, h)) <= 1e-8


def test_estimation_bound_classical_probe():
    probe = classical_quantum([0.4, 0.6], [np.eye(2) / 2, np.diag([0.3, 0.7])])
    b = estimation_bound(probe, SIGMA_Z, nu=10)
    assert b.lqu_bound <= 1e-10
    assert b.chain_holds


@pytest.mark.parametrize("j,r", [(0.5, 0.5), (1, 0.6), (3, 0.9)])
def test_estimation_bound_spin_probe(j, r):
    b = estimation_bound(spin_probe(j, r), restricted_jz(j), nu=100)
    assert abs(b.lqu_bound - 4 * spin_probe_lqu_formula(j, r)) <= 1e-9
    assert abs(b.qfi - 4 * j ** 2 * r ** 2) <= 1e-8
    assert b.lqu_bound <= b.qfi
    assert b.variance_bound * b.repetitions * b.qfi == pytest.approx(1.0, rel=1e-15)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_estimation_bound_chain(seed):
    rho = random_density_matrix(2, 3, seed=seed)
    b = estimation_bound(rho, SIGMA_Z)
    assert b.lqu_bound <= b.skew_value + 1e-8 <= b.qfi + 2e-8


def test_estimation_bound_qutrit_uses_bruteforce():
    rho = random_density_matrix(3, 2, seed=2)
    h = np.diag([-1.0, 0.2, 1.0])
    b = estimation_bound(rho, h, budget=300, seed=1)
    assert b.lqu_bound <= b.skew_value + 1e-8 <= b.qfi + 2e-8


def test_estimation_bound_errors():
    rho = random_density_matrix(2, 2, seed=0)
    with pytest.raises(ValidationError):
        estimation_bound(rho, SIGMA_Z, nu=0)
    with pytest.raises(ValidationError):
        estimation_bound(rho, np.eye(2))
    assert issubclass(BoundViolation, ArithmeticError)


def test_spin_formula_examples():
    assert spin_probe_lqu_formula(3, 0.0) == 0.0
    assert spin_probe_lqu_formula(3, 1.0) == pytest.approx(9.0)
    assert spin_probe_lqu_formula(1, 0.6) == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(ValidationError):
        spin_probe_lqu_formula(1, 1.2)
    with pytest.raises(ValidationError):
        spin_probe_lqu_formula(0, 0.5)


@pytest.mark.parametrize("j,r", [(1, 0.6), (2.5, 0.35), (0.5, 0.9)])
def test_spin_formula_matches_numerics(j, r):
    probe = spin_probe(j, r)
    target = spin_probe_lqu_formula(j, r)
    assert abs(j ** 2 * lqu_closed_form(probe) - target) <= 1e-9
    assert abs(lqu_bruteforce(probe, probe.meta["spectrum"]) - target) <= 1e-6


def test_shot_noise_threshold_defining_property():
    for j in (2, 5, 10, 50, 100):
        r = shot_noise_threshold(j)
        step = 1.0 / 100_000
        assert 4 * j ** 2 * (1 - math.sqrt(1 - r ** 2)) > 2 * j
        prev = r - step
        assert 4 * j ** 2 * (1 - math.sqrt(1 - prev ** 2)) <= 2 * j


def test_shot_noise_threshold_scaling():
    js = (5, 10, 50, 100)
    rs = [shot_noise_threshold(j) for j in js]
    np.testing.assert_allclose(rs, [0.43589, 0.31225, 0.14107, 0.09988], atol=1e-12)
    assert all(0.5 <= r * math.sqrt(j) <= 2.0 for j, r in zip(js, rs))
    assert all(a > b for a, b in zip(rs, rs[1:]))


def test_shot_noise_threshold_unreachable():
    # 4 j^2 <= 2 j for j <= 1/2, so no coherence beats shot noise
    assert math.isnan(shot_noise_threshold(0.5))
    with pytest.raises(ValidationError):
        shot_noise_threshold(-1)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_evolution_speed_matches_skew(seed):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(2, 2, seed=rng)
    n = rng.standard_normal(3)
    k = tensor(n[0] * SIGMA_X + n[1] * SIGMA_Z + n[2] * SIGMA_Y, np.eye(2))
    skew = skew_information(rho, k)
    assert abs(evolution_speed(rho, k) - skew) <= 0.05 * skew + 1e-12
