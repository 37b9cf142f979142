"""Randomized property checks behind ``lqu verify``.

Each property draws independent random inputs per trial from
``PCG64([seed, crc32(name), trial])`` and reports the worst violation.  A
property passes when that violation does not exceed its tolerance.  These
are statistical checks of proven statements, not proofs.
"""
from __future__ import annotations

import time
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channels import apply_local, random_channel, selective_local_ops
from .linalg import PAULIS, haar_unitaries, haar_unitary, tensor
from .metrology import estimation_bound, evolution_speed, evolve_phase, qfi, qfi_fidelity
from .states import bipartite, classical_quantum, random_density_matrix, random_pure_state, werner
from .uncertainty import (
    hellinger_sq,
    lqu_bruteforce,
    lqu_closed_form,
    min_variance_fixed_spectrum,
    min_variance_search,
    skew_information,
    variance,
)

SUITES = ("skew", "lqu", "metrology", "channels")


@dataclass(frozen=True)
class Property:
    name: str
    suite: str
    tolerance: float
    trials: int
    check: Callable[[np.random.Generator], float]  # returns violation for one trial
    description: str = ""


@dataclass
class Result:
    name: str
    suite: str
    trials: int
    worst: float
    worst_trial: int
    tolerance: float
    seconds: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance


def _rng(seed: int, name: str, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64([seed, zlib.crc32(name.encode()), trial]))


def _random_unit_vector(rng, n=3):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _random_hermitian(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def _random_nondegenerate(rng, d):
    lam = np.sort(rng.uniform(-2, 2, d))
    while d > 1 and np.min(np.diff(lam)) < 1e-3:
        lam = np.sort(rng.uniform(-2, 2, d))
    v = haar_unitary(d, rng)
    return (v * lam) @ v.conj().T


def _qubit_observable(rng, d_b):
    n = _random_unit_vector(rng)
    return tensor(sum(c * s for c, s in zip(n, PAULIS)), np.eye(d_b))


def _random_state(rng, d_a=2, d_b=None, rank=None):
    d_b = int(rng.integers(2, 4)) if d_b is None else d_b
    return random_density_matrix(d_a, d_b, rank=rank, seed=rng)


# skew information -------------------------------------------------------

def _skew_nonnegative(rng):
    rho = _random_state(rng, rank=int(rng.integers(1, 5)), d_b=2)
    return max(0.0, -skew_information(rho, _random_hermitian(rng, 4)))


def _skew_below_variance(rng):
    rho = _random_state(rng, rank=int(rng.integers(1, 5)), d_b=2)
    k = _random_hermitian(rng, 4)
    return max(0.0, skew_information(rho, k) - variance(rho, k))


def _skew_pure_equality(rng):
    psi = random_pure_state(2, int(rng.integers(2, 4)), seed=rng)
    k = _random_hermitian(rng, psi.dim)
    return abs(skew_information(psi, k) - variance(psi, k))


def _skew_convexity(rng):
    r1, r2 = _random_state(rng, d_b=2), _random_state(rng, d_b=2)
    t = rng.uniform()
    k = _random_hermitian(rng, 4)
    mix = bipartite(t * r1.matrix + (1 - t) * r2.matrix, 2, 2)
    return max(0.0, skew_information(mix, k) - t * skew_information(r1, k) - (1 - t) * skew_information(r2, k))


def _hellinger_identity(rng):
    rho = _random_state(rng)
    k = _qubit_observable(rng, rho.d_B)
    moved = bipartite(k @ rho.matrix @ k, *rho.dims)
    return abs(skew_information(rho, k) - hellinger_sq(rho, moved))


# LQU ----------------------------------------------------------------------

def _lqu_local_unitary(rng):
    rho = _random_state(rng)
    u = tensor(haar_unitary(2, rng), haar_unitary(rho.d_B, rng))
    return abs(lqu_closed_form(rho.conjugate(u)) - lqu_closed_form(rho))


def _lqu_cq_zero(rng):
    d_b = int(rng.integers(2, 4))
    p = rng.dirichlet(np.ones(2))
    taus = [random_density_matrix(d_b, seed=rng).matrix for _ in range(2)]
    rho = classical_quantum(p, taus)
    rotated = rho.conjugate(tensor(haar_unitary(2, rng), haar_unitary(d_b, rng)))
    return lqu_closed_form(rotated)


def _lqu_werner_positive(rng):
    p = rng.choice(np.round(np.arange(0.05, 1.0 + 1e-9, 0.05), 2))
    return max(0.0, 1e-3 - lqu_closed_form(werner(float(p))))


def _oracle(d_b):
    def check(rng):
        rho = _random_state(rng, d_b=d_b)
        seed = int(rng.integers(2 ** 32))
        return abs(lqu_bruteforce(rho, (-1, 1), budget=2000, seed=seed) - lqu_closed_form(rho))
    return check


def _variance_permutation_bound(rng):
    d = int(rng.integers(2, 5))
    rho = random_density_matrix(d, seed=rng)
    lam = np.sort(rng.uniform(-2, 2, d))
    best, _ = min_variance_fixed_spectrum(rho, lam)
    vs = haar_unitaries(d, 200, rng)
    sampled = [variance(rho, (v * lam) @ v.conj().T) for v in vs]
    return max(0.0, best - min(sampled))


def _variance_search(rng):
    d = int(rng.integers(2, 5))
    rho = random_density_matrix(d, seed=rng)
    lam = np.sort(rng.uniform(-2, 2, d))
    best, _ = min_variance_fixed_spectrum(rho, lam)
    return abs(min_variance_search(rho, lam, budget=300, seed=int(rng.integers(2 ** 32)), starts=8) - best)


# metrology -----------------------------------------------------------------

def _metrology_chain(rng):
    d_a = 2 if rng.uniform() < 0.8 else 3
    rho = _random_state(rng, d_a=d_a, d_b=int(rng.integers(2, 4)))
    h = _random_nondegenerate(rng, d_a)
    phi = rng.uniform(0, 2 * np.pi)
    b = estimation_bound(rho, h, budget=300, seed=int(rng.integers(2 ** 32)), starts=3, chain_tol=np.inf)
    f_phi = qfi(evolve_phase(rho, h, phi), tensor(h, np.eye(rho.d_B)))
    return max(0.0, b.lqu_bound - b.skew_value, b.skew_value - f_phi)


def _phase_invariance(rng):
    rho = _random_state(rng)
    h = _random_nondegenerate(rng, 2)
    big = tensor(h, np.eye(rho.d_B))
    moved = evolve_phase(rho, h, rng.uniform(0, 2 * np.pi))
    return max(abs(skew_information(moved, big) - skew_information(rho, big)),
               abs(qfi(moved, big) - qfi(rho, big)))


def _qfi_fidelity(rng):
    rho = _random_state(rng)
    h = tensor(_random_nondegenerate(rng, 2), np.eye(rho.d_B))
    f = qfi(rho, h)
    return abs(qfi_fidelity(rho, h, delta=1e-4) - f) / f


def _cramer_rao(rng):
    rho = _random_state(rng)
    nu = int(rng.integers(1, 10 ** 6))
    b = estimation_bound(rho, _random_nondegenerate(rng, 2), nu=nu, chain_tol=np.inf)
    return abs(b.variance_bound * b.repetitions * b.qfi - 1.0)


def _speed(rng):
    rho = _random_state(rng)
    k = tensor(_random_nondegenerate(rng, 2), np.eye(rho.d_B))
    return abs(evolution_speed(rho, k, delta=1e-3) / skew_information(rho, k) - 1.0)


# channels ------------------------------------------------------------------

def _completeness(rng):
    ch = random_channel(int(rng.integers(2, 5)), int(rng.integers(1, 6)), seed=rng)
    return ch.completeness_residual()


def _contractivity(rng):
    rho = _random_state(rng)
    ch = random_channel(rho.d_B, int(rng.integers(1, 5)), seed=rng)
    return max(0.0, lqu_closed_form(apply_local(rho, ch, "B")) - lqu_closed_form(rho))


def _monotonicity(rng):
    psi = random_pure_state(2, 2, seed=rng)
    ch = random_channel(2, int(rng.integers(1, 5)), seed=rng)
    ensemble = selective_local_ops(psi, ch, "A")
    return max(0.0, sum(p * lqu_closed_form(phi) for p, phi in ensemble) - lqu_closed_form(psi))


def _support(rng):
    d_b = int(rng.integers(3, 6))
    psi = random_pure_state(2, d_b, seed=rng)
    ch = random_channel(2, int(rng.integers(1, 5)), seed=rng)
    w, v = np.linalg.eigh(psi.marginal("B"))
    support = v[:, w > 1e-12]
    outside = np.eye(d_b) - support @ support.conj().T
    worst = 0.0
    for _, phi in selective_local_ops(psi, ch, "A"):
        rho_b = phi.marginal("B")
        worst = max(worst, float(np.max(np.abs(outside @ rho_b))), float(np.linalg.matrix_rank(rho_b, tol=1e-10) > 2))
    return worst


PROPERTIES: tuple[Property, ...] = (
    Property("skew_nonnegative", "skew", 1e-12, 200, _skew_nonnegative, "I(rho,K) >= 0"),
    Property("skew_below_variance", "skew", 1e-9, 200, _skew_below_variance, "I(rho,K) <= Var(K)"),
    Property("skew_pure_equality", "skew", 1e-9, 200, _skew_pure_equality, "I = Var on pure states"),
    Property("skew_convexity", "skew", 1e-9, 200, _skew_convexity, "I convex in rho"),
    Property("hellinger_identity", "skew", 1e-10, 200, _hellinger_identity,
             "I(rho, n.s x I) = D_H^2(rho, K rho K)"),
    Property("lqu_local_unitary_invariance", "lqu", 1e-9, 200, _lqu_local_unitary, "LQU invariant under U_A x U_B"),
    Property("lqu_zero_on_classical_quantum", "lqu", 1e-10, 50, _lqu_cq_zero, "LQU = 0 on CQ states"),
    Property("lqu_positive_on_werner", "lqu", 0.0, 20, _lqu_werner_positive, "LQU >= 1e-3 on Werner p >= 0.05"),
    Property("lqu_oracle_2x2", "lqu", 1e-6, 100, _oracle(2), "brute force = closed form (2x2)"),
    Property("lqu_oracle_2x3", "lqu", 1e-6, 100, _oracle(3), "brute force = closed form (2x3)"),
    Property("variance_permutation_bound", "lqu", 1e-9, 100, _variance_permutation_bound,
             "permutation minimum <= sampled variances"),
    Property("variance_search_agreement", "lqu", 1e-6, 50, _variance_search,
             "unitary search reaches the permutation minimum"),
    Property("metrology_chain", "metrology", 1e-8, 100, _metrology_chain, "4U <= 4I <= F"),
    Property("phase_invariance", "metrology", 1e-9, 100, _phase_invariance, "I and F independent of phi"),
    Property("qfi_fidelity_oracle", "metrology", 1e-4, 30, _qfi_fidelity, "SLD QFI vs fidelity expansion"),
    Property("cramer_rao_arithmetic", "metrology", 1e-12, 50, _cramer_rao, "Var * nu * F = 1"),
    Property("speed_of_evolution", "metrology", 0.05, 100, _speed, "D_H^2 / delta^2 -> I"),
    Property("channel_completeness", "channels", 1e-9, 200, _completeness, "sum K^dag K = I"),
    Property("contractivity_on_B", "channels", 1e-8, 200, _contractivity, "LQU nonincreasing under Phi_B"),
    Property("pure_state_monotonicity", "channels", 1e-8, 200, _monotonicity,
             "average LQU nonincreasing under selective ops on A"),
    Property("pure_state_support", "channels", 1e-10, 100, _support,
             "ops on A keep rho_B inside a 2-dim subspace"),
)


def select(suite: str = "all") -> list[Property]:
    if suite == "all":
        return list(PROPERTIES)
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    return [p for p in PROPERTIES if p.suite == suite]


def run_property(prop: Property, seed: int = 0, trials: int | None = None,
                 tolerance_override: float | None = None) -> Result:
    n = prop.trials if trials is None else trials
    start = time.perf_counter()
    worst, worst_trial = -np.inf, -1
    for k in range(n):
        v = float(prop.check(_rng(seed, prop.name, k)))
        if not v <= worst:
            worst, worst_trial = v, k
    tol = prop.tolerance if tolerance_override is None else tolerance_override
    return Result(prop.name, prop.suite, n, worst, worst_trial, tol, time.perf_counter() - start)


def run(suite: str = "all", seed: int = 0, trials: int | None = None,
        tolerance_override: float | None = None) -> list[Result]:
    return [run_property(p, seed, trials, tolerance_override) for p in select(suite)]


def format_report(results: list[Result], seed: int) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = (f"{status} {r.suite:<9} {r.name:<32} trials={r.trials:<4d} "
                f"worst={r.worst:.3e} tol={r.tolerance:.1e} time={r.seconds:.2f}s")
        if not r.passed:
            line += f"  reproduce: --seed {seed}, trial {r.worst_trial}"
        lines.append(line)
    total_trials = sum(r.trials for r in results)
    total_time = sum(r.seconds for r in results)
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} properties passed; "
                 f"{total_trials} trials; wall time {total_time:.2f}s; seed {seed}")
    lines.append("note: properties proven analytically (monotonicity, contractivity, faithfulness, "
                 "invariance) are checked here statistically on random inputs.")
    return "\n".join(lines)
