"""Acceptance criteria, each at its stated tolerance and runtime budget.

Run with ``pytest tests/test_acceptance.py``; the PASS/FAIL lines are
listed in the terminal summary.
"""
import subprocess
import sys
import time

import numpy as np

from lqu.cli import dqc1_rows, spin_probe_rows, werner_rows
from lqu.linalg import SIGMA_Z, haar_unitary, tensor
from lqu.metrology import estimation_bound, evolve_phase, qfi, qfi_fidelity, shot_noise_threshold
from lqu.metrology import spin_probe_lqu_formula
from lqu.states import bell_phi_plus, classical_quantum, random_density_matrix, spin_probe, werner
from lqu.uncertainty import lqu_bruteforce, lqu_closed_form, skew_information


def werner_lqu(p):
    return (1 + p) / 2 - np.sqrt((1 - p) * (1 + 3 * p)) / 2


def test_criterion_1_bell_normalization(acceptance):
    bell = bell_phi_plus()
    lqu_closed_form(bell)  # warm-up
    timings = []
    for _ in range(20):
        start = time.perf_counter()
        value = lqu_closed_form(bell_phi_plus())
        timings.append(time.perf_counter() - start)
    err = abs(value - 1.0)
    assert acceptance(1, "Bell-state normalization", err <= 1e-10, f"|LQU - 1| = {err:.2e} (tol 1e-10)",
                      float(np.median(timings)), 1e-3)


def test_criterion_2_faithfulness(acceptance):
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    cq = []
    for _ in range(50):
        d_a, d_b = 2, int(rng.integers(2, 4))
        probs = rng.dirichlet(np.ones(d_a))
        taus = [random_density_matrix(d_b, seed=rng) for _ in range(d_a)]
        state = classical_quantum(probs, taus)
        u = tensor(haar_unitary(d_a, rng), haar_unitary(d_b, rng))
        cq.append(lqu_closed_form(state.conjugate(u)))
    grid = np.round(np.arange(1, 21) * 0.05, 10)
    wern = [lqu_closed_form(werner(p)) for p in grid]
    seconds = time.perf_counter() - start
    passed = max(cq) <= 1e-10 and min(wern) >= 1e-3
    assert acceptance(2, "faithfulness", passed,
                      f"max LQU on 50 CQ states {max(cq):.2e} (tol 1e-10), "
                      f"min LQU on Werner p=0.05..1 {min(wern):.3e} (>= 1e-3)", seconds, 1.0)


def test_criterion_3_oracle_equivalence(acceptance):
    start = time.perf_counter()
    worst = {}
    for d_b in (2, 3):
        errs = []
        for k in range(100):
            rho = random_density_matrix(2, d_b, seed=np.random.default_rng([3, d_b, k]))
            errs.append(abs(lqu_bruteforce(rho, (-1, 1), budget=2000, seed=k) - lqu_closed_form(rho)))
        worst[d_b] = max(errs)
    seconds = time.perf_counter() - start
    assert acceptance(3, "brute force vs closed form", max(worst.values()) <= 1e-6,
                      f"worst |diff| 2x2 {worst[2]:.2e}, 2x3 {worst[3]:.2e} (tol 1e-6, budget 2000)",
                      seconds, 120.0)


def test_criterion_4_werner_curves(acceptance):
    start = time.perf_counter()
    rows = np.array(werner_rows(np.linspace(0, 1, 101)))
    seconds = time.perf_counter() - start
    p = rows[:, 0]
    var_err = np.max(np.abs(rows[:, 1] - 1))
    ent_err = np.max(np.abs(rows[:, 3] - (1 - p ** 2)))
    lqu_err = np.max(np.abs(rows[:, 2] - werner_lqu(p)))
    passed = len(rows) == 101 and var_err <= 1e-12 and ent_err <= 1e-10 and lqu_err <= 1e-9
    assert acceptance(4, "Werner sweep", passed,
                      f"variance_sz err {var_err:.1e} (1e-12), linear entropy err {ent_err:.1e} (1e-10), "
                      f"lqu err {lqu_err:.1e} (1e-9)", seconds, 5.0)


def test_criterion_5_dqc1(acceptance):
    grid = np.linspace(0, 1, 11)
    worst, slowest = {}, 0.0
    for seed in range(5):
        start = time.perf_counter()
        rows = np.array(dqc1_rows(8, grid, haar_unitary(2 ** 8, seed)))
        slowest = max(slowest, time.perf_counter() - start)
        worst[seed] = float(np.max(rows[:, 4]))
    detail = ", ".join(f"seed {s}: {w:.4f}" for s, w in worst.items())
    assert acceptance(5, "DQC1 closed form at n=8", max(worst.values()) <= 0.02,
                      f"worst |numeric - formula| over 11 mu points ({detail}; tol 0.02)", slowest, 600.0)


def test_criterion_6_metrology_chain(acceptance):
    start = time.perf_counter()
    chain_violation, phase_drift = 0.0, 0.0
    h_full = tensor(SIGMA_Z, np.eye(3))
    for k in range(100):
        rho = random_density_matrix(2, 3, seed=np.random.default_rng([6, k]))
        b = estimation_bound(rho, SIGMA_Z)
        for phi in (0.0, 0.7, 2.1):
            moved = evolve_phase(rho, SIGMA_Z, phi)
            skew_phi = 4 * skew_information(moved, h_full)
            f_phi = qfi(moved, h_full)
            chain_violation = max(chain_violation, b.lqu_bound - skew_phi, skew_phi - f_phi)
            phase_drift = max(phase_drift, abs(skew_phi - b.skew_value) / 4)
    seconds = time.perf_counter() - start
    passed = chain_violation <= 1e-8 and phase_drift <= 1e-9
    assert acceptance(6, "metrology chain 4U <= 4I <= F", passed,
                      f"worst chain violation {chain_violation:.1e} (1e-8), "
                      f"phase dependence of I {phase_drift:.1e} (1e-9)", seconds, 30.0)


def test_criterion_7_spin_probe(acceptance):
    start = time.perf_counter()
    js, grid = (0.5, 1.0, 2.0, 5.0), np.linspace(0.05, 1, 20)
    rows = np.array(spin_probe_rows(js, grid, 1))
    formula_err = np.max(np.abs(rows[:, 2] - rows[:, 3]))
    sld_err = np.max(np.abs(rows[:, 4] - 4 * rows[:, 0] ** 2 * rows[:, 1] ** 2))
    fid_err = 0.0
    for j, r in rows[:, :2]:
        h = tensor(np.diag([j, -j]), np.eye(2))
        fid_err = max(fid_err, abs(qfi_fidelity(spin_probe(j, r), h) - 4 * j ** 2 * r ** 2))
    heis = rows[rows[:, 1] == 1.0]
    heis_err = np.max(np.abs(heis[:, 4] - 4 * heis[:, 0] ** 2))
    scaled = {j: shot_noise_threshold(j) * np.sqrt(j) for j in (5, 10, 50, 100)}
    seconds = time.perf_counter() - start
    passed = (formula_err <= 1e-9 and sld_err <= 1e-8 and fid_err <= 1e-8 and heis_err <= 1e-8
              and all(0.5 <= v <= 2.0 for v in scaled.values()))
    assert acceptance(7, "spin probe", passed,
                      f"formula vs closed form {formula_err:.1e} (1e-9), QFI vs 4j^2r^2: SLD {sld_err:.1e}, "
                      f"fidelity {fid_err:.1e} (1e-8), r=1 Heisenberg err {heis_err:.1e}, threshold*sqrt(j) "
                      + " ".join(f"{v:.4f}" for v in scaled.values()) + " (in [0.5, 2])", seconds, 10.0)
    # the formula itself, independently of the CLI helper
    assert abs(spin_probe_lqu_formula(1, 0.6) - 0.2) <= 1e-15


def test_criterion_8_verify_all(acceptance):
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "lqu.cli", "verify", "--suite", "all"],
                          capture_output=True, text=True)
    seconds = time.perf_counter() - start
    summary = next((l for l in proc.stdout.splitlines() if "properties passed" in l), "no summary")
    assert acceptance(8, "property suites (verify all)", proc.returncode == 0,
                      f"exit {proc.returncode}; {summary}", seconds, 300.0), proc.stdout
