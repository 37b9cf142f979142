"""Phase estimation with bipartite probes: QFI and discord-based bounds."""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from . import tolerances
from .linalg import DimensionError, ValidationError, as_matrix, expm_hermitian, tensor
from .states import BipartiteState, DensityMatrix
from .uncertainty import (
    Observable,
    _state,
    hellinger_sq,
    lqu_bruteforce,
    lqu_qubit,
    skew_information,
    spectrum,
)


class BoundViolation(ArithmeticError):
    """The LQU <= skew information <= QFI/4 chain failed numerically."""


def _local_hamiltonian(h, d_A: int) -> np.ndarray:
    h = h.matrix if isinstance(h, Observable) else Observable(as_matrix(h)).matrix
    if h.shape[0] != d_A:
        raise DimensionError(f"local Hamiltonian has size {h.shape[0]}, subsystem A has {d_A}")
    return h


def phase_unitary(h_a, phi: float, d_B: int) -> np.ndarray:
    """exp(-i phi H_A) (x) I_B."""
    return tensor(expm_hermitian(h_a, -1j * phi), np.eye(d_B))


def evolve_phase(probe: BipartiteState, h_a, phi: float) -> BipartiteState:
    """Imprint the phase `phi` on subsystem A: U rho U^dagger, U = exp(-i phi H_A) (x) I."""
    h = _local_hamiltonian(h_a, probe.d_A)
    return probe.conjugate(phase_unitary(h, phi, probe.d_B))


def qfi(rho, h) -> float:
    """Quantum Fisher information of rho under the generator H.

    ``F = 2 sum_{p_i + p_j > cutoff} (p_i - p_j)^2 / (p_i + p_j) |<i|H|j>|^2``
    over the eigenbasis of rho.  It does not depend on the imprinted phase.
    """
    rho = _state(rho)
    h = as_matrix(getattr(h, "matrix", h))
    if h.shape[0] != rho.dim:
        raise DimensionError(f"generator of size {h.shape[0]} does not act on a state of size {rho.dim}")
    p = rho.probabilities
    vecs = rho.eig.vectors
    h_eig = vecs.conj().T @ h @ vecs
    total = p[:, None] + p[None, :]
    keep = total > tolerances.get().sld_cutoff
    diff2 = (p[:, None] - p[None, :]) ** 2
    terms = np.where(keep, diff2 / np.where(keep, total, 1.0), 0.0) * np.abs(h_eig) ** 2
    return float(2.0 * terms.sum())


def _mp_sqrt_psd(m):
    e, q = mpmath.eighe(m)
    root = mpmath.matrix(m.rows, m.cols)
    for k in range(m.rows):
        lam = e[k] if e[k] > 0 else mpmath.mpf(0)
        root += mpmath.sqrt(lam) * (q[:, k] * q[:, k].transpose_conj())
    return root


def qfi_fidelity(rho, h, delta: float | None = None, dps: int = 60) -> float:
    """QFI from the Bures expansion, F = 8 (1 - sqrt(Fid(rho, rho_delta))) / delta^2.

    Independent of the eigenbasis formula in `qfi`: the root fidelity
    Tr sqrt(sqrt(rho) rho_delta sqrt(rho)) is evaluated in `dps`-digit
    arithmetic, so `delta` can be taken small enough that the truncation
    error of the expansion is negligible.  The default `delta` is 1e-8
    divided by the spectral radius of H.
    """
    rho = _state(rho)
    h = as_matrix(getattr(h, "matrix", h))
    if delta is None:
        delta = 1e-8 / max(float(np.max(np.abs(np.linalg.eigvalsh(h)))), 1e-300)
    with mpmath.workdps(dps):
        m = mpmath.matrix(rho.matrix.tolist())
        m = m / sum(m[k, k] for k in range(m.rows))
        hm = mpmath.matrix(h.tolist())
        e, q = mpmath.eighe(hm)
        d = mpmath.mpf(delta)
        u = q * mpmath.diag([mpmath.exp(-1j * d * x) for x in e]) * q.transpose_conj()
        moved = u * m * u.transpose_conj()
        s = _mp_sqrt_psd(m)
        inner = s * moved * s
        inner = (inner + inner.transpose_conj()) / 2
        root_fid = sum(_mp_sqrt_psd(inner)[k, k] for k in range(inner.rows))
        return float(8 * (1 - mpmath.re(root_fid)) / d ** 2)


@dataclass(frozen=True)
class EstimationBound:
    lqu_bound: float       # 4 * LQU with the Hamiltonian's spectrum
    skew_value: float      # 4 * I(rho, H_A)
    qfi: float
    repetitions: int
    variance_bound: float  # 1 / (nu F), the optimal estimator variance

    @property
    def chain_holds(self) -> bool:
        return self.lqu_bound <= self.skew_value + 1e-8 and self.skew_value <= self.qfi + 1e-8


def estimation_bound(probe: BipartiteState, h_a, nu: int = 1, budget: int = 2000, seed=0,
                     starts: int = 5, chain_tol: float = 1e-8) -> EstimationBound:
    """LQU, skew information and QFI of a probe under the local Hamiltonian H_A.

    The LQU is taken with the Hamiltonian's own spectrum: in closed form for
    a qubit A, otherwise by `lqu_bruteforce` seeded with the eigenbasis of H_A.
    Raises `BoundViolation` if 4 LQU <= 4 I <= F fails by more than `chain_tol`.
    """
    if nu < 1:
        raise ValidationError("number of repetitions must be positive")
    h = _local_hamiltonian(h_a, probe.d_A)
    obs = Observable(h)
    lam = spectrum(obs.spectrum)
    if probe.d_A == 2:
        u = lqu_qubit(probe, lam)
    else:
        basis = np.linalg.eigh(h)[1]
        u = lqu_bruteforce(probe, lam, budget=budget, seed=seed, starts=starts, candidates=basis[None])
    h_full = obs.local(probe.d_B)
    skew = skew_information(probe, h_full)
    f = qfi(probe, h_full)
    bound = EstimationBound(4 * u, 4 * skew, f, int(nu), 1.0 / (nu * f) if f > 0 else np.inf)
    if bound.lqu_bound > bound.skew_value + chain_tol or bound.skew_value > bound.qfi + chain_tol:
        raise BoundViolation(f"4U={bound.lqu_bound!r}, 4I={bound.skew_value!r}, F={bound.qfi!r}")
    return bound


def spin_probe_lqu_formula(j: float, r: float) -> float:
    """LQU of the dephased spin-j probe with spectrum (-j, j): j^2 (1 - sqrt(1 - r^2))."""
    if j <= 0:
        raise ValidationError("spin j must be positive")
    if not 0.0 <= r <= 1.0:
        raise ValidationError(f"coherence r={r} outside [0, 1]")
    return j ** 2 * (1.0 - np.sqrt(1.0 - r ** 2))


def shot_noise_threshold(j: float, steps: int = 100_001) -> float:
    """Smallest r on a uniform grid over [0, 1] with 4 j^2 (1 - sqrt(1 - r^2)) > 2 j.

    Returns ``nan`` if no grid point beats the shot-noise scaling.
    """
    if j <= 0:
        raise ValidationError("spin j must be positive")
    r = np.linspace(0.0, 1.0, steps)
    beats = 4 * j ** 2 * (1 - np.sqrt(1 - r ** 2)) > 2 * j
    if not beats.any():
        return float("nan")
    return float(r[int(np.argmax(beats))])


def evolution_speed(rho, k, delta: float = 1e-3) -> float:
    """Squared Hellinger distance moved per delta^2 under exp(-i delta K)."""
    rho = _state(rho)
    k = as_matrix(getattr(k, "matrix", k))
    u = expm_hermitian(k, -1j * delta)
    moved = DensityMatrix(u @ rho.matrix @ u.conj().T)
    return hellinger_sq(rho, moved) / delta ** 2
