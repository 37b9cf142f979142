"""Validated quantum states and the constructors used in the examples."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import tolerances
from .linalg import (
    DimensionError,
    EigenDecomposition,
    ValidationError,
    as_matrix,
    as_rng,
    clip_spectrum,
    hermitian_eig,
    is_unitary,
    partial_trace,
    symmetrize,
    tensor,
)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    The stored matrix is the symmetrized input.  The eigendecomposition and
    the square root are computed lazily and cached.
    """

    matrix: np.ndarray

    def __post_init__(self):
        tol = tolerances.get()
        m = symmetrize(self.matrix, tol.hermitian)
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > tol.trace:
            raise ValidationError(f"trace is {tr!r}, expected 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        clip_spectrum(self.eig.values, tol.psd_clip)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eig(self) -> EigenDecomposition:
        return hermitian_eig(self.matrix)

    @cached_property
    def probabilities(self) -> np.ndarray:
        """Eigenvalues clipped to be nonnegative, ascending."""
        return clip_spectrum(self.eig.values)

    @cached_property
    def sqrt(self) -> np.ndarray:
        out = EigenDecomposition(np.sqrt(self.probabilities), self.eig.vectors).reconstruct()
        out.setflags(write=False)
        return out

    def purity(self) -> float:
        return float(np.sum(self.probabilities ** 2))

    def is_pure(self, tol: float | None = None) -> bool:
        tol = tolerances.get().purity if tol is None else tol
        return abs(self.purity() - 1.0) <= tol

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True, eq=False)
class BipartiteState(DensityMatrix):
    """Density matrix on C^{d_A} (x) C^{d_B}, A being the slow index.

    ``meta`` carries optional annotations, e.g. the local spectrum of the
    observable a probe was designed for.
    """

    d_A: int = 0
    d_B: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        super().__post_init__()
        if self.d_A < 1 or self.d_B < 1 or self.d_A * self.d_B != self.dim:
            raise DimensionError(f"dims {self.d_A}x{self.d_B} do not match state of size {self.dim}")

    @property
    def dims(self) -> tuple[int, int]:
        return (self.d_A, self.d_B)

    def marginal(self, keep: str = "A") -> np.ndarray:
        return partial_trace(self.matrix, self.dims, keep)

    def conjugate(self, u: np.ndarray) -> "BipartiteState":
        """Return U rho U^dagger with the same subsystem structure."""
        return bipartite(u @ self.matrix @ u.conj().T, self.d_A, self.d_B, **self.meta)


def bipartite(matrix, d_A: int, d_B: int, **meta) -> BipartiteState:
    return BipartiteState(as_matrix(matrix), int(d_A), int(d_B), dict(meta))


def density(matrix) -> DensityMatrix:
    return DensityMatrix(as_matrix(matrix))


def _projector(amplitudes) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if psi.size == 0 or norm == 0:
        raise ValidationError("state vector must be nonzero")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def pure_state(amplitudes, dims: Sequence[int] | None = None):
    """|psi><psi| for the normalized vector; bipartite if `dims` is given."""
    m = _projector(amplitudes)
    if dims is None:
        return DensityMatrix(m)
    return bipartite(m, *dims)


def bell_phi_plus() -> BipartiteState:
    return pure_state([1, 0, 0, 1], dims=(2, 2))


def werner(p: float) -> BipartiteState:
    """p |phi+><phi+| + (1 - p) I/4."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"Werner weight p={p} outside [0, 1]")
    phi = bell_phi_plus().matrix
    return bipartite(p * phi + (1 - p) * np.eye(4) / 4, 2, 2)


def classical_quantum(probs, tau_list) -> BipartiteState:
    """sum_i p_i |i><i|_A (x) tau_i, with |i> the computational basis of A."""
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or len(probs) != len(tau_list):
        raise DimensionError("need one conditional state per probability")
    if np.any(probs < 0) or abs(probs.sum() - 1) > tolerances.get().trace:
        raise ValidationError("probabilities must be nonnegative and sum to 1")
    taus = [np.asarray(getattr(t, "matrix", t), dtype=complex) for t in tau_list]
    d_b = taus[0].shape[0]
    if any(t.shape != (d_b, d_b) for t in taus):
        raise DimensionError("conditional states must share one dimension")
    for t in taus:
        DensityMatrix(t)
    d_a = len(probs)
    m = sum(p * tensor(np.diag(np.eye(d_a)[i]), t) for i, (p, t) in enumerate(zip(probs, taus)))
    return bipartite(m, d_a, d_b)


def dqc1_output(n: int, mu: float, unitary) -> BipartiteState:
    """Output of the one-clean-qubit circuit; the ancilla is subsystem A.

    Blocks ``[[I, mu U^dagger], [mu U, I]] / 2^(n+1)``.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValidationError(f"polarization mu={mu} outside [0, 1]")
    u = as_matrix(unitary)
    d = 2 ** n
    if u.shape != (d, d):
        raise DimensionError(f"unitary must be {d}x{d} for n={n}")
    if not is_unitary(u):
        raise ValidationError("DQC1 gate is not unitary")
    eye = np.eye(d)
    m = np.block([[eye, mu * u.conj().T], [mu * u, eye]]) / (2 * d)
    return bipartite(m, 2, d)


def spin_probe(j: float, r: float) -> BipartiteState:
    """Dephased spin-j probe restricted to span{|j>, |-j>} (x) {|0>, |1>}.

    A basis index 0 is |m=j>, index 1 is |m=-j>.  The restricted J_z is
    diag(j, -j); its spectrum (-j, j) is recorded in ``meta['spectrum']``.
    """
    if j <= 0:
        raise ValidationError("spin j must be positive")
    if not 0.0 <= r <= 1.0:
        raise ValidationError(f"coherence r={r} outside [0, 1]")
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    m[0, 3] = m[3, 0] = 0.5 * r
    return bipartite(m, 2, 2, spectrum=(-float(j), float(j)), j=float(j))


def restricted_jz(j: float) -> np.ndarray:
    return np.diag([float(j), -float(j)]).astype(complex)


def linear_entropy_two_qubit(rho) -> float:
    """Normalized linear entropy 4/3 (1 - tr rho^2) of a two-qubit state."""
    m = as_matrix(rho)
    if m.shape[0] != 4:
        raise DimensionError("linear entropy is normalized for two qubits (dim 4)")
    purity = float(np.real(np.einsum("ij,ji->", m, m)))
    return 4.0 / 3.0 * (1.0 - purity)


def random_density_matrix(d_A: int, d_B: int = 1, rank: int | None = None, seed=None) -> BipartiteState:
    """Ginibre-ensemble state of the given rank (full rank by default)."""
    rng = as_rng(seed)
    d = d_A * d_B
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return bipartite(m / np.trace(m).real, d_A, d_B)


def random_pure_state(d_A: int, d_B: int, seed=None) -> BipartiteState:
    return random_density_matrix(d_A, d_B, rank=1, seed=seed)
