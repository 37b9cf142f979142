"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Bipartite
operators use the convention that subsystem A is the slow index: the row
index of ``kron(A, B)`` is ``i_A * d_B + i_B``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import tolerances

RNG_ALGORITHM = "PCG64"

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class ValidationError(ValueError):
    """An input failed a structural or numerical precondition."""


class DimensionError(ValidationError):
    pass


class NotHermitianError(ValidationError):
    pass


class NotPSDError(ValidationError):
    pass


class EigenDecomposition(NamedTuple):
    values: np.ndarray   # ascending, real
    vectors: np.ndarray  # columns are eigenvectors

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(m) -> np.ndarray:
    """Coerce `m` into a finite square complex array."""
    m = np.asarray(getattr(m, "matrix", m), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_residual(m: np.ndarray) -> float:
    """Max-norm of M - M^dagger relative to max(1, ||M||_max)."""
    scale = max(1.0, float(np.max(np.abs(m))))
    return float(np.max(np.abs(m - m.conj().T))) / scale


def symmetrize(m, tol: float | None = None) -> np.ndarray:
    """Return (M + M^dagger)/2 after checking M is Hermitian within `tol`."""
    m = as_matrix(m)
    tol = tolerances.get().hermitian if tol is None else tol
    res = hermiticity_residual(m)
    if res > tol:
        raise NotHermitianError(f"matrix is not Hermitian: relative residual {res:.3e} > {tol:.1e}")
    return 0.5 * (m + m.conj().T)


def hermitian_eig(m, tol: float | None = None) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = symmetrize(m, tol)
    values, vectors = np.linalg.eigh(h)
    return EigenDecomposition(values, vectors)


def clip_spectrum(values: np.ndarray, clip: float | None = None) -> np.ndarray:
    """Zero eigenvalues in [-clip, 0); raise if any lies below -clip.

    Positive eigenvalues below the numerical-rank threshold
    ``d * eps * max(values)`` are zeroed as well: they are rounding noise of
    the eigensolver, and their square roots (~1e-8) would otherwise leak
    into every quantity built from sqrt(rho).
    """
    clip = tolerances.get().psd_clip if clip is None else clip
    lowest = float(values.min())
    if lowest < -clip:
        raise NotPSDError(f"matrix is not positive semidefinite: eigenvalue {lowest:.3e} < -{clip:.1e}")
    noise = values.size * np.finfo(float).eps * max(float(values.max()), 0.0)
    return np.where(values > noise, values, 0.0)


def psd_sqrt(m, clip: float | None = None) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    eig = hermitian_eig(m)
    values = clip_spectrum(eig.values, clip)
    return EigenDecomposition(np.sqrt(values), eig.vectors).reconstruct()


def expm_hermitian(h, t: complex = 1.0) -> np.ndarray:
    """exp(t * H) for Hermitian H, e.g. ``t=-1j*phi`` for a phase shift."""
    eig = hermitian_eig(h)
    return (eig.vectors * np.exp(t * eig.values)) @ eig.vectors.conj().T


def tensor(*ops) -> np.ndarray:
    """Kronecker product, leftmost factor is the slowest index."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def partial_trace(rho, dims=None, keep: str = "A") -> np.ndarray:
    """Reduce a bipartite operator to subsystem ``keep`` ('A' or 'B').

    `rho` may be a raw matrix together with ``dims=(d_A, d_B)``, or any
    object exposing ``.matrix`` and ``.dims``.
    """
    if dims is None:
        dims = getattr(rho, "dims", None)
        if dims is None:
            raise DimensionError("subsystem dimensions are required")
    m = as_matrix(rho)
    d_a, d_b = (int(d) for d in dims)
    if d_a * d_b != m.shape[0]:
        raise DimensionError(f"dims {d_a}x{d_b} do not match matrix of size {m.shape[0]}")
    t = m.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        return np.einsum("ajbj->ab", t)
    if keep == "B":
        return np.einsum("iaib->ab", t)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def haar_unitaries(d: int, count: int, seed=None) -> np.ndarray:
    """Stack of `count` Haar-random d x d unitaries, shape (count, d, d).

    QR of a complex Ginibre matrix with the phases of diag(R) pushed into Q
    (Mezzadri's correction), which makes the distribution exactly Haar.
    """
    if d < 1:
        raise DimensionError("dimension must be positive")
    rng = as_rng(seed)
    z = (rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """One Haar-random d x d unitary; identical output for identical seed."""
    return haar_unitaries(d, 1, seed)[0]


def su_generators(d: int) -> np.ndarray:
    """Generalized Gell-Mann basis of su(d), shape (d*d - 1, d, d)."""
    gens = []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1
            gens.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            gens.append(a)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        gens.append(np.diag(diag * np.sqrt(2 / (l * (l + 1)))).astype(complex))
    return np.array(gens).reshape(-1, d, d)


def is_unitary(u, tol: float | None = None) -> bool:
    u = as_matrix(u)
    tol = tolerances.get().unitarity if tol is None else tol
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol
