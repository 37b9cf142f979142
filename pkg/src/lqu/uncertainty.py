"""Skew information, variance and local quantum uncertainty (LQU).

For a qubit A the LQU has the closed form ``1 - lambda_max(W)``; for any
d_A it can be bounded from above by sampling local observables with a fixed
spectrum and refining the best one (`lqu_bruteforce`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import tolerances
from .linalg import (
    PAULIS,
    DimensionError,
    ValidationError,
    as_matrix,
    as_rng,
    dagger,
    haar_unitaries,
    hermitian_eig,
    su_generators,
    symmetrize,
    tensor,
)
from .states import BipartiteState, DensityMatrix


class DegenerateSpectrumError(ValidationError):
    pass


def spectrum(values, gap: float | None = None) -> np.ndarray:
    """Validate a nondegenerate spectrum and return it sorted ascending."""
    gap = tolerances.get().spectrum_gap if gap is None else gap
    lam = np.sort(np.asarray(values, dtype=float).ravel())
    if lam.size == 0 or not np.all(np.isfinite(lam)):
        raise ValidationError("spectrum must be a non-empty finite vector")
    if lam.size > 1 and float(np.min(np.diff(lam))) <= gap:
        raise DegenerateSpectrumError(f"spectrum {lam.tolist()} is degenerate (min gap <= {gap:g})")
    return lam


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray

    def __post_init__(self):
        m = symmetrize(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> np.ndarray:
        return hermitian_eig(self.matrix).values

    def local(self, d_B: int) -> np.ndarray:
        """K (x) I_B."""
        return tensor(self.matrix, np.eye(d_B))


def _state(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(as_matrix(rho))


def _observable(k, dim: int) -> np.ndarray:
    k = k.matrix if isinstance(k, Observable) else symmetrize(k)
    if k.shape[0] != dim:
        raise DimensionError(f"observable of size {k.shape[0]} does not act on a state of size {dim}")
    return k


def variance(rho, k) -> float:
    """<K^2> - <K>^2."""
    rho = _state(rho)
    k = _observable(k, rho.dim)
    m = rho.matrix
    mean = np.einsum("ij,ji->", m, k).real
    second = np.einsum("ij,ji->", m, k @ k).real
    return float(second - mean ** 2)


def skew_information(rho, k) -> float:
    """Wigner-Yanase skew information -1/2 Tr([sqrt(rho), K]^2)."""
    rho = _state(rho)
    k = _observable(k, rho.dim)
    s = rho.sqrt
    c = s @ k - k @ s
    return float(-0.5 * np.einsum("ij,ji->", c, c).real)


class _LocalKernel:
    """Precomputed contractions for local observables K (x) I_B.

    ``T[a,c,e,f] = sum_{b,b'} S[(a,b),(c,b')] S[(e,b'),(f,b)]`` with S the
    square root of the state, so that
    ``Tr(S (K x I) S (K x I)) = sum T[a,c,e,f] K[c,e] K[f,a]``.
    """

    def __init__(self, state: BipartiteState):
        d_a, d_b = state.dims
        s = np.asarray(state.sqrt).reshape(d_a, d_b, d_a, d_b)
        self.t = np.einsum("abcd,edfb->acef", s, s, optimize=True)
        # t as a matrix from (c,e) to (a,f)
        self._tm = self.t.transpose(0, 3, 1, 2).reshape(d_a * d_a, d_a * d_a)
        self.rho_a = state.marginal("A")
        self._rho_t = self.rho_a.T.copy()
        self.d_A = d_a

    def _expect(self, ks: np.ndarray) -> np.ndarray:
        return np.sum(ks * self._rho_t, axis=(-2, -1)).real

    def skew(self, ks: np.ndarray) -> np.ndarray:
        """Skew information of each K (x) I in a stack of shape (n, d_A, d_A)."""
        n, d = ks.shape[0], self.d_A
        y = (ks.reshape(n, d * d) @ self._tm.T).reshape(n, d, d)
        overlap = np.sum(y * np.swapaxes(ks, -1, -2), axis=(-2, -1)).real
        return self._expect(ks @ ks) - overlap

    def variance(self, ks: np.ndarray) -> np.ndarray:
        return self._expect(ks @ ks) - self._expect(ks) ** 2


def _bipartite(rho) -> BipartiteState:
    if not isinstance(rho, BipartiteState):
        raise DimensionError("a bipartite state (with d_A, d_B) is required")
    return rho


def w_matrix(rho: BipartiteState) -> np.ndarray:
    """3x3 real symmetric W_ij = Tr(sqrt(rho) (s_i x I) sqrt(rho) (s_j x I))."""
    rho = _bipartite(rho)
    if rho.d_A != 2:
        raise DimensionError(f"the W matrix needs a qubit on A, got d_A={rho.d_A}")
    t = _LocalKernel(rho).t
    paulis = np.array(PAULIS)
    w = np.einsum("acef,ice,jfa->ij", t, paulis, paulis)
    tol = tolerances.get().w_imag
    asym = float(np.max(np.abs(w - w.T)))
    imag = float(np.max(np.abs(w.imag)))
    if asym > tol or imag > tol:
        raise ValidationError(f"W matrix is not real symmetric (asymmetry {asym:.2e}, imaginary {imag:.2e})")
    w = w.real
    return 0.5 * (w + w.T)


def lqu_closed_form(rho: BipartiteState) -> float:
    """LQU of a qubit-qudit state for observables n.sigma on A: 1 - lambda_max(W)."""
    value = 1.0 - float(np.linalg.eigvalsh(w_matrix(rho))[-1])
    clamp = tolerances.get().lqu_clamp
    if -clamp <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + clamp:
        return 1.0
    return value


def lqu_qubit(rho: BipartiteState, lam=(-1.0, 1.0)) -> float:
    """Closed-form LQU on a qubit A for an arbitrary nondegenerate spectrum.

    K = (a+b)/2 I + (b-a)/2 n.sigma, and the identity part drops out of the
    commutator, so the result is ((b - a)/2)^2 times the normalized LQU.
    """
    lam = spectrum(lam)
    if lam.size != 2:
        raise DimensionError("a qubit spectrum has two values")
    a, b = lam
    return ((b - a) / 2) ** 2 * lqu_closed_form(rho)


def _exp_moves(xs: np.ndarray, generators: np.ndarray) -> np.ndarray:
    """exp(i sum_k x_k G_k) for each row of coefficients."""
    w, q = np.linalg.eigh(np.einsum("nk,kij->nij", xs, generators))
    return (q * np.exp(1j * w)[:, None, :]) @ dagger(q)


def _pattern_search(f_batch, v: np.ndarray, generators: np.ndarray, step: float, stop: float):
    """Minimize f(V) over unitaries by moves V <- exp(i X) V, X in su(d).

    Each sweep evaluates the coordinate moves X = +-t G_k together with the
    diagonal pairs X = t (+-G_j +-G_k).  These central differences give a
    gradient and Hessian in the coordinates of X, and the Newton move (with
    Hessian eigenvalues replaced by their moduli, nearly flat directions
    dropped) is tried as well; it keeps the search from zig-zagging along
    narrow valleys.  The best candidate is taken.  A successful coordinate move doubles the step, a successful
    Newton move sets it to that move's length (both capped at the initial
    step), and a failed sweep halves it.  The search ends below `stop`.
    """
    m = len(generators)
    eye = np.eye(m)
    jj, kk = np.triu_indices(m, 1)
    pair_dirs = np.concatenate([eye[jj] + eye[kk], eye[jj] - eye[kk], -eye[jj] + eye[kk], -eye[jj] - eye[kk]])
    best = float(f_batch(v[None])[0])
    top = step
    while step >= stop:
        coord = _exp_moves(step * np.concatenate([eye, -eye]), generators) @ v
        pairs = _exp_moves(step * pair_dirs, generators) @ v
        fc = f_batch(coord)
        fp = f_batch(pairs).reshape(4, -1)
        grad = (fc[:m] - fc[m:]) / (2 * step)
        hess = np.diag((fc[:m] + fc[m:] - 2 * best) / step ** 2)
        hess[jj, kk] = hess[kk, jj] = (fp[0] - fp[1] - fp[2] + fp[3]) / (4 * step ** 2)
        hw, hq = np.linalg.eigh(hess)
        # flat directions (e.g. phases that commute with the spectrum) are dropped
        keep = np.abs(hw) > 1e-4 * max(1e-12, np.max(np.abs(hw)))
        newton = -hq[:, keep] @ ((hq[:, keep].T @ grad) / np.abs(hw[keep]))
        xs = np.array([newton, 0.5 * newton, 0.25 * newton])
        cands = np.concatenate([coord, _exp_moves(xs, generators) @ v])
        vals = np.concatenate([fc, f_batch(cands[2 * m:])])
        i = int(np.argmin(vals))
        # moves must beat rounding noise, otherwise the step never shrinks
        if vals[i] < best - 1e-15 * (1.0 + abs(best)):
            v, best = cands[i], float(vals[i])
            size = 2.0 * step if i < 2 * m else np.linalg.norm(xs[i - 2 * m])
            step = min(size, top)
        else:
            step *= 0.5
    return best, v


def _fixed_spectrum_stack(vs: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return (vs * lam[None, None, :]) @ np.conj(np.swapaxes(vs, -1, -2))


def _refine_best(f_batch, vs, starts: int, refine: bool, d: int):
    """Pattern-search refinement from the `starts` lowest sampled bases."""
    values = f_batch(vs)
    order = np.argsort(values, kind="stable")[:max(1, starts)]
    best, v = float(values[order[0]]), vs[order[0]]
    if not refine or d == 1:
        return best, v
    gens = su_generators(d)
    stop = tolerances.get().refine_stop
    for i in order:
        val, u = _pattern_search(f_batch, vs[i], gens, step=0.25, stop=stop)
        if val < best:
            best, v = val, u
    return best, v


def lqu_bruteforce(rho: BipartiteState, lam, budget: int = 2000, seed=0, refine: bool = True,
                   starts: int = 1, candidates=None, return_observable: bool = False):
    """Upper bound on the LQU with spectrum `lam` by direct minimization.

    Samples `budget` Haar-random bases V on A, evaluates the skew information
    of ``V diag(lam) V^dagger (x) I`` for each, and refines the `starts` best
    ones with a halving-step pattern search over su(d_A).  For a qubit A the
    landscape has no spurious local minima and one start suffices; for
    d_A > 2 use several.  `candidates` is an optional stack of extra bases
    evaluated alongside the samples.
    """
    rho = _bipartite(rho)
    lam = spectrum(lam)
    if lam.size != rho.d_A:
        raise DimensionError(f"spectrum has {lam.size} values, subsystem A has dimension {rho.d_A}")
    kernel = _LocalKernel(rho)
    vs = haar_unitaries(rho.d_A, max(int(budget), 1), as_rng(seed))
    if candidates is not None:
        vs = np.concatenate([np.asarray(candidates, dtype=complex).reshape(-1, rho.d_A, rho.d_A), vs])
    best, v = _refine_best(lambda us: kernel.skew(_fixed_spectrum_stack(us, lam)), vs, starts, refine, rho.d_A)
    if return_observable:
        return best, _fixed_spectrum_stack(v[None], lam)[0]
    return best


def min_variance_fixed_spectrum(rho, lam):
    """Exact minimum of Var_rho(K) over observables with spectrum `lam`.

    The minimum is attained by an observable commuting with rho, so it is a
    minimum over assignments of the values of `lam` to the eigenvalues p_i
    of rho (ascending).  Returns ``(value, perm)`` where ``perm[i]`` is the
    index into sorted `lam` assigned to p_i; ties resolve to the
    lexicographically first permutation.
    """
    rho = _state(rho)
    lam = np.sort(np.asarray(lam, dtype=float).ravel())
    if lam.size != rho.dim:
        raise DimensionError(f"spectrum has {lam.size} values, state has dimension {rho.dim}")
    if rho.dim > 8:
        raise DimensionError("permutation enumeration is limited to dimension 8")
    p = rho.probabilities
    best, best_perm = np.inf, None
    for perm in itertools.permutations(range(rho.dim)):
        x = lam[list(perm)]
        val = float(p @ x ** 2 - (p @ x) ** 2)
        if val < best:
            best, best_perm = val, perm
    return best, best_perm


def min_variance_search(rho, lam, budget: int = 2000, seed=0, refine: bool = True, starts: int = 10) -> float:
    """Minimize Var_rho(V diag(lam) V^dagger) over sampled and refined unitaries V.

    The variance landscape has local minima for d > 2, hence several starts.
    """
    rho = _state(rho)
    lam = np.sort(np.asarray(lam, dtype=float).ravel())
    if lam.size != rho.dim:
        raise DimensionError(f"spectrum has {lam.size} values, state has dimension {rho.dim}")
    kernel = _LocalKernel(rho if isinstance(rho, BipartiteState) else
                          BipartiteState(rho.matrix, rho.dim, 1, {}))
    vs = haar_unitaries(rho.dim, budget, as_rng(seed))
    best, _ = _refine_best(lambda us: kernel.variance(_fixed_spectrum_stack(us, lam)), vs, starts, refine, rho.dim)
    return best


def hellinger_sq(rho, chi) -> float:
    """Squared Hellinger distance 1/2 Tr((sqrt(rho) - sqrt(chi))^2)."""
    rho, chi = _state(rho), _state(chi)
    if rho.dim != chi.dim:
        raise DimensionError("states must have equal dimension")
    diff = rho.sqrt - chi.sqrt
    return float(0.5 * np.einsum("ij,ji->", diff, diff).real)


def linear_entanglement_entropy(psi: BipartiteState) -> float:
    """2 (1 - Tr rho_A^2) of a pure bipartite state."""
    psi = _bipartite(psi)
    if not psi.is_pure():
        raise ValidationError(f"state is not pure (purity {psi.purity():.12f})")
    rho_a = psi.marginal("A")
    return float(2.0 * (1.0 - np.einsum("ij,ji->", rho_a, rho_a).real))
