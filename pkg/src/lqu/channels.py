"""Local Kraus channels and selective operations on bipartite states."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances
from .linalg import DimensionError, ValidationError, as_rng, haar_unitary, tensor
from .states import BipartiteState, bipartite


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: tuple
    label: str = ""

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d_in = ops[0].shape[1]
        if any(k.ndim != 2 or k.shape[1] != d_in for k in ops):
            raise DimensionError("Kraus operators must share an input dimension")
        object.__setattr__(self, "operators", ops)
        res = self.completeness_residual()
        if res > tolerances.get().completeness:
            raise ValidationError(f"Kraus operators are not complete: residual {res:.3e}")

    @property
    def dim_in(self) -> int:
        return self.operators[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.operators[0].shape[0]

    def completeness_residual(self) -> float:
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim_in))))


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d),), "identity")


def depolarizing_channel(d: int, p: float = 1.0) -> KrausChannel:
    """rho -> (1 - p) rho + p Tr(rho) I/d, via the d^2 unitary error basis."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError("depolarizing probability outside [0, 1]")
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    ops = []
    for a in range(d):
        for b in range(d):
            weight = (1 - p + p / d ** 2) if a == b == 0 else p / d ** 2
            ops.append(np.sqrt(weight) * np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b))
    return KrausChannel(tuple(ops), f"depolarizing(p={p})")


def random_channel(d: int, kraus_rank: int, seed=None) -> KrausChannel:
    """Random channel on dimension d from a Stinespring isometry.

    The first d columns of a Haar unitary on C^(d * kraus_rank) form an
    isometry V; its d x d row blocks are the Kraus operators.
    """
    if kraus_rank < 1:
        raise ValidationError("Kraus rank must be at least 1")
    u = haar_unitary(d * kraus_rank, as_rng(seed))
    v = u[:, :d]
    return KrausChannel(tuple(v[i * d:(i + 1) * d] for i in range(kraus_rank)), f"random(d={d},rank={kraus_rank})")


def _lift(k: np.ndarray, rho: BipartiteState, side: str) -> np.ndarray:
    if side == "A":
        return tensor(k, np.eye(rho.d_B))
    if side == "B":
        return tensor(np.eye(rho.d_A), k)
    raise ValueError(f"side must be 'A' or 'B', not {side!r}")


def apply_local(rho: BipartiteState, channel: KrausChannel, side: str = "B") -> BipartiteState:
    """(Phi (x) id) or (id (x) Phi) applied to a bipartite state."""
    d_side = rho.d_A if side == "A" else rho.d_B
    if channel.dim_in != d_side or channel.dim_out != d_side:
        raise DimensionError(f"channel acts on dimension {channel.dim_in}, side {side} has {d_side}")
    out = np.zeros_like(rho.matrix)
    for k in channel.operators:
        big = _lift(k, rho, side)
        out += big @ rho.matrix @ big.conj().T
    return bipartite(out, rho.d_A, rho.d_B)


def selective_local_ops(psi: BipartiteState, channel: KrausChannel, side: str = "A"):
    """Outcome ensemble [(p_i, phi_i)] of measuring the Kraus operators on a pure state.

    ``sqrt(p_i) |phi_i> = (M_i (x) I) |psi>``; outcomes with p_i below the
    outcome cutoff are dropped.
    """
    tol = tolerances.get()
    if not psi.is_pure():
        raise ValidationError(f"selective operations need a pure state (purity {psi.purity():.12f})")
    d_side = psi.d_A if side == "A" else psi.d_B
    if channel.dim_in != d_side or channel.dim_out != d_side:
        raise DimensionError(f"channel acts on dimension {channel.dim_in}, side {side} has {d_side}")
    vec = psi.eig.vectors[:, -1]
    out = []
    for k in channel.operators:
        branch = _lift(k, psi, side) @ vec
        p = float(np.vdot(branch, branch).real)
        if p < tol.outcome_cutoff:
            continue
        branch = branch / np.sqrt(p)
        out.append((p, bipartite(np.outer(branch, branch.conj()), psi.d_A, psi.d_B)))
    return out
