"""Numerical tolerances shared by every module.

Defaults can be overridden process-wide through the ``LQU_TOLERANCES``
environment variable, which holds a JSON object mapping field names to
numbers, e.g. ``LQU_TOLERANCES='{"psd_clip": 1e-9}'``.  The CLI applies the
override once at start-up, before any computation.
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

ENV_VAR = "LQU_TOLERANCES"


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-9      # relative, max-norm of M - M^dagger
    trace: float = 1e-9
    psd_clip: float = 1e-10      # absolute, negative eigenvalues above -clip are zeroed
    spectrum_gap: float = 1e-9   # minimum gap of a nondegenerate spectrum
    w_imag: float = 1e-10        # imaginary residue allowed in the W matrix
    completeness: float = 1e-9   # Kraus completeness residual
    unitarity: float = 1e-9
    purity: float = 1e-9
    lqu_clamp: float = 1e-10
    sld_cutoff: float = 1e-12    # drop SLD terms with p_i + p_j below this
    outcome_cutoff: float = 1e-12
    refine_stop: float = 1e-8    # final step of the brute-force refinement

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)

    def replace(self, **overrides: float) -> "Tolerances":
        unknown = set(overrides) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()})

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_VAR)
        if not raw:
            return cls()
        overrides = json.loads(raw)
        if not isinstance(overrides, dict):
            raise ValueError(f"{ENV_VAR} must hold a JSON object")
        return cls().replace(**overrides)


_active = Tolerances()


def get() -> Tolerances:
    """Return the tolerances currently in effect."""
    return _active


def configure(tol: Tolerances) -> None:
    """Install `tol` as the process-wide default."""
    global _active
    _active = tol
