"""Local quantum uncertainty as a measure of discord-type correlations."""
__version__ = "0.1.0"

from .linalg import (
    DimensionError,
    NotHermitianError,
    NotPSDError,
    ValidationError,
    haar_unitary,
    hermitian_eig,
    partial_trace,
    psd_sqrt,
    tensor,
)
from .states import (
    BipartiteState,
    DensityMatrix,
    bell_phi_plus,
    classical_quantum,
    dqc1_output,
    linear_entropy_two_qubit,
    pure_state,
    spin_probe,
    werner,
)
from .uncertainty import (
    DegenerateSpectrumError,
    Observable,
    hellinger_sq,
    linear_entanglement_entropy,
    lqu_bruteforce,
    lqu_closed_form,
    lqu_qubit,
    min_variance_fixed_spectrum,
    skew_information,
    variance,
    w_matrix,
)
from .metrology import (
    EstimationBound,
    estimation_bound,
    evolve_phase,
    qfi,
    shot_noise_threshold,
    spin_probe_lqu_formula,
)
from .channels import KrausChannel, apply_local, random_channel, selective_local_ops
