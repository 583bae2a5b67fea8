"""Intermediate coherent-phase states on truncated Fock spaces."""

__version__ = "0.1.0"

from .analysis import (
    CoherentLimitSpec,
    coherent_limit_probe,
    mandel_q,
    q_scan,
    quadrature_variances,
    variance_surface,
)
from .states import (
    IcpsParams,
    binomial_state,
    coherent_state_truncated,
    icps_coefficients,
    icps_eigenvalue,
    icps_state,
    icps_via_displacement,
    pb_phase_state,
    time_evolve,
)
