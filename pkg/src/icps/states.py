"""State families on the truncated Fock space.

The intermediate coherent-phase states (ICPS) are the eigenvectors of
``sqrt(eta) E + sqrt(1 - eta) J+`` where ``E`` is the exponential phase
operator and ``J+`` the Holstein-Primakoff raising operator. Their
amplitudes are ``C_n = rho^n / F(n)! * C_0`` with

    F(n) = sqrt(1 - eta) * sqrt(n (M - n + 1)) + sqrt(eta)

and ``rho^(M+1) = sqrt(eta) F(M)! exp(i (M+1) theta0)``. Products of ``F``
overflow doubles around ``M ~ 150`` so everything below is evaluated in the
log domain.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy
from scipy.stats import poisson

from . import fock

__all__ = [
    "DegenerateSpectrumWarning",
    "IcpsParams",
    "IcpsCoefficients",
    "f_weight",
    "log_f_factorial",
    "icps_eigenvalue",
    "icps_coefficients",
    "icps_state",
    "icps_via_displacement",
    "icps_operator",
    "pb_phase_state",
    "binomial_state",
    "coherent_state_truncated",
    "time_evolve",
    "free_evolution",
]


class DegenerateSpectrumWarning(UserWarning):
    """All ICPS branches coincide (eta = 0): the state is the vacuum."""


@dataclass(frozen=True)
class IcpsParams:
    """Parameters ``(M, eta, m, theta0)`` selecting one ICPS branch."""

    M: int
    eta: float
    m: int = 0
    theta0: float = 0.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be an integer >= 1, got {self.M!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")
        if int(self.m) != self.m or not 0 <= self.m <= self.M:
            raise ValueError(f"m must be an integer in [0, {self.M}], got {self.m!r}")
        if not math.isfinite(self.theta0):
            raise ValueError(f"theta0 must be finite, got {self.theta0!r}")

    @property
    def theta_m(self):
        return 2 * math.pi * self.m / (self.M + 1) + self.theta0


@dataclass(frozen=True)
class IcpsCoefficients:
    """Branch-independent ICPS amplitudes for a given ``(M, eta)``.

    ``log_weights[n]`` is ``log(rho_modulus^n / F(n)!)``, ``d`` the normalized
    nonnegative amplitudes and ``c0 = d[0]`` the vacuum amplitude.
    """

    M: int
    eta: float
    log_weights: np.ndarray
    d: np.ndarray
    c0: float
    rho_modulus: float


def _check_eta(eta):
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")


def f_weight(n, M, eta):
    if int(n) != n or not 1 <= n <= M:
        raise ValueError(f"n must be an integer in [1, {M}], got {n!r}")
    _check_eta(eta)
    return math.sqrt(1.0 - eta) * math.sqrt(n * (M - n + 1)) + math.sqrt(eta)


def log_f_factorial(n, M, eta):
    """``log F(n)!`` with ``F(0)! = 1``."""
    if int(n) != n or not 0 <= n <= M:
        raise ValueError(f"n must be an integer in [0, {M}], got {n!r}")
    _check_eta(eta)
    return math.fsum(math.log(f_weight(k, M, eta)) for k in range(1, int(n) + 1))


def _log_f_factorials(M, log_eta):
    # array of log F(n)! for n = 0..M, parameterized by log(eta) so that
    # eta far below the double range stays representable
    n = np.arange(1, M + 1, dtype=float)
    sqrt_eta = math.exp(0.5 * log_eta)
    sqrt_1m_eta = math.sqrt(-math.expm1(log_eta)) if log_eta < 0 else 0.0
    f = sqrt_1m_eta * np.sqrt(n * (M - n + 1)) + sqrt_eta
    return np.concatenate(([0.0], np.cumsum(np.log(f))))


def _coefficients_from_log_eta(M, log_eta, eta):
    lff = _log_f_factorials(M, log_eta)
    log_rho = (0.5 * log_eta + lff[M]) / (M + 1)
    log_weights = np.arange(M + 1) * log_rho - lff
    w = np.exp(log_weights - log_weights.max())
    d = w / np.linalg.norm(w)
    return IcpsCoefficients(M, eta, log_weights, d, float(d[0]), math.exp(log_rho))


def icps_coefficients(M, eta):
    """Normalized amplitude moduli ``D_n`` of every ICPS branch at ``(M, eta)``."""
    if int(M) != M or M < 1:
        raise ValueError(f"M must be an integer >= 1, got {M!r}")
    _check_eta(eta)
    M = int(M)
    if eta == 0.0:
        log_weights = np.full(M + 1, -np.inf)
        log_weights[0] = 0.0
        d = np.zeros(M + 1)
        d[0] = 1.0
        return IcpsCoefficients(M, 0.0, log_weights, d, 1.0, 0.0)
    if eta == 1.0:
        d = np.full(M + 1, 1.0 / math.sqrt(M + 1))
        return IcpsCoefficients(M, 1.0, np.zeros(M + 1), d, float(d[0]), 1.0)
    return _coefficients_from_log_eta(M, math.log(eta), float(eta))


def icps_eigenvalue(params):
    """Eigenvalue ``rho_m`` belonging to the branch selected by ``params``.

    At ``eta = 0`` the operator is nilpotent, every branch collapses onto the
    vacuum and ``0`` is returned with a :class:`DegenerateSpectrumWarning`.
    """
    if params.eta == 0.0:
        warnings.warn(
            "eta = 0: all branches degenerate to the vacuum with eigenvalue 0",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
        return 0j
    modulus = icps_coefficients(params.M, params.eta).rho_modulus
    return modulus * complex(math.cos(params.theta_m), math.sin(params.theta_m))


def _with_phase_ramp(d, theta_m):
    n = np.arange(d.size)
    return d * np.exp(1j * theta_m * n)


def icps_state(params):
    """ICPS ``sum_n D_n exp(i n theta_m) |n>`` as a complex vector."""
    coeffs = icps_coefficients(params.M, params.eta)
    return _with_phase_ramp(coeffs.d, params.theta_m)


def icps_operator(M, eta, theta0=0.0):
    """Matrix ``sqrt(eta) E + sqrt(1 - eta) J+`` whose eigenvectors are the ICPS."""
    _check_eta(eta)
    return math.sqrt(eta) * fock.exp_phase(M + 1, theta0) + math.sqrt(
        1.0 - eta
    ) * fock.j_plus(M)


def icps_via_displacement(params):
    """Build the ICPS by summing the finite exponential series on the vacuum.

    The generator maps ``|n-1> -> rho_m * n / F(n) |n>`` and the series
    ``sum_{k<=M} X^k / k! |0>`` is normalized at the end, which fixes the
    prefactor to ``C_0``. Intended for moderate ``M``: the raw series is not
    rescaled and overflows for very large cutoffs.
    """
    if params.eta == 0.0:
        raise ValueError("displacement form is undefined at eta = 0; use icps_state")
    M = params.M
    rho = icps_eigenvalue(params)
    scale = np.zeros(M + 1)
    for n in range(1, M + 1):
        scale[n] = math.sqrt(n) / f_weight(n, M, params.eta)
    generator = rho * (scale[:, None] * fock.creation(M + 1))

    term = fock.basis(M + 1, 0)
    total = term.copy()
    for k in range(1, M + 1):
        term = generator @ term / k
        total += term
    return total / np.linalg.norm(total)


def pb_phase_state(M, m, theta0=0.0):
    """Pegg-Barnett phase state ``|theta_m>`` on ``M + 1`` levels."""
    if int(M) != M or M < 0:
        raise ValueError(f"M must be an integer >= 0, got {M!r}")
    if int(m) != m or not 0 <= m <= M:
        raise ValueError(f"m must be an integer in [0, {M}], got {m!r}")
    theta_m = 2 * math.pi * m / (M + 1) + theta0
    return np.exp(1j * theta_m * np.arange(M + 1)) / math.sqrt(M + 1)


def binomial_state(M, eta):
    """Binomial state with amplitudes ``sqrt(C(M, n) eta^n (1 - eta)^(M - n))``."""
    if int(M) != M or M < 0:
        raise ValueError(f"M must be an integer >= 0, got {M!r}")
    _check_eta(eta)
    n = np.arange(M + 1, dtype=float)
    log_beta = (
        gammaln(M + 1)
        - gammaln(n + 1)
        - gammaln(M - n + 1)
        + xlogy(n, eta)
        + xlog1py(M - n, -eta)
    )
    return np.exp(0.5 * log_beta).astype(complex)


def coherent_state_truncated(amplitude, dim):
    """Coherent state ``|amplitude>`` cut to ``dim`` levels and renormalized.

    Returns ``(psi, tail_mass)`` where ``tail_mass`` is the Poisson
    probability of ``n >= dim`` discarded by the truncation.
    """
    dim = fock._check_dim(dim)
    r = abs(amplitude)
    if r == 0.0:
        return fock.basis(dim, 0), 0.0
    n = np.arange(dim, dtype=float)
    log_mod = n * math.log(r) - 0.5 * gammaln(n + 1)
    psi = np.exp(log_mod - log_mod.max() + 1j * n * np.angle(amplitude))
    psi /= np.linalg.norm(psi)
    return psi, float(poisson.sf(dim - 1, r * r))


def time_evolve(params, omega, t):
    """Free evolution under ``omega (N + 1/2)``: shifts ``theta0`` by ``-omega t``."""
    theta0 = (params.theta0 - omega * t) % (2 * math.pi)
    return IcpsParams(params.M, params.eta, params.m, theta0)


def free_evolution(psi, omega, t):
    """Apply ``exp(-i omega t (N + 1/2))`` to a state vector."""
    n = np.arange(len(psi))
    return np.exp(-1j * omega * t * (n + 0.5)) * psi
