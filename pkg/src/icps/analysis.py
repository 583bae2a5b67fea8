"""Nonclassicality diagnostics and limit probes for ICPS.

Photon statistics and quadrature variances are computed twice: from the
closed-form sums over the amplitudes ``D_n`` and from expectation values of
the operator matrices. The two must agree; a mismatch means an index or
sign error in one of the routes.
"""

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from . import fock
from .states import (
    IcpsParams,
    _coefficients_from_log_eta,
    _log_f_factorials,
    _with_phase_ramp,
    binomial_state,
    coherent_state_truncated,
    icps_coefficients,
    icps_state,
    pb_phase_state,
)

__all__ = [
    "QuadratureConsistencyError",
    "MomentReport",
    "QuadratureReport",
    "VarianceSurface",
    "CoherentLimitSpec",
    "moments_from_weights",
    "mandel_q",
    "closed_form_variances",
    "operator_variances",
    "quadrature_variances",
    "q_scan",
    "variance_surface",
    "squeezing_boundary",
    "pb_limit_fidelities",
    "coherent_eta",
    "coherent_limit_probe",
    "factorial_root_ratio",
    "binomial_ladder_check",
]

VACUUM_MEAN_TOL = 1e-12
SQUEEZE_TOL = 1e-12
CONSISTENCY_TOL = 1e-11


class QuadratureConsistencyError(RuntimeError):
    """Closed-form and operator-matrix variances disagree."""


@dataclass(frozen=True)
class MomentReport:
    mean_n: float
    mean_n2: float
    q: float
    vacuum_flag: bool


@dataclass(frozen=True)
class QuadratureReport:
    var_x: float
    var_p: float
    theta_m: float
    squeezed_x: bool
    squeezed_p: bool


@dataclass(frozen=True)
class VarianceSurface:
    """``var_x[i, j]`` is the x-quadrature variance at ``eta_grid[i]``, ``theta_grid[j]``.

    ``eta0[j]`` is the largest ``eta`` with ``var_x < 1/2`` in column ``j``,
    linearly interpolated to the crossing, or NaN when the column never
    squeezes.
    """

    M: int
    eta_grid: np.ndarray
    theta_grid: np.ndarray
    var_x: np.ndarray
    var_p: np.ndarray
    eta0: np.ndarray


@dataclass(frozen=True)
class CoherentLimitSpec:
    """Bookkeeping for the large-``M`` coherent limit.

    ``lam`` is the target coherent amplitude modulus. For each cutoff ``M``
    the probe chooses ``eta`` so that ``rho_modulus / sqrt(M) = lam``;
    ``log_etas`` and ``fidelities`` hold ``None`` where no such ``eta`` in
    ``(0, 1)`` exists.
    """

    lam: float
    theta0: float = 0.0
    M_list: tuple = (25, 50, 100, 200)
    log_etas: tuple = field(default=None)
    fidelities: tuple = field(default=None)

    @property
    def skipped(self):
        if self.fidelities is None:
            return None
        return tuple(f is None for f in self.fidelities)


def moments_from_weights(p):
    """``<N>``, ``<N^2>`` and Mandel Q for a photon-number distribution ``p``."""
    p = np.asarray(p, dtype=float)
    n = np.arange(p.size, dtype=float)
    mean_n = float(p @ n)
    mean_n2 = float(p @ (n * n))
    if mean_n < VACUUM_MEAN_TOL:
        return MomentReport(mean_n, mean_n2, 0.0, True)
    return MomentReport(mean_n, mean_n2, (mean_n2 - mean_n**2) / mean_n - 1.0, False)


def mandel_q(M, eta):
    """Mandel Q of every ICPS branch at ``(M, eta)``.

    At the vacuum (``<N>`` below 1e-12) Q is set to 0 and ``vacuum_flag``
    raised, since the ratio is 0/0 there.
    """
    d = icps_coefficients(M, eta).d
    return moments_from_weights(d * d)


def _shifted_sums(d):
    n = np.arange(d.size, dtype=float)
    s0 = float(np.sum(n * d * d))
    s1 = float(np.sum(np.sqrt(n[:-1] + 1) * d[:-1] * d[1:]))
    s2 = float(np.sum(np.sqrt((n[:-2] + 1) * (n[:-2] + 2)) * d[:-2] * d[2:]))
    return s0, s1, s2


def closed_form_variances(d, theta_m):
    """Quadrature variances ``((dx)^2, (dp)^2)`` from the amplitudes ``D_n``.

    ``<a> = exp(i theta) S1`` and ``<a^2> = exp(2 i theta) S2`` so that
    ``(dx)^2 = 1/2 + S0 + cos(2 theta) S2 - 2 cos(theta)^2 S1^2`` and
    ``(dp)^2 = 1/2 + S0 - cos(2 theta) S2 - 2 sin(theta)^2 S1^2``.
    """
    s0, s1, s2 = _shifted_sums(np.asarray(d, dtype=float))
    c2 = math.cos(2 * theta_m)
    var_x = 0.5 + s0 + c2 * s2 - 2 * (math.cos(theta_m) * s1) ** 2
    var_p = 0.5 + s0 - c2 * s2 - 2 * (math.sin(theta_m) * s1) ** 2
    return var_x, var_p


def operator_variances(psi):
    """Quadrature variances of ``psi`` from the ``x`` and ``p`` matrices.

    The state is padded with one empty level first: on the bare
    ``len(psi)``-level space ``a a^dagger`` misses the top state and ``x^2``
    would be wrong there.
    """
    psi = np.concatenate((np.asarray(psi, dtype=complex), [0.0]))
    dim = psi.size
    out = []
    for q in (fock.quadrature_x(dim), fock.quadrature_p(dim)):
        mean = fock.expectation(q, psi).real
        mean_sq = fock.expectation(q @ q, psi).real
        out.append(mean_sq - mean * mean)
    return tuple(out)


def _report(var_x, var_p, theta_m):
    return QuadratureReport(
        var_x,
        var_p,
        theta_m,
        var_x < 0.5 - SQUEEZE_TOL,
        var_p < 0.5 - SQUEEZE_TOL,
    )


def quadrature_variances(params, tol=CONSISTENCY_TOL):
    """Quadrature variances of one ICPS, cross-checked against the matrices.

    Raises :class:`QuadratureConsistencyError` if the closed-form sums and
    the operator expectation values differ by more than ``tol``.
    """
    d = icps_coefficients(params.M, params.eta).d
    theta_m = params.theta_m
    var_x, var_p = closed_form_variances(d, theta_m)
    ox, op = operator_variances(_with_phase_ramp(d, theta_m))
    if abs(var_x - ox) > tol or abs(var_p - op) > tol:
        raise QuadratureConsistencyError(
            f"{params}: closed form ({var_x!r}, {var_p!r}) vs operator "
            f"({ox!r}, {op!r})"
        )
    return _report(var_x, var_p, theta_m)


def q_scan(M_list, eta_grid):
    """Rows ``(M, eta, Q, vacuum_flag)``, M outer and eta inner."""
    eta_grid = np.asarray(eta_grid, dtype=float)
    if eta_grid.size and (eta_grid.min() < 0.0 or eta_grid.max() > 1.0):
        raise ValueError("eta grid must lie within [0, 1]")
    rows = []
    for M in M_list:
        for eta in eta_grid:
            r = mandel_q(M, float(eta))
            rows.append((int(M), float(eta), r.q, r.vacuum_flag))
    return rows


def _last_crossing(xs, ys, level):
    below = np.flatnonzero(ys < level - SQUEEZE_TOL)
    if below.size == 0:
        return math.nan
    i = below[-1]
    if i == xs.size - 1:
        return float(xs[i])
    x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
    return float(x0 + (level - y0) * (x1 - x0) / (y1 - y0))


def variance_surface(M, eta_grid, theta_grid):
    """Grid of quadrature variances over ``eta`` and ``theta_m`` for one cutoff."""
    eta_grid = np.asarray(eta_grid, dtype=float)
    theta_grid = np.asarray(theta_grid, dtype=float)
    if eta_grid.size == 0 or theta_grid.size == 0:
        raise ValueError("grids must be nonempty")
    var_x = np.empty((eta_grid.size, theta_grid.size))
    var_p = np.empty_like(var_x)
    for i, eta in enumerate(eta_grid):
        d = icps_coefficients(M, float(eta)).d
        for j, theta in enumerate(theta_grid):
            var_x[i, j], var_p[i, j] = closed_form_variances(d, float(theta))
    eta0 = np.array(
        [_last_crossing(eta_grid, var_x[:, j], 0.5) for j in range(theta_grid.size)]
    )
    return VarianceSurface(int(M), eta_grid, theta_grid, var_x, var_p, eta0)


def squeezing_boundary(M, theta_m, step=0.01, xtol=1e-8):
    """Largest ``eta`` with x-squeezing at fixed ``theta_m``, refined by bisection.

    Returns NaN if no grid point is squeezed and 1.0 if the squeezing
    persists up to the phase-state end.
    """
    grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)

    def excess(eta):
        return closed_form_variances(icps_coefficients(M, eta).d, theta_m)[0] - 0.5

    values = np.array([excess(float(e)) for e in grid])
    below = np.flatnonzero(values < -SQUEEZE_TOL)
    if below.size == 0:
        return math.nan
    i = below[-1]
    if i == grid.size - 1:
        return 1.0
    return brentq(excess, grid[i], grid[i + 1], xtol=xtol)


def pb_limit_fidelities(M, eta_grid, m=0, theta0=0.0):
    """``|<theta_m|M, eta, theta_m>|`` along ``eta_grid``."""
    target = pb_phase_state(M, m, theta0)
    return np.array(
        [abs(np.vdot(target, icps_state(IcpsParams(M, float(e), m, theta0)))) for e in eta_grid]
    )


def coherent_eta(M, lam):
    """``log(eta)`` such that the ICPS eigenvalue modulus equals ``lam * sqrt(M)``.

    The modulus is not monotone in ``eta``: it rises from 0, peaks and falls
    back towards 1 at the phase-state end. The root on the rising side is the
    one continuing to ``eta -> 0``. Returns ``None`` when no ``eta`` in
    ``(0, 1)`` solves the equation.
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam!r}")
    target = (M + 1) * math.log(lam * math.sqrt(M))

    def g(log_eta):
        return 0.5 * log_eta + _log_f_factorials(M, log_eta)[M] - target

    # near eta = 0, F(M)! -> M!; start well below that asymptotic root
    lo = min(2.0 * (target - gammaln(M + 1)) - 50.0, -50.0)
    grid = np.linspace(lo, -1e-12, 2001)
    values = np.array([g(x) for x in grid])
    positive = np.flatnonzero(values > 0)
    if values[0] >= 0 or positive.size == 0:
        return None
    hi = grid[positive[0]]
    return brentq(g, grid[positive[0] - 1], hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)


def coherent_limit_probe(spec):
    """Fill ``spec`` with fidelities between ICPS and truncated coherent states.

    The ICPS is branch ``m = 0`` at the ``eta`` returned by
    :func:`coherent_eta`; the comparison state is ``|lam exp(i theta0)>``
    on the same ``M + 1`` levels.
    """
    if spec.lam <= 0:
        raise ValueError(f"lam must be positive, got {spec.lam!r}")
    log_etas, fids = [], []
    for M in spec.M_list:
        log_eta = coherent_eta(M, spec.lam)
        log_etas.append(log_eta)
        if log_eta is None:
            fids.append(None)
            continue
        coeffs = _coefficients_from_log_eta(M, log_eta, math.exp(log_eta))
        psi = _with_phase_ramp(coeffs.d, spec.theta0)
        target, _ = coherent_state_truncated(spec.lam * np.exp(1j * spec.theta0), M + 1)
        fids.append(float(abs(np.vdot(target, psi))))
    return dataclasses.replace(spec, log_etas=tuple(log_etas), fidelities=tuple(fids))


def factorial_root_ratio(M):
    """``((M + 1)!)^(1 / (M + 1)) / (M + 1)``; tends to ``1/e`` by Stirling."""
    return math.exp(gammaln(M + 2) / (M + 1) - math.log(M + 1))


def binomial_ladder_check(M, eta):
    """Residual of the binomial state in its ladder-operator eigen-equation."""
    psi = binomial_state(M, eta)
    op = math.sqrt(eta) * fock.number(M + 1) + math.sqrt(1.0 - eta) * fock.j_plus(M)
    return float(np.linalg.norm(op @ psi - math.sqrt(eta) * M * psi))
