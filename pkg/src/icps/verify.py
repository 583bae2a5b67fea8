"""Seeded invariant suites backing ``icps verify``."""

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import analysis, fock
from .states import (
    IcpsParams,
    icps_coefficients,
    icps_eigenvalue,
    icps_operator,
    icps_state,
    icps_via_displacement,
)

DEFAULT_SEED = 19980
DEFAULT_TOLERANCES = {
    "eigen_residual": 1e-10,
    "spectrum": 1e-9,
    "route": 1e-12,
    "binomial": 1e-11,
    "symmetry": 1e-12,
    "moments": 1e-11,
    "uncertainty": 1e-10,
}


@dataclass
class SuiteResult:
    name: str
    samples: int
    max_residual: float
    tolerance: float
    worst_case: dict

    @property
    def passed(self):
        return self.max_residual < self.tolerance

    def as_dict(self):
        out = asdict(self)
        out["passed"] = self.passed
        return out


class _Tracker:
    def __init__(self, name, tol):
        self.name, self.tol = name, tol
        self.samples = 0
        self.worst = -math.inf
        self.case = {}

    def add(self, residual, **case):
        self.samples += 1
        if math.isnan(self.worst):
            return
        if math.isnan(residual) or residual > self.worst:
            self.worst, self.case = residual, case

    def result(self):
        worst = self.worst if self.samples else 0.0
        if math.isnan(worst):
            worst = math.inf
        return SuiteResult(self.name, self.samples, float(worst), self.tol, self.case)


def _eta(rng):
    # uniform on (0, 1]
    return float(1.0 - rng.random())


def eigen_residual_suite(rng, tol, M_max=40, n_eta=20):
    t = _Tracker("eigen_residual", tol)
    for M in range(1, M_max + 1):
        for _ in range(n_eta):
            eta, theta0 = _eta(rng), float(rng.uniform(0, 2 * math.pi))
            op = icps_operator(M, eta, theta0)
            for m in range(M + 1):
                p = IcpsParams(M, eta, m, theta0)
                psi = icps_state(p)
                res = np.linalg.norm(op @ psi - icps_eigenvalue(p) * psi)
                t.add(float(res), M=M, eta=eta, m=m, theta0=theta0)
    return t.result()


def spectrum_suite(rng, tol, M_max=10, n_eta=20):
    """Closed-form eigenvalues against dense diagonalization, matched one-to-one."""
    t = _Tracker("spectrum", tol)
    for M in range(1, M_max + 1):
        for _ in range(n_eta):
            eta, theta0 = _eta(rng), float(rng.uniform(0, 2 * math.pi))
            numeric = np.array([e.value for e in fock.dense_eig(icps_operator(M, eta, theta0))])
            closed = np.array(
                [icps_eigenvalue(IcpsParams(M, eta, m, theta0)) for m in range(M + 1)]
            )
            cost = np.abs(numeric[:, None] - closed[None, :])
            rows, cols = linear_sum_assignment(cost)
            t.add(float(cost[rows, cols].max()), M=M, eta=eta, theta0=theta0)
    return t.result()


def route_suite(rng, tol, M_max=20, draws=200):
    t = _Tracker("route", tol)
    for _ in range(draws):
        M = int(rng.integers(1, M_max + 1))
        p = IcpsParams(M, _eta(rng), int(rng.integers(0, M + 1)), float(rng.uniform(0, 2 * math.pi)))
        res = np.max(np.abs(icps_via_displacement(p) - icps_state(p)))
        t.add(float(res), **asdict(p))
    return t.result()


def binomial_suite(rng, tol, M_max=30, draws=100):
    t = _Tracker("binomial", tol)
    for _ in range(draws):
        M = int(rng.integers(1, M_max + 1))
        eta = float(rng.uniform(0, 1))
        while eta == 0.0:
            eta = float(rng.uniform(0, 1))
        t.add(analysis.binomial_ladder_check(M, eta), M=M, eta=eta)
    return t.result()


def _draw_params(rng, M_max):
    M = int(rng.integers(1, M_max + 1))
    return IcpsParams(M, _eta(rng), int(rng.integers(0, M + 1)), float(rng.uniform(0, 2 * math.pi)))


def symmetry_suite(rng, tol, M_max=20, draws=500):
    """x/p exchange under a quarter turn, pi-periodicity and the mirror at pi/2."""
    t = _Tracker("symmetry", tol)
    for _ in range(draws):
        p = _draw_params(rng, M_max)
        d = icps_coefficients(p.M, p.eta).d
        th = p.theta_m
        vx, _ = analysis.closed_form_variances(d, th)
        res = max(
            abs(vx - analysis.closed_form_variances(d, th + math.pi / 2)[1]),
            abs(vx - analysis.closed_form_variances(d, th - math.pi / 2)[1]),
            abs(vx - analysis.closed_form_variances(d, th + math.pi)[0]),
            abs(vx - analysis.closed_form_variances(d, math.pi - th)[0]),
        )
        t.add(res, **asdict(p))
    return t.result()


def moments_suite(rng, tol, uncertainty_tol, M_max=20, draws=500):
    """Closed-form moments and variances against operator-matrix expectations."""
    t = _Tracker("moments", tol)
    u = _Tracker("uncertainty", uncertainty_tol)
    for _ in range(draws):
        p = _draw_params(rng, M_max)
        d = icps_coefficients(p.M, p.eta).d
        psi = icps_state(p)
        report = analysis.moments_from_weights(d * d)
        N = fock.number(p.M + 1)
        mean_n = fock.expectation(N, psi).real
        mean_n2 = fock.expectation(N @ N, psi).real
        q_op = (mean_n2 - mean_n**2) / mean_n - 1.0 if mean_n >= analysis.VACUUM_MEAN_TOL else 0.0
        cf = analysis.closed_form_variances(d, p.theta_m)
        op = analysis.operator_variances(psi)
        res = max(
            abs(report.mean_n - mean_n),
            abs(report.mean_n2 - mean_n2),
            abs(report.q - q_op),
            abs(cf[0] - op[0]),
            abs(cf[1] - op[1]),
        )
        t.add(res, **asdict(p))
        u.add(max(0.0, 0.25 - cf[0] * cf[1]), **asdict(p))
    return t.result(), u.result()


def run_verification(seed=DEFAULT_SEED, M_max=40, oracle=True, tolerances=None):
    """Run every suite and return a list of :class:`SuiteResult`."""
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ValueError(f"unknown tolerance name(s): {', '.join(sorted(unknown))}")
        tol.update(tolerances)
    if M_max < 1:
        raise ValueError(f"M_max must be >= 1, got {M_max}")
    rng = np.random.default_rng(seed)
    results = [eigen_residual_suite(rng, tol["eigen_residual"], M_max=M_max)]
    if oracle:
        results.append(spectrum_suite(rng, tol["spectrum"], M_max=min(M_max, 10)))
    results.append(route_suite(rng, tol["route"], M_max=min(M_max, 20)))
    results.append(binomial_suite(rng, tol["binomial"], M_max=min(M_max, 30)))
    results.append(symmetry_suite(rng, tol["symmetry"], M_max=min(M_max, 20)))
    results += moments_suite(rng, tol["moments"], tol["uncertainty"], M_max=min(M_max, 20))
    return results
