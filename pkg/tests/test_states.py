import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icps import fock
from icps.states import (
    DegenerateSpectrumWarning,
    IcpsParams,
    binomial_state,
    coherent_state_truncated,
    f_weight,
    free_evolution,
    icps_coefficients,
    icps_eigenvalue,
    icps_operator,
    icps_state,
    icps_via_displacement,
    log_f_factorial,
    pb_phase_state,
    time_evolve,
)

etas = st.floats(1e-6, 1.0)
thetas = st.floats(0.0, 2 * math.pi)


@st.composite
def params(draw, M_max=20):
    M = draw(st.integers(1, M_max))
    return IcpsParams(M, draw(etas), draw(st.integers(0, M)), draw(thetas))


def fidelity(a, b):
    return abs(np.vdot(a, b))


def test_params_validation():
    assert IcpsParams(3, 0.5, 1, 0.2).theta_m == pytest.approx(2 * math.pi / 4 + 0.2)
    for bad in [(0, 0.5, 0, 0.0), (3, 1.5, 0, 0.0), (3, -0.1, 0, 0.0), (2, 0.5, 3, 0.0), (2, 0.5, -1, 0.0)]:
        with pytest.raises(ValueError):
            IcpsParams(*bad)


def test_f_weight():
    assert f_weight(2, 5, 1.0) == 1.0
    assert f_weight(2, 3, 0.0) == 2.0
    assert f_weight(1, 1, 0.25) == pytest.approx(1.3660254037844386, abs=1e-15)
    with pytest.raises(ValueError):
        f_weight(0, 3, 0.5)
    with pytest.raises(ValueError):
        f_weight(4, 3, 0.5)


def test_log_f_factorial():
    assert log_f_factorial(0, 4, 0.3) == 0.0
    assert all(log_f_factorial(n, 6, 1.0) == 0.0 for n in range(7))
    assert log_f_factorial(3, 3, 0.0) == pytest.approx(math.log(6), abs=1e-15)
    with pytest.raises(ValueError):
        log_f_factorial(4, 3, 0.5)


def test_eigenvalue_at_phase_end_is_unimodular():
    p = IcpsParams(5, 1.0, 2, 0.3)
    rho = icps_eigenvalue(p)
    assert abs(rho) == 1.0
    assert rho == pytest.approx(np.exp(1j * p.theta_m), abs=1e-15)


def test_eigenvalue_against_diagonalization():
    M, eta = 3, 0.5
    expected_modulus = (math.sqrt(eta) * math.exp(log_f_factorial(M, M, eta))) ** (1 / (M + 1))
    numeric = fock.dense_eig(icps_operator(M, eta, 0.0))
    for m, pair in enumerate(numeric):
        assert abs(pair.value) == pytest.approx(expected_modulus, abs=1e-12)
        assert icps_eigenvalue(IcpsParams(M, eta, m, 0.0)) == pytest.approx(pair.value, abs=1e-9)


def test_eigenvalues_equally_spaced():
    M, eta, theta0 = 6, 0.37, 0.9
    rhos = [icps_eigenvalue(IcpsParams(M, eta, m, theta0)) for m in range(M + 1)]
    step = np.exp(2j * np.pi / (M + 1))
    assert np.allclose(np.array(rhos[1:]) / np.array(rhos[:-1]), step, atol=1e-14)


def test_eigenvalue_degenerate_at_zero():
    with pytest.warns(DegenerateSpectrumWarning):
        assert icps_eigenvalue(IcpsParams(4, 0.0, 2, 0.0)) == 0


def test_coefficient_endpoints():
    c = icps_coefficients(5, 1.0)
    assert np.allclose(c.d, 1 / math.sqrt(6), atol=1e-15)
    assert c.c0 == pytest.approx(1 / math.sqrt(6))
    c = icps_coefficients(5, 0.0)
    assert np.array_equal(c.d, [1, 0, 0, 0, 0, 0])
    assert c.rho_modulus == 0.0


def test_coefficient_ratio_two_level():
    c = icps_coefficients(1, 0.25)
    # |C1/C0|^2 = sqrt(eta) / F(1)
    assert c.d[1] ** 2 / c.d[0] ** 2 == pytest.approx(0.36602540378443865, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 200), st.floats(1e-9, 1.0, exclude_max=True))
def test_coefficient_invariants(M, eta):
    c = icps_coefficients(M, eta)
    assert abs(np.sum(c.d**2) - 1) < 1e-12
    assert np.all(c.d > 0) or np.any(c.log_weights < -700)
    assert np.allclose(c.d, c.c0 * np.exp(c.log_weights), rtol=1e-10, atol=1e-300)


@pytest.mark.parametrize("M", [1, 2, 5, 9, 15])
@pytest.mark.parametrize("eta", [0.01, 0.3, 0.77, 0.999])
def test_log_domain_matches_direct_products(M, eta):
    F = [f_weight(n, M, eta) for n in range(1, M + 1)]
    fact = [math.prod(F[:n]) for n in range(M + 1)]
    root = (math.sqrt(eta) * fact[M]) ** (1 / (M + 1))
    w = np.array([root**n / fact[n] for n in range(M + 1)])
    direct = w / math.sqrt(math.fsum(w**2))
    assert np.max(np.abs(icps_coefficients(M, eta).d - direct)) < 1e-10


def test_large_cutoff_stays_finite():
    c = icps_coefficients(10_000, 0.3)
    assert np.all(np.isfinite(c.d))
    assert abs(np.sum(c.d**2) - 1) < 1e-12


def test_state_endpoints():
    p = IcpsParams(6, 1.0, 4, 0.25)
    assert fidelity(icps_state(p), pb_phase_state(6, 4, 0.25)) == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(icps_state(IcpsParams(6, 0.0, 4, 0.25)), fock.basis(7, 0))


def test_state_solves_eigen_equation():
    p = IcpsParams(3, 0.5, 1, 0.0)
    psi = icps_state(p)
    op = math.sqrt(0.5) * fock.exp_phase(4, 0.0) + math.sqrt(0.5) * fock.j_plus(3)
    assert np.linalg.norm(op @ psi - icps_eigenvalue(p) * psi) < 1e-12
    assert fock.is_normalized(psi)
    assert psi[0].imag == 0 and psi[0].real > 0


@settings(max_examples=200, deadline=None)
@given(params())
def test_displacement_route_matches_recursion(p):
    assert np.max(np.abs(icps_via_displacement(p) - icps_state(p))) < 1e-12


def test_displacement_two_level_by_hand():
    p = IcpsParams(1, 1.0, 1, 0.4)
    expected = np.array([1, np.exp(1j * p.theta_m)]) / math.sqrt(2)
    assert np.allclose(icps_via_displacement(p), expected, atol=1e-15)


def test_displacement_vacuum_overlap_is_c0():
    p = IcpsParams(8, 0.42, 3, 1.1)
    psi = icps_via_displacement(p)
    assert psi[0].real == pytest.approx(icps_coefficients(8, 0.42).c0, abs=1e-14)
    assert abs(psi[0].imag) < 1e-15


def test_displacement_rejects_vacuum_limit():
    with pytest.raises(ValueError):
        icps_via_displacement(IcpsParams(3, 0.0))


def test_pb_phase_state():
    M = 5
    psi = pb_phase_state(M, 2, 0.3)
    assert np.allclose(np.abs(psi), 1 / math.sqrt(M + 1), atol=1e-16)
    theta = 2 * math.pi * 2 / (M + 1) + 0.3
    U = fock.exp_phase(M + 1, 0.3)
    assert np.linalg.norm(U @ psi - np.exp(1j * theta) * psi) < 1e-13
    states = [pb_phase_state(M, m, 0.3) for m in range(M + 1)]
    gram = np.array([[np.vdot(a, b) for b in states] for a in states])
    assert np.max(np.abs(gram - np.eye(M + 1))) < 1e-13
    with pytest.raises(ValueError):
        pb_phase_state(3, 4)


def test_branch_orthogonality_only_at_phase_end():
    M = 4
    at_end = [icps_state(IcpsParams(M, 1.0, m, 0.0)) for m in range(M + 1)]
    gram = np.array([[np.vdot(a, b) for b in at_end] for a in at_end])
    assert np.max(np.abs(gram - np.eye(M + 1))) < 1e-12
    # off the end the branches overlap; nothing is claimed, so only record it
    inner = [icps_state(IcpsParams(M, 0.5, m, 0.0)) for m in range(M + 1)]
    gram = np.array([[np.vdot(a, b) for b in inner] for a in inner])
    assert np.allclose(np.diag(gram), 1)


def test_binomial_state():
    assert np.array_equal(binomial_state(4, 1.0), fock.basis(5, 4))
    assert np.array_equal(binomial_state(4, 0.0), fock.basis(5, 0))
    assert np.allclose(binomial_state(2, 0.5), [0.5, 1 / math.sqrt(2), 0.5], atol=1e-15)
    psi = binomial_state(9, 0.3)
    assert fock.is_normalized(psi)
    op = math.sqrt(0.3) * fock.number(10) + math.sqrt(0.7) * fock.j_plus(9)
    assert np.linalg.norm(op @ psi - math.sqrt(0.3) * 9 * psi) < 1e-11


def test_coherent_state_truncated():
    psi, tail = coherent_state_truncated(0.0, 6)
    assert np.array_equal(psi, fock.basis(6, 0)) and tail == 0.0
    psi, tail = coherent_state_truncated(np.exp(0.3j), 32)
    # sum_{n>=32} e^-1 / n!, evaluated with mpmath at 50 digits
    assert tail == pytest.approx(1.4417345421413976e-36, rel=1e-8)
    assert tail < 1e-25
    assert fock.is_normalized(psi)
    assert fock.expectation(fock.number(32), psi).real == pytest.approx(1.0, abs=1e-14)
    a = fock.annihilation(32)
    # truncated coherent state is an eigenvector of a away from the cut
    assert np.linalg.norm((a @ psi)[:-1] - np.exp(0.3j) * psi[:-1]) < 1e-14


def test_coherent_tail_reported_when_cut_short():
    psi, tail = coherent_state_truncated(3.0, 5)
    n = np.arange(5)
    kept = math.fsum(math.exp(-9) * 9**k / math.factorial(k) for k in n)
    assert tail == pytest.approx(1 - kept, rel=1e-12)
    assert fock.is_normalized(psi)


def test_time_evolve_identity_and_period():
    p = IcpsParams(4, 0.6, 2, 0.7)
    assert time_evolve(p, 1.3, 0.0) == p
    q = time_evolve(p, 1.0, 2 * math.pi)
    assert q.theta0 == pytest.approx(0.7, abs=1e-14)
    assert np.allclose(icps_state(q), icps_state(p), atol=1e-12)


def test_time_evolve_shifts_branch():
    M = 4
    p = IcpsParams(M, 0.6, 2, 0.0)
    q = time_evolve(p, 1.0, 2 * math.pi / (M + 1))
    lower = IcpsParams(M, 0.6, 1, 0.0)
    assert fidelity(icps_state(q), icps_state(lower)) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(params(), st.floats(-5, 5), st.floats(0, 10))
def test_time_evolve_matches_free_evolution(p, omega, t):
    evolved = free_evolution(icps_state(p), omega, t)
    target = icps_state(time_evolve(p, omega, t))
    assert np.allclose(np.abs(evolved), np.abs(target), atol=1e-12)
    # equal up to one global phase
    phase = evolved[0] / target[0]
    assert np.max(np.abs(evolved - phase * target)) < 1e-12


def test_fidelity_to_phase_state_rises_to_one():
    for M in (2, 7, 15):
        grid = np.linspace(0.9, 1.0, 51)
        target = pb_phase_state(M, 1, 0.2)
        f = [fidelity(target, icps_state(IcpsParams(M, e, 1, 0.2))) for e in grid]
        assert np.all(np.diff(f) >= 0)
        assert f[-1] == pytest.approx(1.0, abs=1e-12)


def test_no_warning_for_generic_eta():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        icps_eigenvalue(IcpsParams(3, 0.2))
