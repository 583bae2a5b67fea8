"""Truncated Fock-space primitives.

States are complex numpy vectors of length ``M + 1`` (amplitude of ``|n>`` at
index ``n``) and operators are dense ``(M + 1) x (M + 1)`` complex matrices.
Dimensions here never exceed a few hundred, so everything stays dense.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EigenConvergenceError",
    "EigenPair",
    "annihilation",
    "creation",
    "number",
    "exp_phase",
    "j_plus",
    "j_minus",
    "quadrature_x",
    "quadrature_p",
    "basis",
    "is_normalized",
    "expectation",
    "dense_eig",
]

NORM_TOL = 1e-12
EIG_MAX_DIM = 64


class EigenConvergenceError(RuntimeError):
    """Raised when the dense eigensolver fails or violates its residual bound."""


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: np.ndarray
    residual: float


def _check_dim(dim):
    if int(dim) != dim or dim < 1:
        raise ValueError(f"invalid dimension {dim!r}: need an integer >= 1")
    return int(dim)


def annihilation(dim):
    """Lowering operator ``a`` with ``a|n> = sqrt(n)|n-1>``."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def creation(dim):
    """Raising operator ``a^dagger`` (conjugate transpose of :func:`annihilation`)."""
    return annihilation(dim).conj().T.copy()


def number(dim):
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def exp_phase(dim, theta0=0.0):
    """Unitary Pegg-Barnett exponential phase operator on ``dim`` levels.

    Acts as a cyclic lowering: ``|n> -> |n-1>`` for ``n >= 1`` and
    ``|0> -> exp(i * dim * theta0) |dim - 1>``. Its eigenvectors are the
    phase states with eigenvalues ``exp(i theta_m)``.
    """
    dim = _check_dim(dim)
    op = np.eye(dim, k=1, dtype=complex)
    op[dim - 1, 0] += np.exp(1j * dim * theta0)
    return op


def j_plus(M):
    """Holstein-Primakoff su(2) raising operator ``sqrt(M - N) a`` on ``M + 1`` levels.

    Despite the name it lowers the Fock index, exactly like ``a``:
    ``J+|n> = sqrt(n (M - n + 1)) |n - 1>``.
    """
    if int(M) != M or M < 1:
        raise ValueError(f"invalid cutoff M={M!r}: need an integer >= 1")
    n = np.arange(1, M + 1, dtype=float)
    # product of roots so that this equals sqrt(M - N) @ a bit for bit
    return np.diag(np.sqrt(M - n + 1) * np.sqrt(n), k=1).astype(complex)


def j_minus(M):
    return j_plus(M).conj().T.copy()


def quadrature_x(dim):
    """Position quadrature ``(a^dagger + a) / sqrt(2)``."""
    a = annihilation(dim)
    return (a.conj().T + a) / np.sqrt(2.0)


def quadrature_p(dim):
    """Momentum quadrature ``i (a^dagger - a) / sqrt(2)``."""
    a = annihilation(dim)
    return 1j * (a.conj().T - a) / np.sqrt(2.0)


def basis(dim, n):
    """Number state ``|n>`` as a length-``dim`` complex vector."""
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise ValueError(f"level {n} outside [0, {dim - 1}]")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def is_normalized(psi, tol=NORM_TOL):
    return abs(np.vdot(psi, psi).real - 1.0) <= tol


def expectation(op, psi):
    """Return ``<psi|op|psi>`` as a complex number."""
    op = np.asarray(op)
    psi = np.asarray(psi)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape[0] != psi.shape[0]:
        raise ValueError(
            f"dimension mismatch: operator {op.shape} vs state {psi.shape}"
        )
    return complex(np.vdot(psi, op @ psi))


def _order_key(value, index):
    # rounding keeps the phase ordering stable against last-bit jitter
    angle = round(float(np.angle(value)) % (2 * np.pi), 9) % round(2 * np.pi, 9)
    return (angle, round(abs(value), 9), index)


def dense_eig(op, residual_factor=1e-9):
    """Eigendecomposition of a small dense complex matrix.

    Returns one :class:`EigenPair` per eigenvalue, ordered by phase angle in
    ``[0, 2 pi)`` and then modulus. Each vector is normalized and carries its
    own residual ``||A v - lambda v||_2``; a residual above
    ``residual_factor * ||A||_F`` raises :class:`EigenConvergenceError`.
    """
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {op.shape}")
    dim = _check_dim(op.shape[0])
    if dim > EIG_MAX_DIM:
        raise ValueError(f"dense_eig is limited to dim <= {EIG_MAX_DIM}, got {dim}")
    if not np.all(np.isfinite(op)):
        raise EigenConvergenceError("matrix contains non-finite entries")
    try:
        values, vectors = np.linalg.eig(op)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"eigensolver did not converge: {exc}") from exc

    bound = residual_factor * max(np.linalg.norm(op), np.finfo(float).tiny)
    pairs = []
    for k in range(dim):
        v = vectors[:, k]
        v = v / np.linalg.norm(v)
        # fix the global phase so the largest component is real positive
        j = int(np.argmax(np.abs(v)))
        v = v * (abs(v[j]) / v[j])
        lam = complex(values[k])
        res = float(np.linalg.norm(op @ v - lam * v))
        if not res <= bound:
            raise EigenConvergenceError(
                f"eigenpair {k} residual {res:.3e} exceeds bound {bound:.3e}"
            )
        pairs.append(EigenPair(lam, v, res))
    order = sorted(range(dim), key=lambda k: _order_key(pairs[k].value, k))
    return [pairs[k] for k in order]
