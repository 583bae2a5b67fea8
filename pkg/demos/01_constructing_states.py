# %% [markdown]
# # Constructing intermediate coherent-phase states
#
# Three independent ways to get the same vector: the closed-form amplitudes,
# the finite exponential series acting on the vacuum, and brute-force
# diagonalization of the defining operator.

# %%
import numpy as np

from icps import fock
from icps.states import (
    IcpsParams,
    icps_coefficients,
    icps_eigenvalue,
    icps_operator,
    icps_state,
    icps_via_displacement,
    pb_phase_state,
)

np.set_printoptions(precision=5, suppress=True)

p = IcpsParams(M=4, eta=0.5, m=1, theta0=0.0)
psi = icps_state(p)
print("theta_m =", p.theta_m)
print("amplitudes:", psi)
print("probabilities:", np.abs(psi) ** 2)

# %% The series route agrees elementwise
print("max |series - closed form| =", np.max(np.abs(icps_via_displacement(p) - psi)))

# %% And the state is an eigenvector of sqrt(eta) E + sqrt(1 - eta) J+
op = icps_operator(p.M, p.eta, p.theta0)
print("eigen residual =", np.linalg.norm(op @ psi - icps_eigenvalue(p) * psi))
for pair in fock.dense_eig(op):
    print(f"  dense eigenvalue {pair.value:.6f}  |rho| = {abs(pair.value):.6f}")
print("closed-form |rho| =", icps_coefficients(p.M, p.eta).rho_modulus)

# %% [markdown]
# At eta = 1 the amplitudes flatten out to the phase state; at eta = 0 only
# the vacuum survives.

# %%
for eta in (0.0, 0.5, 0.9, 1.0):
    q = IcpsParams(4, eta, 1, 0.0)
    f = abs(np.vdot(pb_phase_state(4, 1, 0.0), icps_state(q)))
    print(f"eta={eta:4.2f}  |<theta_1|psi>| = {f:.6f}  |C_0| = {abs(icps_state(q)[0]):.6f}")
