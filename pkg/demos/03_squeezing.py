# %% [markdown]
# # Quadrature squeezing
#
# (dx)^2 depends on the branch only through theta_m; it is pi-periodic and
# mirror-symmetric about pi/2, where the squeezing is strongest.

# %%
import math

import numpy as np

from icps.analysis import squeezing_boundary, variance_surface

eta = np.linspace(0, 1, 101)
theta = np.linspace(0, math.pi / 2, 51)

for M in (3, 7):
    s = variance_surface(M, eta, theta)
    i, j = np.unravel_index(np.argmin(s.var_x), s.var_x.shape)
    print(f"M={M}: min (dx)^2 = {s.var_x[i, j]:.5f} at eta={eta[i]:.2f}, theta_m={theta[j]:.4f}")
    print(f"      squeezing ends at eta0 = {squeezing_boundary(M, math.pi / 2):.6f} for theta_m = pi/2")
    squeezed_cols = theta[~np.isnan(s.eta0)]
    print(f"      theta_m with any squeezing: [{squeezed_cols.min():.4f}, {squeezed_cols.max():.4f}]")

# %% Optional figure
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, M in zip(axes, (3, 7)):
        s = variance_surface(M, eta, theta)
        cs = ax.contourf(theta, eta, s.var_x, levels=30)
        ax.contour(theta, eta, s.var_x, levels=[0.5], colors="w")
        ax.set_title(f"(dx)^2, M={M}")
        ax.set_xlabel("theta_m")
        ax.set_ylabel("eta")
        fig.colorbar(cs, ax=ax)
    fig.savefig("squeezing.png", dpi=120)
