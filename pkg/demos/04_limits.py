# %% [markdown]
# # The two limits
#
# eta -> 1 gives the phase state. For the coherent limit, pick eta at each
# cutoff so the eigenvalue modulus is lam * sqrt(M); the m = 0 branch then
# approaches the coherent state |lam exp(i theta0)>.

# %%
import math

import numpy as np

from icps.analysis import (
    CoherentLimitSpec,
    coherent_limit_probe,
    factorial_root_ratio,
    pb_limit_fidelities,
)

grid = np.linspace(0.9, 1.0, 11)
for e, f in zip(grid, pb_limit_fidelities(7, grid)):
    print(f"eta={e:.2f}  fidelity with phase state {f:.12f}")

# %%
spec = coherent_limit_probe(CoherentLimitSpec(lam=1.0, theta0=0.4, M_list=(10, 25, 50, 100, 200, 400)))
for M, log_eta, f in zip(spec.M_list, spec.log_etas, spec.fidelities):
    print(f"M={M:4d}  log(eta)={log_eta:10.3f}  fidelity={f:.10f}")

# %% [markdown]
# The large-M behavior rests on ((M+1)!)^(1/(M+1)) / (M+1), which tends to
# 1/e (Stirling), not 2/e.

# %%
for M in (10, 100, 1000, 10_000, 100_000):
    print(M, factorial_root_ratio(M), 1 / math.e)
