# %% [markdown]
# # Mandel Q across the interpolation
#
# Q is the same for every branch m, so a single curve per cutoff M covers
# all M + 1 states. Negative Q is sub-Poissonian.

# %%
import numpy as np

from icps.analysis import mandel_q, q_scan

eta = np.linspace(0, 1, 201)
rows = q_scan(range(1, 8), eta)
q = {M: np.array([r[2] for r in rows if r[0] == M]) for M in range(1, 8)}

for M in range(1, 8):
    sub = eta[1:][q[M][1:] < 0]
    span = f"[{sub.min():.3f}, {sub.max():.3f}]" if sub.size else "none"
    print(f"M={M}: Q(eta=1) = {q[M][-1]:+.4f}   sub-Poissonian eta range: {span}")

# %% The phase-state end follows (M - 4) / 6
for M in range(1, 8):
    print(M, mandel_q(M, 1.0).q, (M - 4) / 6)

# %% Optional figure
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots()
    for M in range(1, 8):
        ax.plot(eta, q[M], label=f"M={M}")
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xlabel("eta")
    ax.set_ylabel("Q")
    ax.legend()
    fig.savefig("mandel_q.png", dpi=120)
