# %% [markdown]
# # One chain: stationary law, mixing time and the spectral gap of I - P
#
# A lazy two-state chain is small enough to check every number by hand.
# The second eigenvalue of P is 1/2, so the worst-case distance to
# stationarity after T steps is (1/2)^(T+1).

# %%
import numpy as np

from adiabatic_markov import ingest_matrix, mixing_time, sigma_at, stationary_distribution, worst_case_tv

P = ingest_matrix([[0.75, 0.25], [0.25, 0.75]])
pi = stationary_distribution(P)
print("pi =", pi)

# %% [markdown]
# Worst case over all starting distributions is attained at a point mass, so
# d(T) only needs the rows of P^T.

# %%
for T in range(1, 6):
    print(f"T={T}  d(T)={worst_case_tv(P, pi, T):.6f}  closed form={0.5 ** (T + 1):.6f}")

# %%
res = mixing_time(P, eps=0.1)
print("tmix(0.1) =", res.tmix, " probes:", res.tv_profile)

# %% [markdown]
# I - P = [[1/4, -1/4], [-1/4, 1/4]] has singular values 1/2 and 0; the
# smallest nonzero one is what the continuity and mixing estimates use.

# %%
print("sigma =", sigma_at(P))
print("all singular values:", np.linalg.svd(np.eye(2) - P.entries, compute_uv=False))

# %% [markdown]
# Structure matters: a reducible chain with one aperiodic recurrent class
# still has a unique stationary law, a periodic one does not mix.

# %%
shift = ingest_matrix([[0, 1, 0], [0, 0, 1], [0, 0, 1]])
print(shift.structure)
print("stationary:", stationary_distribution(shift))
