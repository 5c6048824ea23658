# %% [markdown]
# # Paths of chains: Lipschitz constant, structure and the singular-value floor

# %%
from pathlib import Path

import numpy as np

from adiabatic_markov import (
    largest_mixing_time,
    lipschitz_constant,
    sample,
    spectral_scan,
    structural_certificate,
)
from adiabatic_markov.io import load_evolution

DATA = Path(__file__).resolve().parent / "data"
E = load_evolution(DATA / "random_pl_n4.json")
print(E, "breakpoints:", E.breakpoints)

# %% [markdown]
# On a linear segment the distance between two samples is the parameter gap
# times the norm of the segment slope, so the Lipschitz constant is exact.

# %%
L = lipschitz_constant(E)
print("L =", L.value, "(exact)" if L.exact else "(estimate)")
print(structural_certificate(E, "strict").to_dict()["overall"])

# %%
scan = spectral_scan(E, 1001)
print(f"sigma floor {scan.sigma_floor:.5f} at s={scan.argmin_s:.3f}, uncertainty {scan.floor_uncertainty:.3g}")
for s in (0.0, 0.25, 0.5, 0.75, 1.0):
    i = int(np.argmin(np.abs(scan.grid - s)))
    print(f"  s={scan.grid[i]:.3f}  sigma={scan.sigma_at[i]:.5f}")

# %% [markdown]
# The largest mixing time along the path is the quantity the bounds square.

# %%
mix = largest_mixing_time(E, 0.05, 1001)
print("tmix_sup(0.05) =", mix.tmix_sup, "at s =", mix.argmax_s)
print("P at the slowest point:\n", sample(E, mix.argmax_s).entries.round(3))
