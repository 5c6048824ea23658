# %% [markdown]
# # The reset/shift family: the t_mix^2 / eps order is attained
#
# P0 resets every state to state 0; P1 pushes state i to i + 1 and holds the
# last state. Along (1 - s) P0 + s P1 the chain must climb to the last state
# as s approaches 1, and the horizon needed to follow it grows like
# tmix_sup^2 / eps.

# %%
from adiabatic_markov import make_convex, optimality_family, sample, stationary_distribution
from adiabatic_markov.cli import demo_row

P0, P1 = optimality_family(4)
print(P0, P1, sep="\n\n")
E = make_convex(P0, P1)
for s in (0.25, 0.5, 0.75):
    print(f"s={s}: pi = {stationary_distribution(sample(E, s)).round(4)}")

# %% [markdown]
# The ratio tsad * eps / tmix_sup^2 settles in a narrow band as n grows.
# The bound column is blank once eps is outside the range where the bound
# applies.

# %%
eps = 0.2
print(f"{'n':>3} {'tmix_sup':>8} {'tsad':>6} {'bound':>10} {'ratio':>8}")
for n in (4, 6, 8, 10, 12):
    r = demo_row(n, eps)
    bound = "" if r["bound_ceiling"] is None else r["bound_ceiling"]
    print(f"{n:>3} {r['tmix_sup']:>8} {r['tsad']:>6} {bound:>10} {r['ratio']:>8.4f}")
