# %% [markdown]
# # The ceiling gamma_bar and the multi-stage chain
#
# `gamma_bar = inf u'Quu u / |Du|^2` bounds the range where the LMI test is
# valid. The multi-stage chain `x_{k+1} = u_k` has `gamma_bar = 1` for every
# length, and its game value sits exactly on that ceiling.

# %%
import numpy as np

from teamlmi import AssumptionViolation, BlockGain, achieved_gamma, bisect_gamma, gamma_bar, multistage

# %%
for m in range(2, 6):
    print(m, gamma_bar(multistage(m)))

# %% [markdown]
# Nature can cancel the second-to-last decision: put `v_{m-1} = -u_{m-2}` and
# the last player measures nothing. What is left is `u_{m-2}^2` over an energy
# that cannot be smaller, so every linear strategy has ratio at least one.
# The zero strategy gets exactly one.

# %%
rng = np.random.default_rng(0)
prob = multistage(3)
ratios = [achieved_gamma(prob, BlockGain.from_entries(3 * rng.normal(size=3), prob.partition)) for _ in range(2000)]
print("smallest ratio over 2000 random gains:", min(ratios))
print("zero gain:", achieved_gamma(prob, BlockGain.zeros(prob.partition)))

# %% [markdown]
# Bisection therefore finds nothing feasible strictly below the ceiling and
# says so instead of returning a value.

# %%
try:
    bisect_gamma(prob)
except AssumptionViolation as exc:
    print(exc)
    print("trace:", exc.trace)
