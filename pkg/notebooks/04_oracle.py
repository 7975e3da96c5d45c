# %% [markdown]
# # Checking a gain without the LMI
#
# For a fixed gain the worst-case ratio is a generalized eigenvalue of a
# closed-loop pencil. Its maximizer maps back to a concrete disturbance, which
# makes solver output checkable by plain simulation.

# %%
import numpy as np

from teamlmi import BlockGain, achieved_gamma, bisect_gamma, sample_ratio, witsenhausen_team, worst_case_witness

# %%
prob = witsenhausen_team(1.0)
report = bisect_gamma(prob)
print(f"gamma*={report.gamma_star:.7f}  oracle={report.oracle_gamma:.7f}  lmi margin={report.lmi_margin:.2e}")

# %%
wit = worst_case_witness(prob, report.gain)
print("w =", wit.w, " v =", wit.v)
print("replayed ratio:", sample_ratio(prob, report.gain, wit.w, wit.v))

# %% [markdown]
# Random disturbances never beat the oracle value.

# %%
rng = np.random.default_rng(2)
samples = [sample_ratio(prob, report.gain, rng.normal(size=1), rng.normal(size=2)) for _ in range(10000)]
print(max(samples), "<=", achieved_gamma(prob, report.gain))
