# %% [markdown]
# # Witsenhausen's problem, worst case
#
# Two players, no measurement noise. The first sees the initial state and pays
# `k2 u1^2` to move it; the second sees the moved state through a disturbance
# `w` and tries to cancel the result. Nature picks `(x0, w)` to maximize cost
# per unit energy. For linear strategies the game value comes out of a
# bisection over gamma with an LMI feasibility test at each step.

# %%
import numpy as np

from teamlmi import BlockGain, achieved_gamma, bisect_gamma, gamma_bar, worst_case_witness, witsenhausen

# %% [markdown]
# The ceiling `gamma_bar` equals `k2`: above it the first player can inject an
# arbitrarily large signal for a bounded price, and the LMI stops being defined.

# %%
for k2 in (0.1, 1.0, 3.0):
    print(f"k2={k2:4}  gamma_bar={gamma_bar(witsenhausen(k2))!r}")

# %%
for k2 in (0.1, 1.0):
    report = bisect_gamma(witsenhausen(k2))
    print(f"k2={k2}: gamma*={report.gamma_star:.7f}  gain={report.gain.entries().round(5)}  "
          f"oracle={report.oracle_gamma:.7f}  probes={len(report.bisection_trace)}")

# %% [markdown]
# For `k2 = 1` the value is `(3 - sqrt 5) / 2`, with the two gains equal and
# opposite. For `k2 = 0.1` the second player's gain is small and positive. A
# gain with the sign of the second entry flipped is much worse:

# %%
prob = witsenhausen(0.1)
for K in ([-0.90098, 0.09010], [-0.9001, -0.0896]):
    print(K, achieved_gamma(prob, BlockGain.from_entries(K, prob.partition)))

# %% [markdown]
# The oracle also hands back nature's best reply. In these coordinates it is a
# measurement pair `(y1, y2)`; `x0 = y1` and `w = y2 - y1 - u1`.

# %%
report = bisect_gamma(prob)
wit = worst_case_witness(prob, report.gain)
y1, y2 = wit.x
u1 = report.gain.matrix[0, 0] * y1
print(f"x0={y1:.4f}  w={y2 - y1 - u1:.4f}  ratio={wit.ratio:.7f}")
