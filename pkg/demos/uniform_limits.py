"""
Uniform limits of preserving functions
======================================

If ``f_n`` converges uniformly to ``f`` and each ``f_n`` keeps slow
oscillation, so does ``f``: pick ``N`` with ``sup |f_N - f| < eps/3`` and
split any jump of the ``f`` image into two ``eps/3`` tails plus one jump of
the ``f_N`` image.  The campaigns below make each term of that split
visible.
"""
from doubleseq import builtin, check_uniform_convergence, function, run_theorem34_campaign, run_theorem35_campaign
from doubleseq.campaigns import double_shifted_family, power_family, power_limit, shifted_family

add = function("add")
recip = builtin("recip_grid")

# %%
# f_n = f + 1/n.  The sampled sup gap is exactly 1/n.
v = check_uniform_convergence(shifted_family(add), add, 0.02, 100)
print(v.status, v.sup_gaps)

# %%
# The eps/3 chain for one grid.
rep = run_theorem34_campaign(shifted_family(add), add, [recip], 0.3, 1000)
print(rep.status, "threshold", rep.config_echo["threshold"])
print(rep.cases[0]["certificates"]["chain"])

# %%
# Doubly indexed: f_{m,n} = f + 1/(m+n).
rep = run_theorem35_campaign(double_shifted_family(add), add, [recip], 0.3, 1000)
print(rep.status, rep.cases[0]["certificates"]["chain"])

# %%
# x^n tends to the indicator of x = 1, but not uniformly: points just below
# 1 keep x^n near 1 for every n.  The campaign refuses to run.
rep = run_theorem34_campaign(power_family(), power_limit(), [recip], 0.3, 1000)
print(rep.status, rep.cases[0]["outcome"], rep.cases[0]["certificates"]["uniform_convergence"]["violation"])
