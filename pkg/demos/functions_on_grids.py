"""
Functions acting on grid sequences
==================================

A grid sequence pairs two single sequences into points ``(u_k, v_l)``.  A
uniformly continuous ``f`` keeps slowly oscillating grids slowly oscillating
and keeps limits; a function that is not uniformly continuous can be caught
by building a grid it breaks.
"""
import numpy as np

from doubleseq import (
    apply,
    builtin,
    check_pringsheim,
    find_witness,
    function,
    interleave_with_limit,
    oscillation_gap,
    run_theorem31_campaign,
    run_theorem33_falsification,
    test_uniform_continuity,
)
from doubleseq.functions import UNIT

recip = builtin("recip_grid")

# %%
# Lipschitz transfer.  For f(x, y) = x + y the image's largest jump is at most
# sqrt(2) times the grid's own.
add = function("add")
for a in (0.5, 0.25, 0.125):
    g = oscillation_gap(recip, a, a, 4, 400)
    y = oscillation_gap(apply(add, recip), a, a, 4, 400)
    print(f"alpha=delta={a}: grid {g:.5f}  image {y:.5f}  K*grid {add.lipschitz * g:.5f}")

# %%
# The same check as a campaign over two functions and both gallery grids.
rep = run_theorem31_campaign([add, function("sin_product")], [recip, builtin("log_grid")], 0.05, 1000)
print(rep.status, rep.summary)

# %%
# Limits survive too.  Interleaving the image of x*y with its limit 0 puts
# the values on the odd/odd cells and 0 elsewhere.
mul = function("mul")
woven = interleave_with_limit(apply(mul, recip), 0.0)
idx = np.arange(1, 7)
print(np.round(woven.values(idx[:, None], idx[None, :]), 4))
print(check_pringsheim(apply(mul, recip), 0.0, 0.05, 50, 1000).status)

# %%
# 1/(xy) on (0, 1]^2 is not uniformly continuous.  The sampler finds pairs
# closer than 2^-30 whose values differ by at least 1.
v = test_uniform_continuity(function("one_over_xy"), 1.0)
print(v.status, v.violating_pair, f"gap {v.gap:.3f}")

# %%
# From those pairs the falsifier builds a grid that oscillates slowly even
# at eps/1024, while its image has no witness at eps = 1.
rep = run_theorem33_falsification(function("one_over_xy"), 1.0, 1000)
certs = rep.cases[0]["certificates"]
print(rep.status, "grid witness:", {k: certs["grid_witness"][k] for k in ("alpha", "delta", "threshold")})
print("image witness:", certs["image_witness"])

# %%
# For x + y there is nothing to find.
print(run_theorem33_falsification(function("add", UNIT), 0.1, 1000).status)

# %%
# And the image of a slowly oscillating grid under 1/(xy) is k*l, which has
# no witness at all.
print(find_witness(apply(function("one_over_xy"), recip), 1.0, 500))
