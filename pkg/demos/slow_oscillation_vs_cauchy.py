"""
Slow oscillation without convergence
====================================

``x[k, l] = ln max(k, l)`` drifts off to infinity, so it is neither Cauchy
nor convergent.  Yet moving from ``(k, l)`` to any ``(s, t)`` with
``s <= (1 + alpha) k`` and ``t <= (1 + delta) l`` changes it by at most
``ln(1 + max(alpha, delta))``, so it oscillates slowly.  This script shows
both sides on finite windows.
"""
import math
import time

from doubleseq import (
    DivergenceParams,
    OscillationParams,
    builtin,
    check_cauchy,
    check_definitely_divergent,
    check_slowly_oscillating,
    find_witness,
    oscillation_modulus,
)

log_max = builtin("log_max")

# %%
# The displayed corner of the sequence: row k repeats ln k until the
# diagonal, then follows the column index.
for k in range(1, 6):
    print("  ".join(f"{log_max(k, l):5.3f}" for l in range(1, 7)))

# %%
# Cauchy fails on every window we try: the corner of the box is always more
# than 1 away from its start.
for N in (10, 100, 1000):
    rep = check_cauchy(log_max, 1.0, N, 10 * N)
    k, l, s, t, (a, b) = rep.counterexample.to_list()
    print(f"N={N:5d}: {rep.status}  |x[{k},{l}] - x[{s},{t}]| = {abs(a - b):.3f}")

# %%
# It is definitely divergent on the window: past (8, 8) every entry exceeds 2.
print(check_definitely_divergent(log_max, DivergenceParams(2.0, 8, 8, 100)).status)

# %%
# Witness search: alpha and delta run down the powers of two, N up the
# powers of two.  The first triple that survives a full window scan wins.
for eps in (1.0, 0.1, 0.01):
    start = time.perf_counter()
    w = find_witness(log_max, eps, 10_000)
    p = w.params
    print(f"eps={eps:<5} alpha=delta=2^{int(math.log2(p.alpha))} N={p.threshold} "
          f"(ln(1+alpha) = {math.log1p(p.alpha):.4f})  {time.perf_counter() - start:.1f}s")

# %%
# The brute-force modulus agrees with the checker: at alpha = delta = 0.1 the
# largest jump over the window is ln(11/10), reached at k = 10.
m = oscillation_modulus(log_max, 0.1, 0.1, 10, 300)
print(f"modulus = {m:.6f}, ln 1.1 = {math.log(1.1):.6f}")
print(check_slowly_oscillating(log_max, OscillationParams(m, 0.1, 0.1, 10, 300)).status,
      "at eps = modulus (strict inequality)")
