"""
Double subsequences on a spiral
===============================

A double subsequence takes one term ``x[n_j, k_j]`` per ``j`` and lays the
terms out shell by shell: shell ``m`` runs down column ``m`` and then back
along row ``m``.  Cells not reached yet stay empty.
"""
import numpy as np

from doubleseq import SubsequenceSelector, build_double_subsequence, builtin, spiral_index, spiral_position
from doubleseq.subsequences import matrix_to_csv

# %%
# Where the first sixteen terms land.
grid = np.zeros((4, 4), dtype=int)
for j in range(1, 17):
    r, c = spiral_position(j)
    grid[r - 1, c - 1] = j
print(grid)
print("spiral_index(3, 1) =", spiral_index(3, 1))

# %%
# Ten terms of ln max(k, l) sampled at k_j = n_j = 2^j.  Ten terms fill three
# shells and start the fourth, so most of column 4 is still empty.
sel = SubsequenceSelector(lambda j: 2 ** j, lambda j: 2 ** j)
M = build_double_subsequence(builtin("log_max"), sel, 10)
print(np.round(M, 3))

# %%
# CSV keeps empty cells empty rather than inventing a number.
print(matrix_to_csv(M))
