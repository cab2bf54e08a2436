"""Low-level helpers shared by the window scanners.

Nothing here knows about sequences; it only slices index ranges into
memory-bounded blocks and answers batched range-extremum queries.
"""
from __future__ import annotations

import math
import os

import numpy as np
from numba import njit

DEFAULT_MAX_CELLS = 10**8
BLOCK_CELLS = 1 << 22


def max_cells() -> int:
    """Per-check cap on window cells, read from ``DOUBLESEQ_MAX_CELLS``."""
    raw = os.environ.get("DOUBLESEQ_MAX_CELLS")
    if not raw:
        return DEFAULT_MAX_CELLS
    return int(float(raw))


def reach(k, ratio: float):
    """Largest integer index ``s`` with ``s <= (1 + ratio) * k``.

    Works on ints and on integer arrays.
    """
    if isinstance(k, np.ndarray):
        return np.floor((1.0 + ratio) * k).astype(np.int64)
    return int(math.floor((1.0 + ratio) * k))


def row_blocks(lo: int, hi: int, width: int, budget: int = BLOCK_CELLS):
    """Yield inclusive ``(a, b)`` row ranges covering ``[lo, hi]``."""
    step = max(1, budget // max(1, width))
    a = lo
    while a <= hi:
        b = min(hi, a + step - 1)
        yield a, b
        a = b + 1


def range_reduce(X: np.ndarray, starts: np.ndarray, ends: np.ndarray, op) -> np.ndarray:
    """Batched ``op``-reduction of ``X[starts[i]:ends[i]+1]`` along axis 0.

    ``op`` is ``np.maximum`` or ``np.minimum``. Returns an array of shape
    ``(len(starts),) + X.shape[1:]``. Window reductions of width ``2^j`` are
    built by doubling, and each query is answered from two overlapping
    power-of-two windows.
    """
    starts = np.asarray(starts, dtype=np.int64)
    ends = np.asarray(ends, dtype=np.int64)
    lengths = ends - starts + 1
    if np.any(lengths < 1) or np.any(starts < 0) or np.any(ends >= X.shape[0]):
        raise ValueError("range query outside the array")
    out = np.empty((len(starts),) + X.shape[1:], dtype=X.dtype)
    expo = np.frexp(lengths.astype(np.float64))[1] - 1
    W = X
    level = 0
    for j in np.unique(expo):
        # W[i] = op(X[i : i + 2**level])
        while level < j:
            h = 1 << level
            W = op(W[:-h], W[h:])
            level += 1
        w = 1 << int(j)
        sel = np.nonzero(expo == j)[0]
        out[sel] = op(W[starts[sel]], W[ends[sel] - w + 1])
    return out


@njit(cache=True)
def _monotone_extrema(src_max, src_min, starts, ends, out_max, out_min):  # pragma: no cover
    # windows [starts[q], ends[q]] must have both ends nondecreasing in q
    R, C = src_max.shape
    Q = starts.shape[0]
    dq_hi = np.empty(C, np.int64)
    dq_lo = np.empty(C, np.int64)
    for r in range(R):
        h_hi = 0
        t_hi = 0
        h_lo = 0
        t_lo = 0
        nxt = 0
        for q in range(Q):
            e = ends[q]
            while nxt <= e:
                v = src_max[r, nxt]
                while t_hi > h_hi and src_max[r, dq_hi[t_hi - 1]] <= v:
                    t_hi -= 1
                dq_hi[t_hi] = nxt
                t_hi += 1
                v = src_min[r, nxt]
                while t_lo > h_lo and src_min[r, dq_lo[t_lo - 1]] >= v:
                    t_lo -= 1
                dq_lo[t_lo] = nxt
                t_lo += 1
                nxt += 1
            s = starts[q]
            while dq_hi[h_hi] < s:
                h_hi += 1
            while dq_lo[h_lo] < s:
                h_lo += 1
            out_max[r, q] = src_max[r, dq_hi[h_hi]]
            out_min[r, q] = src_min[r, dq_lo[h_lo]]


def monotone_extrema(src_max: np.ndarray, src_min: np.ndarray, starts, ends):
    """Row-wise max of ``src_max`` and min of ``src_min`` over column windows.

    Window ``q`` is ``[starts[q], ends[q]]``; both ends must be nondecreasing
    in ``q``.  Linear time per row (monotone deque).  Returns two arrays of
    shape ``(rows, len(starts))``.
    """
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    ends = np.ascontiguousarray(ends, dtype=np.int64)
    if len(starts) and (np.any(np.diff(starts) < 0) or np.any(np.diff(ends) < 0)
                        or np.any(ends < starts) or starts[0] < 0 or ends[-1] >= src_max.shape[1]):
        raise ValueError("windows must be nonempty, in range and monotone")
    src_max = np.ascontiguousarray(src_max, dtype=np.float64)
    src_min = np.ascontiguousarray(src_min, dtype=np.float64)
    out_max = np.empty((src_max.shape[0], len(starts)))
    out_min = np.empty((src_max.shape[0], len(starts)))
    _monotone_extrema(src_max, src_min, starts, ends, out_max, out_min)
    return out_max, out_min
