"""Double subsequences laid out along a square spiral.

Terms ``x_j = x[n_j, k_j]`` are placed shell by shell: shell ``m`` first runs
down column ``m`` (rows ``1..m``) and then left along row ``m`` (columns
``m-1..1``).  The first ten positions are::

    1  2  5 10
    4  3  6  .
    9  8  7  .
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .sequences import ScalarDoubleSequence


class SelectorError(ValueError):
    pass


def spiral_position(j: int) -> tuple:
    """Grid position ``(row, col)`` of the ``j``-th term, 1-based."""
    if j < 1:
        raise ValueError("j must be positive")
    m = math.isqrt(j - 1) + 1
    r = j - (m - 1) ** 2
    if r <= m:
        return r, m
    return m, 2 * m - r


def spiral_index(row: int, col: int) -> int:
    """Inverse of :func:`spiral_position`."""
    if row < 1 or col < 1:
        raise ValueError("row and col must be positive")
    m = max(row, col)
    if col == m:
        return (m - 1) ** 2 + row
    return (m - 1) ** 2 + 2 * m - col


IndexSeq = Union[Callable[[int], int], Sequence[int]]


@dataclass(frozen=True)
class SubsequenceSelector:
    """Strictly increasing row and column index sequences ``n_j``, ``k_j``.

    Either may be a callable on ``j >= 1`` or a finite list (``list[0]`` is
    ``j = 1``).
    """

    n_seq: IndexSeq
    k_seq: IndexSeq

    @staticmethod
    def _take(seq: IndexSeq, count: int) -> list:
        if callable(seq):
            return [int(seq(j)) for j in range(1, count + 1)]
        if len(seq) < count:
            raise SelectorError(f"selector has {len(seq)} terms, {count} requested")
        return [int(v) for v in seq[:count]]

    def indices(self, count: int):
        ns = self._take(self.n_seq, count)
        ks = self._take(self.k_seq, count)
        for name, vals in (("n", ns), ("k", ks)):
            if vals and vals[0] < 1:
                raise SelectorError(f"{name}_1 must be a positive index")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise SelectorError(f"{name}_j is not strictly increasing")
        return ns, ks


def build_double_subsequence(seq: ScalarDoubleSequence, sel: SubsequenceSelector, count: int) -> np.ma.MaskedArray:
    """Place ``x[n_j, k_j]`` for ``j = 1..count`` on the spiral.

    Returns a ``ceil(sqrt(count))``-square masked array; cells not reached by
    any ``j <= count`` are masked.
    """
    if count < 1:
        raise ValueError("count must be positive")
    ns, ks = sel.indices(count)
    side = math.isqrt(count - 1) + 1
    data = np.zeros((side, side))
    mask = np.ones((side, side), dtype=bool)
    vals = seq.values(np.array(ns), np.array(ks))
    for j, v in enumerate(vals, start=1):
        r, c = spiral_position(j)
        data[r - 1, c - 1] = v
        mask[r - 1, c - 1] = False
    return np.ma.MaskedArray(data, mask=mask)


def matrix_to_json(M: np.ma.MaskedArray) -> str:
    """Nested lists, ``null`` for masked cells."""
    mask = np.ma.getmaskarray(M)
    rows = [[None if mask[i, j] else float(M.data[i, j]) for j in range(M.shape[1])]
            for i in range(M.shape[0])]
    return json.dumps(rows)


def matrix_to_csv(M: np.ma.MaskedArray) -> str:
    """Row-major ``k,l,value`` lines; masked cells get an empty value."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "l", "value"])
    mask = np.ma.getmaskarray(M)
    for i in range(M.shape[0]):
        for j in range(M.shape[1]):
            w.writerow([i + 1, j + 1, "" if mask[i, j] else repr(float(M.data[i, j]))])
    return buf.getvalue()
