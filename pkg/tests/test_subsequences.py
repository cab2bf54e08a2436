import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from doubleseq import (
    ScalarDoubleSequence,
    SelectorError,
    SubsequenceSelector,
    build_double_subsequence,
    builtin,
    spiral_index,
    spiral_position,
)
from doubleseq.subsequences import matrix_to_csv, matrix_to_json

# positions read off the displayed 3-shell spiral
DISPLAY = [(1, 1), (1, 2), (2, 2), (2, 1), (1, 3), (2, 3), (3, 3), (3, 2), (3, 1), (1, 4)]


def test_display_positions():
    assert [spiral_position(j) for j in range(1, 11)] == DISPLAY


@pytest.mark.parametrize("rc,j", [((1, 1), 1), ((2, 2), 3), ((3, 1), 9)])
def test_index_examples(rc, j):
    assert spiral_index(*rc) == j


@pytest.mark.parametrize("m", range(1, 101))
def test_shell_is_column_then_row(m):
    shell = [spiral_position(j) for j in range((m - 1) ** 2 + 1, m * m + 1)]
    assert shell == [(r, m) for r in range(1, m + 1)] + [(m, c) for c in range(m - 1, 0, -1)]


def test_bijection_on_squares():
    for m in (1, 5, 10, 37):
        cells = {spiral_position(j) for j in range(1, m * m + 1)}
        assert cells == {(r, c) for r in range(1, m + 1) for c in range(1, m + 1)}
        for r in range(1, m + 1):
            for c in range(1, m + 1):
                assert spiral_position(spiral_index(r, c)) == (r, c)


@given(st.integers(2, 10**6))
def test_shell_boundaries(m):
    assert spiral_position((m - 1) ** 2 + 1) == (1, m)
    assert spiral_position(m * m) == (m, 1)


@given(st.integers(1, 10**12))
def test_roundtrip(j):
    assert spiral_index(*spiral_position(j)) == j


def test_bad_input():
    with pytest.raises(ValueError):
        spiral_position(0)
    with pytest.raises(ValueError):
        spiral_index(0, 1)


def test_build_sum_sequence():
    seq = ScalarDoubleSequence(lambda k, l: (k + l).astype(float), "k+l")
    M = build_double_subsequence(seq, SubsequenceSelector(lambda j: j, lambda j: j), 4)
    assert M.tolist() == [[2, 4], [8, 6]]


def test_build_const_full_square():
    M = build_double_subsequence(builtin("const(2.5)"), SubsequenceSelector(lambda j: 3 * j, lambda j: j * j), 9)
    assert not np.ma.getmaskarray(M).any()
    assert (M == 2.5).all()


def test_build_log_max_partial():
    sel = SubsequenceSelector(lambda j: 2 ** j, lambda j: 2 ** j)
    M = build_double_subsequence(builtin("log_max"), sel, 3)
    assert M[0, 0] == math.log(2) and M[0, 1] == math.log(4) and M[1, 1] == math.log(8)
    assert M.mask[1, 0]
    assert json.loads(matrix_to_json(M)) == [[math.log(2), math.log(4)], [None, math.log(8)]]


def test_csv_blanks_undefined():
    sel = SubsequenceSelector([1, 2], [1, 5])
    M = build_double_subsequence(builtin("log_max"), sel, 2)
    lines = matrix_to_csv(M).splitlines()
    assert lines[0] == "k,l,value"
    assert lines[3] == "2,1,"


def test_selector_must_increase():
    with pytest.raises(SelectorError):
        build_double_subsequence(builtin("log_max"), SubsequenceSelector([1, 1, 2], [1, 2, 3]), 3)
    with pytest.raises(SelectorError):
        build_double_subsequence(builtin("log_max"), SubsequenceSelector([1, 2], [1, 2]), 3)
