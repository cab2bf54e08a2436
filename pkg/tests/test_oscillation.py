import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doubleseq import (
    VERIFIED,
    VIOLATED,
    FactorableGridSequence,
    OscillationParams,
    ScalarDoubleSequence,
    WindowError,
    builtin,
    check_cauchy,
    check_slowly_oscillating,
    find_witness,
    oscillation_gap,
    oscillation_modulus,
)
from doubleseq.sequences import DomainBox

log_max = builtin("log_max")
alternating = builtin("alternating")


def noise(seed, size=700):
    table = np.random.default_rng(seed).uniform(-1, 1, (size, size))
    return ScalarDoubleSequence(lambda k, l: table[k - 1, l - 1], f"noise({seed})")


def walk_grid(seed, size=700):
    u = np.cumsum(np.random.default_rng(seed).normal(0, 0.05, size))
    v = np.cumsum(np.random.default_rng(seed + 1).normal(0, 0.05, size))
    return FactorableGridSequence(lambda k: u[k - 1], lambda l: v[l - 1], DomainBox(-1e9, 1e9, -1e9, 1e9), "walk")


NAMES = ["const", "log_max", "harmonic_sum", "alternating", "row_spike", "recip_grid", "log_grid"]


def reeval_gap(seq, cx):
    if isinstance(seq, FactorableGridSequence):
        (a, b), (c, d) = seq(cx.k, cx.l), seq(cx.s, cx.t)
        return math.hypot(a - c, b - d)
    return abs(seq(cx.k, cx.l) - seq(cx.s, cx.t))


def test_params_validation():
    with pytest.raises(WindowError):
        OscillationParams(0.1, 0.0, 0.1, 1, 10)
    with pytest.raises(WindowError):
        OscillationParams(0.0, 0.1, 0.1, 1, 10)
    with pytest.raises(WindowError):
        OscillationParams(0.1, 0.1, 0.1, 11, 10)


def test_const_verified():
    cert = check_slowly_oscillating(builtin("const(4)"), OscillationParams(1e-9, 0.5, 0.5, 1, 300))
    assert cert.verified and cert.counterexample is None


def test_log_max_verified_large_window():
    cert = check_slowly_oscillating(log_max, OscillationParams(0.1, 0.05, 0.05, 2, 10_000))
    assert cert.status == VERIFIED


def test_alternating_violation():
    cert = check_slowly_oscillating(alternating, OscillationParams(1.0, 0.5, 0.5, 4, 100))
    assert cert.status == VIOLATED
    cx = cert.counterexample
    assert (cx.k, cx.l, cx.s, cx.t) == (4, 4, 4, 5)
    assert cert.gap == 2.0


def test_counterexample_is_lexicographically_smallest():
    # brute force over the region in lexicographic order
    seq = noise(3, 200)
    p = OscillationParams(1.2, 0.3, 0.2, 5, 60)
    cx = check_slowly_oscillating(seq, p).counterexample
    first = None
    for k in range(5, 61):
        for l in range(5, 61):
            for s in range(k, math.floor(1.3 * k) + 1):
                for t in range(l, math.floor(1.2 * l) + 1):
                    if not abs(seq(k, l) - seq(s, t)) < 1.2:
                        first = (k, l, s, t)
                        break
                if first:
                    break
            if first:
                break
        if first:
            break
    assert (cx.k, cx.l, cx.s, cx.t) == first


def test_pairs_checked_counts_region():
    p = OscillationParams(10.0, 0.5, 0.5, 2, 9)
    cert = check_slowly_oscillating(log_max, p)
    expected = sum((math.floor(1.5 * k) - k + 1) for k in range(2, 10)) ** 2
    assert cert.pairs_checked == expected


def test_modulus_examples():
    assert oscillation_modulus(builtin("const"), 0.3, 0.3, 1, 50) == 0.0
    m = oscillation_modulus(log_max, 0.1, 0.1, 10, 300)
    assert m <= math.log(1.1) + 1e-15
    assert m == pytest.approx(math.log(11 / 10), abs=1e-12)
    assert oscillation_modulus(alternating, 0.5, 0.5, 2, 100) == 2.0


def test_fast_gap_matches_oracle_on_examples():
    for seq in (log_max, alternating, noise(1, 300), walk_grid(2, 300), builtin("recip_grid")):
        assert oscillation_gap(seq, 0.2, 0.35, 3, 120) == oscillation_modulus(seq, 0.2, 0.35, 3, 120)


@settings(max_examples=40)
@given(name=st.sampled_from(NAMES + ["noise", "walk"]),
       alpha=st.floats(0.01, 1.0), delta=st.floats(0.01, 1.0),
       N=st.integers(1, 30), extra=st.integers(0, 60), eps=st.floats(1e-4, 2.5))
def test_checker_agrees_with_oracle(name, alpha, delta, N, extra, eps):
    seq = {"noise": noise(7, 200), "walk": walk_grid(9, 200)}.get(name) or builtin(name)
    H = N + extra
    cert = check_slowly_oscillating(seq, OscillationParams(eps, alpha, delta, N, H))
    mod = oscillation_modulus(seq, alpha, delta, N, H)
    assert cert.verified == (mod < eps)
    if not cert.verified:
        cx = cert.counterexample
        assert N <= cx.k <= H and N <= cx.l <= H
        assert cx.k <= cx.s <= math.floor((1 + alpha) * cx.k)
        assert cx.l <= cx.t <= math.floor((1 + delta) * cx.l)
        assert not reeval_gap(seq, cx) < eps
        assert reeval_gap(seq, cx) == cx.values[-1]


@settings(max_examples=30)
@given(name=st.sampled_from(NAMES), a=st.floats(0.01, 0.5), b=st.floats(0.01, 0.5),
       grow=st.floats(0, 0.5), N=st.integers(1, 20), extra=st.integers(1, 40))
def test_modulus_monotone(name, a, b, grow, N, extra):
    seq = builtin(name)
    H = N + extra
    base = oscillation_gap(seq, a, b, N, H)
    assert oscillation_gap(seq, a + grow, b, N, H) >= base
    assert oscillation_gap(seq, a, b + grow, N, H) >= base
    assert oscillation_gap(seq, a, b, min(H, N + 3), H) <= base


@settings(max_examples=30)
@given(name=st.sampled_from(["log_max", "harmonic_sum", "alternating", "row_spike", "const"]),
       alpha=st.floats(0.01, 1.0), delta=st.floats(0.01, 1.0), N=st.integers(2, 20),
       extra=st.integers(0, 40), eps=st.floats(0.01, 3))
def test_cauchy_implies_slow_oscillation(name, alpha, delta, N, extra, eps):
    seq = builtin(name)
    H = N + extra
    top = math.ceil((1 + max(alpha, delta)) * H)
    if top > N - 1 and check_cauchy(seq, eps, N - 1, top).verified:
        assert check_slowly_oscillating(seq, OscillationParams(eps, alpha, delta, N, H)).verified


def test_nan_rejected():
    seq = ScalarDoubleSequence(lambda k, l: np.where(k == 5, np.nan, 0.0), "hole")
    with pytest.raises(ValueError):
        check_slowly_oscillating(seq, OscillationParams(0.1, 0.5, 0.5, 1, 10))


def test_cell_cap(monkeypatch):
    monkeypatch.setenv("DOUBLESEQ_MAX_CELLS", "10")
    assert check_slowly_oscillating(log_max, OscillationParams(0.1, 0.5, 0.5, 1, 10)).status == "undetermined"


def test_find_witness_examples():
    w = find_witness(builtin("const"), 0.01, 100)
    assert (w.params.alpha, w.params.delta, w.params.threshold) == (0.5, 0.5, 1)
    assert find_witness(alternating, 1.0, 100) is None


def test_find_witness_log_max_small_window():
    w = find_witness(log_max, 0.1, 500)
    p = w.params
    assert w.verified and math.log(1 + p.alpha) < 0.1
    assert oscillation_modulus(log_max, p.alpha, p.delta, p.threshold, 500) < 0.1
    # witness order: the first admissible triple, so the next larger alpha fails
    assert not check_slowly_oscillating(log_max, OscillationParams(0.1, 2 * p.alpha, 2 * p.alpha, p.threshold, 500)).verified


def test_find_witness_skips_vacuous_ratios():
    # at H = 100 ratios below 1/100 give a one-index window at the horizon
    w = find_witness(alternating, 1.0, 100, ratios=(2.0 ** -10,))
    assert w is None


def test_certificate_json():
    cert = check_slowly_oscillating(alternating, OscillationParams(1.0, 0.5, 0.5, 4, 100))
    d = json.loads(cert.to_json())
    assert list(d) == ["epsilon", "alpha", "delta", "threshold", "horizon", "status", "counterexample", "pairs_checked"]
    assert d["counterexample"] == [4, 4, 4, 5, [1.0, -1.0, 2.0]]


def test_partners_run_past_horizon():
    # only the partner beyond H differs; clipping at H would miss it
    seq = ScalarDoubleSequence(lambda k, l: np.where(k > 20, 1.0, 0.0), "step")
    cert = check_slowly_oscillating(seq, OscillationParams(0.5, 0.5, 0.5, 10, 20))
    assert cert.status == VIOLATED
    assert cert.counterexample.s == 21
