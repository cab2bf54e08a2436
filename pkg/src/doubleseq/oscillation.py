"""Slow oscillation of double sequences on finite windows.

A sequence is slowly oscillating at level ``epsilon`` with witness
``(alpha, delta, N)`` when ``|x[k,l] - x[s,t]| < epsilon`` for every anchor
``N <= k, l <= H`` and every partner with ``k <= s <= floor((1+alpha) k)`` and
``l <= t <= floor((1+delta) l)``.  Partners may run past ``H``; the window is
relative, not clipped.  For grid sequences the gap is the planar distance
between ``(u_k, v_l)`` and ``(u_s, v_t)``.

Three entry points:

* :func:`check_slowly_oscillating` decides one witness on a window.  It works
  tile by tile with batched sliding-window extrema, so the cost is linear in
  the window, not in the number of anchor/partner pairs.
* :func:`oscillation_modulus` is a deliberately naive oracle: it loops over
  anchors and takes each partner rectangle's extremum directly.  It shares no
  code with the checker.
* :func:`find_witness` searches a dyadic grid of ``(alpha, delta, N)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._windows import max_cells, monotone_extrema, range_reduce, reach, row_blocks
from .sequences import (
    UNDETERMINED,
    VERIFIED,
    VIOLATED,
    Counterexample,
    FactorableGridSequence,
    WindowError,
    _first_bad,
)


@dataclass(frozen=True)
class OscillationParams:
    epsilon: float
    alpha: float
    delta: float
    threshold: int
    horizon: int

    def __post_init__(self):
        if not self.epsilon > 0:
            raise WindowError("epsilon must be positive")
        if not (self.alpha > 0 and self.delta > 0):
            raise WindowError("alpha and delta must be positive")
        if self.threshold < 1:
            raise WindowError("threshold must be at least 1")
        if self.horizon < self.threshold:
            raise WindowError("horizon must be at least the threshold")

    def nontrivial(self) -> bool:
        """True when the partner window at the horizon reaches past it in both directions."""
        H = self.horizon
        return reach(H, self.alpha) > H and reach(H, self.delta) > H


@dataclass(frozen=True)
class OscillationCertificate:
    params: OscillationParams
    status: str
    counterexample: Optional[Counterexample] = None
    pairs_checked: int = 0

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED

    @property
    def gap(self) -> Optional[float]:
        if self.counterexample is None:
            return None
        return self.counterexample.values[-1]

    def to_dict(self) -> dict:
        p = self.params
        return {
            "epsilon": p.epsilon,
            "alpha": p.alpha,
            "delta": p.delta,
            "threshold": p.threshold,
            "horizon": p.horizon,
            "status": self.status,
            "counterexample": None if self.counterexample is None else self.counterexample.to_list(),
            "pairs_checked": self.pairs_checked,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


TILE_CELLS = 1 << 23


def _band_end(k0: int, horizon: int) -> int:
    # dyadic bands keep the partner overhang below a factor 1 + 2 * alpha
    return min(horizon, max(2 * k0 - 1, k0 + 255))


def _tile_end(l0: int, horizon: int, region_rows: int) -> int:
    width = min(max(l0, 256), max(64, TILE_CELLS // max(1, region_rows)))
    return min(horizon, l0 + width - 1)


def _values(seq, rows, cols):
    X = seq.values(rows[:, None], cols[None, :])
    if np.isnan(X).any():
        i, j = np.argwhere(np.isnan(X))[0]
        raise ValueError(f"{seq.label} is NaN at ({rows[i]}, {cols[j]})")
    return X


def _tile_gaps(seq, k0, k1, l0, l1, alpha, delta):
    """Largest partner gap for every anchor in ``[k0,k1] x [l0,l1]``."""
    ks = np.arange(k0, k1 + 1)
    ls = np.arange(l0, l1 + 1)
    rows = np.arange(k0, reach(k1, alpha) + 1)
    cols = np.arange(l0, reach(l1, delta) + 1)
    c_lo = ls - l0
    c_hi = reach(ls, delta) - l0
    a_max = np.empty((len(rows), len(ls)))
    a_min = np.empty((len(rows), len(ls)))
    X0 = np.empty((len(ks), len(ls)))
    for a, b in row_blocks(0, len(rows) - 1, len(cols)):
        X = _values(seq, rows[a:b + 1], cols)
        a_max[a:b + 1], a_min[a:b + 1] = monotone_extrema(X, X, c_lo, c_hi)
        if a < len(ks):
            top = min(b + 1, len(ks))
            X0[a:top] = X[:top - a, :len(ls)]
    b_max, b_min = monotone_extrema(a_max.T, a_min.T, ks - k0, reach(ks, alpha) - k0)
    return np.maximum(b_max.T - X0, X0 - b_min.T), X0


def _tiles(p: OscillationParams):
    """Anchor tiles in band order; each band is a list of column tiles."""
    N, H = p.threshold, p.horizon
    k0 = N
    while k0 <= H:
        k1 = _band_end(k0, H)
        region_rows = reach(k1, p.alpha) - k0 + 1
        l0 = N
        band = []
        while l0 <= H:
            l1 = _tile_end(l0, H, region_rows)
            band.append((l0, l1))
            l0 = l1 + 1
        yield k0, k1, band
        k0 = k1 + 1


def _scalar_first_anchor(seq, p: OscillationParams):
    eps = p.epsilon
    for k0, k1, band in _tiles(p):
        hit = None
        row_hi = k1
        for l0, l1 in band:
            # a hit at row k* only leaves rows above k* in play for later tiles
            if row_hi < k0:
                break
            gaps, X0 = _tile_gaps(seq, k0, row_hi, l0, l1, p.alpha, p.delta)
            bad = ~(gaps < eps)
            if bad.any():
                i, j = np.unravel_index(np.argmax(bad), bad.shape)
                hit = (k0 + int(i), l0 + int(j), float(X0[i, j]))
                row_hi = k0 + int(i) - 1
        if hit is not None:
            return hit
    return None


def _scalar_violation(seq, p: OscillationParams):
    anchor = _scalar_first_anchor(seq, p)
    if anchor is None:
        return None
    k, l, v = anchor
    eps = p.epsilon
    s, t, w = _first_bad(seq, k, reach(k, p.alpha), l, reach(l, p.delta),
                         lambda X: ~(np.abs(v - X) < eps))
    return Counterexample(k, l, s, t, (v, w, abs(v - w)))


def _axis_spread(vals: np.ndarray, base: int, idx: np.ndarray, ratio: float):
    """``max |vals[s] - vals[i]|`` over ``i <= s <= reach(i)``, with its first argmax."""
    lo = idx - base
    hi = reach(idx, ratio) - base
    vmax = range_reduce(vals, lo, hi, np.maximum)
    vmin = range_reduce(vals, lo, hi, np.minimum)
    own = vals[lo]
    return np.maximum(vmax - own, own - vmin)


def _grid_axes(grid: FactorableGridSequence, p: OscillationParams):
    N, H = p.threshold, p.horizon
    s_idx = np.arange(N, reach(H, p.alpha) + 1)
    t_idx = np.arange(N, reach(H, p.delta) + 1)
    # box domains factor, so checking each axis against one fixed partner index suffices
    U, _ = grid.points(s_idx, N)
    _, V = grid.points(N, t_idx)
    U = np.array(U)
    V = np.array(V)
    anchors = np.arange(N, H + 1)
    du = _axis_spread(U, N, anchors, p.alpha)
    dv = _axis_spread(V, N, anchors, p.delta)
    return U, V, du, dv


def _grid_violation(grid, p: OscillationParams):
    N, H, eps = p.threshold, p.horizon, p.epsilon
    U, V, du, dv = _grid_axes(grid, p)
    n = H - N + 1
    hit = None
    for a, b in row_blocks(0, n - 1, n):
        G = np.hypot(du[a:b + 1, None], dv[None, :])
        bad = ~(G < eps)
        if bad.any():
            i, j = np.unravel_index(np.argmax(bad), bad.shape)
            hit = (a + int(i), int(j))
            break
    if hit is None:
        return None
    i, j = hit
    k, l = N + i, N + j
    uk, vl = U[i], V[j]
    s_hi, t_hi = reach(k, p.alpha), reach(l, p.delta)
    dx = U[k - N:s_hi - N + 1] - uk
    dy = V[l - N:t_hi - N + 1] - vl
    for r, ddx in enumerate(dx):
        row = np.hypot(ddx, dy)
        bad = ~(row < eps)
        if bad.any():
            c = int(np.argmax(bad))
            s, t = k + r, l + c
            return Counterexample(k, l, s, t, (float(uk), float(vl), float(U[s - N]), float(V[t - N]), float(row[c])))
    raise AssertionError("grid anchor flagged without a partner")


def _pair_counts(p: OscillationParams):
    ks = np.arange(p.threshold, p.horizon + 1)
    rk = [int(v) for v in reach(ks, p.alpha) - ks + 1]
    rl = [int(v) for v in reach(ks, p.delta) - ks + 1]
    return rk, rl


def _pairs_before(p: OscillationParams, cx: Optional[Counterexample]) -> int:
    """Anchor/partner pairs up to and including ``cx`` in lexicographic order."""
    rk, rl = _pair_counts(p)
    total_l = sum(rl)
    if cx is None:
        return sum(rk) * total_l
    i, j = cx.k - p.threshold, cx.l - p.threshold
    return (sum(rk[:i]) * total_l + rk[i] * sum(rl[:j])
            + (cx.s - cx.k) * rl[j] + (cx.t - cx.l + 1))


def check_slowly_oscillating(seq, params: OscillationParams) -> OscillationCertificate:
    """Decide the witness ``params`` on its window.

    ``violated`` carries the lexicographically smallest ``(k, l, s, t)`` with
    gap ``>= epsilon``; its ``values`` end with that gap.  Windows with more
    anchors than ``DOUBLESEQ_MAX_CELLS`` come back ``undetermined``.
    """
    p = params
    anchors = (p.horizon - p.threshold + 1) ** 2
    if anchors > max_cells():
        return OscillationCertificate(p, UNDETERMINED)
    if isinstance(seq, FactorableGridSequence):
        cx = _grid_violation(seq, p)
    else:
        cx = _scalar_violation(seq, p)
    status = VERIFIED if cx is None else VIOLATED
    return OscillationCertificate(p, status, cx, _pairs_before(p, cx))


def oscillation_gap(seq, alpha: float, delta: float, threshold: int, horizon: int) -> float:
    """Fast sup of partner gaps over the window, via the checker's machinery."""
    p = OscillationParams(1.0, alpha, delta, threshold, horizon)
    N, H = threshold, horizon
    if isinstance(seq, FactorableGridSequence):
        _, _, du, dv = _grid_axes(seq, p)
        return float(np.hypot(du.max(), dv.max()))
    best = 0.0
    for k0, k1, band in _tiles(p):
        for l0, l1 in band:
            gaps, _ = _tile_gaps(seq, k0, k1, l0, l1, alpha, delta)
            best = max(best, float(gaps.max()))
    return best


def oscillation_modulus(seq, alpha: float, delta: float, threshold: int, horizon: int) -> float:
    """Brute-force sup of ``|x[k,l] - x[s,t]|`` over the witness region.

    Anchor by anchor, each partner rectangle is materialised and its largest
    deviation taken directly.  Slow on purpose; meant as an oracle for
    windows up to a few hundred.
    """
    if not (alpha > 0 and delta > 0):
        raise WindowError("alpha and delta must be positive")
    N, H = int(threshold), int(horizon)
    s_top = math.floor((1 + alpha) * H)
    t_top = math.floor((1 + delta) * H)
    best = 0.0
    if isinstance(seq, FactorableGridSequence):
        xs, _ = seq.points(np.arange(1, s_top + 1), 1)
        _, ys = seq.points(1, np.arange(1, t_top + 1))
        for k in range(N, H + 1):
            s_hi = math.floor((1 + alpha) * k)
            dx = xs[k - 1:s_hi] - xs[k - 1]
            for l in range(N, H + 1):
                t_hi = math.floor((1 + delta) * l)
                dy = ys[l - 1:t_hi] - ys[l - 1]
                d = float(np.hypot(dx[:, None], dy[None, :]).max())
                if d > best:
                    best = d
        return best
    X = seq.values(np.arange(1, s_top + 1)[:, None], np.arange(1, t_top + 1)[None, :])
    for k in range(N, H + 1):
        s_hi = math.floor((1 + alpha) * k)
        for l in range(N, H + 1):
            t_hi = math.floor((1 + delta) * l)
            d = float(np.abs(X[k - 1:s_hi, l - 1:t_hi] - X[k - 1, l - 1]).max())
            if d > best:
                best = d
    return best


DYADIC = tuple(2.0 ** -i for i in range(1, 21))


def _thresholds(horizon: int):
    n = 1
    while n <= horizon:
        yield n
        n *= 2


def _quick_refute(seq, p: OscillationParams) -> bool:
    """Cheap search for a violation at a sparse set of anchors.

    Only ever returns True with a genuine violating pair in hand; False means
    nothing was found and a full scan is needed.
    """
    N, H = p.threshold, p.horizon
    marks = sorted({N * m for m in _thresholds(H // N)} | {H, max(N, H - 1)})
    ks, ls, ss, ts = [], [], [], []
    for k in marks:
        S = reach(k, p.alpha)
        for l in marks:
            T = reach(l, p.delta)
            for s, t in ((k + 1, l), (k, l + 1), (k + 1, l + 1), (S, l), (k, T), (S, T)):
                if s <= S and t <= T and (s, t) != (k, l):
                    ks.append(k)
                    ls.append(l)
                    ss.append(s)
                    ts.append(t)
    if not ks:
        return False
    ks, ls, ss, ts = (np.array(v) for v in (ks, ls, ss, ts))
    if isinstance(seq, FactorableGridSequence):
        x0, y0 = seq.points(ks, ls)
        x1, y1 = seq.points(ss, ts)
        gap = np.hypot(x1 - x0, y1 - y0)
    else:
        gap = np.abs(seq.values(ks, ls) - seq.values(ss, ts))
    return bool(np.any(~(gap < p.epsilon)))


def find_witness(seq, epsilon: float, horizon: int, ratios=DYADIC) -> Optional[OscillationCertificate]:
    """First verified ``(alpha, delta, N)`` on the dyadic search grid.

    Order: ``alpha`` descending, then ``delta`` descending, then ``N`` over
    ``1, 2, 4, ... <= H`` ascending.  Grid points whose partner window at the
    horizon is a single index (``floor((1+alpha) H) == H``) are skipped, since
    such a window certifies nothing.  ``None`` means no witness on the grid,
    which is not a proof that the sequence fails to oscillate slowly.
    """
    H = int(horizon)
    usable = [r for r in ratios if reach(H, r) > H]
    for alpha in usable:
        for delta in usable:
            for N in _thresholds(H):
                p = OscillationParams(epsilon, alpha, delta, N, H)
                if _quick_refute(seq, p):
                    continue
                cert = check_slowly_oscillating(seq, p)
                if cert.verified:
                    return cert
    return None
