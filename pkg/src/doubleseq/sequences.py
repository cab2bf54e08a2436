"""Double sequences, their Pringsheim-type checks, and the builtin gallery.

Every check here is window-relative: the "for all k, l > N" quantifiers are
truncated at a caller-supplied horizon ``H`` and a report never claims more
than what the scanned window shows.  Comparisons are strict and done on raw
floats, so any counterexample can be re-evaluated and will reproduce the same
inequality bit for bit.

Indices are 1-based, ``x[k, l]`` is row ``k`` and column ``l``.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Union

import numpy as np

from ._windows import max_cells, row_blocks

VERIFIED = "verified"
VIOLATED = "violated"
UNDETERMINED = "undetermined"
DIVERGENT = "divergent"


class WindowError(ValueError):
    """Raised when a scan window or its parameters are malformed."""


class DomainError(ValueError):
    """Raised when a point leaves the domain it is required to live in."""

    def __init__(self, message: str, index=None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class IndexPair:
    k: int
    l: int

    def __post_init__(self):
        if int(self.k) < 1 or int(self.l) < 1:
            raise WindowError(f"indices are 1-based, got ({self.k}, {self.l})")

    def __iter__(self):
        return iter((self.k, self.l))


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned rectangle, each edge open or closed."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    x_lo_closed: bool = True
    x_hi_closed: bool = True
    y_lo_closed: bool = True
    y_hi_closed: bool = True

    def __post_init__(self):
        if not (self.x_lo <= self.x_hi and self.y_lo <= self.y_hi):
            raise ValueError("DomainBox needs x_lo <= x_hi and y_lo <= y_hi")

    @classmethod
    def closed(cls, lo: float, hi: float) -> "DomainBox":
        return cls(lo, hi, lo, hi)

    @classmethod
    def left_open(cls, lo: float, hi: float) -> "DomainBox":
        """The square ``(lo, hi]^2``."""
        return cls(lo, hi, lo, hi, x_lo_closed=False, y_lo_closed=False)

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(v) for v in (self.x_lo, self.x_hi, self.y_lo, self.y_hi))

    def contains(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ok = (x >= self.x_lo) if self.x_lo_closed else (x > self.x_lo)
        ok &= (x <= self.x_hi) if self.x_hi_closed else (x < self.x_hi)
        ok &= (y >= self.y_lo) if self.y_lo_closed else (y > self.y_lo)
        ok &= (y <= self.y_hi) if self.y_hi_closed else (y < self.y_hi)
        return ok

    def to_dict(self) -> dict:
        return asdict(self)


def _as_index(a):
    return np.asarray(a, dtype=np.int64)


@dataclass(frozen=True)
class ScalarDoubleSequence:
    """A real double sequence given by a pure evaluator.

    ``evaluator(k, l)`` receives broadcastable int64 arrays and returns an
    array of floats. Set ``vectorized=False`` for evaluators that only
    accept Python ints; they are then mapped cell by cell.
    """

    evaluator: Callable
    label: str = "x"
    vectorized: bool = True

    def values(self, k, l) -> np.ndarray:
        k = _as_index(k)
        l = _as_index(l)
        shape = np.broadcast_shapes(k.shape, l.shape)
        if self.vectorized:
            out = self.evaluator(k, l)
        else:
            fn = np.vectorize(lambda a, b: float(self.evaluator(int(a), int(b))), otypes=[float])
            out = fn(k, l)
        return np.broadcast_to(np.asarray(out, dtype=float), shape)

    def __call__(self, k: int, l: int) -> float:
        return float(self.values(k, l))

    def __getitem__(self, idx) -> float:
        k, l = idx
        return self(k, l)


@dataclass(frozen=True)
class FactorableGridSequence:
    """Planar double sequence ``(u_k, v_l)`` built from two single sequences.

    ``row_gen`` and ``col_gen`` take int64 arrays. Points are checked against
    ``domain`` every time they are generated.
    """

    row_gen: Callable
    col_gen: Callable
    domain: DomainBox
    label: str = "grid"
    limit: Optional[tuple] = None

    def rows(self, k) -> np.ndarray:
        k = _as_index(k)
        return np.broadcast_to(np.asarray(self.row_gen(k), dtype=float), k.shape)

    def cols(self, l) -> np.ndarray:
        l = _as_index(l)
        return np.broadcast_to(np.asarray(self.col_gen(l), dtype=float), l.shape)

    def points(self, k, l):
        k = _as_index(k)
        l = _as_index(l)
        x, y = np.broadcast_arrays(self.rows(k), self.cols(l))
        inside = self.domain.contains(x, y)
        if not np.all(inside):
            bad = np.argwhere(~inside)[0]
            kk, ll = np.broadcast_arrays(k, l)
            at = (int(kk[tuple(bad)]), int(ll[tuple(bad)]))
            raise DomainError(f"{self.label}: point at index {at} leaves the domain", at)
        return x, y

    def __call__(self, k: int, l: int):
        x, y = self.points(k, l)
        return float(x), float(y)


Sequence = Union[ScalarDoubleSequence, FactorableGridSequence]


@dataclass(frozen=True)
class Counterexample:
    """Indices and values that witness a failed inequality.

    Single-index checks leave ``s`` and ``t`` as ``None``.
    """

    k: int
    l: int
    s: Optional[int] = None
    t: Optional[int] = None
    values: tuple = ()

    def to_list(self) -> list:
        return [self.k, self.l, self.s, self.t, list(self.values)]

    @classmethod
    def from_list(cls, raw) -> "Counterexample":
        k, l, s, t, values = raw
        return cls(k, l, s, t, tuple(values))


@dataclass(frozen=True)
class ConvergenceReport:
    status: str
    epsilon: float
    threshold: int
    horizon: int
    limit: Optional[float] = None
    counterexample: Optional[Counterexample] = None

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED

    def to_dict(self) -> dict:
        limit = self.limit
        if isinstance(limit, tuple):
            limit = list(limit)
        return {
            "status": self.status,
            "limit": limit,
            "epsilon": self.epsilon,
            "threshold": self.threshold,
            "horizon": self.horizon,
            "counterexample": None if self.counterexample is None else self.counterexample.to_list(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class DivergenceParams:
    bound: float
    n1: int
    n2: int
    horizon: int

    def __post_init__(self):
        if not self.bound > 0:
            raise WindowError("bound must be positive")
        if self.n1 < 1 or self.n2 < 1:
            raise WindowError("n1 and n2 must be positive")
        if self.horizon <= max(self.n1, self.n2):
            raise WindowError("horizon must exceed max(n1, n2)")


def evaluate(seq: ScalarDoubleSequence, idx) -> float:
    """Read ``x[k, l]``."""
    if not isinstance(idx, IndexPair):
        idx = IndexPair(*idx)
    return seq(idx.k, idx.l)


def _check_window(epsilon, threshold, horizon):
    if not epsilon > 0:
        raise WindowError("epsilon must be positive")
    if threshold < 1:
        raise WindowError("threshold must be at least 1")
    if horizon <= threshold:
        raise WindowError(f"horizon {horizon} must exceed threshold {threshold}")


def _over_cap(cells: int) -> bool:
    return cells > max_cells()


def _first_bad(seq, k_lo, k_hi, l_lo, l_hi, bad_mask):
    """Row-major first cell of the box where ``bad_mask(values)`` holds."""
    cols = np.arange(l_lo, l_hi + 1)
    for a, b in row_blocks(k_lo, k_hi, len(cols)):
        X = seq.values(np.arange(a, b + 1)[:, None], cols[None, :])
        bad = bad_mask(X)
        if bad.any():
            i, j = np.unravel_index(np.argmax(bad), bad.shape)
            return a + int(i), int(cols[j]), float(X[i, j])
    return None


def _scan_single(seq, lo_k, lo_l, horizon, bad_mask, epsilon, threshold, limit=None):
    cells = (horizon - lo_k + 1) * (horizon - lo_l + 1)
    if _over_cap(cells):
        return ConvergenceReport(UNDETERMINED, epsilon, threshold, horizon, limit)
    hit = _first_bad(seq, lo_k, horizon, lo_l, horizon, bad_mask)
    if hit is None:
        return ConvergenceReport(VERIFIED, epsilon, threshold, horizon, limit)
    k, l, v = hit
    return ConvergenceReport(VIOLATED, epsilon, threshold, horizon, limit, Counterexample(k, l, values=(v,)))


def _grid_distance(grid: FactorableGridSequence, point) -> ScalarDoubleSequence:
    px, py = point

    def dist(k, l):
        x, y = grid.points(k, l)
        return np.hypot(x - px, y - py)

    return ScalarDoubleSequence(dist, label=f"|{grid.label} - {tuple(point)}|")


def check_cauchy(seq: ScalarDoubleSequence, epsilon: float, threshold: int, horizon: int) -> ConvergenceReport:
    """Check ``|x[k,l] - x[s,t]| < epsilon`` for all ``N < k, l, s, t <= H``.

    All pairwise gaps are below epsilon exactly when the box's max minus min
    is, so the scan is linear in the number of cells. A violation reports
    the lexicographically smallest offending ``(k, l, s, t)``.
    """
    _check_window(epsilon, threshold, horizon)
    lo = threshold + 1
    if _over_cap((horizon - threshold) ** 2):
        return ConvergenceReport(UNDETERMINED, epsilon, threshold, horizon)
    cols = np.arange(lo, horizon + 1)
    hi_v, lo_v, has_nan = -np.inf, np.inf, False
    for a, b in row_blocks(lo, horizon, len(cols)):
        X = seq.values(np.arange(a, b + 1)[:, None], cols[None, :])
        if np.isnan(X).any():
            has_nan = True
            break
        hi_v = max(hi_v, float(X.max()))
        lo_v = min(lo_v, float(X.min()))
    if not has_nan and hi_v - lo_v < epsilon:
        return ConvergenceReport(VERIFIED, epsilon, threshold, horizon)
    if has_nan:
        anchor = _first_bad(seq, lo, horizon, lo, horizon, np.isnan)
    else:
        anchor = _first_bad(seq, lo, horizon, lo, horizon,
                            lambda X: ~((X - lo_v < epsilon) & (hi_v - X < epsilon)))
    k, l, v = anchor
    partner = _first_bad(seq, lo, horizon, lo, horizon, lambda X: ~(np.abs(v - X) < epsilon))
    s, t, w = partner
    return ConvergenceReport(VIOLATED, epsilon, threshold, horizon, None, Counterexample(k, l, s, t, (v, w)))


def check_pringsheim(seq: Sequence, limit, epsilon: float, threshold: int, horizon: int) -> ConvergenceReport:
    """Check ``|x[k,l] - L| < epsilon`` for all ``N < k, l <= H``.

    For a grid sequence ``limit`` is a point and the distance is Euclidean.
    """
    _check_window(epsilon, threshold, horizon)
    if isinstance(seq, FactorableGridSequence):
        point = tuple(float(c) for c in limit)
        rep = check_pringsheim(_grid_distance(seq, point), 0.0, epsilon, threshold, horizon)
        return ConvergenceReport(rep.status, epsilon, threshold, horizon, point, rep.counterexample)
    limit = float(limit)
    lo = threshold + 1
    return _scan_single(seq, lo, lo, horizon, lambda X: ~(np.abs(X - limit) < epsilon),
                        epsilon, threshold, limit)


def check_definitely_divergent(seq: ScalarDoubleSequence, params: DivergenceParams) -> ConvergenceReport:
    """Check ``|x[m,n]| > M`` for ``n1 < m <= H`` and ``n2 < n <= H``."""
    M = params.bound
    return _scan_single(seq, params.n1 + 1, params.n2 + 1, params.horizon,
                        lambda X: ~(np.abs(X) > M), M, min(params.n1, params.n2))


def check_bounded(seq: ScalarDoubleSequence, bound: float, horizon: int) -> ConvergenceReport:
    """Check ``|x[m,n]| < M`` on the whole window ``1 <= m, n <= H``.

    The report's ``epsilon`` field carries the bound.
    """
    if not bound > 0:
        raise WindowError("bound must be positive")
    if horizon < 1:
        raise WindowError("horizon must be positive")
    return _scan_single(seq, 1, 1, horizon, lambda X: ~(np.abs(X) < bound), bound, 1)


def _geometric(lo: int, hi: int):
    n = lo
    while n <= hi:
        yield n
        n *= 2


def estimate_pringsheim_limit(seq: ScalarDoubleSequence, tolerance: float, max_horizon: int) -> ConvergenceReport:
    """Heuristic window estimate of the Pringsheim limit.

    Probes ``n = 2, 4, 8, ...`` up to ``H // 2`` and, for each, the tail box
    ``n < k, l <= H``.  The first ``n`` whose tail oscillation (max - min) is
    below ``tolerance`` gives ``verified`` with ``limit = x[H, H]``.
    Otherwise, if some tail box has every ``|x| > 1/tolerance`` the result is
    ``divergent`` (window evidence of definite divergence), else
    ``undetermined``.  Nothing here certifies an infinite-domain limit.
    """
    if not tolerance > 0:
        raise WindowError("tolerance must be positive")
    H = int(max_horizon)
    probes = list(_geometric(2, H // 2))
    if not probes or _over_cap(H * H):
        return ConvergenceReport(UNDETERMINED, tolerance, 1, H)
    idx = np.array(probes)
    # tail statistics per probe, accumulated from row blocks
    t_max = np.full(len(probes), -np.inf)
    t_min = np.full(len(probes), np.inf)
    t_abs = np.full(len(probes), np.inf)
    cols = np.arange(1, H + 1)
    for a, b in row_blocks(1, H, H):
        rows = np.arange(a, b + 1)
        X = seq.values(rows[:, None], cols[None, :])
        # suffix reductions along columns: entry [:, l-1] covers columns >= l
        smax = np.maximum.accumulate(X[:, ::-1], axis=1)[:, ::-1]
        smin = np.minimum.accumulate(X[:, ::-1], axis=1)[:, ::-1]
        sabs = np.minimum.accumulate(np.abs(X)[:, ::-1], axis=1)[:, ::-1]
        for i, n in enumerate(probes):
            keep = rows > n
            if not keep.any():
                continue
            t_max[i] = max(t_max[i], smax[keep, n].max())
            t_min[i] = min(t_min[i], smin[keep, n].min())
            t_abs[i] = min(t_abs[i], sabs[keep, n].min())
    for i, n in enumerate(probes):
        if t_max[i] - t_min[i] < tolerance:
            return ConvergenceReport(VERIFIED, tolerance, int(n), H, seq(H, H))
    bound = 1.0 / tolerance
    for i, n in enumerate(probes):
        if t_abs[i] > bound:
            rep = check_definitely_divergent(seq, DivergenceParams(bound, int(n), int(n), H))
            if rep.verified:
                return ConvergenceReport(DIVERGENT, tolerance, int(n), H)
    return ConvergenceReport(UNDETERMINED, tolerance, int(idx[-1]), H)


# -- gallery -----------------------------------------------------------------

def _const(c: float) -> ScalarDoubleSequence:
    return ScalarDoubleSequence(lambda k, l: np.full(np.broadcast_shapes(k.shape, l.shape), c),
                                label=f"const({c!r})")


def _row_spike(k, l):
    k, l = np.broadcast_arrays(k, l)
    return np.where(l == 1, k, 0).astype(float)


_SCALARS = {
    "log_max": lambda: ScalarDoubleSequence(lambda k, l: np.log(np.maximum(k, l)), "log_max"),
    "harmonic_sum": lambda: ScalarDoubleSequence(lambda k, l: 1.0 / (k + l), "harmonic_sum"),
    "alternating": lambda: ScalarDoubleSequence(lambda k, l: np.where((k + l) % 2 == 0, 1.0, -1.0), "alternating"),
    "row_spike": lambda: ScalarDoubleSequence(_row_spike, "row_spike"),
}

_INV_LN2 = 1.0 / math.log(2.0)

_GRIDS = {
    "recip_grid": lambda: FactorableGridSequence(
        lambda k: 1.0 / k, lambda l: 1.0 / l, DomainBox.left_open(0.0, 1.0), "recip_grid", (0.0, 0.0)),
    "log_grid": lambda: FactorableGridSequence(
        lambda k: 1.0 / np.log(k + 1.0), lambda l: 1.0 / np.log(l + 1.0),
        DomainBox.left_open(0.0, _INV_LN2), "log_grid", (0.0, 0.0)),
}

GALLERY = sorted(list(_SCALARS) + list(_GRIDS) + ["const"])
_CONST_RE = re.compile(r"^const(?:\((?P<c>[^)]*)\)|:(?P<d>.+))?$")


def builtin(name: str) -> Sequence:
    """Look up a gallery sequence by its stable name.

    ``const`` defaults to 1.0; ``const(2.5)`` or ``const:2.5`` set the value.
    """
    m = _CONST_RE.match(name.strip())
    if m:
        raw = m.group("c") or m.group("d")
        return _const(float(raw) if raw else 1.0)
    if name in _SCALARS:
        return _SCALARS[name]()
    if name in _GRIDS:
        return _GRIDS[name]()
    raise KeyError(f"unknown gallery sequence {name!r}; known: {', '.join(GALLERY)}")


def scalar_gallery() -> list:
    return [builtin(n) for n in ("const", "log_max", "harmonic_sum", "alternating", "row_spike")]


def grid_gallery() -> list:
    return [builtin(n) for n in sorted(_GRIDS)]
