"""Two-variable functions acting on grid sequences.

Covers applying a function to a grid sequence, interleaving a sequence with
its limit, sampling-based uniform-continuity falsification, and sampled
uniform-convergence checks for singly and doubly indexed families.  The
samplers are deterministic given a seed and can only ever *refute*; a clean
run is evidence, not proof.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from .sequences import DomainBox, DomainError, FactorableGridSequence, ScalarDoubleSequence

VIOLATION_FOUND = "violation-found"
NO_VIOLATION_FOUND = "no-violation-found"
VERIFIED_ON_SAMPLE = "verified-on-sample"
VIOLATED = "violated"


@dataclass(frozen=True)
class Function2:
    """Pure real function of two variables on a box.

    ``factorization`` is an optional pair ``(g, h)`` with ``f(x, y) == g(x) * h(y)``.
    ``lipschitz`` is an analytic Lipschitz constant on ``domain`` when one is
    known (Euclidean metric on the plane).
    """

    evaluator: Callable
    domain: DomainBox
    label: str = "f"
    factorization: Optional[tuple] = None
    lipschitz: Optional[float] = None
    vectorized: bool = True

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.vectorized:
            out = self.evaluator(x, y)
        else:
            out = np.vectorize(lambda a, b: float(self.evaluator(float(a), float(b))), otypes=[float])(x, y)
        out = np.broadcast_to(np.asarray(out, dtype=float), np.broadcast_shapes(x.shape, y.shape))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class FunctionFamily:
    """``members(n)`` (single) or ``members(m, n)`` (double) returning a Function2."""

    members: Callable
    kind: str = "single"
    label: str = "f_n"

    def __post_init__(self):
        if self.kind not in ("single", "double"):
            raise ValueError("kind must be 'single' or 'double'")

    def __call__(self, *idx) -> Function2:
        return self.members(*idx)


@dataclass(frozen=True)
class UniformContinuityVerdict:
    status: str
    epsilon: float
    delta_hat: Optional[float] = None
    violating_pair: Optional[tuple] = None
    distance: Optional[float] = None
    gap: Optional[float] = None
    tested_delta: Optional[float] = None

    @property
    def violation_found(self) -> bool:
        return self.status == VIOLATION_FOUND

    def to_dict(self) -> dict:
        pair = None
        if self.violating_pair is not None:
            pair = [list(self.violating_pair[0]), list(self.violating_pair[1])]
        return {
            "status": self.status,
            "epsilon": self.epsilon,
            "delta_hat": self.delta_hat,
            "tested_delta": self.tested_delta,
            "violating_pair": pair,
            "distance": self.distance,
            "gap": self.gap,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class UniformConvergenceVerdict:
    status: str
    epsilon: float
    sup_gaps: dict = field(default_factory=dict)
    violation: Optional[dict] = None

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED_ON_SAMPLE

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "epsilon": self.epsilon,
            "sup_gaps": [[list(k) if isinstance(k, tuple) else k, v] for k, v in self.sup_gaps.items()],
            "violation": self.violation,
        }


def apply(f: Function2, grid: FactorableGridSequence) -> ScalarDoubleSequence:
    """The scalar sequence ``y[k, l] = f(u_k, v_l)``, evaluated lazily."""

    def image(k, l):
        x, y = grid.points(k, l)
        inside = f.domain.contains(x, y)
        if not np.all(inside):
            kk, ll = np.broadcast_arrays(k, l)
            bad = tuple(np.argwhere(~inside)[0])
            at = (int(kk[bad]), int(ll[bad]))
            raise DomainError(f"{grid.label} at {at} is outside the domain of {f.label}", at)
        return f(x, y)

    return ScalarDoubleSequence(image, label=f"{f.label}({grid.label})")


def interleave_with_limit(seq: ScalarDoubleSequence, limit: float) -> ScalarDoubleSequence:
    """Spread ``seq`` onto the odd/odd cells and fill every other cell with ``limit``.

    ``y[k, l] = a[(k+1)/2, (l+1)/2]`` when ``k`` and ``l`` are both odd.
    """
    L = float(limit)

    def woven(k, l):
        k, l = np.broadcast_arrays(k, l)
        odd = (k % 2 == 1) & (l % 2 == 1)
        out = np.full(k.shape, L)
        if odd.any():
            out[odd] = seq.values((k[odd] + 1) // 2, (l[odd] + 1) // 2)
        return out

    return ScalarDoubleSequence(woven, label=f"interleave({seq.label}, {L!r})")


# -- sampling ----------------------------------------------------------------

EDGE_DEPTH = 52
LEVELS = 31
_DIRECTIONS = np.array([(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)], dtype=float)
_DIRECTIONS /= np.hypot(_DIRECTIONS[:, 0], _DIRECTIONS[:, 1])[:, None]
_SCALES = np.array([0.999, 0.5, 0.25, 2.0 ** -10])


def _require_bounded(box: DomainBox):
    if not box.bounded:
        raise ValueError("sampling needs a bounded domain")


def _axis_edges(lo: float, hi: float):
    steps = (hi - lo) * 2.0 ** -np.arange(1, EDGE_DEPTH + 1)
    return lo + steps, hi - steps, lo + (hi - lo) / 2


def edge_points(box: DomainBox):
    """Deterministic points piling up at every edge and corner of ``box``."""
    _require_bounded(box)
    x_lo, x_hi, x_mid = _axis_edges(box.x_lo, box.x_hi)
    y_lo, y_hi, y_mid = _axis_edges(box.y_lo, box.y_hi)
    mid_x = np.full(EDGE_DEPTH, x_mid)
    mid_y = np.full(EDGE_DEPTH, y_mid)
    X = [x_lo, x_lo, x_hi, x_hi, x_lo, x_hi, mid_x, mid_x]
    Y = [y_lo, y_hi, y_lo, y_hi, mid_y, mid_y, y_lo, y_hi]
    # the edges themselves, where they belong to the box
    for x in (box.x_lo, x_mid, box.x_hi):
        for y in (box.y_lo, y_mid, box.y_hi):
            X.append([x])
            Y.append([y])
    X, Y = np.concatenate(X), np.concatenate(Y)
    keep = box.contains(X, Y)
    return X[keep], Y[keep]


def sample_points(box: DomainBox, count: int, seed: int):
    """Scrambled Halton points in ``box`` followed by the edge points."""
    _require_bounded(box)
    ex, ey = edge_points(box)
    if count <= 0:
        return ex, ey
    q = qmc.Halton(d=2, scramble=True, seed=seed).random(count)
    x = box.x_lo + q[:, 0] * (box.x_hi - box.x_lo)
    y = box.y_lo + q[:, 1] * (box.y_hi - box.y_lo)
    keep = box.contains(x, y)
    return np.concatenate([x[keep], ex]), np.concatenate([y[keep], ey])


def _level_pairs(box: DomainBox, radius: float, rng, budget: int, ex, ey, qx, qy):
    """Candidate pairs at planar distance strictly below ``radius``."""
    d = _DIRECTIONS[:, None, :] * _SCALES[None, :, None]
    d = d.reshape(-1, 2) * radius
    bx = np.repeat(ex, len(d))
    by = np.repeat(ey, len(d))
    ox = np.tile(d[:, 0], len(ex))
    oy = np.tile(d[:, 1], len(ey))
    if budget > 0:
        pick = rng.integers(0, len(qx), budget)
        theta = rng.uniform(0.0, 2 * np.pi, budget)
        rad = radius * rng.uniform(0.0, 0.999, budget)
        bx = np.concatenate([bx, qx[pick]])
        by = np.concatenate([by, qy[pick]])
        ox = np.concatenate([ox, rad * np.cos(theta)])
        oy = np.concatenate([oy, rad * np.sin(theta)])
    px, py = bx + ox, by + oy
    flip = ~box.contains(px, py)
    px[flip] = bx[flip] - ox[flip]
    py[flip] = by[flip] - oy[flip]
    ok = box.contains(px, py) & (np.hypot(px - bx, py - by) < radius)
    return bx[ok], by[ok], px[ok], py[ok]


def _violations(f: Function2, epsilon: float, radius: float, rng, budget, ex, ey, qx, qy):
    a, b, a2, b2 = _level_pairs(f.domain, radius, rng, budget, ex, ey, qx, qy)
    with np.errstate(all="ignore"):
        gap = np.abs(np.asarray(f(a, b)) - np.asarray(f(a2, b2)))
    hit = ~(gap < epsilon)
    return a[hit], b[hit], a2[hit], b2[hit], gap[hit]


def _level_setup(f: Function2, pair_budget: int, seed: int, levels: int):
    _require_bounded(f.domain)
    rng = np.random.default_rng(seed)
    ex, ey = edge_points(f.domain)
    qx, qy = sample_points(f.domain, max(64, pair_budget // max(1, levels)), seed)
    return rng, ex, ey, qx, qy


def test_uniform_continuity(f: Function2, epsilon: float, pair_budget: int = 20000, seed: int = 0,
                            levels: int = LEVELS) -> UniformContinuityVerdict:
    """Try to refute uniform continuity of ``f`` at level ``epsilon``.

    For ``n = 1, 2, 4, ...`` (``levels`` values) the sampler looks for points
    at distance ``< 1/n`` whose values differ by at least ``epsilon``.  The
    first ``n`` with no such pair ends the search with ``no-violation-found``
    and ``delta_hat = 1/n``.  A violation at every ``n`` down to the finest
    scale gives ``violation-found`` with the pair from that finest scale.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    rng, ex, ey, qx, qy = _level_setup(f, pair_budget, seed, levels)
    per_level = pair_budget // max(1, levels)
    last = None
    for i in range(levels):
        radius = 2.0 ** -i
        a, b, a2, b2, gap = _violations(f, epsilon, radius, rng, per_level, ex, ey, qx, qy)
        if len(gap) == 0:
            return UniformContinuityVerdict(NO_VIOLATION_FOUND, epsilon, delta_hat=radius)
        last = (radius, (float(a[0]), float(b[0])), (float(a2[0]), float(b2[0])), float(gap[0]))
    radius, p, q, gap = last
    dist = float(np.hypot(p[0] - q[0], p[1] - q[1]))
    return UniformContinuityVerdict(VIOLATION_FOUND, epsilon, violating_pair=(p, q),
                                    distance=dist, gap=gap, tested_delta=radius)


test_uniform_continuity.__test__ = False


def harvest_violation_pairs(f: Function2, epsilon: float, pair_budget: int = 20000, seed: int = 0,
                            levels: int = LEVELS, per_level: int = 64):
    """All violating pairs per scale, as used by the converse pipeline.

    Returns a list over scales ``n = 1, 2, 4, ...`` of arrays
    ``(a, b, a_bar, b_bar, gap)``; the list stops at the first scale without
    a violation.
    """
    rng, ex, ey, qx, qy = _level_setup(f, pair_budget, seed, levels)
    budget = pair_budget // max(1, levels)
    out = []
    for i in range(levels):
        a, b, a2, b2, gap = _violations(f, epsilon, 2.0 ** -i, rng, budget, ex, ey, qx, qy)
        if len(gap) == 0:
            break
        out.append(np.stack([a, b, a2, b2, gap], axis=1)[:per_level])
    return out


def _sup_gap(member: Function2, f: Function2, x, y):
    with np.errstate(all="ignore"):
        gap = np.abs(np.asarray(member(x, y)) - np.asarray(f(x, y)))
    gap = np.where(np.isnan(gap), np.inf, gap)
    i = int(np.argmax(gap))
    return float(gap[i]), i


def _uniform_check(probes, family, f, epsilon, sample_budget, seed):
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    x, y = sample_points(f.domain, sample_budget, seed)
    sups = {}
    violation = None
    for idx in probes:
        member = family(*idx) if isinstance(idx, tuple) else family(idx)
        gap, i = _sup_gap(member, f, x, y)
        sups[idx] = gap
        if violation is None and not gap < epsilon:
            violation = {"index": list(idx) if isinstance(idx, tuple) else idx,
                         "point": [float(x[i]), float(y[i])], "gap": gap}
    status = VERIFIED_ON_SAMPLE if violation is None else VIOLATED
    return UniformConvergenceVerdict(status, epsilon, sups, violation)


def check_uniform_convergence(family: FunctionFamily, f: Function2, epsilon: float, threshold: int,
                              sample_budget: int = 4096, seed: int = 0) -> UniformConvergenceVerdict:
    """Sampled ``sup |f_n - f| < epsilon`` for ``n`` in ``{N, N+1, 2N, 4N}``."""
    if family.kind != "single":
        raise TypeError("check_uniform_convergence needs a single-indexed family")
    N = int(threshold)
    probes = list(dict.fromkeys([N, N + 1, 2 * N, 4 * N]))
    return _uniform_check(probes, family, f, epsilon, sample_budget, seed)


def check_uniform_convergence_double(family: FunctionFamily, f: Function2, epsilon: float, thresholds,
                                     sample_budget: int = 4096, seed: int = 0) -> UniformConvergenceVerdict:
    """Sampled ``sup |f_{m,n} - f| < epsilon`` for ``(m, n)`` in ``{N1, 2N1} x {N2, 2N2}``."""
    if family.kind != "double":
        raise TypeError("check_uniform_convergence_double needs a double-indexed family")
    n1, n2 = (int(v) for v in thresholds)
    probes = [(m, n) for m in (n1, 2 * n1) for n in (n2, 2 * n2)]
    return _uniform_check(probes, family, f, epsilon, sample_budget, seed)


# -- gallery -----------------------------------------------------------------

def _up(v: float) -> float:
    # constants are rounded up one ulp so float rounding never beats the bound
    return math.nextafter(v, math.inf)


UNIT = DomainBox.closed(0.0, 1.0)
TEN = DomainBox.closed(0.0, 10.0)
OPEN_UNIT = DomainBox.left_open(0.0, 1.0)


def _ones(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _identity(x):
    return np.asarray(x, dtype=float)


def _reach(box: DomainBox) -> float:
    rx = max(abs(box.x_lo), abs(box.x_hi))
    ry = max(abs(box.y_lo), abs(box.y_hi))
    return math.hypot(rx, ry)


def _make(name: str, domain: Optional[DomainBox]) -> Function2:
    m = re.match(r"^const(?:\((?P<c>[^)]*)\)|:(?P<d>.+))?$", name)
    if m:
        c = float(m.group("c") or m.group("d") or 1.0)
        box = domain or TEN
        return Function2(lambda x, y: np.full(np.broadcast_shapes(np.shape(x), np.shape(y)), c), box,
                         f"const({c!r})", (lambda x: c * _ones(x), _ones), 0.0)
    if name == "add":
        box = domain or TEN
        return Function2(lambda x, y: x + y, box, "add", None, _up(math.sqrt(2.0)))
    if name == "mul":
        box = domain or TEN
        return Function2(lambda x, y: x * y, box, "mul", (_identity, _identity), _up(_reach(box)))
    if name == "sin_product":
        box = domain or TEN
        return Function2(lambda x, y: np.sin(x) * np.sin(y), box, "sin_product", (np.sin, np.sin), 1.0)
    if name == "proj_x":
        box = domain or TEN
        return Function2(lambda x, y: x + 0.0 * y, box, "proj_x", (_identity, _ones), 1.0)
    if name == "one_over_xy":
        box = domain or OPEN_UNIT
        return Function2(lambda x, y: (1.0 / x) * (1.0 / y), box, "one_over_xy",
                         (lambda x: 1.0 / x, lambda y: 1.0 / y))
    if name == "sin_inv_x":
        box = domain or OPEN_UNIT
        return Function2(lambda x, y: np.sin(1.0 / x) + 0.0 * y, box, "sin_inv_x",
                         (lambda x: np.sin(1.0 / x), _ones))
    raise KeyError(f"unknown gallery function {name!r}; known: {', '.join(FUNCTIONS)}")


FUNCTIONS = ("add", "const", "mul", "one_over_xy", "proj_x", "sin_inv_x", "sin_product")
LIPSCHITZ_FUNCTIONS = ("add", "const", "mul", "proj_x", "sin_product")


def function(name: str, domain: Optional[DomainBox] = None) -> Function2:
    """Gallery function by stable name, optionally on a different box.

    Lipschitz members default to ``[0, 10]^2``; ``one_over_xy`` and
    ``sin_inv_x`` default to ``(0, 1]^2``.
    """
    return _make(name.strip(), domain)
