"""Verification campaigns for the function-preservation results.

Each campaign runs a list of cases and collects them in a
:class:`CampaignReport`.  Hypotheses are checked first and a case
whose hypotheses fail is recorded as ``refused`` rather than run, so a
``fail`` always points at either a bug or a genuine counterexample.

Case outcomes:

``pass``           every certificate the case needs came back as expected
``fail``           a certificate that should exist is missing or violated
``expected-fail``  the image misbehaves but the function is known not to be
                   uniformly continuous, so nothing was promised
``refused``        a precondition did not hold on the sampled data
``inconclusive``   the run could not decide either way
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .functions import (
    UNIT,
    Function2,
    FunctionFamily,
    apply,
    check_uniform_convergence,
    check_uniform_convergence_double,
    function,
    harvest_violation_pairs,
    interleave_with_limit,
    test_uniform_continuity,
)
from .oscillation import OscillationParams, check_slowly_oscillating, find_witness, oscillation_gap
from .sequences import DomainBox, DomainError, FactorableGridSequence, builtin, check_pringsheim

PASS = "pass"
FAIL = "fail"
EXPECTED_FAIL = "expected-fail"
REFUSED = "refused"
INCONCLUSIVE = "inconclusive"
OUTCOMES = (PASS, FAIL, EXPECTED_FAIL, REFUSED, INCONCLUSIVE)
THEOREMS = ("T3.1", "T3.2", "T3.3", "T3.4", "T3.5")


@dataclass
class CampaignReport:
    theorem_id: str
    cases: list = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)

    def add(self, sequence: str, fn: str, params: dict, outcome: str, certificates: dict, note: str = ""):
        if outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {outcome!r}")
        self.cases.append({"sequence": sequence, "function": fn, "params": params,
                           "outcome": outcome, "note": note, "certificates": certificates})

    @property
    def summary(self) -> dict:
        return {o: sum(c["outcome"] == o for c in self.cases) for o in OUTCOMES}

    @property
    def status(self) -> str:
        """``fail`` beats ``inconclusive``/``refused``, which beat ``pass``."""
        s = self.summary
        if s[FAIL]:
            return FAIL
        if s[INCONCLUSIVE] or s[REFUSED] or not self.cases:
            return INCONCLUSIVE
        return PASS

    def to_dict(self) -> dict:
        cases = sorted(self.cases, key=lambda c: (c["sequence"], c["function"], json.dumps(c["params"], sort_keys=True)))
        return {
            "theorem_id": self.theorem_id,
            "status": self.status,
            "summary": self.summary,
            "cases": cases,
            "config_echo": self.config_echo,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _cert(c) -> Optional[dict]:
    return None if c is None else c.to_dict()


# -- extra grids and families used by the default campaigns -----------------

def offset_grid(c: float, d: float) -> FactorableGridSequence:
    """``u_k = c + 1/k``, ``v_l = d + 1/l``, converging to ``(c, d)``."""
    box = DomainBox(c, c + 1.0, d, d + 1.0, x_lo_closed=False, y_lo_closed=False)
    return FactorableGridSequence(lambda k: c + 1.0 / k, lambda l: d + 1.0 / l, box,
                                  f"offset_grid({c!r}, {d!r})", (c, d))


def constant_grid(c: float, d: float) -> FactorableGridSequence:
    box = DomainBox(c, c, d, d)
    return FactorableGridSequence(lambda k: np.full(k.shape, c), lambda l: np.full(l.shape, d), box,
                                  f"constant_grid({c!r}, {d!r})", (c, d))


def scaled_family(f: Function2) -> FunctionFamily:
    """``f_n = f * (1 + 1/n)``."""
    return FunctionFamily(lambda n: Function2(lambda x, y: f(x, y) * (1.0 + 1.0 / n), f.domain,
                                              f"{f.label}*(1+1/{n})"), "single", f"{f.label}*(1+1/n)")


def shifted_family(f: Function2) -> FunctionFamily:
    """``f_n = f + 1/n``."""
    return FunctionFamily(lambda n: Function2(lambda x, y: f(x, y) + 1.0 / n, f.domain, f"{f.label}+1/{n}"),
                          "single", f"{f.label}+1/n")


def constant_family(f: Function2, kind: str = "single") -> FunctionFamily:
    """Every member equal to ``f``."""
    return FunctionFamily(lambda *idx: f, kind, f"{f.label} (constant family)")


def power_family() -> FunctionFamily:
    """``f_n(x, y) = x**n`` on the closed unit square; not uniformly convergent."""
    return FunctionFamily(lambda n: Function2(lambda x, y: x ** n + 0.0 * y, UNIT, f"x^{n}"), "single", "x^n")


def power_limit() -> Function2:
    """Pointwise limit of :func:`power_family`: 1 on ``x = 1``, else 0."""
    return Function2(lambda x, y: np.where(x == 1.0, 1.0, 0.0) + 0.0 * y, UNIT, "[x == 1]")


def double_shifted_family(f: Function2) -> FunctionFamily:
    """``f_{m,n} = f + 1/(m+n)``."""
    return FunctionFamily(lambda m, n: Function2(lambda x, y: f(x, y) + 1.0 / (m + n), f.domain,
                                                 f"{f.label}+1/({m}+{n})"), "double", f"{f.label}+1/(m+n)")


def double_scaled_family(f: Function2) -> FunctionFamily:
    """``f_{m,n} = f * (1 + 1/(m+n))``."""
    return FunctionFamily(lambda m, n: Function2(lambda x, y: f(x, y) * (1.0 + 1.0 / (m + n)), f.domain,
                                                 f"{f.label}*(1+1/({m}+{n}))"), "double", f"{f.label}*(1+1/(m+n))")


def row_shifted_family(f: Function2) -> FunctionFamily:
    """``f_{m,n} = f + 1/m``; not uniformly P-convergent to ``f``."""
    return FunctionFamily(lambda m, n: Function2(lambda x, y: f(x, y) + 1.0 / m, f.domain, f"{f.label}+1/{m}"),
                          "double", f"{f.label}+1/m")


# -- preservation of slow oscillation ----------------------------------------

def _inside(inner: DomainBox, outer: DomainBox) -> bool:
    def edge(v, v_closed, w, w_closed, lower):
        if v != w:
            return v > w if lower else v < w
        return w_closed or not v_closed
    return (edge(inner.x_lo, inner.x_lo_closed, outer.x_lo, outer.x_lo_closed, True)
            and edge(inner.x_hi, inner.x_hi_closed, outer.x_hi, outer.x_hi_closed, False)
            and edge(inner.y_lo, inner.y_lo_closed, outer.y_lo, outer.y_lo_closed, True)
            and edge(inner.y_hi, inner.y_hi_closed, outer.y_hi, outer.y_hi_closed, False))


def run_theorem31_campaign(functions: list, grids: list, epsilon: float = 0.05, horizon: int = 2000,
                           pair_budget: int = 20000, seed: int = 0) -> CampaignReport:
    """Uniformly continuous functions map slowly oscillating grids to slowly oscillating images.

    For each ``(f, grid)`` the grid needs a witness at ``epsilon``.  With a
    Lipschitz constant ``K`` the image is then checked at ``K * epsilon``
    (``epsilon`` when ``K == 0``), both by a fresh witness search and at the
    grid's own witness triple.  Functions without ``K`` are checked at
    ``epsilon``; if the sampler shows they are not uniformly continuous a
    failed image is ``expected-fail``.
    """
    report = CampaignReport("T3.1", config_echo={"epsilon": epsilon, "horizon": horizon,
                                                 "pair_budget": pair_budget, "seed": seed})
    for f in functions:
        uc = None
        if f.lipschitz is None:
            uc = test_uniform_continuity(f, epsilon, pair_budget, seed)
        for grid in grids:
            params = {"epsilon_in": epsilon, "horizon": horizon}
            certs = {"uniform_continuity": None if uc is None else uc.to_dict()}
            if not _inside(grid.domain, f.domain):
                report.add(grid.label, f.label, params, REFUSED, certs, "grid box is not inside the function's domain")
                continue
            grid_w = find_witness(grid, epsilon, horizon)
            certs["grid_witness"] = _cert(grid_w)
            if grid_w is None:
                report.add(grid.label, f.label, params, FAIL, certs, "input grid has no witness")
                continue
            eps_out = epsilon if not f.lipschitz else f.lipschitz * epsilon
            params["epsilon_out"] = eps_out
            image = apply(f, grid)
            image_w = find_witness(image, eps_out, horizon)
            certs["image_witness"] = _cert(image_w)
            if f.lipschitz is not None:
                g = grid_w.params
                at_grid = check_slowly_oscillating(
                    image, OscillationParams(eps_out, g.alpha, g.delta, g.threshold, horizon))
                certs["image_at_grid_witness"] = at_grid.to_dict()
                ok = image_w is not None and at_grid.verified
                report.add(grid.label, f.label, params, PASS if ok else FAIL, certs)
            elif image_w is not None:
                report.add(grid.label, f.label, params, PASS, certs)
            elif uc.violation_found:
                report.add(grid.label, f.label, params, EXPECTED_FAIL, certs,
                           "image has no witness; function is not uniformly continuous")
            else:
                report.add(grid.label, f.label, params, INCONCLUSIVE, certs,
                           "image has no witness; no Lipschitz constant and no sampled violation")
    return report


# -- preservation of P-limits -------------------------------------------------

def run_theorem32_campaign(functions: list, convergent_grids: list, epsilon: float = 0.05, threshold: int = 50,
                           horizon: int = 1000) -> CampaignReport:
    """Images of P-convergent grids P-converge to the image of the limit point.

    The grid must converge on the window to its recorded limit ``(L_u, L_v)``.
    The scalar image is interleaved with ``f(L_u, L_v)``; that sequence must
    have a slow-oscillation witness, and the image itself must P-converge to
    ``f(L_u, L_v)``.  A limit outside ``f``'s domain raises ``DomainError``.
    """
    report = CampaignReport("T3.2", config_echo={"epsilon": epsilon, "threshold": threshold, "horizon": horizon})
    for f in functions:
        for grid in convergent_grids:
            if grid.limit is None:
                raise ValueError(f"{grid.label} has no recorded limit")
            Lu, Lv = (float(v) for v in grid.limit)
            if not f.domain.contains(Lu, Lv):
                raise DomainError(f"limit {(Lu, Lv)} of {grid.label} is outside the domain of {f.label}")
            params = {"epsilon": epsilon, "threshold": threshold, "horizon": horizon, "limit_point": [Lu, Lv]}
            pre = check_pringsheim(grid, (Lu, Lv), epsilon, threshold, horizon)
            certs = {"grid_convergence": pre.to_dict()}
            if not pre.verified:
                report.add(grid.label, f.label, params, REFUSED, certs, "grid does not converge on the window")
                continue
            fl = float(f(Lu, Lv))
            params["image_limit"] = fl
            image = apply(f, grid)
            woven = interleave_with_limit(image, fl)
            w = find_witness(woven, epsilon, horizon)
            conv = check_pringsheim(image, fl, epsilon, threshold, horizon)
            certs["interleaved_witness"] = _cert(w)
            certs["image_convergence"] = conv.to_dict()
            ok = w is not None and conv.verified
            report.add(grid.label, f.label, params, PASS if ok else FAIL, certs)
    return report


# -- converse: non-uniformly continuous functions break slow oscillation ------

BISECTION_DEPTH = 40


def extract_cluster(harvest: list, box: DomainBox, depth: int = BISECTION_DEPTH):
    """Narrow the harvested pairs to a run converging in the plane.

    ``harvest[i]`` holds the violating pairs found at scale ``2^-i``.  The
    bounding box is halved in both directions up to ``depth`` times, each
    time keeping the quadrant whose first points cover the most scales (ties:
    most pairs, then the lower-left quadrant).  Returns one pair per covered
    scale, finest scale last, as an array of rows ``(a, b, a_bar, b_bar, gap)``.
    """
    rows = [(i, r) for i, level in enumerate(harvest) for r in level]
    if not rows:
        return np.empty((0, 5))
    lv = np.array([i for i, _ in rows])
    P = np.array([r for _, r in rows])
    x0, x1, y0, y1 = box.x_lo, box.x_hi, box.y_lo, box.y_hi
    keep = np.ones(len(P), dtype=bool)
    for _ in range(depth):
        xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
        best = None
        for qi, (ax, bx, ay, by) in enumerate(((x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1))):
            inside = keep & (P[:, 0] >= ax) & (P[:, 0] <= bx) & (P[:, 1] >= ay) & (P[:, 1] <= by)
            score = (len(np.unique(lv[inside])), int(inside.sum()), -qi)
            if best is None or score > best[0]:
                best = (score, inside, (ax, bx, ay, by))
        if best[0][0] < 2:
            break
        keep = best[1]
        x0, x1, y0, y1 = best[2]
    run = [P[keep & (lv == i)][0] for i in np.unique(lv[keep])]
    return np.array(run)


def assemble_grid(run: np.ndarray, domain: DomainBox, label: str = "assembled") -> FactorableGridSequence:
    """Grid whose odd/even indices take the first/second point of each pair.

    ``u_{2j-1} = a_j``, ``u_{2j} = a_bar_j`` and likewise for ``v``.  Past
    ``2R`` the last pair repeats, keeping the parity.
    """
    R = len(run)
    U = np.empty(2 * R)
    V = np.empty(2 * R)
    U[0::2], U[1::2] = run[:, 0], run[:, 2]
    V[0::2], V[1::2] = run[:, 1], run[:, 3]

    def slot(k):
        k = np.asarray(k, dtype=np.int64)
        return np.where(k <= 2 * R, k - 1, 2 * R - 1 - (k % 2))

    return FactorableGridSequence(lambda k: U[slot(k)], lambda l: V[slot(l)], domain, label)


def run_theorem33_falsification(f: Function2, epsilon: float = 1.0, horizon: int = 1000, pair_budget: int = 20000,
                                seed: int = 0, grid_epsilon: Optional[float] = None,
                                depth: int = BISECTION_DEPTH) -> CampaignReport:
    """Build a slowly oscillating grid that ``f`` does not preserve.

    Violating pairs are harvested scale by scale, narrowed to a converging
    run by bisection, and woven into a grid.  The case passes (the
    falsification succeeds) when the grid has a witness at ``grid_epsilon``
    (default ``epsilon / 1024``), the image has no witness at ``epsilon``
    anywhere on the search grid, and the image is violated at the grid's own
    witness triple.  No violating pairs gives ``inconclusive``.
    """
    g_eps = epsilon / 1024 if grid_epsilon is None else grid_epsilon
    report = CampaignReport("T3.3", config_echo={"epsilon": epsilon, "horizon": horizon, "pair_budget": pair_budget,
                                                 "seed": seed, "grid_epsilon": g_eps, "depth": depth})
    params = {"epsilon": epsilon, "horizon": horizon, "grid_epsilon": g_eps}
    uc = test_uniform_continuity(f, epsilon, pair_budget, seed)
    certs = {"uniform_continuity": uc.to_dict()}
    if not uc.violation_found:
        report.add("assembled", f.label, params, INCONCLUSIVE, certs, "no violation pairs at the finest scale")
        return report
    run = extract_cluster(harvest_violation_pairs(f, epsilon, pair_budget, seed), f.domain, depth)
    certs["run"] = run.tolist()
    if len(run) == 0 or 2 * len(run) >= horizon:
        report.add("assembled", f.label, params, INCONCLUSIVE, certs, "run does not fit the window")
        return report
    grid = assemble_grid(run, f.domain, f"assembled({f.label})")
    grid_w = find_witness(grid, g_eps, horizon)
    certs["grid_witness"] = _cert(grid_w)
    if grid_w is None:
        report.add("assembled", f.label, params, INCONCLUSIVE, certs, "assembled grid has no witness")
        return report
    image = apply(f, grid)
    image_w = find_witness(image, epsilon, horizon)
    g = grid_w.params
    at_grid = check_slowly_oscillating(image, OscillationParams(epsilon, g.alpha, g.delta, g.threshold, horizon))
    certs["image_witness"] = _cert(image_w)
    certs["image_at_grid_witness"] = at_grid.to_dict()
    ok = image_w is None and not at_grid.verified
    report.add("assembled", f.label, params, PASS if ok else FAIL, certs,
               "" if ok else "image still oscillates slowly")
    return report


# -- uniform limits -----------------------------------------------------------

def _threshold_schedule(max_threshold: int):
    n = 1
    while n <= max_threshold:
        yield n
        n *= 2


def _limit_cases(report, member, f, grids, epsilon, horizon, sup_gap, index):
    third = epsilon / 3
    for grid in grids:
        params = {"epsilon": epsilon, "horizon": horizon, "member": index}
        img_n = apply(member, grid)
        img_f = apply(f, grid)
        w_n = find_witness(img_n, third, horizon)
        certs = {"member_witness": _cert(w_n)}
        if w_n is None:
            report.add(grid.label, f.label, params, INCONCLUSIVE, certs, "member image has no witness at epsilon/3")
            continue
        p = w_n.params
        at_n = check_slowly_oscillating(img_f, OscillationParams(epsilon, p.alpha, p.delta, p.threshold, horizon))
        w_f = find_witness(img_f, epsilon, horizon)
        gap_n = oscillation_gap(img_n, p.alpha, p.delta, p.threshold, horizon)
        gap_f = oscillation_gap(img_f, p.alpha, p.delta, p.threshold, horizon)
        bound = 2 * sup_gap + gap_n
        certs.update({
            "limit_at_member_witness": at_n.to_dict(),
            "limit_witness": _cert(w_f),
            "chain": {"sup_gap": sup_gap, "member_gap": gap_n, "limit_gap": gap_f, "bound": bound,
                      "holds": bool(gap_f <= bound and bound < epsilon)},
        })
        ok = at_n.verified and w_f is not None and certs["chain"]["holds"]
        report.add(grid.label, f.label, params, PASS if ok else FAIL, certs)


def run_theorem34_campaign(family: FunctionFamily, f: Function2, grids: list, epsilon: float = 0.3,
                           horizon: int = 1000, max_threshold: int = 1024, sample_budget: int = 4096,
                           seed: int = 0) -> CampaignReport:
    """Uniform limits of preserving functions preserve slow oscillation.

    Needs some ``N <= max_threshold`` (powers of two) with sampled
    ``sup |f_n - f| < epsilon/3`` for the probed ``n``; otherwise every case
    is ``refused``.  With ``f_N`` in hand each grid image under ``f_N`` needs
    a witness at ``epsilon/3``, and the image under ``f`` is checked at that
    same triple at ``epsilon``, plus a witness search of its own.  The chain
    ``gap_f <= sup + gap_N + sup < epsilon`` is reported per case.
    """
    report = CampaignReport("T3.4", config_echo={"epsilon": epsilon, "horizon": horizon, "family": family.label,
                                                 "max_threshold": max_threshold, "sample_budget": sample_budget,
                                                 "seed": seed})
    third = epsilon / 3
    for N in _threshold_schedule(max_threshold):
        uc = check_uniform_convergence(family, f, third, N, sample_budget, seed)
        if uc.verified:
            _limit_cases(report, family(N), f, grids, epsilon, horizon, max(uc.sup_gaps.values()), N)
            report.config_echo["threshold"] = N
            return report
    for grid in grids:
        report.add(grid.label, f.label, {"epsilon": epsilon, "horizon": horizon}, REFUSED,
                   {"uniform_convergence": uc.to_dict()}, "family is not uniformly close at epsilon/3")
    return report


def run_theorem35_campaign(double_family: FunctionFamily, f: Function2, grids: list, epsilon: float = 0.3,
                           horizon: int = 1000, max_threshold: int = 1024, sample_budget: int = 4096,
                           seed: int = 0) -> CampaignReport:
    """Doubly indexed counterpart of :func:`run_theorem34_campaign`.

    Thresholds are tried on the diagonal ``(N, N)``; the member used for the
    chain is ``f_{N,N}``.
    """
    report = CampaignReport("T3.5", config_echo={"epsilon": epsilon, "horizon": horizon,
                                                 "family": double_family.label, "max_threshold": max_threshold,
                                                 "sample_budget": sample_budget, "seed": seed})
    third = epsilon / 3
    for N in _threshold_schedule(max_threshold):
        uc = check_uniform_convergence_double(double_family, f, third, (N, N), sample_budget, seed)
        if uc.verified:
            _limit_cases(report, double_family(N, N), f, grids, epsilon, horizon, max(uc.sup_gaps.values()), [N, N])
            report.config_echo["threshold"] = [N, N]
            return report
    for grid in grids:
        report.add(grid.label, f.label, {"epsilon": epsilon, "horizon": horizon}, REFUSED,
                   {"uniform_convergence": uc.to_dict()}, "family is not uniformly close at epsilon/3")
    return report


def default_campaign(theorem_id: str, fn: Optional[str] = None, seq: Optional[str] = None,
                     epsilon: Optional[float] = None, horizon: Optional[int] = None, threshold: Optional[int] = None,
                     seed: int = 0) -> CampaignReport:
    """The stock campaign for ``theorem_id``, with optional overrides."""
    grids = [builtin(seq)] if seq else None
    if theorem_id == "T3.1":
        if fn or grids:
            fns = [function(fn or "add")]
            grids = grids or [builtin("log_grid"), builtin("recip_grid")]
            return run_theorem31_campaign(fns, grids, epsilon or 0.05, horizon or 2000, seed=seed)
        fns = [function(n) for n in ("add", "const", "mul", "sin_product")]
        report = run_theorem31_campaign(fns, [builtin("log_grid"), builtin("recip_grid")],
                                        epsilon or 0.05, horizon or 2000, seed=seed)
        # the non-uniformly-continuous member only fits the unit-square grid
        extra = run_theorem31_campaign([function("one_over_xy")], [builtin("recip_grid")],
                                       epsilon or 0.05, horizon or 2000, seed=seed)
        report.cases.extend(extra.cases)
        return report
    if theorem_id == "T3.2":
        fns = [function(fn)] if fn else [function("add"), function("mul")]
        grids = grids or [builtin("recip_grid")]
        return run_theorem32_campaign(fns, grids, epsilon or 0.05, threshold or 50, horizon or 1000)
    if theorem_id == "T3.3":
        return run_theorem33_falsification(function(fn or "one_over_xy"), epsilon or 1.0, horizon or 1000, seed=seed)
    if theorem_id in ("T3.4", "T3.5"):
        f = function(fn or "add")
        grids = grids or [builtin("recip_grid")]
        if theorem_id == "T3.4":
            return run_theorem34_campaign(scaled_family(f), f, grids, epsilon or 0.3, horizon or 1000, seed=seed)
        return run_theorem35_campaign(double_scaled_family(f), f, grids, epsilon or 0.3, horizon or 1000, seed=seed)
    raise KeyError(f"unknown campaign {theorem_id!r}; known: {', '.join(THEOREMS)}")
