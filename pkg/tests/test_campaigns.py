import json
import math

import numpy as np
import pytest

from doubleseq import (
    OscillationParams,
    apply,
    builtin,
    check_slowly_oscillating,
    function,
    run_theorem31_campaign,
    run_theorem32_campaign,
    run_theorem33_falsification,
    run_theorem34_campaign,
    run_theorem35_campaign,
)
from doubleseq.campaigns import (
    CampaignReport,
    assemble_grid,
    constant_family,
    constant_grid,
    default_campaign,
    double_shifted_family,
    extract_cluster,
    offset_grid,
    power_family,
    power_limit,
    row_shifted_family,
    shifted_family,
)
from doubleseq.sequences import DomainBox, DomainError
from doubleseq.functions import UNIT

recip = builtin("recip_grid")


def outcomes(report):
    return [c["outcome"] for c in report.to_dict()["cases"]]


def test_report_summary_and_status():
    r = CampaignReport("T3.1")
    r.add("b", "f", {}, "pass", {})
    r.add("a", "f", {}, "expected-fail", {})
    d = r.to_dict()
    assert [c["sequence"] for c in d["cases"]] == ["a", "b"]
    assert d["summary"]["pass"] == 1 and d["summary"]["expected-fail"] == 1
    assert d["status"] == "pass"
    r.add("c", "f", {}, "fail", {})
    assert r.status == "fail"
    with pytest.raises(ValueError):
        r.add("c", "f", {}, "maybe", {})


def test_t31_add_on_gallery_grids():
    rep = run_theorem31_campaign([function("add")], [builtin("recip_grid"), builtin("log_grid")], 0.05, 2000)
    assert outcomes(rep) == ["pass", "pass"]
    for case in rep.cases:
        assert case["certificates"]["image_at_grid_witness"]["status"] == "verified"


def test_t31_const_passes():
    rep = run_theorem31_campaign([function("const(2)")], [recip], 0.05, 500)
    assert outcomes(rep) == ["pass"]


def test_t31_non_uniformly_continuous_is_expected_fail():
    rep = run_theorem31_campaign([function("one_over_xy")], [recip], 1.0, 500)
    case = rep.cases[0]
    assert case["outcome"] == "expected-fail"
    assert case["certificates"]["image_witness"] is None
    assert rep.status == "pass"


def test_t31_refuses_grid_outside_domain():
    rep = run_theorem31_campaign([function("one_over_xy")], [builtin("log_grid")], 1.0, 100)
    assert outcomes(rep) == ["refused"]


def test_t32_examples():
    rep = run_theorem32_campaign([function("mul")], [recip], 0.05, 50, 1000)
    assert outcomes(rep) == ["pass"]
    assert rep.cases[0]["params"]["image_limit"] == 0.0
    rep = run_theorem32_campaign([function("add")], [offset_grid(1.0, 2.0)], 0.05, 50, 1000)
    assert outcomes(rep) == ["pass"] and rep.cases[0]["params"]["image_limit"] == 3.0
    rep = run_theorem32_campaign([function("proj_x")], [constant_grid(1.5, 2.0)], 0.05, 5, 100)
    assert outcomes(rep) == ["pass"] and rep.cases[0]["params"]["image_limit"] == 1.5


def test_t32_limit_outside_domain():
    with pytest.raises(DomainError):
        run_theorem32_campaign([function("one_over_xy")], [recip], 0.05, 50, 1000)


def test_t32_refuses_nonconvergent_window():
    rep = run_theorem32_campaign([function("add")], [recip], 0.05, 2, 1000)
    assert outcomes(rep) == ["refused"]


@pytest.mark.parametrize("name", ["one_over_xy", "sin_inv_x"])
def test_t33_falsification_succeeds(name):
    f = function(name)
    rep = run_theorem33_falsification(f, 1.0, 1000)
    case = rep.cases[0]
    assert case["outcome"] == "pass", case["note"]
    # re-check the violated image certificate from the embedded data
    run = np.array(case["certificates"]["run"])
    grid = assemble_grid(run, f.domain)
    cert = case["certificates"]["image_at_grid_witness"]
    k, l, s, t, _ = cert["counterexample"]
    assert not abs(f(*grid(k, l)) - f(*grid(s, t))) < 1.0
    p = OscillationParams(cert["epsilon"], cert["alpha"], cert["delta"], cert["threshold"], cert["horizon"])
    assert check_slowly_oscillating(apply(f, grid), p).to_dict() == cert


def test_t33_lipschitz_is_inconclusive():
    rep = run_theorem33_falsification(function("add", UNIT), 0.1, 1000)
    assert rep.status == "inconclusive" and outcomes(rep) == ["inconclusive"]


def test_cluster_extraction_converges():
    f = function("one_over_xy")
    from doubleseq.functions import harvest_violation_pairs
    run = extract_cluster(harvest_violation_pairs(f, 1.0), f.domain)
    assert len(run) >= 10
    tail = run[-5:, :2]
    assert np.ptp(tail[:, 0]) < 0.01 and np.ptp(tail[:, 1]) < 0.01


def test_assembled_grid_layout():
    run = np.array([[0.1, 0.2, 0.11, 0.21, 9.0], [0.3, 0.4, 0.31, 0.41, 9.0]])
    g = assemble_grid(run, UNIT)
    assert [g(k, k) for k in range(1, 7)] == [(0.1, 0.2), (0.11, 0.21), (0.3, 0.4), (0.31, 0.41), (0.3, 0.4), (0.31, 0.41)]


@pytest.mark.parametrize("family", [shifted_family, constant_family])
def test_t34_pass(family):
    f = function("add")
    rep = run_theorem34_campaign(family(f), f, [recip], 0.3, 1000)
    assert outcomes(rep) == ["pass"]
    chain = rep.cases[0]["certificates"]["chain"]
    assert chain["limit_gap"] <= chain["bound"] < 0.3


def test_t34_refuses_power_family():
    rep = run_theorem34_campaign(power_family(), power_limit(), [recip], 0.3, 1000)
    assert outcomes(rep) == ["refused"] and rep.status == "inconclusive"


@pytest.mark.parametrize("family", [double_shifted_family, lambda f: constant_family(f, "double")])
def test_t35_pass(family):
    f = function("add")
    rep = run_theorem35_campaign(family(f), f, [recip], 0.3, 1000)
    assert outcomes(rep) == ["pass"]


def test_t35_refuses_row_shift():
    f = function("add")
    rep = run_theorem35_campaign(row_shifted_family(f), f, [recip], 0.001, 1000)
    assert outcomes(rep) == ["refused"]


def test_default_campaigns_are_deterministic():
    a = default_campaign("T3.3").to_json()
    assert a == default_campaign("T3.3").to_json()
    assert json.dumps(json.loads(a), indent=2) == a


def test_unknown_campaign():
    with pytest.raises(KeyError):
        default_campaign("T9.9")
