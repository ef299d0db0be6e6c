import math

import numpy as np
import pytest

from torushom.errors import ConfigInvalid, InsufficientPoints, MissingMetrics
from torushom.harness.analysis import constants_report, fit_rate, uniformity_check
from torushom.harness.config import ExperimentConfig, parse_number, parse_zeta
from torushom.harness.sweep import (COLUMNS, ResultRecord, read_records, run_sweep,
                                    write_records)
from torushom.norms import paper_factor

SMALL = """
[experiment]
id = small
[problem]
preset = cos1d
[grid]
N = 128
[sweep]
eps_list = 1/4, 1/8, 1/16, 1/32
t_list = 0.5
t_ref = 0.5
zeta_list = 1@3pi/4
metrics = res_diff, semi_diff
theta = 1/8, 1/4
[contour]
n_arc = 16
n_ray = 24
"""


def record(metric, value, eps=0.1, t=float("nan"), zeta=None):
    zr, zi, phi, c = (float("nan"),) * 4
    if zeta is not None:
        zr, zi = zeta.real, zeta.imag
        phi = float(np.angle(zeta)) % (2 * np.pi)
        c = 1.0
    factor = paper_factor(metric, eps, t=t, zeta=zeta, c_phi=c)
    return ResultRecord("x", "cos1d", 1, 1, 1, 64, round(1 / eps), eps, t, zr, zi, phi, c,
                        metric, value, factor, value / factor, 1, 0.0, float("nan"), 0)


@pytest.mark.parametrize("text,value", [("1/16", 1 / 16), ("0.25", 0.25),
                                        ("3pi/4", 3 * np.pi / 4), ("pi", np.pi),
                                        ("0.5pi", np.pi / 2)])
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value)


def test_parse_zeta():
    assert parse_zeta("4@3pi/4") == pytest.approx((4.0, 3 * np.pi / 4))
    with pytest.raises(ValueError):
        parse_zeta("4")


def test_config_round_trip():
    cfg = ExperimentConfig.from_string(SMALL)
    assert cfg.experiment_id == "small" and cfg.N == 128
    assert cfg.eps_list == [0.25, 0.125, 0.0625, 0.03125]
    assert cfg.metrics == ["res_diff", "semi_diff"]
    assert cfg.thetas().shape == (2, 1)


def test_config_reports_every_bad_field():
    text = """
[problem]
preset = banana
[grid]
N = 100
[sweep]
eps_list = 1/3
zeta_list = 1@0
"""
    with pytest.raises(ConfigInvalid) as info:
        ExperimentConfig.from_string(text)
    msg = " ".join(info.value.problems)
    for field in ("problem.preset", "grid.N", "sweep.eps_list", "sweep.zeta_list"):
        assert field in msg


def test_config_rejects_unknown_keys_and_bad_numbers():
    with pytest.raises(ConfigInvalid) as info:
        ExperimentConfig.from_string("[grid]\nN = abc\n[solver]\nfoo = 1\n")
    assert len(info.value.problems) == 2


def test_cross_design_points():
    cfg = ExperimentConfig.from_string(SMALL)
    pts = cfg.points()
    assert len(pts) == 8
    assert sum(1 for p in pts if p[1] is not None) == 4


def test_fit_recovers_exact_power_laws():
    recs = [record("res_diff", 3 * e, eps=e, zeta=-1 + 0j) for e in (1 / 4, 1 / 8, 1 / 16)]
    assert fit_rate(recs, "res_diff", "eps").slope == pytest.approx(1.0, abs=1e-12)
    recs = [record("semi_corr", 0.1 * t**-0.5, eps=0.1, t=t) for t in (0.1, 0.5, 1, 4)]
    assert fit_rate(recs, "semi_corr", "t").slope == pytest.approx(-0.5, abs=1e-12)


def test_fit_needs_three_points():
    recs = [record("res_diff", e, eps=e, zeta=-1 + 0j) for e in (1 / 4, 1 / 8)]
    with pytest.raises(InsufficientPoints):
        fit_rate(recs, "res_diff", "eps")


def test_uniformity_of_exact_law_and_noise_floor():
    ts = (0.05, 0.2, 1.0, 2.0)
    recs = [record("semi_corr", 2.0 * 0.1 / math.sqrt(t), eps=0.1, t=t) for t in ts]
    spread = uniformity_check(recs, "semi_corr")
    assert spread.ratio == pytest.approx(1.0) and spread.passed
    quiet = [record("semi_corr", 1e-16, eps=0.1, t=t) for t in ts]
    assert uniformity_check(quiet, "semi_corr").skipped
    with pytest.raises(InsufficientPoints):
        uniformity_check(recs[1:3], "semi_corr")


def test_constants_report_requires_all_metrics():
    with pytest.raises(MissingMetrics):
        constants_report([record("res_diff", 0.1, zeta=-1 + 0j)])


def test_constants_report_flags_noise_floor():
    recs = [record(m, 1e-17, zeta=-1 + 0j) for m in ("res_diff", "res_grad_corr", "res_corr")]
    recs += [record(m, 1e-17, t=1.0) for m in ("semi_diff", "semi_grad_corr", "semi_corr")]
    rep = constants_report(recs)
    assert all(rep.below_noise.values()) and rep.passed
    assert "below noise" in rep.to_text()
    assert '"C1": null' in rep.to_json()


@pytest.fixture(scope="module")
def small_sweep():
    return run_sweep(ExperimentConfig.from_string(SMALL))


def test_sweep_records_every_point_and_metric(small_sweep):
    res = [r for r in small_sweep if r.metric == "res_diff"]
    semi = [r for r in small_sweep if r.metric == "semi_diff"]
    assert sorted(r.K for r in res) == [4, 8, 16, 32]
    assert sorted(r.K for r in semi) == [4, 8, 16, 32]
    assert all(r.value > 0 and math.isfinite(r.compensated) for r in small_sweep)
    assert all(r.iters_max > 0 and r.residual_max < 1e-9 for r in small_sweep)
    assert all(math.isnan(r.wall_ms) for r in small_sweep)


def test_sweep_is_deterministic(small_sweep, tmp_path):
    again = run_sweep(ExperimentConfig.from_string(SMALL))
    a = write_records(small_sweep, tmp_path / "a", "csv")
    b = write_records(again, tmp_path / "b", "csv")
    assert open(a, "rb").read() == open(b, "rb").read()


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_records_round_trip(small_sweep, tmp_path, fmt):
    path = write_records(small_sweep, tmp_path, fmt)
    back = read_records(str(path))
    assert [r.value for r in back] == [r.value for r in small_sweep]
    assert [r.metric for r in back] == [r.metric for r in small_sweep]


def test_csv_header_order(small_sweep, tmp_path):
    path = write_records(small_sweep, tmp_path, "csv")
    assert open(path).readline().strip().split(",") == list(COLUMNS)


def test_solver_failure_is_recorded_and_sweep_continues():
    cfg = ExperimentConfig.from_string(SMALL)
    cfg.max_iters = 1
    cfg.tol = 1e-15
    recs = run_sweep(cfg)
    assert len(recs) == 8
    assert all("NoConvergence" in r.error and math.isnan(r.value) for r in recs)
