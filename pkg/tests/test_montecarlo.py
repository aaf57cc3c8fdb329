"""Seeded estimators: determinism, dominance, and cross-checks against
the closed forms."""

import math

import numpy as np
import pytest

from fdsumrate import analytic, montecarlo as mc
from fdsumrate.geometry import NetworkConfig


def cfg(**kw):
    kw.setdefault("n_u", 1)
    kw.setdefault("n_d", 2)
    return NetworkConfig(**kw)


def test_report_is_deterministic():
    c = cfg()
    a = mc.estimate_fd(c, "MrcMrt", 5000, 3)
    b = mc.estimate_fd(c, "MrcMrt", 5000, 3)
    assert a == b
    assert a.trials == 5000 and a.seed == 3 and a.scheme == "MrcMrt"


def test_different_seeds_differ():
    c = cfg()
    a = mc.estimate_fd(c, "MrcMrt", 2000, 0)
    b = mc.estimate_fd(c, "MrcMrt", 2000, 1)
    assert a.mean_sum != b.mean_sum


def test_single_trial_has_zero_se():
    rep = mc.estimate_fd(cfg(), "MrcMrt", 1, 0)
    assert rep.se_ul == 0.0 and rep.se_sum == 0.0
    assert rep.trials == 1


def test_guards():
    with pytest.raises(ValueError):
        mc.estimate_fd(cfg(), "MrcMrt", 0, 0)
    with pytest.raises(ValueError):
        mc.estimate_fd(cfg(), "MRT", 10, 0)
    with pytest.raises(ValueError):
        mc.estimate_fd(cfg(n_d=1), "MrcZf", 10, 0)
    with pytest.raises(ValueError):
        mc.estimate_fd(cfg(n_u=1), "ZfMrt", 10, 0)
    for scheme in ("MrcZf", "ZfMrt", "Optimal"):
        with pytest.raises(ValueError):
            mc.estimate_fd(cfg(n_u=2, n_d=2, sigma_n2=0.0), scheme, 10, 0)
    with pytest.raises(ValueError):
        mc.estimate_hd(cfg(), "AC", 1.0, 10, 0)
    with pytest.raises(ValueError):
        mc.estimate_hd(cfg(), "sideways", 0.5, 10, 0)
    with pytest.raises(ValueError):
        mc.estimate_hd(cfg(sigma_n2=0.0), "AC", 0.5, 10, 0)
    with pytest.raises(ValueError):
        mc.estimate_large_array(cfg(sigma_n2=0.0), 10, 0)
    with pytest.raises(ValueError):
        mc.estimate_outage(cfg(), "MrcMrt", 0.0, 10, 0)


def test_optimal_dominates_fixed_schemes_same_seed():
    c = cfg(n_u=2, n_d=2)
    trials, seed = 4096, 5
    opt = mc.estimate_fd(c, "Optimal", trials, seed)
    for scheme in ("MrcMrt", "MrcZf", "ZfMrt"):
        fixed = mc.estimate_fd(c, scheme, trials, seed)
        assert opt.mean_sum >= fixed.mean_sum - 1e-9


def test_outage_trivial_thresholds():
    c = cfg()
    out_lo = mc.estimate_outage(c, "MrcMrt", 1e-12, 20000, 0)
    assert out_lo == (0.0, 0.0)
    out_hi = mc.estimate_outage(c, "MrcMrt", 1e12, 20000, 0)
    assert out_hi[0] > 0.999 and out_hi[1] > 0.999


def test_outage_equals_report_fields():
    c = cfg()
    rep = mc.estimate_fd(c, "MrcMrt", 3000, 2, gamma_th=2.5)
    assert mc.estimate_outage(c, "MrcMrt", 2.5, 3000, 2) \
        == (rep.outage_ul, rep.outage_dl)


def test_outage_matches_analytic_cdfs_interference_limited():
    c = cfg(sigma_n2=0.0, sigma_aa2=0.1)
    n = 200000
    z = 1.0
    out_ul, out_dl = mc.estimate_outage(c, "MrcMrt", z, n, 17)
    want_dl = analytic.dl_cdf(c, z, "il_integral")
    se = math.sqrt(want_dl * (1.0 - want_dl) / n)
    assert abs(out_dl - want_dl) < 3.0 * se
    want_ul = analytic.ul_cdf(c, z, "case1_quadrature")
    se = math.sqrt(want_ul * (1.0 - want_ul) / n)
    assert abs(out_ul - want_ul) < 3.0 * se


def test_rates_match_analytic_noise_config():
    c = cfg(sigma_n2=1.0, sigma_aa2=0.1)
    rep = mc.estimate_fd(c, "MrcMrt", 400000, 23)
    want_ul = analytic.ul_rate(c, "case1_exact")
    want_dl = analytic.dl_rate(c, "exact")
    assert abs(rep.mean_rate_ul - want_ul) < 3.0 * rep.se_ul
    assert abs(rep.mean_rate_dl - want_dl) < 3.0 * rep.se_dl


def test_mrczf_ul_matches_noise_limited_form():
    # transmit nulling removes the loopback exactly, so the UL is
    # noise-limited with the full array gain
    c = cfg(n_u=2, n_d=2, sigma_n2=1.0, sigma_aa2=0.5)
    rep = mc.estimate_fd(c, "MrcZf", 400000, 29)
    want = analytic.ul_rate(c, "mrczf")
    assert abs(rep.mean_rate_ul - want) < 3.0 * rep.se_ul


def test_zfmrt_ul_matches_reduced_array_form():
    c = cfg(n_u=3, n_d=2, sigma_n2=1.0, sigma_aa2=0.5)
    rep = mc.estimate_fd(c, "ZfMrt", 400000, 31)
    want = analytic.ul_rate(c, "zfmrt")
    assert abs(rep.mean_rate_ul - want) < 3.0 * rep.se_ul


def test_hd_delta_weighting_is_exact():
    c = cfg()
    half = mc.estimate_hd(c, "RC", 0.5, 20000, 7)
    quarter = mc.estimate_hd(c, "RC", 0.25, 20000, 7)
    # 0.25 vs 0.5 rescales each DL term by an exact power of two
    assert quarter.mean_rate_dl == 0.5 * half.mean_rate_dl
    assert quarter.mean_rate_ul \
        == pytest.approx(1.5 * half.mean_rate_ul, rel=1e-13)


def test_hd_ac_beats_rc():
    c = cfg(n_u=1, n_d=1)
    ac = mc.estimate_hd(c, "AC", 0.5, 100000, 3)
    rc = mc.estimate_hd(c, "RC", 0.5, 100000, 3)
    slack = 3.0 * math.hypot(ac.se_sum, rc.se_sum)
    assert ac.mean_sum > rc.mean_sum - slack
    assert ac.scheme == "hd_ac" and rc.scheme == "hd_rc"


def test_hd_dl_matches_analytic_expectation():
    c = cfg(n_u=1, n_d=2, sigma_n2=1.0)
    rep = mc.estimate_hd(c, "RC", 0.5, 400000, 41)
    want = 0.5 * analytic.dl_rate(c, "hd_expectation")
    assert abs(rep.mean_rate_dl - want) < 3.0 * rep.se_dl


def test_large_array_report():
    c = cfg(n_u=4, n_d=2)
    a = mc.estimate_large_array(c, 20000, 1)
    b = mc.estimate_large_array(c, 20000, 1)
    assert a == b
    assert a.scheme == "large_array"
    assert a.mean_sum > 0.0


def test_empty_field_scores_zero_dl():
    c = cfg(lambda_d=0.0, n_d=1)
    rep = mc.estimate_fd(c, "MrcMrt", 5000, 0)
    assert rep.mean_rate_dl == 0.0
    assert rep.outage_dl == 1.0
    assert rep.mean_rate_ul > 0.0


def test_zero_noise_empty_drop_rejected():
    c = cfg(lambda_d=1e-9, sigma_n2=0.0)
    with pytest.raises(ValueError):
        mc.estimate_fd(c, "MrcMrt", 5000, 0)


def test_rate_region_monotone_tradeoff():
    c = cfg(n_u=1, n_d=1)
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    pts = mc.rate_region(c, "MrcMrt", grid, 2000, 9)
    ul = [p[0] for p in pts]
    dl = [p[1] for p in pts]
    assert all(ul[i] >= ul[i + 1] - 1e-12 for i in range(4))
    assert all(dl[i] <= dl[i + 1] + 1e-12 for i in range(4))
    assert dl[0] == 0.0 and ul[-1] == 0.0
    with pytest.raises(ValueError):
        mc.rate_region(c, "MrcMrt", [1.5], 100, 0)


def test_hd_frontier_is_linear():
    c = cfg(n_u=1, n_d=1)
    pts = mc.hd_frontier(c, "AC", [0.0, 0.5, 1.0], 20000, 13)
    assert pts[0][1] == 0.0 and pts[2][0] == 0.0
    assert pts[1][0] == pytest.approx(0.5 * pts[0][0])
    assert pts[1][1] == pytest.approx(0.5 * pts[2][1])
    with pytest.raises(ValueError):
        mc.hd_frontier(c, "AC", [-0.1], 100, 0)


def test_fairness_delta_fd_balances_links():
    c = cfg(n_u=1, n_d=1)
    delta = mc.fairness_delta_fd(c, "MrcMrt", 2048, 3, tol=1e-3)
    assert 0.0 < delta < 1.0
    from dataclasses import replace
    balanced = replace(c, P_a=delta * c.P_a, P_u=(1.0 - delta) * c.P_u)
    rep = mc.estimate_fd(balanced, "MrcMrt", 2048, 3)
    assert abs(rep.mean_rate_dl - rep.mean_rate_ul) <= 1e-3


def test_fairness_delta_hd_balances_throughputs():
    c = cfg(n_u=1, n_d=1)
    delta = mc.fairness_delta_hd(c, "AC", 20000, 3)
    e_ul, e_dl = mc._hd_phase_means(c, "AC", 20000, 3)
    assert delta * e_dl == pytest.approx((1.0 - delta) * e_ul, rel=1e-9)


def test_relative_gain():
    assert mc.relative_gain(2.0, 1.0) == 0.5
    assert mc.relative_gain(4.0, 5.0) == -0.25
    with pytest.raises(ValueError):
        mc.relative_gain(0.0, 1.0)


def test_multi_block_run():
    c = cfg()
    rep = mc.estimate_fd(c, "MrcMrt", 5096, 0)
    assert rep.trials == 5096
    assert rep.se_ul > 0.0


def test_colocated_users_kill_downlink():
    # d = 0 under the singular pathloss law: internode interference is
    # infinite in every trial, so DL rate is exactly zero and DL outage
    # is total, while the UL link still runs (UL distance collapses to r)
    c = cfg(d=0.0, sigma_n2=0.0)
    rep = mc.estimate_fd(c, "MrcMrt", trials=2000, seed=9)
    assert rep.mean_rate_dl == 0.0
    assert rep.outage_dl == 1.0
    assert rep.mean_rate_ul > 0.0
