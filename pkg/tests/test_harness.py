import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from awminmax.config import ScenarioConfig
from awminmax.harness import (ale, error_cdf, localize_topology, rmse, run_trial, run_trials,
                              summarize, sweep, trial_topology)
from awminmax.topology import Deployment, build_topology

SMALL = ScenarioConfig(trials=2)


# metrics ----------------------------------------------------------------------

def test_rmse_fixtures():
    assert rmse([[0], [0], [0]])[0] == 0.0
    assert rmse([[3], [4]])[0] == pytest.approx(np.sqrt(12.5))
    assert rmse([[3], [4]])[0] == pytest.approx(3.5355, abs=1e-4)
    np.testing.assert_allclose(rmse([[2.0, -5.0]]), [2.0, 5.0])


def test_rmse_skips_missing_trials():
    r = rmse([[3.0, np.nan], [4.0, np.nan], [np.nan, np.nan]])
    assert r[0] == pytest.approx(np.sqrt(12.5))
    assert np.isnan(r[1])


def test_ale_fixtures():
    assert ale([0, 0, 0], 20) == 0.0
    assert ale([10], 20) == 0.5
    assert ale([10, 30], 20) == 1.0


def test_cdf_fixtures():
    e, f = error_cdf([3, 1, 2])
    np.testing.assert_array_equal(e, [1, 2, 3])
    np.testing.assert_allclose(f, [1 / 3, 2 / 3, 1])
    e, f = error_cdf([2, 2, 2])
    assert list(e) == [2] and list(f) == [1.0]
    e, f = error_cdf([7.5])
    assert list(e) == [7.5] and list(f) == [1.0]
    with pytest.raises(ValueError):
        error_cdf([])


@given(st.lists(st.floats(0, 1e4), min_size=1, max_size=200))
def test_cdf_monotone_ending_at_one(errors):
    e, f = error_cdf(errors)
    assert (np.diff(e) > 0).all()
    assert (np.diff(f) > 0).all()
    assert f[-1] == 1.0


@given(st.lists(st.floats(0, 1e4), min_size=1, max_size=50), st.floats(0.1, 100))
def test_metrics_non_negative(errors, R):
    assert ale(errors, R) >= 0
    assert (rmse([errors]) >= 0).all()


# trials -----------------------------------------------------------------------

def test_run_trial_is_deterministic():
    a = run_trial(SMALL, 1, "awminmax")
    b = run_trial(SMALL, 1, "awminmax")
    np.testing.assert_array_equal(a.estimates, b.estimates)
    np.testing.assert_array_equal(a.sca_iters, b.sca_iters)


def test_deployment_shared_and_links_redrawn_across_trials():
    t0, t1 = trial_topology(SMALL, 0), trial_topology(SMALL, 1)
    np.testing.assert_array_equal(t0.deployment.positions, t1.deployment.positions)
    assert (t0.adjacency != t1.adjacency).any()


def test_regular_radio_makes_trials_identical():
    cfg = ScenarioConfig(doi=0.0, trials=2)
    a, b = run_trial(cfg, 0, "dvhop"), run_trial(cfg, 1, "dvhop")
    np.testing.assert_array_equal(a.estimates, b.estimates)


def test_node_accounting_and_errors():
    r = run_trial(SMALL, 0, "dvhop")
    assert len(r.node_ids) == SMALL.unknown_count
    loc = r.localized
    assert loc.sum() + (~loc).sum() == SMALL.unknown_count
    np.testing.assert_allclose(r.errors[loc], np.hypot(*(r.estimates - r.true_positions)[loc].T))
    assert np.isnan(r.errors[~loc]).all()


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        run_trial(SMALL, 0, "centroid")


def test_parallel_trials_match_serial():
    serial = run_trials(SMALL, ("dvhop",), n_jobs=1)["dvhop"]
    parallel = run_trials(SMALL, ("dvhop",), n_jobs=2)["dvhop"]
    for a, b in zip(serial, parallel):
        assert a.trial == b.trial
        np.testing.assert_array_equal(a.estimates, b.estimates)


def test_tiny_exact_network_awminmax_not_worse_than_dvhop():
    # four anchors around one unknown node, every pair within radio range
    pos = np.array([[0, 0], [16, 0], [16, 16], [0, 16], [6, 9]], float)
    flags = np.array([True, True, True, True, False])
    adj = ~np.eye(5, dtype=bool)
    topo = build_topology(Deployment(pos, flags), adj)
    cfg = ScenarioConfig(comm_radius=25.0, node_count=5, anchor_count=4, obstacle_radius=0.0)
    dv = localize_topology(topo, cfg, "dvhop").errors[0]
    aw = localize_topology(topo, cfg, "awminmax").errors[0]
    assert aw <= dv + 1e-3


# summaries and sweeps -------------------------------------------------------------

def test_summary_counts_unlocalizable():
    r = run_trials(SMALL, ("dvhop",))["dvhop"]
    s = summarize(r, 20.0)
    errs = np.array([x.errors for x in r])
    assert s.pct_unlocalizable == pytest.approx(100 * np.isnan(errs).mean())
    assert s.ale >= 0 and (s.node_rmse[np.isfinite(s.node_rmse)] >= 0).all()
    assert len(s.errors) == np.isfinite(errs).sum()


def test_single_value_sweep_equals_direct_run():
    summaries, _ = sweep(SMALL, "anchor_count", [30], algos=("dvhop",))
    direct = summarize(run_trials(SMALL, ("dvhop",))["dvhop"], 20.0)
    assert summaries[0].ale == direct.ale
    np.testing.assert_array_equal(summaries[0].node_rmse, direct.node_rmse)
    assert summaries[0].axis_value == 30


def test_density_sweep_sets_node_count():
    summaries, raw = sweep(ScenarioConfig(trials=1), "node_density", [0.012, 0.02],
                           algos=("dvhop",))
    assert [len(block[2][0].node_ids) for block in raw] == [120 - 30, 200 - 30]


def test_bin_sweep_partitions_node_trials():
    summaries, raw = sweep(SMALL, "avg_hop_distance_bins", [0, 12, 15, 100], algos=("dvhop",))
    assert [s.axis_value for s in summaries] == [0, 12, 15]
    total = sum(np.isfinite(r.errors).sum() for r in raw[0][2])
    assert sum(len(s.errors) for s in summaries) == total


@pytest.mark.parametrize("axis, values", [("anchor_count", [30, 10]), ("temperature", [1]),
                                          ("avg_hop_distance_bins", [5])])
def test_bad_sweeps(axis, values):
    with pytest.raises(ValueError):
        sweep(SMALL, axis, values)


@pytest.mark.slow
def test_density_trend_endpoints():
    cfg = ScenarioConfig(trials=5)
    s, _ = sweep(cfg, "node_density", [0.01, 0.03], algos=("awminmax",))
    sparse, dense = s[0].ale, s[1].ale
    assert dense <= sparse
