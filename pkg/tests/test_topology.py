import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from awminmax import topology
from awminmax.config import ScenarioConfig
from awminmax.exceptions import ConfigError
from awminmax.topology import (UNREACHABLE, Deployment, build_connectivity, build_topology,
                               compute_hops, generate_deployment, segment_intersects_disc,
                               shortest_hop_paths)
from oracles import hop_matrix, unit_disc_adjacency


def rng(seed=0):
    return np.random.default_rng(seed)


def two_nodes(a, b, **cfg):
    dep = Deployment(np.array([a, b], float), np.array([True, False]))
    base = dict(area_side=100, node_count=4, anchor_count=3, doi=0.0, obstacle_radius=0.0)
    base.update(cfg)
    return dep, ScenarioConfig(**base)


# segment / disc ---------------------------------------------------------------

@pytest.mark.parametrize("p, q, c, r, expected", [
    ((0, 0), (10, 0), (5, 0), 1, True),
    ((0, 0), (10, 0), (5, 5), 1, False),
    ((0, 0), (0, 10), (3, 5), 3, False),  # tangent: strict inequality
    ((0, 0), (10, 0), (12, 0), 1.5, False),  # beyond the end point
    ((0, 0), (10, 0), (11, 0), 1.5, True),
    ((2, 2), (2, 2), (2, 3), 1.5, True),  # degenerate segment
    ((2, 2), (2, 2), (2, 3), 1.0, False),
])
def test_segment_intersects_disc(p, q, c, r, expected):
    assert segment_intersects_disc(p, q, c, r) is expected


coords = st.floats(-100, 100, allow_nan=False)
point = st.tuples(coords, coords)


@given(point, point, point, st.floats(0, 50))
def test_segment_test_is_symmetric_in_endpoints(p, q, c, r):
    assert segment_intersects_disc(p, q, c, r) == segment_intersects_disc(q, p, c, r)


@given(point, point, point, st.floats(0.1, 50))
@settings(max_examples=200)
def test_segment_test_agrees_with_dense_sampling(p, q, c, r):
    t = np.linspace(0, 1, 20001)[:, None]
    pts = np.asarray(p) + t * (np.asarray(q) - np.asarray(p))
    dmin = np.hypot(*(pts - c).T).min()
    if abs(dmin - r) > 1e-2:  # away from the boundary the sampled answer is reliable
        assert segment_intersects_disc(p, q, c, r) == (dmin < r)


# deployment -------------------------------------------------------------------

def test_no_obstacle_keeps_every_draw_uniform_in_square():
    cfg = ScenarioConfig(node_count=500, anchor_count=30, obstacle_radius=0.0)
    dep = generate_deployment(cfg, rng(1))
    assert dep.positions.shape == (500, 2)
    assert dep.positions.min() >= 0 and dep.positions.max() <= 100
    # the first 500 raw draws are kept verbatim
    raw = rng(1).uniform(0, 100, size=(256, 2))
    np.testing.assert_array_equal(dep.positions[:256], raw)


def test_obstacle_excludes_every_point():
    cfg = ScenarioConfig(node_count=10_000, anchor_count=30, obstacle_radius=30.0)
    dep = generate_deployment(cfg, rng(2))
    assert len(dep.positions) == 10_000
    assert np.hypot(*(dep.positions - 50).T).min() >= 30.0


def test_anchor_flags_mark_first_m():
    cfg = ScenarioConfig(node_count=50, anchor_count=7)
    dep = generate_deployment(cfg, rng(0))
    assert dep.anchor_flags[:7].all() and not dep.anchor_flags[7:].any()
    np.testing.assert_array_equal(dep.unknown_index, np.arange(7, 50))


def test_deployment_is_deterministic():
    cfg = ScenarioConfig()
    a = generate_deployment(cfg, rng(42))
    b = generate_deployment(cfg, rng(42))
    np.testing.assert_array_equal(a.positions, b.positions)


def test_rejection_gives_up_after_bounded_rounds(monkeypatch):
    monkeypatch.setattr(topology, "_MAX_ROUNDS", 1)
    cfg = ScenarioConfig(node_count=1000, anchor_count=30)
    with pytest.raises(ConfigError, match="obstacle_radius"):
        generate_deployment(cfg, rng(0))


# connectivity -----------------------------------------------------------------

def test_link_within_range():
    dep, cfg = two_nodes((10, 10), (29, 10))
    assert build_connectivity(dep, cfg, rng())[0, 1]


def test_no_link_beyond_range():
    dep, cfg = two_nodes((10, 10), (31, 10))
    assert not build_connectivity(dep, cfg, rng())[0, 1]


def test_obstacle_blocks_link():
    dep, cfg = two_nodes((42.5, 50), (57.5, 50), obstacle_radius=5.0)
    assert not build_connectivity(dep, cfg, rng())[0, 1]


def test_irregularity_shrinks_range_within_bounds():
    # 17 m apart: always linked at DoI 0.1 (range >= 18); 19.5 m sometimes not
    a = [build_connectivity(*two_nodes((10, 10), (27, 10), doi=0.1), rng(s))[0, 1] for s in range(50)]
    b = [build_connectivity(*two_nodes((10, 10), (29.5, 10), doi=0.1), rng(s))[0, 1] for s in range(50)]
    assert all(a)
    assert 0 < sum(b) < 50


def test_regular_unobstructed_graph_matches_unit_disc_oracle():
    cfg = ScenarioConfig(doi=0.0, obstacle_radius=0.0)
    dep = generate_deployment(cfg, rng(3))
    adj = build_connectivity(dep, cfg, rng(4))
    np.testing.assert_array_equal(adj, unit_disc_adjacency(dep.positions, 20.0))


@pytest.mark.parametrize("seed", range(3))
def test_graph_invariants(seed):
    cfg = ScenarioConfig()
    dep = generate_deployment(cfg, rng(seed))
    adj = build_connectivity(dep, cfg, rng(seed + 100))
    assert (adj == adj.T).all()
    assert not adj.diagonal().any()
    i, j = np.nonzero(np.triu(adj))
    for a, b in zip(i, j):
        assert not segment_intersects_disc(dep.positions[a], dep.positions[b], (50, 50), 20)
        assert np.hypot(*(dep.positions[a] - dep.positions[b])) <= 20


# hops -------------------------------------------------------------------------

def path_graph(n):
    adj = np.zeros((n, n), bool)
    idx = np.arange(n - 1)
    adj[idx, idx + 1] = adj[idx + 1, idx] = True
    return adj


def test_path_graph_hops():
    np.testing.assert_array_equal(compute_hops(path_graph(3), 0), [0, 1, 2])


def test_isolated_node_unreachable():
    adj = np.zeros((4, 4), bool)
    adj[:3, :3] = path_graph(3)
    assert compute_hops(adj, 0)[3] == UNREACHABLE


def test_star_graph_leaves_one_hop():
    adj = np.zeros((6, 6), bool)
    adj[0, 1:] = adj[1:, 0] = True
    np.testing.assert_array_equal(compute_hops(adj, 0), [0, 1, 1, 1, 1, 1])


@pytest.mark.parametrize("seed", range(3))
def test_hops_match_graph_library_and_bfs_property(seed):
    cfg = ScenarioConfig()
    dep = generate_deployment(cfg, rng(seed))
    adj = build_connectivity(dep, cfg, rng(seed + 7))
    topo = build_topology(dep, adj)
    oracle = hop_matrix(adj)
    np.testing.assert_array_equal(topo.hops, oracle[dep.anchor_index])
    # symmetric between anchors, zero diagonal
    ah = topo.anchor_hops
    np.testing.assert_array_equal(ah, ah.T)
    assert (np.diag(ah) == 0).all()
    # neighbouring nodes differ by at most one hop
    i, j = np.nonzero(adj)
    h = topo.hops
    reach = (h[:, i] >= 0) & (h[:, j] >= 0)
    assert (np.abs(h[:, i] - h[:, j])[reach] <= 1).all()
    assert ((h[:, i] >= 0) == (h[:, j] >= 0)).all()


def test_path_lengths_follow_smallest_index_predecessor():
    # diamond 0-{1,2}-3; node 1 is the chosen predecessor of 3
    pos = np.array([[0, 0], [5, 5], [5, -1], [10, 0]], float)
    adj = np.zeros((4, 4), bool)
    for a, b in [(0, 1), (0, 2), (1, 3), (2, 3)]:
        adj[a, b] = adj[b, a] = True
    hops, length = shortest_hop_paths(adj, pos, 0)
    np.testing.assert_array_equal(hops, [0, 1, 1, 2])
    assert length[3] == pytest.approx(2 * np.hypot(5, 5))


def test_straight_chain_path_length():
    pos = np.column_stack([np.arange(4) * 10.0, np.zeros(4)])
    hops, length = shortest_hop_paths(path_graph(4), pos, 0)
    np.testing.assert_allclose(length, [0, 10, 20, 30])


def test_topology_determinism():
    cfg = ScenarioConfig()
    t1 = build_topology(generate_deployment(cfg, rng(5)),
                        build_connectivity(generate_deployment(cfg, rng(5)), cfg, rng(6)))
    t2 = build_topology(generate_deployment(cfg, rng(5)),
                        build_connectivity(generate_deployment(cfg, rng(5)), cfg, rng(6)))
    np.testing.assert_array_equal(t1.adjacency, t2.adjacency)
    np.testing.assert_array_equal(t1.hops, t2.hops)
    np.testing.assert_array_equal(t1.path_lengths, t2.path_lengths)
