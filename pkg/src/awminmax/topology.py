"""Anisotropic network deployments and hop-count graphs.

Nodes are dropped uniformly on the square ``[0, L]^2`` except inside a
circular obstacle. Two nodes are linked when they are within a per-link
effective radius ``R * (1 - DoI * u_ij)`` (``u_ij ~ U[0, 1]``, drawn once per
unordered pair) and the straight segment between them does not cross the
obstacle. Hop counts are breadth-first distances on that graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .exceptions import ConfigError

UNREACHABLE = -1

# candidates drawn per rejection round; fixed so that deployments of
# different sizes drawn from the same stream share a common prefix
_BATCH = 256
_MAX_ROUNDS = 10_000


@dataclass(frozen=True)
class Deployment:
    positions: np.ndarray  # (n, 2)
    anchor_flags: np.ndarray  # (n,) bool, first m True

    @property
    def anchor_index(self) -> np.ndarray:
        return np.flatnonzero(self.anchor_flags)

    @property
    def unknown_index(self) -> np.ndarray:
        return np.flatnonzero(~self.anchor_flags)

    @property
    def anchors(self) -> np.ndarray:
        return self.positions[self.anchor_flags]


@dataclass(frozen=True)
class Topology:
    """Everything the localizers need from one network realisation.

    ``hops[k, v]`` is the hop count from the k-th anchor to node v and
    ``path_lengths[k, v]`` the summed link length along the BFS shortest-hop
    path (smallest-index predecessor on ties). Both use UNREACHABLE / NaN
    where no path exists.
    """

    deployment: Deployment
    adjacency: np.ndarray
    hops: np.ndarray
    path_lengths: np.ndarray

    @property
    def anchor_hops(self) -> np.ndarray:
        return self.hops[:, self.deployment.anchor_index]

    @property
    def anchor_path_lengths(self) -> np.ndarray:
        return self.path_lengths[:, self.deployment.anchor_index]

    @property
    def unknown_hops(self) -> np.ndarray:
        """(n_unknown, m) hop matrix, one row per unknown node."""
        return self.hops[:, self.deployment.unknown_index].T


def generate_deployment(cfg: ScenarioConfig, rng: np.random.Generator) -> Deployment:
    """Sample ``cfg.node_count`` positions, rejecting those inside the obstacle."""
    n, side = cfg.node_count, cfg.area_side
    center = np.asarray(cfg.obstacle_center, dtype=float)
    r = cfg.obstacle_radius
    kept: list[np.ndarray] = []
    count = 0
    for _ in range(_MAX_ROUNDS):
        cand = rng.uniform(0.0, side, size=(_BATCH, 2))
        if r > 0:
            cand = cand[np.hypot(*(cand - center).T) >= r]
        kept.append(cand)
        count += len(cand)
        if count >= n:
            break
    else:
        raise ConfigError(
            "obstacle_radius: rejection sampling could not place "
            f"{n} nodes outside the obstacle"
        )
    positions = np.concatenate(kept)[:n]
    flags = np.zeros(n, dtype=bool)
    flags[: cfg.anchor_count] = True
    return Deployment(positions, flags)


def segment_intersects_disc(p, q, c, r) -> bool:
    """True iff the closed segment pq comes strictly closer than r to c."""
    return bool(_segment_disc_distance(np.asarray(p, float), np.asarray(q, float),
                                       np.asarray(c, float)) < r)


def _segment_disc_distance(p, q, c):
    # broadcasting over leading axes of p and q; endpoints are put in
    # lexicographic order so (p, q) and (q, p) round identically
    p, q = np.broadcast_arrays(p, q)
    swap = (p[..., 0] > q[..., 0]) | ((p[..., 0] == q[..., 0]) & (p[..., 1] > q[..., 1]))
    p, q = np.where(swap[..., None], q, p), np.where(swap[..., None], p, q)
    d = q - p
    dd = np.sum(d * d, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.sum((c - p) * d, axis=-1) / dd
    s = np.where(dd > 0, np.clip(s, 0.0, 1.0), 0.0)
    closest = p + s[..., None] * d
    return np.hypot(*np.moveaxis(closest - c, -1, 0))


def build_connectivity(dep: Deployment, cfg: ScenarioConfig,
                       rng: np.random.Generator) -> np.ndarray:
    """Symmetric boolean adjacency matrix of the irregular, obstructed graph."""
    pos = dep.positions
    n = len(pos)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])

    u = np.triu(rng.uniform(0.0, 1.0, size=(n, n)), 1)
    u = u + u.T
    reach = cfg.comm_radius * (1.0 - cfg.doi * u)
    adj = dist <= reach

    if cfg.obstacle_radius > 0:
        blocked = _segment_disc_distance(
            pos[:, None, :], pos[None, :, :], np.asarray(cfg.obstacle_center, float)
        ) < cfg.obstacle_radius
        adj &= ~blocked
    np.fill_diagonal(adj, False)
    return adj


def compute_hops(adjacency: np.ndarray, source: int) -> np.ndarray:
    """Breadth-first hop counts from ``source``; UNREACHABLE where disconnected."""
    return _bfs(adjacency, source)[0]


def _bfs(adjacency: np.ndarray, source: int) -> tuple[np.ndarray, list[np.ndarray]]:
    n = len(adjacency)
    hops = np.full(n, UNREACHABLE, dtype=np.int64)
    hops[source] = 0
    frontier = np.zeros(n, dtype=bool)
    frontier[source] = True
    visited = frontier.copy()
    levels = [np.array([source])]
    level = 0
    while frontier.any():
        level += 1
        nxt = adjacency[frontier].any(axis=0) & ~visited
        if not nxt.any():
            break
        hops[nxt] = level
        visited |= nxt
        frontier = nxt
        levels.append(np.flatnonzero(nxt))
    return hops, levels


def shortest_hop_paths(adjacency: np.ndarray, positions: np.ndarray,
                       source: int) -> tuple[np.ndarray, np.ndarray]:
    """Hop counts and Euclidean lengths of BFS shortest-hop paths from ``source``.

    Among equally short paths the one whose every node steps back to its
    smallest-index neighbour on the previous BFS level is used, so the result
    is deterministic.
    """
    hops, levels = _bfs(adjacency, source)
    length = np.full(len(adjacency), np.nan)
    length[source] = 0.0
    for prev, cur in zip(levels[:-1], levels[1:]):
        # first True along axis 1 -> smallest-index predecessor (prev is sorted)
        pred = prev[np.argmax(adjacency[np.ix_(cur, prev)], axis=1)]
        length[cur] = length[pred] + np.hypot(*(positions[cur] - positions[pred]).T)
    return hops, length


def build_topology(dep: Deployment, adjacency: np.ndarray) -> Topology:
    sources = dep.anchor_index
    n = len(dep.positions)
    hops = np.empty((len(sources), n), dtype=np.int64)
    lengths = np.empty((len(sources), n))
    for k, a in enumerate(sources):
        hops[k], lengths[k] = shortest_hop_paths(adjacency, dep.positions, a)
    return Topology(dep, adjacency, hops, lengths)
