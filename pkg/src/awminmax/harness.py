"""Monte Carlo campaigns and accuracy metrics.

Randomness layout: the deployment (positions, anchor set) is drawn once from
``base_seed`` and shared by every trial, so node identities persist and
per-node RMSE across trials is meaningful. Each trial redraws the per-link
radio irregularity from a stream derived from ``(base_seed, trial)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .estimators import AWMinMaxLocalizer, DVHopLocalizer
from .topology import (Topology, build_connectivity, build_topology,
                       generate_deployment)

ALGORITHMS = ("dvhop", "awminmax")
SWEEP_AXES = ("anchor_count", "node_density", "avg_hop_distance_bins")

_DEPLOYMENT_STREAM = 0
_LINK_STREAM = 1


def deployment_rng(base_seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([base_seed, _DEPLOYMENT_STREAM]))


def link_rng(base_seed: int, trial: int) -> np.random.Generator:
    """Independent stream for trial ``trial``'s radio irregularity draws."""
    return np.random.default_rng(np.random.SeedSequence([base_seed, _LINK_STREAM, trial]))


def trial_topology(cfg: ScenarioConfig, trial: int) -> Topology:
    dep = generate_deployment(cfg, deployment_rng(cfg.base_seed))
    adj = build_connectivity(dep, cfg, link_rng(cfg.base_seed, trial))
    return build_topology(dep, adj)


@dataclass
class TrialResult:
    algo: str
    trial: int
    seed: int
    node_ids: np.ndarray
    true_positions: np.ndarray
    estimates: np.ndarray  # NaN rows for unlocalizable nodes
    sca_iters: np.ndarray
    nearest_anchor_dbar: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def localized(self) -> np.ndarray:
        return np.all(np.isfinite(self.estimates), axis=1)

    @property
    def errors(self) -> np.ndarray:
        """Per-node Euclidean error, NaN where unlocalized."""
        return np.hypot(*(self.estimates - self.true_positions).T)


def make_localizer(algo: str, cfg: ScenarioConfig):
    if algo == "dvhop":
        return DVHopLocalizer()
    if algo == "awminmax":
        return AWMinMaxLocalizer(comm_radius=cfg.comm_radius, epsilon=cfg.epsilon)
    raise ValueError(f"unknown algorithm {algo!r}")


def _nearest_anchor_dbar(topo: Topology, dbar: np.ndarray) -> np.ndarray:
    hops = topo.unknown_hops.astype(float)
    hops[hops < 1] = np.inf
    out = np.full(len(hops), np.nan)
    reach = np.isfinite(hops).any(axis=1)
    out[reach] = dbar[np.argmin(hops[reach], axis=1)]
    return out


def localize_topology(topo: Topology, cfg: ScenarioConfig, algo: str, trial: int = 0) -> TrialResult:
    dep = topo.deployment
    est = make_localizer(algo, cfg).fit(topo.anchor_hops, dep.anchors, topo.anchor_path_lengths)
    nodes = est.localize(topo.unknown_hops)
    return TrialResult(
        algo=algo,
        trial=trial,
        seed=cfg.base_seed,
        node_ids=dep.unknown_index,
        true_positions=dep.positions[dep.unknown_index],
        estimates=np.array([n.position for n in nodes]).reshape(-1, 2),
        sca_iters=np.array([n.iterations for n in nodes], dtype=int),
        nearest_anchor_dbar=_nearest_anchor_dbar(topo, est.avg_hop_distance_),
    )


def run_trial(cfg: ScenarioConfig, trial: int, algo: str) -> TrialResult:
    return localize_topology(trial_topology(cfg, trial), cfg, algo, trial)


def run_trials(cfg: ScenarioConfig, algos=ALGORITHMS, trials: int | None = None,
               n_jobs: int = 1) -> dict[str, list[TrialResult]]:
    """All trials for every algorithm, ordered by trial index.

    The topology of each trial is built once and shared by the algorithms.
    With ``n_jobs != 1`` trials run in parallel through joblib; the returned
    order does not depend on scheduling.
    """
    n = cfg.trials if trials is None else trials

    def one(t):
        topo = trial_topology(cfg, t)
        return [localize_topology(topo, cfg, a, t) for a in algos]

    if n_jobs == 1:
        rows = [one(t) for t in range(n)]
    else:
        from joblib import Parallel, delayed
        rows = Parallel(n_jobs=n_jobs)(delayed(one)(t) for t in range(n))
    return {a: [r[k] for r in rows] for k, a in enumerate(algos)}


# --- metrics -----------------------------------------------------------------

def rmse(errors_per_trial) -> np.ndarray:
    """Per-node RMSE across trials.

    ``errors_per_trial`` has shape (M_c, n_nodes); NaN entries (node not
    localized in that trial) are skipped. Nodes never localized give NaN.
    """
    e = np.atleast_2d(np.asarray(errors_per_trial, dtype=float))
    sq = np.where(np.isfinite(e), e * e, 0.0)
    k = np.isfinite(e).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(k > 0, np.sqrt(sq.sum(axis=0) / np.maximum(k, 1)), np.nan)


def ale(errors, R: float) -> float:
    """Sum of node errors over (number of nodes * R)."""
    e = np.asarray(errors, dtype=float).ravel()
    if len(e) == 0:
        return float("nan")
    return float(e.sum() / (len(e) * R))


def error_cdf(errors) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF as (distinct sorted errors, fraction <= each)."""
    e = np.asarray(errors, dtype=float).ravel()
    if len(e) == 0:
        raise ValueError("error_cdf needs at least one error")
    values, counts = np.unique(e, return_counts=True)
    frac = np.cumsum(counts) / len(e)
    frac[-1] = 1.0
    return values, frac


@dataclass
class CampaignSummary:
    algo: str
    axis_value: float | None
    ale: float  # mean over trials of per-trial ALE
    node_rmse: np.ndarray
    pct_unlocalizable: float
    errors: np.ndarray  # pooled localized errors

    @property
    def mean_rmse(self) -> float:
        r = self.node_rmse[np.isfinite(self.node_rmse)]
        return float(r.mean()) if len(r) else float("nan")


def summarize(results: list[TrialResult], R: float, axis_value=None) -> CampaignSummary:
    errs = np.array([r.errors for r in results])
    per_trial = [ale(e[np.isfinite(e)], R) for e in errs]
    per_trial = [a for a in per_trial if np.isfinite(a)]
    pooled = errs[np.isfinite(errs)]
    return CampaignSummary(
        algo=results[0].algo,
        axis_value=axis_value,
        ale=float(np.mean(per_trial)) if per_trial else float("nan"),
        node_rmse=rmse(errs),
        pct_unlocalizable=100.0 * float(np.mean(~np.isfinite(errs))),
        errors=np.sort(pooled),
    )


def _bin_summaries(results: list[TrialResult], R: float, edges) -> list[CampaignSummary]:
    """Split node-trial errors by the hop size of each node's hop-closest anchor."""
    edges = np.asarray(edges, dtype=float)
    errs = np.concatenate([r.errors for r in results])
    key = np.concatenate([r.nearest_anchor_dbar for r in results])
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (key >= lo) & (key < hi)
        e = errs[sel]
        ok = e[np.isfinite(e)]
        out.append(CampaignSummary(
            algo=results[0].algo,
            axis_value=float(lo),
            ale=ale(ok, R),
            node_rmse=np.array([np.sqrt(np.mean(ok**2))]) if len(ok) else np.array([np.nan]),
            pct_unlocalizable=100.0 * float(np.mean(~np.isfinite(e))) if len(e) else float("nan"),
            errors=np.sort(ok),
        ))
    return out


def config_for_axis(cfg: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    if axis == "anchor_count":
        return cfg.replace(anchor_count=int(value))
    if axis == "node_density":
        return cfg.replace(node_count=int(round(float(value) * cfg.area_side**2)))
    raise ValueError(f"axis {axis!r} does not map to a scenario change")


def sweep(cfg: ScenarioConfig, axis: str, values, algos=ALGORITHMS,
          trials: int | None = None, n_jobs: int = 1):
    """Run a campaign per axis value.

    Returns ``(summaries, results)``: summaries in (axis value, algorithm)
    order, and the raw trial results per (axis value, algorithm).

    ``node_density`` values are nodes per square meter. For
    ``avg_hop_distance_bins`` the values are bin edges in meters: one campaign
    is run on ``cfg`` and node-trial errors are grouped by the average hop
    distance of each node's hop-closest anchor.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}")
    values = list(values)
    if values != sorted(values):
        raise ValueError("sweep values must be sorted")
    summaries, raw = [], []
    if axis == "avg_hop_distance_bins":
        if len(values) < 2:
            raise ValueError("avg_hop_distance_bins needs at least two bin edges")
        res = run_trials(cfg, algos, trials, n_jobs)
        for a in algos:
            summaries.extend(_bin_summaries(res[a], cfg.comm_radius, values))
            raw.append((None, a, res[a]))
        # (axis value, algorithm) order
        summaries.sort(key=lambda s: (s.axis_value, algos.index(s.algo)))
        return summaries, raw
    for v in values:
        sub = config_for_axis(cfg, axis, v)
        res = run_trials(sub, algos, trials, n_jobs)
        for a in algos:
            summaries.append(summarize(res[a], sub.comm_radius, float(v)))
            raw.append((float(v), a, res[a]))
    return summaries, raw
