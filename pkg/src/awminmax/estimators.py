"""scikit-learn style localizers.

Anchors play the role of training samples: ``X`` holds each anchor's hop
counts to every anchor and ``y`` its coordinates. Unknown nodes are the
samples passed to ``predict``, one row of hop counts per node (negative
entries mark unreachable anchors). Nodes that reach fewer than
``min_anchors`` usable anchors are returned as NaN rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_anchor_system, check_hops
from .dvhop import avg_hop_distance, dvhop_range, multilaterate_ls
from .exceptions import DegenerateGeometryError
from .pairing import PairClass, select_partner
from .ranging import RangeEstimate, RangeMethod, estimate_range
from .solver import LocalizationOutcome, LocalizationProblem, SolverConfig, sca_localize
from .weighting import delta_sigma, weight


@dataclass
class NodeEstimate:
    position: np.ndarray  # NaN when the node could not be localized
    anchors: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    ranges: list[RangeEstimate] = field(default_factory=list)
    weights: np.ndarray = field(default_factory=lambda: np.empty(0))
    outcome: LocalizationOutcome | None = None

    @property
    def localized(self) -> bool:
        return bool(np.all(np.isfinite(self.position)))

    @property
    def iterations(self) -> int:
        return self.outcome.iterations if self.outcome is not None else 0


_NOWHERE = np.array([np.nan, np.nan])


class _Localizer(RegressorMixin, BaseEstimator):
    def _fit_anchors(self, X, y, path_lengths=None):
        X, y, path_lengths = check_anchor_system(X, y, path_lengths)
        self.anchors_ = y
        self.anchor_hops_ = X
        self.path_lengths_ = path_lengths
        self.avg_hop_distance_ = avg_hop_distance(y, X)
        self.n_features_in_ = len(y)
        return self

    def localize(self, X) -> list[NodeEstimate]:
        check_is_fitted(self, "avg_hop_distance_")
        X = check_hops(X, n_anchors=self.n_features_in_)
        return [self._localize_node(row) for row in X]

    def predict(self, X) -> np.ndarray:
        """Estimated ``(n_nodes, 2)`` coordinates; NaN rows for unlocalizable nodes."""
        return np.array([e.position for e in self.localize(X)]).reshape(-1, 2)

    def score(self, X, y, sample_weight=None):
        """Negative mean localization error (meters) over localized nodes."""
        pred = self.predict(X)
        err = np.hypot(*(pred - np.asarray(y, float)).T)
        ok = np.isfinite(err)
        if not ok.any():
            return -np.inf
        return -float(np.average(err[ok], weights=None if sample_weight is None
                                 else np.asarray(sample_weight)[ok]))

    def _usable(self, row) -> np.ndarray:
        return np.flatnonzero((row >= 1) & np.isfinite(self.avg_hop_distance_))


class DVHopLocalizer(_Localizer):
    """Classic DV-Hop: per-anchor hop size times hop count, then least squares.

    Parameters
    ----------
    min_anchors : int, default=3
        Fewest reachable anchors needed to localize a node.
    """

    def __init__(self, min_anchors: int = 3):
        self.min_anchors = min_anchors

    def fit(self, X, y, path_lengths=None):
        return self._fit_anchors(X, y, path_lengths)

    def _localize_node(self, row) -> NodeEstimate:
        used = self._usable(row)
        if len(used) < max(self.min_anchors, 3):
            return NodeEstimate(_NOWHERE.copy())
        ranges = dvhop_range(self.avg_hop_distance_[used], row[used])
        try:
            pos = multilaterate_ls(self.anchors_[used], ranges)
        except DegenerateGeometryError:
            return NodeEstimate(_NOWHERE.copy(), used)
        return NodeEstimate(pos, used, weights=np.ones(len(used)))


class AWMinMaxLocalizer(_Localizer):
    """Adaptive weighted min-max residual localizer.

    Each reachable anchor's range comes from its best partner anchor
    (lens-integral estimate for optimal pairs, the pair's own hop size for
    suboptimal pairs, DV-Hop otherwise) and is weighted by
    ``h ** -dsigma``. Positions minimise the largest weighted range residual
    by successive convex approximation, warm-started at the least-squares
    point.

    Parameters
    ----------
    comm_radius : float, default=20.0
        Nominal radio range R in meters.
    epsilon : float, default=1e-3
        Outer stopping threshold on the iterate step, meters.
    max_iter : int, default=100
        Cap on outer iterations.
    inner_solver : {"slsqp", "subgradient"}, default="slsqp"
        Method for each convex subproblem.
    suboptimal_distance : {"euclidean", "path"}, default="euclidean"
        Anchor-pair length used by suboptimal ranging: the straight-line
        separation, or the multi-hop route length passed to ``fit``.
    dsigma_unit : float, default=1.0
        Meters per unit of the weight exponent. 1.0 uses the detour
        discrepancy in meters as is.
    min_anchors : int, default=3
    """

    def __init__(self, comm_radius: float = 20.0, epsilon: float = 1e-3,
                 max_iter: int = 100, inner_solver: str = "slsqp",
                 suboptimal_distance: str = "euclidean", dsigma_unit: float = 1.0,
                 min_anchors: int = 3):
        self.comm_radius = comm_radius
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.inner_solver = inner_solver
        self.suboptimal_distance = suboptimal_distance
        self.dsigma_unit = dsigma_unit
        self.min_anchors = min_anchors

    def fit(self, X, y, path_lengths=None):
        """Learn hop sizes from anchors.

        ``path_lengths[i, j]`` is the length of the multi-hop route between
        anchors i and j. It is only needed with ``suboptimal_distance="path"``;
        if missing there, suboptimal pairs fall back to DV-Hop ranges.
        """
        if not self.comm_radius > 0:
            raise ValueError("comm_radius must be positive")
        if not self.dsigma_unit > 0:
            raise ValueError("dsigma_unit must be positive")
        if self.suboptimal_distance not in ("euclidean", "path"):
            raise ValueError(f"unknown suboptimal_distance {self.suboptimal_distance!r}")
        self.solver_config_ = SolverConfig(epsilon=self.epsilon, max_outer_iters=self.max_iter,
                                           inner=self.inner_solver)
        self._fit_anchors(X, y, path_lengths)
        if self.suboptimal_distance == "euclidean":
            diff = self.anchors_[:, None, :] - self.anchors_[None, :, :]
            self.pair_distances_ = np.hypot(diff[..., 0], diff[..., 1])
        else:
            self.pair_distances_ = self.path_lengths_
        return self

    def _fallback_dsigma(self, i, row) -> float:
        # hop-closest other anchor to the node, lowest index on ties
        cand = np.flatnonzero(row >= 1)
        cand = cand[cand != i]
        if len(cand) == 0:
            return 0.0
        j = cand[np.argmin(row[cand])]
        d = float(np.hypot(*(self.anchors_[i] - self.anchors_[j])))
        return float(delta_sigma(self.avg_hop_distance_[i], row[i], row[j], d))

    def range_to(self, i: int, row) -> tuple[RangeEstimate, float]:
        """Range estimate and weight for anchor ``i`` given a node's hop row."""
        dbar = self.avg_hop_distance_
        pairing = select_partner(i, row, self.anchors_, dbar, self.comm_radius)
        est = estimate_range(i, row, pairing, dbar=dbar, anchors=self.anchors_,
                             anchor_hops=self.anchor_hops_, pair_distances=self.pair_distances_,
                             comm_radius=self.comm_radius)
        if pairing.pair_class is PairClass.UNAVAILABLE:
            dsig = self._fallback_dsigma(i, row)
        else:
            dsig = pairing.delta_sigma
        return est, weight(int(row[i]), dsig / self.dsigma_unit)

    def _localize_node(self, row) -> NodeEstimate:
        used = self._usable(row)
        if len(used) < max(self.min_anchors, 3):
            return NodeEstimate(_NOWHERE.copy())
        ranges, weights = zip(*(self.range_to(int(i), row) for i in used))
        problem = LocalizationProblem(self.anchors_[used], [r.dhat for r in ranges], weights)
        outcome = sca_localize(problem, self.solver_config_)
        return NodeEstimate(outcome.x_hat, used, list(ranges), np.asarray(weights), outcome)

    def method_counts(self, X) -> dict[RangeMethod, int]:
        """How often each ranging method fires over the given nodes (no solving)."""
        check_is_fitted(self, "avg_hop_distance_")
        X = check_hops(X, n_anchors=self.n_features_in_)
        counts = {m: 0 for m in RangeMethod}
        for row in X:
            for i in self._usable(row):
                counts[self.range_to(int(i), row)[0].method] += 1
        return counts
