"""Anchor-pair classification relative to an unknown node.

With hop radii ``R*h`` around two anchors, the unknown node lies in both hop
discs. The pair is *optimal* when the anchors are farther apart than either
hop radius and the discs intersect; *suboptimal* when the partner's disc
excludes the first anchor but the first anchor's disc contains the partner
(again with intersecting discs); otherwise *unavailable*.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .weighting import delta_sigma


class PairClass(enum.Enum):
    OPTIMAL = "optimal"
    SUBOPTIMAL = "suboptimal"
    UNAVAILABLE = "unavailable"


@dataclass(frozen=True)
class AnchorPairing:
    anchor: int
    partner: int | None
    pair_class: PairClass
    delta_sigma: float

    def __post_init__(self):
        if self.partner == self.anchor:
            raise ValueError("partner must differ from anchor")
        if self.pair_class is PairClass.UNAVAILABLE and self.partner is not None:
            raise ValueError("unavailable pairing cannot carry a partner")


def cosine_ratio(d_aiaj, R, h_aiu, h_aju):
    """Law-of-cosines ratio for the angle at a_i in triangle (a_i, a_j, u).

    Vectorised over any broadcastable inputs.
    """
    r_i = R * h_aiu
    r_j = R * h_aju
    with np.errstate(divide="ignore", invalid="ignore"):
        return (r_i**2 + d_aiaj**2 - r_j**2) / (2.0 * r_i * d_aiaj)


def _classify(d, R, h_i, h_j):
    d, h_i, h_j = np.broadcast_arrays(np.asarray(d, float), h_i, h_j)
    valid = (h_i >= 1) & (h_j >= 1) & np.isfinite(d) & (d > 0)
    ratio = cosine_ratio(d, R, np.where(valid, h_i, 1), np.where(valid, h_j, 1))
    cos_ok = valid & (ratio >= -1.0) & (ratio <= 1.0)
    far_j = d > R * h_j
    optimal = cos_ok & (d > R * h_i) & far_j
    suboptimal = cos_ok & (d < R * h_i) & far_j
    return optimal, suboptimal


def classify_pair(d_aiaj, R, h_aiu, h_aju) -> PairClass:
    optimal, suboptimal = _classify(d_aiaj, R, h_aiu, h_aju)
    if optimal:
        return PairClass.OPTIMAL
    if suboptimal:
        return PairClass.SUBOPTIMAL
    return PairClass.UNAVAILABLE


def select_partner(i: int, node_hops, anchors, dbar, R) -> AnchorPairing:
    """Pick the ranging partner for anchor ``i`` and one unknown node.

    Optimal candidates are preferred over suboptimal ones; within a class the
    partner with the smallest detour discrepancy wins (lowest index on ties).

    Parameters
    ----------
    node_hops : int array of shape (m,)
        Hop count from every anchor to the unknown node (negative if unreachable).
    anchors : array of shape (m, 2)
    dbar : array of shape (m,)
        Average hop distance per anchor.
    """
    node_hops = np.asarray(node_hops)
    anchors = np.asarray(anchors, dtype=float)
    d = np.hypot(*(anchors - anchors[i]).T)
    optimal, suboptimal = _classify(d, R, node_hops[i], node_hops)
    optimal[i] = suboptimal[i] = False
    dsig = delta_sigma(dbar[i], node_hops[i], node_hops, d)
    for mask, cls in ((optimal, PairClass.OPTIMAL), (suboptimal, PairClass.SUBOPTIMAL)):
        if mask.any():
            cand = np.flatnonzero(mask)
            j = int(cand[np.argmin(dsig[cand])])
            return AnchorPairing(i, j, cls, float(dsig[j]))
    return AnchorPairing(i, None, PairClass.UNAVAILABLE, float("nan"))
