"""DV-Hop baseline: per-anchor hop size, hop-based ranges, linear multilateration."""

from __future__ import annotations

import numpy as np

from .exceptions import DegenerateGeometryError


def avg_hop_distance(anchors, anchor_hops) -> np.ndarray:
    """Average hop distance of each anchor.

    ``dbar[i] = sum_j d(a_i, a_j) / sum_j h(a_i, a_j)`` over the anchors a_j
    reachable from a_i. Anchors that reach no other anchor get NaN.

    Parameters
    ----------
    anchors : array of shape (m, 2)
    anchor_hops : int array of shape (m, m)
        Hop counts between anchors, negative where unreachable.
    """
    anchors = np.asarray(anchors, dtype=float)
    hops = np.asarray(anchor_hops)
    dist = np.hypot(*(anchors[:, None, :] - anchors[None, :, :]).transpose(2, 0, 1))
    ok = hops > 0
    num = np.where(ok, dist, 0.0).sum(axis=1)
    den = np.where(ok, hops, 0).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / np.maximum(den, 1), np.nan)


def dvhop_range(dbar, h):
    return dbar * h


def multilaterate_ls(anchors, ranges) -> np.ndarray:
    """Least-squares position from anchor ranges.

    Each circle equation is differenced against the last anchor's, leaving a
    linear system ``A x = b`` solved in the least-squares sense.

    Raises
    ------
    DegenerateGeometryError
        Fewer than three anchors, or anchors (nearly) collinear.
    """
    anchors = np.asarray(anchors, dtype=float)
    ranges = np.asarray(ranges, dtype=float)
    if len(anchors) < 3:
        raise DegenerateGeometryError("multilateration needs at least 3 anchors")
    pivot, r_pivot = anchors[-1], ranges[-1]
    A = 2.0 * (anchors[:-1] - pivot)
    b = (r_pivot**2 - ranges[:-1] ** 2
         + np.sum(anchors[:-1] ** 2, axis=1) - np.sum(pivot**2))
    scale = np.abs(A).max()
    if scale == 0:
        raise DegenerateGeometryError("coincident anchors")
    # rank test on the scaled matrix so the threshold is unit-free
    sv = np.linalg.svd(A / scale, compute_uv=False)
    if len(sv) < 2 or sv[1] < 1e-9 * sv[0]:
        raise DegenerateGeometryError("anchors are collinear")
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    return x
