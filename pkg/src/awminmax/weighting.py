"""Adaptive per-anchor weights.

An anchor's residual weight is ``h ** -dsigma`` where ``h`` is its hop count
to the unknown node and ``dsigma`` the detour discrepancy of the anchor pair
used for ranging: the hop-based length of the route through the unknown node
minus the true anchor separation. Many hops and long detours both shrink the
weight.
"""

from __future__ import annotations

import math

import numpy as np

MIN_WEIGHT = 1e-6


def delta_sigma(dbar, h_aiu, h_aju, d_aiaj):
    """Detour discrepancy ``dbar * (h_aiu + h_aju) - d_aiaj`` in meters (may be negative)."""
    return dbar * (h_aiu + h_aju) - d_aiaj


def max_exponent(h_aiu) -> float:
    """Largest exponent keeping ``h ** -x >= MIN_WEIGHT``."""
    return math.log(1.0 / MIN_WEIGHT) / math.log(max(h_aiu, 2))


def weight(h_aiu, dsigma) -> float:
    """Residual weight in ``[MIN_WEIGHT, 1]``.

    Negative discrepancies are clamped to zero (weight 1); large ones are
    clamped so the weight never underflows below ``MIN_WEIGHT``.
    """
    if h_aiu < 1:
        raise ValueError("hop count must be >= 1")
    if h_aiu == 1:
        return 1.0
    expo = min(max(float(dsigma), 0.0), max_exponent(h_aiu))
    return float(np.clip(h_aiu ** -expo, MIN_WEIGHT, 1.0))
