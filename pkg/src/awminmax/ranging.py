"""Anchor-to-node distance estimation from hop counts.

For an optimal anchor pair the unknown node is modelled as uniformly
distributed over the half-lens cut out of the two hop discs (radii
``R*h_aiu`` around a_i and ``R*h_aju`` around a_j). Seen from a_i, its
bearing ``theta`` relative to the a_i -> a_j axis has a density derived from
the area swept by a ray rotating away from that axis, and the distance
estimate is the expectation of ``dbar * h / cos(theta)``.

Suboptimal pairs rescale the hop count by the per-hop length of the anchor
pair itself (their separation over their hop count); anything else falls
back to DV-Hop.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .dvhop import dvhop_range
from .exceptions import GeometryError
from .pairing import AnchorPairing, PairClass

SEC_CAP = math.pi / 2 - 1e-3
QUAD_RTOL = 1e-6

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def gauss_legendre(f, a: float, b: float, rtol: float = QUAD_RTOL,
                   panels: int = 4, max_panels: int = 4096) -> float:
    """Composite 16-point Gauss-Legendre quadrature of a vectorised ``f``.

    The panel count doubles (starting from 4 panels, 64 nodes) until two
    successive estimates agree to ``rtol``.
    """
    if b <= a:
        return 0.0

    def composite(k):
        edges = np.linspace(a, b, k + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        x = mid[:, None] + half[:, None] * _GL_X[None, :]
        return float(np.sum(half[:, None] * _GL_W[None, :] * f(x)))

    prev = composite(panels)
    while panels < max_panels:
        panels *= 2
        cur = composite(panels)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    return prev


def theta_max(R_ai: float, R_aj: float, d: float) -> float:
    """Angle at a_i between the anchor axis and a crossing point of the two circles."""
    ratio = (R_ai**2 + d**2 - R_aj**2) / (2.0 * R_ai * d)
    if not -1.0 <= ratio <= 1.0:
        raise GeometryError(f"circles do not intersect (cosine ratio {ratio:.6g})")
    return math.acos(ratio)


def triangle_area(a: float, b: float, c: float) -> float:
    """Heron's formula, clamped at zero for degenerate triangles."""
    l = 0.5 * (a + b + c)
    return math.sqrt(max(l * (l - a) * (l - b) * (l - c), 0.0))


@dataclass(frozen=True)
class LensGeometry:
    """Two intersecting hop discs: radius R_ai around a_i, R_aj around a_j.

    ``lens_area`` is the half-lens area (one side of the anchor axis),
    sector(a_i) + sector(a_j) - triangle(o, a_i, a_j).
    """

    R_ai: float
    R_aj: float
    d: float
    theta_max: float
    lens_area: float

    @classmethod
    def from_radii(cls, R_ai: float, R_aj: float, d: float) -> "LensGeometry":
        R_ai, R_aj, d = float(R_ai), float(R_aj), float(d)
        if not (R_ai > 0 and R_aj > 0 and abs(R_ai - R_aj) < d < R_ai + R_aj):
            raise GeometryError(
                f"circles (R_ai={R_ai}, R_aj={R_aj}, d={d}) do not properly intersect")
        t_i = theta_max(R_ai, R_aj, d)
        t_j = theta_max(R_aj, R_ai, d)
        area = 0.5 * R_ai**2 * t_i + 0.5 * R_aj**2 * t_j - triangle_area(d, R_ai, R_aj)
        return cls(R_ai, R_aj, d, t_i, area)

    @property
    def acute(self) -> bool:
        """True when the whole half-lens lies within ``theta_max`` of the axis."""
        return self.d**2 >= self.R_ai**2 + self.R_aj**2


def _near_radius(theta, g: LensGeometry):
    """Distance from a_i to where the ray at ``theta`` enters a_j's disc (>= 0)."""
    theta = np.asarray(theta, dtype=float)
    s = g.d * np.sin(theta)
    root = np.sqrt(np.clip(g.R_aj**2 - s * s, 0.0, None))
    return np.maximum(g.d * np.cos(theta) - root, 0.0)


def _swept_area(theta, g: LensGeometry):
    """Area of the half-lens with bearing in ``[0, theta]`` (theta <= theta_max).

    Equals ``0.5 * R_ai^2 * theta - 0.5 * int_0^theta r_in(phi)^2 dphi``; the
    integral has a closed form through the substitution ``s = d sin(phi)``.
    """
    theta = np.asarray(theta, dtype=float)
    sector = 0.5 * g.R_ai**2 * theta
    if g.d <= g.R_aj:
        # a_i sits inside a_j's disc: every ray starts inside the lens
        return sector
    s = g.d * np.sin(theta)
    S = np.sqrt(np.clip(g.R_aj**2 - s * s, 0.0, None))
    inner = (0.5 * g.d**2 * np.sin(2 * theta) + g.R_aj**2 * theta
             - (s * S + g.R_aj**2 * np.arcsin(np.clip(s / g.R_aj, -1.0, 1.0))))
    return sector - 0.5 * inner


def lens_cdf(theta, g: LensGeometry):
    """P(bearing <= theta) for a node uniform on the lens part within theta_max."""
    theta = np.clip(np.asarray(theta, dtype=float), 0.0, g.theta_max)
    total = _swept_area(g.theta_max, g)
    return np.clip(_swept_area(theta, g) / total, 0.0, 1.0)


def _density_kernel(theta, g: LensGeometry):
    # d/dtheta of the swept area: 0.5 * (R_ai^2 - r_in^2)
    r_in = _near_radius(theta, g)
    return np.maximum(0.5 * (g.R_ai - r_in) * (g.R_ai + r_in), 0.0)


@functools.lru_cache(maxsize=4096)
def _normalizer(g: LensGeometry, upper: float) -> float:
    z = gauss_legendre(lambda t: _density_kernel(t, g), 0.0, upper)
    if not z > 0:
        raise GeometryError("bearing density cannot be normalised")
    return z


def angle_pdf(theta, g: LensGeometry):
    """Bearing density on ``[0, theta_max]``, zero outside."""
    theta = np.asarray(theta, dtype=float)
    p = _density_kernel(theta, g) / _normalizer(g, g.theta_max)
    return np.where((theta >= 0) & (theta <= g.theta_max), p, 0.0)


def estimate_optimal(dbar: float, h_aiu: int, g: LensGeometry) -> float:
    """Expected ``dbar * h / cos(theta)`` under the bearing density.

    Integration stops just short of ``pi/2``; if the lens extends past that,
    the density is renormalised over the truncated interval.
    """
    upper = min(g.theta_max, SEC_CAP)
    base = dbar * h_aiu
    if upper <= 0:
        return base
    z = _normalizer(g, upper)
    num = gauss_legendre(lambda t: _density_kernel(t, g) / np.cos(t), 0.0, upper)
    return base * max(num / z, 1.0)


def estimate_suboptimal(dist_aiaj: float, h_aiaj: int, h_aiu: int) -> float:
    """Per-hop length of the anchor pair times the hop count to the node."""
    if h_aiaj < 1:
        raise ValueError("anchor pair must be at least one hop apart")
    return dist_aiaj / h_aiaj * h_aiu


class RangeMethod(enum.Enum):
    OPTIMAL_INTEGRAL = "optimal_integral"
    SUBOPTIMAL_PER_HOP = "suboptimal_per_hop"
    DVHOP_FALLBACK = "dvhop_fallback"


@dataclass(frozen=True)
class RangeEstimate:
    dhat: float
    method: RangeMethod
    pairing: AnchorPairing


def estimate_range(i: int, node_hops, pairing: AnchorPairing, *, dbar, anchors,
                   anchor_hops, pair_distances, comm_radius: float) -> RangeEstimate:
    """Distance from anchor ``i`` to one unknown node, dispatched on pair class.

    ``pair_distances[i][j]`` is the anchor-pair length used for suboptimal
    ranging (straight-line separation or multi-hop route length). It may be
    None, in which case suboptimal pairs use DV-Hop.
    Geometry failures on optimal pairs also fall back to DV-Hop.
    """
    h_i = int(node_hops[i])
    j = pairing.partner
    if pairing.pair_class is PairClass.OPTIMAL:
        try:
            d = float(np.hypot(*(np.asarray(anchors[i], float) - anchors[j])))
            g = LensGeometry.from_radii(comm_radius * h_i, comm_radius * node_hops[j], d)
            return RangeEstimate(estimate_optimal(dbar[i], h_i, g),
                                 RangeMethod.OPTIMAL_INTEGRAL, pairing)
        except GeometryError:
            pass
    elif pairing.pair_class is PairClass.SUBOPTIMAL and pair_distances is not None:
        h_ij = int(anchor_hops[i][j])
        length = float(pair_distances[i][j])
        if h_ij >= 1 and np.isfinite(length) and length > 0:
            return RangeEstimate(estimate_suboptimal(length, h_ij, h_i),
                                 RangeMethod.SUBOPTIMAL_PER_HOP, pairing)
    return RangeEstimate(dvhop_range(float(dbar[i]), h_i), RangeMethod.DVHOP_FALLBACK, pairing)
