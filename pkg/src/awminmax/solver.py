"""Weighted min-max residual localization by successive convex approximation.

The target problem is

    minimize_x  max_i  w_i * | ||x - a_i|| - dhat_i |

which is neither convex nor smooth. Splitting the absolute value, the
``||x - a_i|| - dhat_i <= t / w_i`` side is convex; the other side
``||x - a_i|| - dhat_i >= -t / w_i`` is not, and is tightened by replacing the
norm with its first-order expansion around the current iterate. Because the
linearisation never exceeds the norm, the resulting convex surrogate ``g_k``
majorises the true objective and touches it at the current iterate, so every
outer step is non-increasing in the true objective.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .dvhop import multilaterate_ls
from .exceptions import ConfigError, DegenerateGeometryError

logger = logging.getLogger(__name__)

INNER_METHODS = ("slsqp", "subgradient")


@dataclass(frozen=True)
class LocalizationProblem:
    anchors: np.ndarray
    dhat: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        anchors = np.asarray(self.anchors, dtype=float).reshape(-1, 2)
        dhat = np.asarray(self.dhat, dtype=float).ravel()
        w = np.asarray(self.w, dtype=float).ravel()
        if not len(anchors) == len(dhat) == len(w):
            raise ValueError("anchors, dhat and w must be aligned")
        if len(anchors) < 3:
            raise ValueError("a localization problem needs at least 3 anchors")
        if not (np.all(w > 0) and np.all(dhat > 0)):
            raise ValueError("weights and ranges must be positive")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "dhat", dhat)
        object.__setattr__(self, "w", w)

    def translated(self, v) -> "LocalizationProblem":
        return LocalizationProblem(self.anchors + np.asarray(v, float), self.dhat, self.w)


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-3
    max_outer_iters: int = 100
    sub_tol: float = 1e-6
    perturb: float = 1e-9
    inner: str = "slsqp"
    inner_max_iter: int = 5000

    def __post_init__(self):
        if not (self.epsilon > 0 and self.max_outer_iters > 0 and self.sub_tol > 0
                and self.perturb > 0 and self.inner_max_iter > 0):
            raise ConfigError("solver settings must all be positive")
        if self.inner not in INNER_METHODS:
            raise ConfigError(f"inner: unknown method {self.inner!r}")


@dataclass
class LocalizationOutcome:
    x_hat: np.ndarray
    t_final: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)


def objective(x, p: LocalizationProblem):
    """``max_i w_i |‖x - a_i‖ - dhat_i|``; ``x`` may carry leading batch axes."""
    x = np.asarray(x, dtype=float)
    diff = x[..., None, :] - p.anchors
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    return np.max(p.w * np.abs(r - p.dhat), axis=-1)


def _away_from_anchors(x, anchors, perturb):
    x = np.array(x, dtype=float)
    if np.min(np.hypot(*(anchors - x).T)) <= perturb:
        x[0] += perturb
    return x


def initial_guess(p: LocalizationProblem, perturb: float = 1e-9) -> np.ndarray:
    """Least-squares multilateration point, or the anchor centroid if degenerate."""
    try:
        x = multilaterate_ls(p.anchors, p.dhat)
    except DegenerateGeometryError:
        x = p.anchors.mean(axis=0)
    if not np.all(np.isfinite(x)):
        x = p.anchors.mean(axis=0)
    return _away_from_anchors(x, p.anchors, perturb)


class _Surrogate:
    """Convex majoriser of the objective built at the expansion point ``x0``."""

    def __init__(self, x0, p: LocalizationProblem):
        self.p = p
        self.x0 = np.asarray(x0, dtype=float)
        diff = self.x0 - p.anchors
        self.r0 = np.hypot(diff[:, 0], diff[:, 1])
        self.u0 = diff / self.r0[:, None]

    def pieces(self, x):
        p = self.p
        diff = x - p.anchors
        r = np.hypot(diff[:, 0], diff[:, 1])
        lin = self.r0 + self.u0 @ (x - self.x0)
        return p.w * (r - p.dhat), -p.w * (lin - p.dhat), diff, r

    def __call__(self, x) -> float:
        upper, lower, _, _ = self.pieces(np.asarray(x, dtype=float))
        return float(max(upper.max(), lower.max()))

    def subgradient(self, x) -> np.ndarray:
        upper, lower, diff, r = self.pieces(x)
        k_up, k_lo = int(np.argmax(upper)), int(np.argmax(lower))
        w = self.p.w
        if upper[k_up] >= lower[k_lo]:
            rk = r[k_up]
            return w[k_up] * diff[k_up] / rk if rk > 0 else np.zeros(2)
        return -w[k_lo] * self.u0[k_lo]


def _inner_slsqp(sur: _Surrogate, cfg: SolverConfig) -> np.ndarray:
    p = sur.p
    w, dhat = p.w, p.dhat

    def upper_con(z):
        diff = z[:2] - p.anchors
        return z[2] - w * (np.hypot(diff[:, 0], diff[:, 1]) - dhat)

    def upper_jac(z):
        diff = z[:2] - p.anchors
        r = np.maximum(np.hypot(diff[:, 0], diff[:, 1]), 1e-12)
        jac = np.empty((len(w), 3))
        jac[:, :2] = -w[:, None] * diff / r[:, None]
        jac[:, 2] = 1.0
        return jac

    def lower_con(z):
        return z[2] + w * (sur.r0 + sur.u0 @ (z[:2] - sur.x0) - dhat)

    lower_jac = np.column_stack([w[:, None] * sur.u0, np.ones(len(w))])

    z0 = np.append(sur.x0, sur(sur.x0))
    res = minimize(
        lambda z: z[2], z0, jac=lambda z: np.array([0.0, 0.0, 1.0]),
        method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": upper_con, "jac": upper_jac},
            {"type": "ineq", "fun": lower_con, "jac": lambda z: lower_jac},
        ],
        options={"maxiter": 200, "ftol": cfg.sub_tol * max(abs(z0[2]), 1e-3) * 1e-3},
    )
    return res.x[:2]


def _inner_subgradient(sur: _Surrogate, cfg: SolverConfig) -> np.ndarray:
    # Polyak steps towards a target level (variable target value method):
    # the target sits `gap` below the best value; sufficient progress resets
    # the travelled path, and exceeding the path budget halves the gap.
    x = sur.x0.copy()
    best_x, best = x.copy(), sur(x)
    gap = max(0.5 * best, 1e-3)
    level_ref = best
    budget = float(np.max(sur.r0))
    travelled = 0.0
    val = best
    for _ in range(cfg.inner_max_iter):
        if gap <= cfg.sub_tol * max(best, 1e-3):
            break
        if val <= level_ref - 0.5 * gap:
            level_ref, travelled = best, 0.0
        elif travelled > budget:
            gap *= 0.5
            level_ref, travelled = best, 0.0
            x = best_x.copy()
            val = best
        g = sur.subgradient(x)
        gn = float(g @ g)
        if gn == 0.0:
            break
        step = (val - (level_ref - gap)) / gn
        x = x - step * g
        travelled += step * math.sqrt(gn)
        val = sur(x)
        if val < best:
            best, best_x = val, x.copy()
    return best_x


def solve_subproblem(x0, p: LocalizationProblem, cfg: SolverConfig = SolverConfig()):
    """Minimise the convex surrogate built at ``x0``; returns ``(x, g(x))``.

    Never returns a point with a larger surrogate value than ``x0`` itself.
    The inner method sees weights scaled to a maximum of 1, so its absolute
    tolerances do not depend on the overall weight scale.
    """
    sur = _Surrogate(x0, p)
    start = sur(sur.x0)
    unit = _Surrogate(x0, LocalizationProblem(p.anchors, p.dhat, p.w / p.w.max()))
    solve = _inner_slsqp if cfg.inner == "slsqp" else _inner_subgradient
    try:
        x = solve(unit, cfg)
    except (ValueError, FloatingPointError) as exc:
        logger.debug("inner solver failed at %s: %s", x0, exc)
        x = sur.x0
    if not np.all(np.isfinite(x)):
        x = sur.x0
    t = sur(x)
    if t > start:
        return sur.x0.copy(), start
    return np.asarray(x, dtype=float), t


def sca_localize(p: LocalizationProblem, cfg: SolverConfig = SolverConfig(),
                 x0=None) -> LocalizationOutcome:
    """Iterate surrogate minimisation until the step is shorter than epsilon."""
    x = initial_guess(p, cfg.perturb) if x0 is None else _away_from_anchors(x0, p.anchors, cfg.perturb)
    history = [float(objective(x, p))]
    converged = False
    k = 0
    for k in range(1, cfg.max_outer_iters + 1):
        x_new, _ = solve_subproblem(x, p, cfg)
        x_new = _away_from_anchors(x_new, p.anchors, cfg.perturb)
        step = float(np.hypot(*(x_new - x)))
        x = x_new
        history.append(float(objective(x, p)))
        if step < cfg.epsilon:
            converged = True
            break
    return LocalizationOutcome(x, history[-1], k, converged, history)


def brute_force_oracle(p: LocalizationProblem, box, step: float) -> np.ndarray:
    """Exhaustive grid minimiser of the objective.

    ``box`` is ``(xmin, ymin, xmax, ymax)``. Ties go to the lexicographically
    smallest grid point (x first, then y).
    """
    if not step > 0:
        raise ValueError("step must be positive")
    xmin, ymin, xmax, ymax = map(float, box)
    xs = xmin + step * np.arange(int(np.floor((xmax - xmin) / step + 1e-9)) + 1)
    ys = ymin + step * np.arange(int(np.floor((ymax - ymin) / step + 1e-9)) + 1)
    best_val, best = np.inf, None
    chunk = max(1, 2_000_000 // (len(ys) * len(p.anchors)))
    for start in range(0, len(xs), chunk):
        gx, gy = np.meshgrid(xs[start:start + chunk], ys, indexing="ij")
        vals = objective(np.stack([gx, gy], axis=-1), p)
        k = int(np.argmin(vals))
        v = vals.flat[k]
        if v < best_val:
            best_val = v
            best = np.array([gx.flat[k], gy.flat[k]])
    return best
