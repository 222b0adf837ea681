"""Minimal-area channel inference and corroboration.

The compatible set grows monotonically in each of ``d2``, ``d3`` and ``c3``,
so for fixed ``(d3, c3)`` the cheapest admissible ``d2`` is the smallest one
whose set still contains every data point.  That value is found by bisection
and the remaining two-parameter problem is solved by a coarse grid followed
by a pattern search that polls a full square stencil and halves its step on
failure.  Infeasible points score ``+inf``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .compat_set import (
    Regime,
    area_arrays,
    build,
    contains,
    mu,
    regime,
    shape_ratio,
    upper_boundary_arrays,
)
from .correlation import Correlation, clamp_to_diamond, symmetrize, to_xy
from .errors import NoFeasibleChannel, NotConvergedWarning, ValidationError
from .qubit_model import CanonicalChannel, d1_feasible_interval

log = logging.getLogger(__name__)

BISECTION_STEPS = 48
N_SEEDS = 4

IDENTIFIED = {
    Regime.MU_NONPOSITIVE: ["c3", "d3"],
    Regime.MU_MIDDLE: ["d2", "d3", "c3"],
    Regime.MU_LARGE: ["d2", "(d2^2-d3^2)/c3^2"],
    Regime.PAULI_LIKE: ["max(d2,d3)"],
}


@dataclass
class InferenceConfig:
    grid_resolution: int = 33
    refine_tolerance: float = 1e-6
    membership_tolerance: float = 1e-9
    max_iterations: int = 10_000
    statistical_tolerance: bool = True
    """Widen each point's tolerance to two binomial standard errors when counts are known."""
    stencil_half_width: int = 8
    grid_seed: int | None = None
    """If set, the coarse grid is shifted by a random sub-cell offset."""

    def __post_init__(self):
        if self.grid_resolution < 2:
            raise ValidationError("grid_resolution must be >= 2")
        for name in ("refine_tolerance", "membership_tolerance", "max_iterations", "stencil_half_width"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "InferenceConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        unknown = set(d) - set(known)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)


@dataclass
class InferenceResult:
    channel: CanonicalChannel
    d1_interval: tuple[float, float]
    regime: Regime
    identified: list[str]
    objective: float
    iterations: int
    converged: bool
    mu: float | None = None
    tolerances: list[float] = field(default_factory=list, repr=False)


def identified_parameters(ch) -> list[str]:
    return list(IDENTIFIED[regime(ch)])


def corroborate(p: Correlation, ch: CanonicalChannel, tol: float = 1e-9) -> bool:
    """Whether the observed correlation lies in the channel's compatible set."""
    return contains(build(ch), to_xy(p), tol)


# -- objective ---------------------------------------------------------------


def _prepare(data, cfg):
    pts, tols = [], []
    for p in data:
        if isinstance(p, Correlation):
            x, y = to_xy(p)
            se = p.standard_errors() if cfg.statistical_tolerance else None
        else:
            x, y = p
            se = None
        x, y = symmetrize(clamp_to_diamond(x, y))
        tol = cfg.membership_tolerance
        if se is not None:
            tol = max(tol, 2 * se[0])
        pts.append((max(x - tol, 0.0), max(y - tol, 0.0)))
        tols.append(tol)
    if not pts:
        raise ValidationError("need at least one correlation")
    # the quadrant part of every set is a down-set: dominated points add nothing
    pts = np.unique(np.array(pts), axis=0)
    dominated = np.array([(np.all(pts >= p, axis=1) & np.any(pts > p, axis=1)).any() for p in pts])
    return pts[~dominated], tols


def _all_contained(pts, d2, d3, c3):
    x = pts[:, 0][:, None]
    y = pts[:, 1][:, None]
    up = upper_boundary_arrays(x, d2[None, :], d3[None, :], c3[None, :])
    return np.all((x <= 1) & (y <= up), axis=0)


def _cp_completable_arrays(d2, d3, c3):
    s2 = (1 - d3) ** 2 - c3**2
    t2 = (1 + d3) ** 2 - c3**2
    ok = (s2 >= 0) & (d3 <= 1)
    s = np.sqrt(np.maximum(s2, 0.0))
    t = np.sqrt(np.maximum(t2, 0.0))
    return ok & (d2 <= (s + t) / 2)


def minimal_d2(pts, d3, c3):
    """Smallest ``d2`` in ``[0, 1]`` whose set contains all ``pts`` (NaN if none)."""
    d3 = np.atleast_1d(np.asarray(d3, dtype=float))
    c3 = np.atleast_1d(np.asarray(c3, dtype=float))
    ok0 = _all_contained(pts, np.zeros_like(d3), d3, c3)
    ok1 = _all_contained(pts, np.ones_like(d3), d3, c3)
    lo, hi = np.zeros_like(d3), np.ones_like(d3)
    for _ in range(BISECTION_STEPS):
        mid = (lo + hi) / 2
        ok = _all_contained(pts, mid, d3, c3)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    d2 = np.where(ok0, 0.0, hi)
    return np.where(ok1, d2, np.nan)


def profiled_area(pts, d3, c3):
    """Area at the minimal admissible ``d2``; ``inf`` where no CP channel fits."""
    d3 = np.atleast_1d(np.asarray(d3, dtype=float))
    c3 = np.atleast_1d(np.asarray(c3, dtype=float))
    d2 = minimal_d2(pts, d3, c3)
    feasible = ~np.isnan(d2)
    d2f = np.where(feasible, d2, 1.0)
    feasible &= _cp_completable_arrays(d2f, d3, c3)
    return np.where(feasible, area_arrays(d2f, d3, c3), np.inf), d2f


def _order_key(vals, d3, c3):
    # smallest area, then smallest c3, then smallest d3
    return np.lexsort((d3, c3, vals))


# -- search --------------------------------------------------------------------


def _grid(cfg):
    n = cfg.grid_resolution
    axis = np.linspace(0.0, 1.0, n)
    d3, c3 = np.meshgrid(axis, axis, indexing="ij")
    d3, c3 = d3.ravel(), c3.ravel()
    if cfg.grid_seed is not None:
        rng = np.random.default_rng(cfg.grid_seed)
        shift = rng.uniform(0, 1 / (n - 1), size=2)
        d3 = np.clip(d3 + shift[0], 0, 1)
        c3 = np.clip(c3 + shift[1], 0, 1)
    return d3, c3


def _corner_seeds(pts):
    # optima often put the strip corner (c3, d3) on a data point, in a wedge
    # narrower than the grid spacing
    xs = np.unique(np.append(pts[:, 0], 0.0))
    ys = np.unique(np.append(pts[:, 1], 0.0))
    d3, c3 = np.meshgrid(ys, xs, indexing="ij")
    return d3.ravel(), c3.ravel()


def _pattern_search(pts, start, f_start, h, cfg, budget):
    m = cfg.stencil_half_width
    steps = np.arange(-m, m + 1)
    off = np.array([(i, j) for i in steps for j in steps if i or j], dtype=float)
    center, f = np.array(start, dtype=float), f_start
    iterations = 0
    while h >= cfg.refine_tolerance:
        if iterations >= budget:
            return center, f, iterations, False
        iterations += 1
        cand = np.clip(center + h * off, 0.0, 1.0)
        vals, _ = profiled_area(pts, cand[:, 0], cand[:, 1])
        best = _order_key(vals, cand[:, 0], cand[:, 1])[0]
        better = vals[best] < f or (
            vals[best] == f and (cand[best, 1], cand[best, 0]) < (center[1], center[0])
        )
        if better and np.isfinite(vals[best]):
            center, f = cand[best], vals[best]
        else:
            h /= 2
    return center, f, iterations, True


def _class_representative(d2, d3, c3, pts):
    """Move to the member of the equivalence class with smallest c3, then d3."""
    ch = CanonicalChannel(0.0, d2, d3, c3)
    r = regime(ch)
    cand = None
    if r is Regime.PAULI_LIKE:
        cand = (max(d2, d3), 0.0, 0.0)
    elif r is Regime.MU_LARGE and d3 > 0:
        ratio = shape_ratio(ch)
        d3_of = lambda c: math.sqrt(max(d2**2 - ratio * c**2, 0.0))  # noqa: E731
        lo = d2**2 / ratio
        if lo < c3 and d1_feasible_interval(d2, d3_of(lo), lo) is None:
            hi = c3
            for _ in range(60):
                mid = (lo + hi) / 2
                if d1_feasible_interval(d2, d3_of(mid), mid) is None:
                    lo = mid
                else:
                    hi = mid
            lo = hi
        if lo < c3:
            cand = (d2, d3_of(lo), lo)
    if cand is None:
        return d2, d3, c3
    ok = _all_contained(pts, *(np.array([v]) for v in cand))[0]
    if ok and d1_feasible_interval(*cand) is not None:
        return cand
    return d2, d3, c3


def dd_infer(data, cfg: InferenceConfig | None = None) -> InferenceResult:
    """Channel whose compatible set has minimal area among those containing ``data``.

    ``data`` holds :class:`Correlation` objects or raw ``(x, y)`` pairs.
    ``d1`` does not affect the set and is reported as its CP interval; the
    returned channel uses the upper end of that interval.
    """
    cfg = cfg or InferenceConfig()
    pts, tols = _prepare(data, cfg)

    d3g, c3g = (np.concatenate(a) for a in zip(_grid(cfg), _corner_seeds(pts)))
    vals, _ = profiled_area(pts, d3g, c3g)
    if not np.isfinite(vals).any():
        raise NoFeasibleChannel("no CP channel on the search grid contains the data")
    order = [i for i in _order_key(vals, d3g, c3g) if np.isfinite(vals[i])]

    h0 = 1.0 / (cfg.grid_resolution - 1)
    best = None
    iterations, converged = 0, True
    for i in order[:N_SEEDS]:
        budget = cfg.max_iterations - iterations
        pt, f, used, ok = _pattern_search(pts, (d3g[i], c3g[i]), vals[i], h0, cfg, budget)
        iterations += used
        converged &= ok
        if best is None or (f, pt[1], pt[0]) < (best[1], best[0][1], best[0][0]):
            best = (pt, f)
        if not ok:
            break

    (d3, c3), objective = best
    d2 = float(minimal_d2(pts, d3, c3)[0])
    d2, d3, c3 = _class_representative(d2, float(d3), float(c3), pts)
    interval = d1_feasible_interval(d2, d3, c3)
    if interval is None:
        raise NoFeasibleChannel(f"optimum ({d2}, {d3}, {c3}) admits no CP completion")
    ch = CanonicalChannel(interval[1], d2, d3, c3)
    if not converged:
        warnings.warn(f"pattern search stopped after {iterations} iterations", NotConvergedWarning)
    reg = regime(ch)
    log.debug("dd_infer: %s area=%.6g regime=%s iterations=%d", ch, objective, reg.value, iterations)
    return InferenceResult(
        channel=ch,
        d1_interval=interval,
        regime=reg,
        identified=list(IDENTIFIED[reg]),
        objective=float(area_arrays(d2, d3, c3)),
        iterations=iterations,
        converged=converged,
        mu=mu(ch),
        tolerances=tols,
    )
