"""Normalized symmetric-difference distance between compatible sets.

Polygons are ``(N, 2)`` float arrays of counter-clockwise vertices.
"""

from __future__ import annotations

import numpy as np

from .compat_set import build, quadrant_polygon

CONVERGENCE_TOL = 1e-4
MAX_DOUBLINGS = 6


def polygon_area(poly) -> float:
    """Shoelace area (absolute value); 0 for fewer than three vertices."""
    p = np.asarray(poly, dtype=float).reshape(-1, 2)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) / 2


def _clip_halfplane(poly, p, q, eps):
    # keep the part of poly to the left of the directed line p -> q
    edge = q - p
    side = edge[0] * (poly[:, 1] - p[1]) - edge[1] * (poly[:, 0] - p[0])
    inside = side >= -eps
    if inside.all():
        return poly
    if not inside.any():
        return poly[:0]
    nxt_side = np.roll(side, -1)
    nxt_inside = np.roll(inside, -1)
    crossing = inside != nxt_inside
    with np.errstate(divide="ignore", invalid="ignore"):
        t = side / (side - nxt_side)
        cut = poly + t[:, None] * (np.roll(poly, -1, axis=0) - poly)
    # interleave: vertex i (if inside) then crossing on edge i (if any)
    cand = np.stack([poly, cut], axis=1).reshape(-1, 2)
    keep = np.stack([inside, crossing], axis=1).reshape(-1)
    return cand[keep]


def intersect(a, b, eps: float = 1e-14) -> np.ndarray:
    """Intersection of two convex CCW polygons by clipping ``a`` against every edge of ``b``."""
    out = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    if len(out) == 0 or len(b) == 0:
        return np.zeros((0, 2))
    for i in range(len(b)):
        p, q = b[i], b[(i + 1) % len(b)]
        if np.allclose(p, q, atol=0, rtol=0):
            continue
        out = _clip_halfplane(out, p, q, eps)
        if len(out) == 0:
            break
    return out


def _distance_at(S0, S1, n):
    # a fixed argument order makes the float result exactly symmetric
    if S1.params < S0.params:
        S0, S1 = S1, S0
    # Both sets are symmetric in the two axes, so the positive-quadrant
    # pieces carry exactly a quarter of every area involved.
    P0, P1 = quadrant_polygon(S0, n), quadrant_polygon(S1, n)
    a0, a1 = polygon_area(P0), polygon_area(P1)
    inter = polygon_area(intersect(P0, P1))
    union = a0 + a1 - inter
    big = max(a0, a1)
    if big == 0:
        return 0.0
    return max(union - inter, 0.0) / big


def symmetric_difference_distance(c0, c1, n: int = 4096, tol: float = CONVERGENCE_TOL) -> float:
    """``(Vol(S0 u S1) - Vol(S0 n S1)) / max(Vol(S0), Vol(S1))`` on inscribed polygons.

    ``n`` is doubled until the value moves by less than ``tol``.  When both
    sets have zero area they are both the segment ``[-1, 1] x {0}`` and the
    distance is 0.
    """
    if n < 64:
        raise ValueError("n must be at least 64")
    S0, S1 = build(c0), build(c1)
    if S0.area() == 0 and S1.area() == 0:
        return 0.0
    d = _distance_at(S0, S1, n)
    for _ in range(MAX_DOUBLINGS):
        n *= 2
        d_next = _distance_at(S0, S1, n)
        converged = abs(d_next - d) < tol
        d = d_next
        if converged:
            break
    return d
