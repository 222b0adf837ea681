"""Set of correlations a dihedrally covariant channel can produce.

In the positive quadrant the set is bounded above by

* ``y = d3`` on the strip ``x <= c3`` when ``d2 <= d3``, or
* the ellipse ``y**2 = d2**2 - k2 x**2`` with ``k2 = (d2**2 - d3**2) / c3**2``
  cut at ``x = c3`` when ``d2 > d3``,

closed off by the convex hull with ``(1, 0)``: a straight segment from the
strip corner ``(c3, d3)`` or, when the tangent from ``(1, 0)`` touches the
ellipse inside the strip, from that tangency point.  The full set follows by
reflection in both axes.

The ``*_arrays`` helpers broadcast over numpy arrays of parameters; the
inference grid relies on them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .correlation import XYPoint, symmetrize
from .errors import OutsideStrip, UnboundedViolation
from .qubit_model import CanonicalChannel, require_cp

TANGENCY_TOL = 1e-12
STRIP_TOL = 1e-12


class Kind(str, enum.Enum):
    RECTANGLE_LIKE = "RectangleLike"
    ELLIPSE_CORNER = "EllipseCorner"
    ELLIPSE_TANGENT = "EllipseTangent"
    SEGMENT = "Segment"


# -- vectorized geometry -----------------------------------------------------


def _as_float_arrays(*args):
    return np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))


def upper_boundary_arrays(x, d2, d3, c3):
    """Upper boundary ``y(x)`` of the set for ``0 <= x <= 1`` (negative past ``x = 1``)."""
    x, d2, d3, c3 = _as_float_arrays(x, d2, d3, c3)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.maximum(d2, d3)
        segment = m * (1 - x)
        corner_line = np.where(c3 < 1, d3 * (1 - x) / (1 - c3), d3)
        rect = np.where(x <= c3, d3, corner_line)

        k2 = (d2**2 - d3**2) / c3**2
        ell = np.sqrt(np.maximum(d2**2 - k2 * x**2, 0.0))
        xt = d2**2 / k2
        corner = np.where(x <= c3, ell, corner_line)
        yt = d2 * np.sqrt(np.maximum(1 - xt, 0.0))
        tangent = np.where(x <= xt, ell, yt * (1 - x) / (1 - xt))
        ellipse = np.where(xt >= c3 - TANGENCY_TOL, corner, tangent)

        out = np.where(c3 <= 0, segment, np.where(d2 <= d3, rect, ellipse))
    return out


def _arc_integral(X, d2, k2):
    # int_0^X sqrt(d2^2 - k2 t^2) dt
    k = np.sqrt(k2)
    ell = np.sqrt(np.maximum(d2**2 - k2 * X**2, 0.0))
    ratio = np.clip(k * X / d2, -1.0, 1.0)
    return X * ell / 2 + d2**2 / (2 * k) * np.arcsin(ratio)


def area_arrays(d2, d3, c3):
    """Closed-form area of the full (four-quadrant) set."""
    d2, d3, c3 = _as_float_arrays(d2, d3, c3)
    with np.errstate(divide="ignore", invalid="ignore"):
        segment = 2 * np.maximum(d2, d3)
        rect = 2 * d3 * (1 + c3)

        k2 = (d2**2 - d3**2) / c3**2
        xt = d2**2 / k2
        corner = 4 * (_arc_integral(c3, d2, k2) + (1 - c3) * d3 / 2)
        xt_in = np.minimum(xt, 1.0)
        yt = d2 * np.sqrt(np.maximum(1 - xt_in, 0.0))
        tangent = 4 * (_arc_integral(xt_in, d2, k2) + (1 - xt_in) * yt / 2)
        ellipse = np.where(xt >= c3 - TANGENCY_TOL, corner, tangent)

        out = np.where(c3 <= 0, segment, np.where(d2 <= d3, rect, ellipse))
    return out


def contains_arrays(xs, ys, d2, d3, c3, tol=1e-9):
    """Membership of points (any quadrant) with a per-coordinate tolerance.

    The quadrant part of the set is a down-set, so a point passes if moving
    it towards the origin by ``tol`` in each coordinate lands inside.
    """
    xs, ys = np.abs(np.asarray(xs, dtype=float)), np.abs(np.asarray(ys, dtype=float))
    x = np.maximum(xs - tol, 0.0)
    y = np.maximum(ys - tol, 0.0)
    return (x <= 1) & (y <= upper_boundary_arrays(x, d2, d3, c3))


# -- scalar API --------------------------------------------------------------


@dataclass(frozen=True)
class CompatibleSet:
    d2: float
    d3: float
    c3: float
    q_xx: float
    q_yy: float
    kind: Kind
    corner: XYPoint
    """Where the hull segment to ``(1, 0)`` leaves the curved/flat part."""

    @property
    def params(self):
        return self.d2, self.d3, self.c3

    @property
    def top(self) -> float:
        return max(self.d2, self.d3)

    def upper(self, x):
        return upper_boundary_arrays(x, *self.params)

    def area(self) -> float:
        return area(self)

    def contains(self, pt, tol: float = 1e-9) -> bool:
        return contains(self, pt, tol)


def build(ch: CanonicalChannel, check_cp: bool = True) -> CompatibleSet:
    if check_cp:
        require_cp(ch)
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if c3 <= 0:
        m = max(d2, d3)
        q_yy = 1 / m**2 if m > 0 else math.inf
        return CompatibleSet(d2, d3, c3, math.inf, q_yy, Kind.SEGMENT, XYPoint(0.0, m))
    if d2 <= d3:
        q_yy = 1 / d3**2 if d3 > 0 else math.inf
        return CompatibleSet(d2, d3, c3, 0.0, q_yy, Kind.RECTANGLE_LIKE, XYPoint(c3, d3))
    k2 = (d2**2 - d3**2) / c3**2
    xt = tangency_abscissa(ch)
    q_xx, q_yy = k2 / d2**2, 1 / d2**2
    if xt >= c3 - TANGENCY_TOL:
        kind, corner = Kind.ELLIPSE_CORNER, XYPoint(c3, d3)
        m = mu(ch)
        assert m is None or m <= 1 + 1e-9, (ch, m)
    else:
        kind = Kind.ELLIPSE_TANGENT
        corner = XYPoint(xt, d2 * math.sqrt(max(1 - xt, 0.0)))
        m = mu(ch)
        assert m is None or m >= 1 - 1e-9, (ch, m)
    return CompatibleSet(d2, d3, c3, q_xx, q_yy, kind, corner)


def tangency_abscissa(ch) -> float:
    """Abscissa where the tangent from ``(1, 0)`` touches the ellipse (``d2 > d3``)."""
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if d2 <= d3:
        return math.inf
    return d2**2 * c3**2 / (d2**2 - d3**2)


def mu(ch) -> float | None:
    """Regime function ``(1 - c3) / c3 * (d2^2 - d3^2) / d3^2``; ``None`` if undefined."""
    if ch.c3 == 0 or ch.d3 == 0:
        return None
    return (1 - ch.c3) / ch.c3 * (ch.d2**2 - ch.d3**2) / ch.d3**2


def boundary_y(x: float, ch, tol: float = STRIP_TOL) -> float:
    """Upper edge of the ellipse/strip part at ``|x| <= c3``."""
    x = abs(x)
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if x > c3 + tol:
        raise OutsideStrip(f"|x|={x} exceeds c3={c3}")
    if c3 == 0:
        return max(d2, d3)
    x = min(x, c3)
    if d2 <= d3:
        return d3
    return math.sqrt(max(d2**2 * c3**2 - (d2**2 - d3**2) * x**2, 0.0)) / c3


def contains(S: CompatibleSet, pt, tol: float = 1e-9) -> bool:
    x, y = symmetrize(pt)
    return bool(contains_arrays(x, y, *S.params, tol=tol))


def area(S: CompatibleSet) -> float:
    return float(area_arrays(*S.params))


# -- witnesses ---------------------------------------------------------------


def lambda_omega(omega: float, ch) -> float:
    """Largest output Bloch length ``max_|v|<=1 |D v + omega c|``."""
    if omega < 0:
        raise ValueError("omega must be non-negative")
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if c3 == 0:
        return max(d2, d3)
    if d2 <= d3:
        return d3 + c3 * omega
    omega0 = (d2**2 - d3**2) / (d3 * c3) if d3 > 0 else math.inf
    if omega >= omega0:
        return d3 + c3 * omega
    return d2 * math.sqrt(1 + c3**2 * omega**2 / (d2**2 - d3**2))


def lambda_omega_derivative(omega: float, ch) -> float:
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if c3 == 0:
        return 0.0
    if d2 <= d3:
        return c3
    omega0 = (d2**2 - d3**2) / (d3 * c3) if d3 > 0 else math.inf
    if omega >= omega0:
        return c3
    g = d2**2 - d3**2
    return d2 * c3**2 * omega / math.sqrt(g * (c3**2 * omega**2 + g))


def omega_threshold(ch) -> float:
    """Branch point ``(d2^2 - d3^2) / (d3 c3)`` of the length function."""
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if d3 == 0 or c3 == 0:
        return math.inf
    return (d2**2 - d3**2) / (d3 * c3)


def witness_threshold(omega: float, ch) -> float:
    return (1 + lambda_omega(omega, ch)) / 2


def trivial_crossover(ch) -> float:
    """Smallest ``omega`` where the constant decoding (point ``(1, 0)``) wins."""
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    m = max(d2, d3)
    if c3 == 0:
        return m
    if c3 >= 1:
        return 0.0 if m == 0 else math.inf
    if d2 > d3:
        xt = tangency_abscissa(ch)
        if xt < c3 - TANGENCY_TOL:
            return d2 / math.sqrt(1 - xt)
    return d3 / (1 - c3)


def _witness_argmax(x: float, ch) -> float:
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if x > c3:
        return math.inf
    if c3 == 0 or d2 <= d3:
        return 0.0
    g = d2**2 - d3**2
    root = c3**2 * d2**2 - g * x**2
    if root <= 0:
        return math.inf
    return g * x / (c3 * math.sqrt(root))


def witness_max_violation(pt, ch, include_trivial: bool = True) -> tuple[float, float]:
    """Maximum over ``omega >= 0`` of ``y + omega x - threshold``.

    Returns ``(violation, omega_star)``; the point is compatible iff the
    violation is ``<= 0``.  With ``include_trivial`` (default) the threshold
    also accounts for the constant decodings that produce ``(+-1, 0)``, so the
    test covers the whole hull.  Without it only the ellipse/strip part is
    tested and points with ``x > c3`` raise :class:`UnboundedViolation`.
    """
    x, y = symmetrize(pt)
    omega_e = _witness_argmax(x, ch)
    if not include_trivial:
        if math.isinf(omega_e) and x > ch.c3 + STRIP_TOL:
            raise UnboundedViolation(f"witness unbounded for x={x} >= c3={ch.c3}")
        if math.isinf(omega_e):
            # x == c3 and the supremum is only approached: it equals y - d3
            return y - ch.d3, omega_e
        return y + omega_e * x - lambda_omega(omega_e, ch), omega_e
    omega_star = min(omega_e, trivial_crossover(ch))
    if math.isinf(omega_star):
        return y - ch.d3, omega_star
    bound = max(lambda_omega(omega_star, ch), omega_star)
    return y + omega_star * x - bound, omega_star


# -- optimal strategies --------------------------------------------------------


def _check_strip(x, ch):
    if ch.c3 <= 0 or abs(x) >= ch.c3:
        raise OutsideStrip(f"need |x| < c3, got x={x}, c3={ch.c3}")


def optimal_encoding(x: float, ch) -> np.ndarray:
    """Bloch vector ``v`` of the encoding pair ``rho_{+v}, rho_{-v}`` reaching the boundary at ``x``."""
    _check_strip(x, ch)
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if d2 <= d3:
        return np.array([0.0, 0.0, 1.0 if x >= 0 else -1.0])
    r = math.sqrt(c3**2 - x**2)
    v = np.array([0.0, d2 * r, d3 * x])
    return v / np.linalg.norm(v)


def optimal_decoding(x: float, ch) -> np.ndarray:
    """Bloch vector ``u`` of the measurement ``{rho_u, rho_-u}`` reaching the boundary at ``x``."""
    _check_strip(x, ch)
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if d2 <= d3:
        return np.array([0.0, 0.0, 1.0 if x >= 0 else -1.0])
    return np.array([0.0, math.sqrt(c3**2 - x**2), x]) / c3


# -- polygons ----------------------------------------------------------------


def quadrant_chain(S: CompatibleSet, k: int) -> np.ndarray:
    """Boundary from ``(1, 0)`` to ``(0, top)`` with ``k`` interior vertices."""
    top = S.top
    if k <= 0:
        return np.array([[1.0, 0.0], [0.0, top]])
    if S.kind is Kind.SEGMENT:
        t = np.arange(1, k + 1) / (k + 1)
        inner = np.column_stack([1 - t, top * t])
    else:
        jx, jy = S.corner
        rest = k - 1
        if S.kind is Kind.RECTANGLE_LIKE:
            xs = jx * (1 - np.arange(1, rest + 1) / (rest + 1))
            arc = np.column_stack([xs, np.full(rest, S.d3)])
        else:
            d2, d3, c3 = S.params
            a = d2 * c3 / math.sqrt(d2**2 - d3**2)
            theta0 = math.acos(min(jx / a, 1.0))
            theta = theta0 + (math.pi / 2 - theta0) * np.arange(1, rest + 1) / (rest + 1)
            arc = np.column_stack([a * np.cos(theta), d2 * np.sin(theta)])
        inner = np.vstack([[jx, jy], arc])
    return np.vstack([[1.0, 0.0], inner, [0.0, top]])


def polygon_of(S: CompatibleSet, n: int = 4096) -> np.ndarray:
    """Inscribed convex polygon, counter-clockwise from ``(1, 0)``.

    Uses ``4 + 4 * ((n - 4) // 4)`` vertices: the four axis points, and per
    quadrant the corner or tangency point plus arc samples equally spaced in
    the ellipse angle.
    """
    if n < 4:
        raise ValueError("need at least 4 vertices")
    k = (n - 4) // 4
    q1 = quadrant_chain(S, k)
    inner = q1[1:-1]
    top = q1[-1]
    parts = [
        q1[:1],
        inner,
        [top],
        (inner * [-1, 1])[::-1],
        [[-1.0, 0.0]],
        inner * [-1, -1],
        [top * [1, -1]],
        (inner * [1, -1])[::-1],
    ]
    return np.vstack([np.asarray(p, dtype=float).reshape(-1, 2) for p in parts])


def quadrant_polygon(S: CompatibleSet, n: int = 4096) -> np.ndarray:
    """Part of :func:`polygon_of` in the closed positive quadrant (includes the origin)."""
    k = max((n - 4) // 4, 0)
    return np.vstack([[[0.0, 0.0]], quadrant_chain(S, k)])


# -- equivalence classes -------------------------------------------------------


class Regime(str, enum.Enum):
    MU_NONPOSITIVE = "MuNonpositive"
    MU_MIDDLE = "MuMiddle"
    MU_LARGE = "MuLarge"
    PAULI_LIKE = "PauliLike"


def regime(ch, tol: float = 1e-9) -> Regime:
    """Classify by ``mu``; ``d3 = 0 < d2, c3`` counts as ``mu = +inf``."""
    d2, d3, c3 = ch.d2, ch.d3, ch.c3
    if c3 <= tol or max(d2, d3) <= tol:
        return Regime.PAULI_LIKE
    if d3 <= tol:
        return Regime.MU_LARGE
    m = mu(ch)
    if m <= tol:
        return Regime.MU_NONPOSITIVE
    if m < 1 - tol:
        return Regime.MU_MIDDLE
    return Regime.MU_LARGE


def shape_ratio(ch) -> float:
    """``(d2^2 - d3^2) / c3^2``, the squared ellipse slope parameter."""
    return (ch.d2**2 - ch.d3**2) / ch.c3**2


def indistinguishable(c, c2, tol: float = 1e-9) -> bool:
    """Whether two channels have the same compatible set, by regime invariants."""
    r1, r2 = regime(c, tol), regime(c2, tol)
    if r1 is not r2:
        return False
    close = lambda a, b: abs(a - b) <= tol  # noqa: E731
    if r1 is Regime.PAULI_LIKE:
        # with c3 > 0 this regime only holds d2 = d3 = 0, the bare x-axis
        return close(max(c.d2, c.d3), max(c2.d2, c2.d3))
    if r1 is Regime.MU_NONPOSITIVE:
        return close(c.d3, c2.d3) and close(c.c3, c2.c3)
    if r1 is Regime.MU_MIDDLE:
        return close(c.d2, c2.d2) and close(c.d3, c2.d3) and close(c.c3, c2.c3)
    return close(c.d2, c2.d2) and close(shape_ratio(c), shape_ratio(c2))
