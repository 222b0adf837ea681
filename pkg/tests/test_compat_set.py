import math

import numpy as np
import pytest
from conftest import C_DD, C_T, random_cp_channel
from scipy.spatial import ConvexHull

from ddinfer.compat_set import (
    Kind,
    Regime,
    area,
    boundary_y,
    build,
    contains,
    contains_arrays,
    indistinguishable,
    lambda_omega,
    lambda_omega_derivative,
    mu,
    omega_threshold,
    optimal_decoding,
    optimal_encoding,
    polygon_of,
    quadrant_polygon,
    regime,
    tangency_abscissa,
    witness_max_violation,
    witness_threshold,
)
from ddinfer.errors import NotCompletelyPositive, OutsideStrip, UnboundedViolation
from ddinfer.metrics import polygon_area
from ddinfer.qubit_model import DEPOLARIZER, IDENTITY, CanonicalChannel, amplitude_damping, cp_completable

A_HALF = amplitude_damping(0.5)
RECT = CanonicalChannel(0.3, 0.3, 0.5, 0.2)


def fibonacci_sphere(n):
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    phi = math.pi * (1 + 5**0.5) * i
    r = np.sqrt(1 - z**2)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def hull_area_oracle(ch, n=20_000):
    """Area of conv[(+-1, 0), E] from dense samples of E's boundary."""
    d2, d3, c3 = ch.params
    xs = np.linspace(-c3, c3, n)
    ys = np.array([boundary_y(x, ch) for x in xs])
    pts = np.vstack([np.column_stack([xs, ys]), np.column_stack([xs, -ys]), [[1, 0], [-1, 0]]])
    return ConvexHull(pts).volume


# -- boundary and classification ---------------------------------------------------


def test_boundary_y_examples():
    assert boundary_y(C_DD.c3, C_DD) == pytest.approx(C_DD.d3)
    assert boundary_y(0, C_DD) == pytest.approx(C_DD.d2)
    for x in (0, 0.1, 0.2):
        assert boundary_y(x, RECT) == 0.5
    with pytest.raises(OutsideStrip):
        boundary_y(0.3, RECT)


def test_build_examples():
    S = build(IDENTITY)
    assert S.kind is Kind.SEGMENT and S.top == 1 and area(S) == pytest.approx(2)
    assert build(C_DD).kind is Kind.ELLIPSE_CORNER
    S = build(DEPOLARIZER)
    assert S.kind is Kind.SEGMENT and area(S) == 0
    assert build(RECT).kind is Kind.RECTANGLE_LIKE
    with pytest.raises(NotCompletelyPositive):
        build(CanonicalChannel(1, 1, 1, 0.1))


def test_q_matrix():
    S = build(RECT)
    assert (S.q_xx, S.q_yy) == pytest.approx((0, 1 / 0.25))
    S = build(C_DD)
    d2, d3, c3 = C_DD.params
    assert (S.q_xx, S.q_yy) == pytest.approx(((d2**2 - d3**2) / (d2**2 * c3**2), 1 / d2**2))


def test_mu_examples():
    # mpmath reference values
    assert mu(C_DD) == pytest.approx(0.995933682741489, abs=1e-12)
    assert mu(C_T) == pytest.approx(0.936075554779557, abs=1e-12)
    assert mu(CanonicalChannel(0.5, 0.6, 0.3, 0)) is None
    assert mu(CanonicalChannel(0.3, 0.4, 0.4, 0.3)) == 0


def test_corner_iff_mu_at_most_one(rng):
    for _ in range(2000):
        ch = random_cp_channel(rng)
        m = mu(ch)
        if ch.d2 <= ch.d3 or m is None or abs(m - 1) < 1e-9:
            continue
        assert (build(ch).kind is Kind.ELLIPSE_CORNER) == (m <= 1)
        assert (tangency_abscissa(ch) >= ch.c3) == (m <= 1)


def test_kind_at_mu_one_coincides():
    # A_{1/2} has mu = 1: the tangency point is the strip corner
    assert mu(A_HALF) == pytest.approx(1)
    assert tangency_abscissa(A_HALF) == pytest.approx(A_HALF.c3)


# -- membership ----------------------------------------------------------------------


def test_contains_examples():
    assert contains(build(IDENTITY), (0.7, 0.29))
    assert contains(build(A_HALF), (0.5, 0.5))
    assert not contains(build(A_HALF), (0.5, 0.5 + 1e-6))
    assert not contains(build(DEPOLARIZER), (0, 0.01))
    assert contains(build(DEPOLARIZER), (0.9, 0))


def test_contains_symmetry(rng):
    for _ in range(100):
        S = build(random_cp_channel(rng))
        for x, y in rng.uniform(-1, 1, (20, 2)):
            c = contains(S, (x, y))
            assert c == contains(S, (-x, y)) == contains(S, (x, -y)) == contains(S, (-x, -y))


def test_contains_matches_hull_oracle(rng):
    for _ in range(20):
        ch = random_cp_channel(rng)
        if ch.c3 == 0:
            continue
        d2, d3, c3 = ch.params
        xs = np.linspace(-c3, c3, 2000)
        ys = np.array([boundary_y(x, ch) for x in xs])
        pts = np.vstack([np.column_stack([xs, ys]), np.column_stack([xs, -ys]), [[1, 0], [-1, 0]]])
        hull = ConvexHull(pts)
        q = rng.uniform(-1, 1, (500, 2))
        # signed distances to the oracle hull facets
        dist = (hull.equations[:, :2] @ q.T + hull.equations[:, 2:]).max(axis=0)
        got = contains_arrays(q[:, 0], q[:, 1], d2, d3, c3, tol=0)
        clear = np.abs(dist) > 1e-4
        assert np.array_equal(got[clear], (dist <= 0)[clear])


# -- witnesses ------------------------------------------------------------------------


def test_lambda_examples():
    assert lambda_omega(0, C_DD) == pytest.approx(C_DD.d2)
    assert lambda_omega(0, RECT) == pytest.approx(RECT.d3)
    big = 1e3
    assert lambda_omega(big, C_DD) == pytest.approx(C_DD.d3 + C_DD.c3 * big)
    assert lambda_omega(3.0, CanonicalChannel(0.5, 0.6, 0.3, 0)) == 0.6


def test_lambda_brute_force(rng):
    v = fibonacci_sphere(10_000)
    for _ in range(50):
        ch = random_cp_channel(rng)
        D = np.array([ch.d1, ch.d2, ch.d3])
        w0 = omega_threshold(ch)
        for omega in (0.0, 0.3, 1.0, 2.5, w0 if 0 <= w0 < math.inf else 0.7):
            bf = np.linalg.norm(v * D + omega * np.array([0, 0, ch.c3]), axis=1).max()
            lam = lambda_omega(omega, ch)
            assert bf <= lam + 1e-12
            assert bf >= lam - 2e-3


def test_lambda_continuity_at_threshold(rng):
    checked = 0
    for _ in range(500):
        ch = random_cp_channel(rng)
        w0 = omega_threshold(ch)
        if ch.d2 <= ch.d3 or not math.isfinite(w0):
            continue
        eps = 1e-12
        assert lambda_omega(w0 - eps * w0, ch) == pytest.approx(lambda_omega(w0, ch), abs=1e-9)
        assert lambda_omega_derivative(w0 - eps * w0, ch) == pytest.approx(lambda_omega_derivative(w0, ch), abs=1e-9)
        checked += 1
    assert checked > 50


def test_witness_threshold_examples():
    assert witness_threshold(0, IDENTITY) == 1
    assert witness_threshold(0, DEPOLARIZER) == 0.5
    assert omega_threshold(A_HALF) == pytest.approx(1)
    assert witness_threshold(1, A_HALF) == pytest.approx(1)


def test_witness_examples():
    v, w = witness_max_violation((0, C_DD.d2), C_DD)
    assert v == pytest.approx(0, abs=1e-12) and w == 0
    for ch in (C_DD, A_HALF, RECT, IDENTITY):
        v, w = witness_max_violation((0, 0), ch)
        assert v == pytest.approx(-lambda_omega(w, ch))
    v, _ = witness_max_violation((0.5, 0.5), A_HALF)
    assert v == pytest.approx(0, abs=1e-12)


def test_witness_agrees_with_contains(rng):
    for _ in range(200):
        ch = random_cp_channel(rng)
        S = build(ch)
        for x, y in rng.uniform(-1, 1, (50, 2)):
            if abs(x) + abs(y) > 1:
                continue
            viol, w = witness_max_violation((x, y), ch)
            band = 1e-9 * (1 + min(w, 1e6))
            if abs(viol) <= band:
                continue
            assert contains(S, (x, y), tol=0) == (viol <= 0)


def test_ellipse_only_witness_matches_strip_membership(rng):
    for _ in range(200):
        ch = random_cp_channel(rng)
        if ch.c3 == 0:
            continue
        for _ in range(20):
            x = rng.uniform(0, ch.c3 * (1 - 1e-6))
            y = rng.uniform(0, 1)
            viol, _ = witness_max_violation((x, y), ch, include_trivial=False)
            in_e = y <= boundary_y(x, ch)
            if abs(y - boundary_y(x, ch)) > 1e-9:
                assert (viol <= 0) == in_e


def test_ellipse_only_witness_unbounded_outside_strip():
    with pytest.raises(UnboundedViolation):
        witness_max_violation((0.6, 0.1), A_HALF, include_trivial=False)
    # the full witness stays finite and accepts the hull point
    viol, _ = witness_max_violation((0.6, 0.1), A_HALF)
    assert viol <= 0


# -- optimal strategies ------------------------------------------------------------------


def born_point(ch, v, u):
    q = ch.to_qubit_channel()
    p1 = (1 + u @ (q.A @ v + q.b)) / 2
    p2 = (1 + u @ (-q.A @ v + q.b)) / 2
    return p1 + p2 - 1, p1 - p2


def test_optimal_strategies_reach_boundary(rng):
    for _ in range(100):
        ch = random_cp_channel(rng)
        if ch.c3 == 0 or ch.d2 <= ch.d3:
            continue
        for x in rng.uniform(-ch.c3, ch.c3, 5):
            v, u = optimal_encoding(x, ch), optimal_decoding(x, ch)
            assert np.linalg.norm(v) == pytest.approx(1) and np.linalg.norm(u) == pytest.approx(1)
            assert born_point(ch, v, u) == pytest.approx((x, boundary_y(x, ch)), abs=1e-9)


def test_optimal_strategy_examples():
    v = optimal_encoding(0.1, RECT)
    assert np.allclose(v, [0, 0, 1])
    assert np.allclose(optimal_encoding(0, C_DD), [0, 1, 0])
    assert np.allclose(optimal_decoding(0, C_DD), [0, 1, 0])
    u = optimal_decoding(C_DD.c3 * (1 - 1e-12), C_DD)
    assert np.allclose(u, [0, 0, 1], atol=1e-5)
    with pytest.raises(OutsideStrip):
        optimal_encoding(0.6, A_HALF)


# -- area and polygons -----------------------------------------------------------------


def test_area_examples():
    assert area(build(IDENTITY)) == pytest.approx(2)
    assert area(build(RECT)) == pytest.approx(1.2)
    assert area(build(DEPOLARIZER)) == 0
    # mpmath quadrature of the hull boundary
    assert area(build(A_HALF)) == pytest.approx(1 + math.pi / 4, abs=1e-14)
    assert area(build(C_T)) == pytest.approx(1.538909004755429, abs=1e-12)
    assert area(build(C_DD)) == pytest.approx(1.518035030406832, abs=1e-12)


def test_area_matches_hull_oracle(rng):
    for _ in range(30):
        ch = random_cp_channel(rng)
        if ch.c3 == 0:
            continue
        assert area(build(ch)) == pytest.approx(hull_area_oracle(ch), abs=1e-6)


def test_polygon_area_converges_from_below(rng):
    for _ in range(30):
        S = build(random_cp_channel(rng))
        a = [polygon_area(polygon_of(S, n)) for n in (64, 256, 4096)]
        assert a[0] <= a[1] + 1e-12 <= a[2] + 2e-12 <= area(S) + 3e-12
        assert a[2] == pytest.approx(area(S), abs=1e-6)
        assert polygon_area(quadrant_polygon(S, 4096)) * 4 == pytest.approx(a[2], abs=1e-12)


def test_polygon_examples():
    P = polygon_of(build(IDENTITY), 4)
    assert {tuple(p) for p in P} == {(1, 0), (0, 1), (-1, 0), (0, -1)}
    P = polygon_of(build(RECT), 8)
    assert len(P) == 8
    assert polygon_area(P) == pytest.approx(1.2)


def test_polygon_is_ccw_and_convex(rng):
    for _ in range(20):
        P = polygon_of(build(random_cp_channel(rng)), 256)
        e = np.roll(P, -1, axis=0) - P
        cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        assert np.all(cross >= -1e-12)


def test_area_monotone_in_d3(rng):
    checked = 0
    for _ in range(300):
        ch = random_cp_channel(rng)
        bigger = CanonicalChannel(0, ch.d2, min(ch.d3 + rng.uniform(0, 0.2), 1), ch.c3)
        if bigger.d3 == ch.d3 or not cp_completable(*bigger.params):
            continue
        assert area(build(bigger, check_cp=False)) >= area(build(ch)) - 1e-15
        checked += 1
    assert checked > 50


# -- regimes and equivalence ----------------------------------------------------------


def test_regimes():
    assert regime(C_DD) is Regime.MU_MIDDLE
    assert regime(CanonicalChannel(0.5, 0.6, 0.3, 0)) is Regime.PAULI_LIKE
    assert regime(CanonicalChannel(0.3, 0.4, 0.4, 0.3)) is Regime.MU_NONPOSITIVE
    assert regime(CanonicalChannel(0.5, 0.6, 0.2, 0.3)) is Regime.MU_LARGE


def test_indistinguishable_examples():
    assert indistinguishable(C_DD, C_DD)
    assert indistinguishable(CanonicalChannel(0.6, 0.6, 0.3, 0), CanonicalChannel(0.5, 0.6, 0.5, 0))
    assert not indistinguishable(CanonicalChannel(0.6, 0.6, 0.3, 0), CanonicalChannel(0.4, 0.5, 0.4, 0))
    assert indistinguishable(CanonicalChannel(0.3, 0.6, 0.3, 0), CanonicalChannel(0.3, 0.5, 0.6, 0))
    a = CanonicalChannel(0.6, 0.6, 0.2, 0.3)
    ratio = (0.6**2 - 0.2**2) / 0.3**2
    b = CanonicalChannel(0.6, 0.6, math.sqrt(0.36 - ratio * 0.25**2), 0.25)
    assert regime(a) is regime(b) is Regime.MU_LARGE
    assert indistinguishable(a, b)
    assert not indistinguishable(a, C_DD)
