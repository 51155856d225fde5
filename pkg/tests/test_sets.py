import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rvwalk.errors import (
    ConeViolationError,
    InvalidEpsilonError,
    MissingBoundError,
    UnsupportedShapeError,
)
from rvwalk.sets import (
    BallComplement,
    Box,
    CHull,
    ConeComplementK,
    EmptySet,
    Exceedance,
    Generic,
    HalfSpace,
    IntervalUnion,
    ScaleUnion,
    c_hull,
    default_cone_delta,
    drift_hull,
    scale_union,
)

INF = math.inf
E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def unit_rays(rng, d, n):
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def probe_radii(sec: IntervalUnion, rng):
    """Radii strictly inside each interval and strictly inside each gap."""
    inside, outside = [], []
    prev = 0.0
    for lo, hi in sec:
        if lo > prev:
            outside.append(rng.uniform(prev, lo) if prev > 0 else lo * rng.uniform(0.05, 0.95))
        top = hi if math.isfinite(hi) else lo * 4 + 4
        inside.append(rng.uniform(lo, top))
        prev = hi
    if not sec:
        outside.append(rng.uniform(0.01, 50.0))
    elif math.isfinite(prev):
        outside.append(prev * rng.uniform(1.05, 3.0))
    return inside, outside


def assert_sections_match_membership(A, d, n_rays=1000, seed=0):
    rng = np.random.default_rng(seed)
    for theta in unit_rays(rng, d, n_rays):
        sec = A.ray_section(theta)
        inside, outside = probe_radii(sec, rng)
        for r in inside:
            assert A.contains(r * theta), (A, theta, r, sec)
        for r in outside:
            assert not A.contains(r * theta), (A, theta, r, sec)


# ---------------------------------------------------------------------------
# interval unions


def test_interval_union_canonical():
    u = IntervalUnion.of([(3, 4), (1, 2), (2, 2.5), (5, 5), (6, INF)])
    assert u.intervals == ((1.0, 2.5), (3.0, 4.0), (6.0, INF))


def test_interval_union_intersect_and_mass():
    a = IntervalUnion.of([(1, 3), (4, INF)])
    b = IntervalUnion.of([(2, 5)])
    assert a.intersect(b).intervals == ((2.0, 3.0), (4.0, 5.0))
    assert a.tail_mass(1.0) == pytest.approx(1 - 1 / 3 + 1 / 4)


# ---------------------------------------------------------------------------
# ray sections


def test_halfspace_sections():
    H = HalfSpace(E1, 2.0)
    assert H.ray_section(E1).intervals == ((2.0, INF),)
    assert not H.ray_section(E2)


def test_ball_complement_section():
    rng = np.random.default_rng(0)
    for theta in unit_rays(rng, 3, 5):
        assert BallComplement(3.0).ray_section(theta).intervals == ((3.0, INF),)


def test_ray_section_needs_unit_vector():
    with pytest.raises(ValueError):
        HalfSpace(E1, 1.0).ray_section([2.0, 0.0])


CATALOG = [
    (HalfSpace([1.0, 2.0], 1.5), 2),
    (HalfSpace([1.0, -1.0, 0.5], 0.7), 3),
    (BallComplement(2.0), 2),
    (BallComplement(0.5), 3),
    (Box([1.0, -1.0], [2.0, 3.0]), 2),
    (Box([-INF, 0.5], [INF, INF]), 2),
    (Box([-2.0, -2.0, 1.0], [2.0, 2.0, 1.5]), 3),
    (Exceedance([1.0, 2.0]), 2),
    (ConeComplementK([1.0, 0.0], 0.8), 2),
]


@pytest.mark.parametrize("A,d", CATALOG, ids=[repr(a) for a, _ in CATALOG])
def test_section_membership_agreement(A, d):
    assert_sections_match_membership(A, d, n_rays=1000)


def test_drift_hull_sections_agree_with_membership():
    hull = c_hull(Box([1.0, -1.0], [3.0, 0.5]), [1.0, 0.3])
    assert_sections_match_membership(hull, 2, n_rays=300, seed=4)
    shifted = drift_hull(Box([1.0, -1.0], [3.0, 0.5]), [1.0, 0.3], 2.0)
    assert_sections_match_membership(shifted, 2, n_rays=300, seed=5)


def test_generic_matches_catalog_sections():
    H = HalfSpace([1.0, 1.0], 1.0)
    G = Generic(H.contains, bounded_away=1.0, search_bound=50.0)
    rng = np.random.default_rng(2)
    for theta in unit_rays(rng, 2, 50):
        a, b = H.ray_section(theta), G.ray_section(theta)
        if not a or a.intervals[0][0] > 40:
            continue
        assert len(b) == 1
        assert b.intervals[0][0] == pytest.approx(a.intervals[0][0], abs=1e-9)
        assert b.intervals[0][1] == INF


def test_generic_needs_search_bound():
    G = Generic(lambda x: x[:, 0] > 1, bounded_away=1.0)
    with pytest.raises(MissingBoundError):
        G.ray_section(E1)


def test_generic_annulus_two_edges():
    G = Generic(
        lambda x: (np.linalg.norm(x, axis=1) >= 1.0) & (np.linalg.norm(x, axis=1) <= 2.5),
        bounded_away=1.0,
        search_bound=10.0,
    )
    sec = G.ray_section(E2)
    assert len(sec) == 1
    assert sec.intervals[0][0] == pytest.approx(1.0, abs=1e-9)
    assert sec.intervals[0][1] == pytest.approx(2.5, abs=1e-9)


# ---------------------------------------------------------------------------
# flags and geometry


@pytest.mark.parametrize(
    "A,expected",
    [
        (HalfSpace(E1, 1.0), 1.0),
        (BallComplement(2.5), 2.5),
        (Box([3.0, -1.0], [4.0, 4.0]), 3.0),
        (Box([3.0, 4.0], [5.0, 6.0]), 5.0),
        (Exceedance([2.0, 0.5]), 0.5),
    ],
)
def test_bounded_away_exact(A, expected):
    assert A.bounded_away == pytest.approx(expected)


@pytest.mark.parametrize(
    "A,d",
    [(HalfSpace([1.0, 1.0], 1.0), 2), (BallComplement(1.0), 2), (Exceedance([1.0, 1.0]), 2),
     (Box([1.0, -INF], [INF, INF]), 2), (ConeComplementK([1.0, 1.0], 0.5), 2)],
)
def test_increasing_flag_spot_check(A, d):
    assert A.increasing
    rng = np.random.default_rng(3)
    x = rng.uniform(-6, 6, (4000, d))
    x = x[A.contains(x)]
    for t in (1.0, 1.5, 7.0):
        assert np.all(A.contains(t * x))


def test_bounded_box_not_increasing():
    assert not Box([1.0, 1.0], [2.0, 2.0]).increasing


# ---------------------------------------------------------------------------
# drift hulls


def test_hull_of_halfspace_along_normal():
    assert c_hull(HalfSpace(E1, 1.0), E1) == HalfSpace(E1, 1.0)


def test_hull_rejects_halfspace_against_drift():
    with pytest.raises(ConeViolationError):
        c_hull(HalfSpace(E1, 1.0), -E1)


def test_hull_rejects_ball_complement():
    with pytest.raises(ConeViolationError):
        c_hull(BallComplement(1.0), E1)


def test_box_hull_on_lattice():
    B = Box([1.0, 0.0], [2.0, 1.0])
    hull = c_hull(B, E1)
    g = np.linspace(-1.0, 5.0, 200)
    X = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    # brute force: walk each point backwards along -c on a fine t grid
    ts = np.linspace(0.0, 8.0, 3201)
    brute = np.zeros(len(X), dtype=bool)
    for t in ts:
        brute |= B.contains(X - t * E1)
    assert np.array_equal(hull.contains(X), brute)
    assert np.array_equal(brute, (X[:, 0] >= 1) & (X[:, 1] >= 0) & (X[:, 1] <= 1))


def test_hull_contains_base_and_idempotent():
    rng = np.random.default_rng(8)
    c = np.array([1.0, 0.5])
    B = Box([1.0, -2.0], [2.0, -1.0])
    H = c_hull(B, c)
    HH = drift_hull(H, c)
    X = rng.uniform(-5, 10, (5000, 2))
    assert np.all(H.contains(X[B.contains(X)]))
    assert np.array_equal(H.contains(X), HH.contains(X))


def test_hull_is_c_increasing():
    rng = np.random.default_rng(9)
    c = np.array([0.5, 1.0])
    H = c_hull(Box([-1.0, 1.0], [1.0, 2.0]), c)
    X = rng.uniform(-5, 10, (4000, 2))
    X = X[H.contains(X)]
    for t in (0.1, 1.0, 10.0):
        assert np.all(H.contains(X + t * c))


def test_exceedance_hull_shift():
    assert drift_hull(Exceedance([1.0, 2.0]), [1.0, 0.5], 2.0) == Exceedance([3.0, 3.0])


def test_generic_hull_needs_declared_delta():
    G = Generic(lambda x: x[:, 0] >= 1, bounded_away=1.0, search_bound=10.0)
    with pytest.raises(ConeViolationError):
        c_hull(G, E1)
    G2 = Generic(lambda x: x[:, 0] >= 1, bounded_away=1.0, search_bound=10.0, cone_delta=1.0)
    hull = c_hull(G2, E1)
    assert isinstance(hull, CHull)
    X = np.array([[1.5, 0.0], [0.5, 3.0], [5.0, -2.0]])
    assert list(hull.contains(X)) == [True, False, True]


# ---------------------------------------------------------------------------
# cones


def test_halfspace_cone_delta_matches_sampling():
    H = HalfSpace([1.0, 1.0], 1.0)
    c = np.array([1.0, 0.2])
    delta = H.cone_delta(c)
    chat = c / np.linalg.norm(c)
    ang = np.linspace(0, 2 * np.pi, 200001)
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    reach = dirs[dirs @ H.direction > 0]
    assert np.min(np.linalg.norm(reach + chat, axis=1)) == pytest.approx(delta, abs=1e-4)


def test_box_cone_delta_matches_sampling():
    B = Box([1.0, -1.0], [3.0, 2.0])
    c = np.array([1.0, -1.0])
    delta = B.cone_delta(c)
    # the extreme direction is attained on the boundary: sample the four edges
    g = np.linspace(0.0, 1.0, 100001)[:, None]
    corners = np.array([[1.0, -1.0], [3.0, -1.0], [3.0, 2.0], [1.0, 2.0], [1.0, -1.0]])
    X = np.concatenate([a + g * (b - a) for a, b in zip(corners[:-1], corners[1:])])
    gaps = np.linalg.norm(X / np.linalg.norm(X, axis=1, keepdims=True) + c / np.linalg.norm(c), axis=1)
    assert gaps.min() >= delta - 1e-12
    assert gaps.min() == pytest.approx(delta, abs=1e-6)
    assert delta < math.sqrt(2.0)


def test_box_cone_violation():
    with pytest.raises(ConeViolationError):
        Box([-3.0, -1.0], [-1.0, 1.0]).cone_delta([1.0, 0.0])


def test_default_cone_delta_halves_gap():
    dirs = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert default_cone_delta(dirs, [1.0, 0.0]) == pytest.approx(0.5 * math.sqrt(2.0))


# ---------------------------------------------------------------------------
# scale unions


def test_scale_union_increasing_fast_path():
    assert scale_union(HalfSpace(E1, 1.0), 0.5) == HalfSpace(E1, 0.5)


def test_scale_union_box_membership():
    A = Box([1.0, 1.0, 1.0], [2.0, 2.0, 2.0])
    U = scale_union(A, 0.5)
    assert isinstance(U, ScaleUnion)
    pts = np.array([[0.75, 0.75, 0.75], [2.5, 2.5, 2.5], [0.6, 1.0, 1.0], [0.4, 0.4, 0.4]])
    # oracle: scan s on a fine grid of [t, 1]
    ss = np.linspace(0.5, 1.0, 5001)
    brute = [bool(np.any([A.contains(p / s) for s in ss])) for p in pts]
    assert list(U.contains(pts)) == brute == [True, False, True, False]


def test_scale_union_contains_base():
    rng = np.random.default_rng(4)
    A = Box([1.0, -1.0], [2.0, 0.5])
    U = scale_union(A, 0.3)
    X = rng.uniform(-3, 3, (2000, 2))
    assert np.all(U.contains(X[A.contains(X)]))


def test_scale_union_closed_contains_open():
    rng = np.random.default_rng(5)
    A = Box([1.0, -1.0], [2.0, 1.0])
    closed, opened = scale_union(A, 0.4, "closed"), scale_union(A, 0.4, "open")
    X = rng.uniform(-3, 3, (2000, 2))
    assert np.all(closed.contains(X)[opened.contains(X)])


def test_scale_union_parameter_range():
    with pytest.raises(ValueError):
        scale_union(HalfSpace(E1, 1.0), 1.0)


# ---------------------------------------------------------------------------
# dilation and erosion


def test_dilate_halfspace():
    assert HalfSpace(E1, 2.0).dilate(0.5) == HalfSpace(E1, 1.5)


def test_erode_ball_complement():
    assert BallComplement(3.0).erode(1.0) == BallComplement(4.0)


def test_dilate_to_origin_rejected():
    with pytest.raises(InvalidEpsilonError):
        HalfSpace(E1, 1.0).dilate(1.0)


def test_erode_box_to_empty():
    assert isinstance(Box([1.0, 1.0], [1.5, 3.0]).erode(0.5), EmptySet)


def test_generic_dilation_unsupported():
    with pytest.raises(UnsupportedShapeError):
        Generic(lambda x: x[:, 0] > 1, bounded_away=1.0).dilate(0.1)


@settings(max_examples=25, deadline=None)
@given(eps=st.floats(0.01, 0.4), seed=st.integers(0, 1000))
def test_dilate_then_erode_is_superset(eps, seed):
    rng = np.random.default_rng(seed)
    shapes = [
        HalfSpace([1.0, 0.5], 1.0),
        BallComplement(1.0),
        Box([1.0, -1.0], [2.5, 1.0]),
        Exceedance([1.0, 1.5]),
    ]
    X = rng.uniform(-4, 4, (2000, 2))
    for A in shapes:
        back = A.dilate(eps).erode(eps)
        assert np.all(back.contains(X[A.contains(X)]))


def test_box_dilation_is_l_infinity_superset_of_euclidean():
    B = Box([1.0, -1.0], [2.0, 1.0])
    D = B.dilate(0.3)
    rng = np.random.default_rng(6)
    X = rng.uniform(B.lower, B.upper, (1000, 2))
    shift = rng.standard_normal((1000, 2))
    shift *= 0.3 * rng.random((1000, 1)) / np.linalg.norm(shift, axis=1, keepdims=True)
    assert np.all(D.contains(X + shift))
