import math

import numpy as np
import pytest
from scipy.integrate import quad

from rvwalk.errors import (
    AmbiguousSetError,
    ConeViolationError,
    DivergentIntegralError,
    InfiniteMeasureError,
    UnboundedNearOriginError,
)
from rvwalk.measure import frechet_scale, m_fidi, mu, mu_star
from rvwalk.model import make_model
from rvwalk.sets import (
    BallComplement,
    Box,
    ConeComplementK,
    Exceedance,
    FullSpace,
    Generic,
    HalfSpace,
)

INF = math.inf
E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])
M2 = make_model(2.0, [(E1, 1.0)])


def test_mu_halfspace():
    v = mu(M2, HalfSpace(E1, 2.0))
    assert v.value == pytest.approx(0.25, abs=1e-15)
    assert v.method == "closed-form" and v.abs_error_bound == 0.0


def test_mu_ball_complement_any_atoms():
    m = make_model(1.5, [([1.0, 2.0], 0.3), ([-1.0, 0.0], 0.7)])
    assert mu(m, BallComplement(3.0)).value == pytest.approx(3.0 ** -1.5, rel=1e-14)


def test_mu_rotated_halfspace_against_radial_quadrature():
    v = mu(M2, HalfSpace([1.0, 1.0], 1.0)).value
    # ray e1 meets (x, d) >= 1 at r = sqrt(2); integrate the Pareto density there
    oracle, _ = quad(lambda r: 2.0 * r ** -3.0, math.sqrt(2.0), INF, epsabs=1e-14)
    assert v == pytest.approx(oracle, abs=1e-12)
    assert v == pytest.approx(0.5, abs=1e-12)


def test_mu_box_by_hand():
    m = make_model(2.0, [(E1, 0.5), (E2, 0.5)])
    B = Box([1.0, -1.0], [2.0, 1.0])
    assert mu(m, B).value == pytest.approx(0.5 * (1.0 - 0.25), abs=1e-15)


def test_mu_requires_bounded_away():
    with pytest.raises(UnboundedNearOriginError):
        mu(M2, ConeComplementK(E1, 0.5))
    with pytest.raises(UnboundedNearOriginError):
        mu(M2, FullSpace())


def test_mu_generic_reports_error_bound():
    G = Generic(lambda x: x[:, 0] >= 2.0, bounded_away=2.0, search_bound=20.0)
    v = mu(M2, G)
    assert v.method == "quadrature"
    assert 0 < v.abs_error_bound < 1e-9
    assert v.value == pytest.approx(0.25, abs=1e-9)


def _random_sets(rng, count):
    out = []
    for k in range(count):
        kind = k % 4
        if kind == 0:
            out.append(HalfSpace(rng.standard_normal(2), rng.uniform(0.2, 3.0)))
        elif kind == 1:
            out.append(BallComplement(rng.uniform(0.2, 3.0)))
        elif kind == 2:
            lo = rng.uniform(0.2, 2.0, 2) * rng.choice([-1, 1], 2)
            lo[0] = abs(lo[0])
            out.append(Box(lo, lo + rng.uniform(0.1, 3.0, 2)))
        else:
            out.append(Exceedance(rng.uniform(0.2, 3.0, 2)))
    return out


def test_homogeneity_random_sets():
    rng = np.random.default_rng(17)
    dirs = rng.standard_normal((6, 2))
    m = make_model(1.7, [(d, w) for d, w in zip(dirs, rng.uniform(0.1, 1.0, 6))])
    for A in _random_sets(rng, 20):
        base = mu(m, A).value
        for u in (0.5, 2.0, 10.0):
            assert mu(m, A.scaled(u)).value == pytest.approx(u ** -1.7 * base, rel=1e-9, abs=1e-300)


def test_monotonicity_nested_sets():
    m = make_model(2.5, [(E1, 0.4), ([1.0, 1.0], 0.3), (E2, 0.3)])
    assert mu(m, Box([1.0, 0.0], [2.0, 1.0])).value <= mu(m, Box([0.5, 0.0], [3.0, 2.0])).value
    assert mu(m, HalfSpace(E1, 2.0)).value <= mu(m, HalfSpace(E1, 1.0)).value
    c = np.array([1.0, 0.2])
    assert mu_star(m, HalfSpace(E1, 2.0), c).value <= mu_star(m, HalfSpace(E1, 1.0), c).value


# ---------------------------------------------------------------------------
# ruin functional


def test_mu_star_classical_one_dimensional():
    m = make_model(2.0, [([1.0], 1.0)])
    assert mu_star(m, HalfSpace([1.0], 1.0), [1.0]).value == pytest.approx(1.0, rel=1e-14)
    q = mu_star(m, HalfSpace([1.0], 1.0), [1.0], method="quadrature")
    assert q.value == pytest.approx(1.0, abs=1e-9)


def test_mu_star_halfspace_quadrature_and_closed_form():
    # closed form a**(1-alpha)/((alpha-1)(c,d)) checked against a trapezoid oracle first
    v = np.concatenate([np.linspace(0, 10, 200001), np.geomspace(10, 1e9, 400001)[1:]])
    trap = np.trapezoid((2.0 + v) ** -2.0, v) + 1.0 / (2.0 + 1e9)
    assert trap == pytest.approx(0.5, abs=1e-8)
    closed = mu_star(M2, HalfSpace(E1, 2.0), E1)
    assert closed.value == pytest.approx(0.5, rel=1e-15) and closed.method == "closed-form"
    q = mu_star(M2, HalfSpace(E1, 2.0), E1, tol=1e-10, method="quadrature")
    assert q.method == "quadrature"
    assert abs(q.value - 0.5) <= 1e-9
    assert q.abs_error_bound <= 1e-9


def test_mu_star_orthogonal_atom_is_zero():
    m = make_model(2.0, [(E2, 1.0)])
    assert mu_star(m, HalfSpace(E1, 1.0), E1).value == 0.0
    assert mu_star(m, HalfSpace(E1, 1.0), E1, method="quadrature").value == 0.0


def test_mu_star_box_matches_equivalent_halfspace():
    m = make_model(2.0, [(E1, 0.5), (E2, 0.5)])
    box = Box([2.0, -INF], [INF, INF])
    assert mu_star(m, box, E1).value == pytest.approx(0.25, abs=1e-9)


def test_mu_star_bounded_box_by_hand():
    # atom e1 meets the hull [1, inf) x [0, 1] of the box; e2 never does
    m = make_model(2.0, [(E1, 0.5), (E2, 0.5)])
    v = mu_star(m, Box([1.0, 0.0], [2.0, 1.0]), E1).value
    assert v == pytest.approx(0.5, abs=1e-9)


def test_mu_star_generic_matches_closed_form():
    G = Generic(lambda x: x[:, 0] >= 2.0, bounded_away=2.0, search_bound=20.0, cone_delta=1.0)
    v = mu_star(M2, G, E1, tol=1e-6)
    assert v.value == pytest.approx(0.5, abs=5e-6)


def test_mu_star_rejects_alpha_at_most_one():
    m = make_model(1.0, [(E1, 1.0)], center="none")
    with pytest.raises(DivergentIntegralError):
        mu_star(m, HalfSpace(E1, 1.0), E1)


def test_mu_star_cone_violation():
    with pytest.raises(ConeViolationError):
        mu_star(M2, BallComplement(1.0), E1)
    with pytest.raises(ConeViolationError):
        mu_star(M2, HalfSpace(E1, 1.0), -E1)


def test_mu_star_random_configurations():
    rng = np.random.default_rng(23)
    for _ in range(4):
        alpha = rng.uniform(1.2, 4.0)
        m = make_model(alpha, [(rng.standard_normal(2), w) for w in rng.uniform(0.1, 1, 3)])
        d = rng.standard_normal(2)
        d /= np.linalg.norm(d)
        c = d * rng.uniform(0.3, 2.0) + 0.3 * rng.standard_normal(2)
        if c @ d <= 0.05:
            c = d
        A = HalfSpace(d, rng.uniform(0.3, 3.0))
        exact = mu_star(m, A, c).value
        q = mu_star(m, A, c, method="quadrature").value
        assert q == pytest.approx(exact, rel=1e-6, abs=1e-12)


# ---------------------------------------------------------------------------
# finite-dimensional limits


def test_fidi_single_time():
    A = HalfSpace(E1, 1.5)
    assert m_fidi(M2, [0.5], [A]).value == pytest.approx(0.5 * mu(M2, A).value, rel=1e-15)


def test_fidi_full_space_then_halfspace():
    A = HalfSpace(E1, 1.0)
    assert m_fidi(M2, [0.3, 0.7], [FullSpace(), A]).value == pytest.approx(0.7, rel=1e-14)


def test_fidi_identical_sets_first_index():
    A = HalfSpace(E1, 1.0)
    assert m_fidi(M2, [0.3, 0.7], [A, A]).value == pytest.approx(0.3, rel=1e-14)


def test_fidi_is_not_additive():
    A = HalfSpace(E1, 2.0)
    v = m_fidi(M2, [0.4, 1.0], [A, A]).value
    assert v == pytest.approx(0.4 * mu(M2, A).value)
    assert v != pytest.approx(mu(M2, A).value)


def test_fidi_intersection_of_later_sets():
    A1 = FullSpace()
    A2 = HalfSpace(E1, 1.0)
    A3 = HalfSpace(E1, 2.0)
    v = m_fidi(M2, [0.2, 0.5, 0.9], [A1, A2, A3]).value
    assert v == pytest.approx(0.2 * 0.25 + 0.3 * 0.25, rel=1e-14)


def test_fidi_needs_a_bounded_away_set():
    with pytest.raises(InfiniteMeasureError):
        m_fidi(M2, [0.5, 1.0], [FullSpace(), FullSpace()])


def test_fidi_rejects_sets_touching_origin():
    touching = Box([0.0, -1.0], [1.0, 1.0])
    with pytest.raises(AmbiguousSetError):
        m_fidi(M2, [0.5, 1.0], [touching, HalfSpace(E1, 1.0)])


# ---------------------------------------------------------------------------
# Frechet scale


def test_frechet_scale_increasing_set():
    assert frechet_scale(M2, HalfSpace(E1, 1.0)).value == pytest.approx(1.0)
    m = make_model(1.5, [([1.0, 1.0], 1.0)])
    assert frechet_scale(m, BallComplement(2.0)).value == pytest.approx(2.0 ** -1.5)


def test_frechet_scale_box_against_scale_grid():
    B = Box([1.0, -INF], [2.0, INF])
    v = frechet_scale(M2, B).value
    # oracle: union of s [1, 2] over a geometric s grid, radial mass along e1
    s = np.geomspace(1.0, 1e6, 4001)
    covered_hi = np.max(2.0 * s)
    assert np.all(2.0 * s[:-1] >= s[1:])  # consecutive copies overlap: union is [1, 2 s_max]
    oracle = 1.0 - covered_hi ** -2.0
    assert v == pytest.approx(oracle, abs=1e-11)
    assert v == pytest.approx(1.0)
