import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from heatspec.errors import DomainError
from heatspec.samplers import (
    PHOTOS,
    CircleShape,
    PhotoSet,
    Revolution,
    RevolutionEven,
    SphereEven,
    TorusGrid,
    make_profile,
    sample,
)

barbells = st.builds(
    lambda R1, R2, L, frac: make_profile("barbell", R1=R1, R2=R2, L=L, r=frac * min(R1, R2)),
    st.floats(0.5, 30.0), st.floats(0.5, 30.0), st.floats(0.0, 100.0), st.floats(0.05, 1.0),
)
lollipops = st.builds(
    lambda R, L, frac: make_profile("lollipop", R=R, r=frac * R, L=L),
    st.floats(0.5, 30.0), st.floats(0.0, 100.0), st.floats(0.05, 1.0),
)


@given(st.one_of(barbells, lollipops))
def test_profiles_are_continuous_and_vanish_at_the_poles(p):
    assert p.continuity_residual() <= 1e-12 * max(p.params)
    assert abs(p(p.s_min)) <= 1e-9 * max(p.params)
    assert abs(p(p.s_max)) <= 1e-9 * max(p.params)
    s = np.linspace(p.s_min, p.s_max, 200)
    assert np.all(p(s) >= 0)


@given(st.one_of(barbells, lollipops))
def test_profile_area_matches_quadrature(p):
    total = sum(quad(lambda x: p(x), a, b, epsabs=0, epsrel=1e-12)[0] for a, b, *_ in p.pieces)
    assert p.area == pytest.approx(2 * math.pi * total, rel=1e-9)


def test_barbell_geometry():
    p = make_profile("barbell", R1=20, R2=10, L=100, r=5)
    a1 = math.pi - math.asin(5 / 20)
    assert p.s_min == pytest.approx(-(50 + 20 * a1))
    assert p(0.0) == 5.0
    assert p(-50 - 20 * (a1 - math.pi / 2)) == pytest.approx(20.0)
    q = make_profile("lollipop", R=10, r=2, L=50)
    assert q.s_max == pytest.approx(25 + math.pi)
    with pytest.raises(DomainError):
        make_profile("barbell", R1=1, R2=1, L=1, r=2)
    with pytest.raises(DomainError):
        make_profile("lollipop", R=1, r=0.5, L=-1)
    with pytest.raises(DomainError):
        make_profile("dumbbell", R=1)
    with pytest.raises(DomainError):
        p(p.s_max + 1.0)


@given(st.one_of(barbells, lollipops), st.integers(50, 400))
def test_revolution_points_lie_on_the_surface(p, n):
    pts = sample(RevolutionEven(p, n)).points
    rho = np.hypot(pts[:, 0], pts[:, 1])
    assert np.allclose(rho, p(pts[:, 2]), atol=1e-9 * max(p.params))
    assert 0.5 * n <= len(pts) <= 2.0 * n + 10


def test_lollipop_count_near_request():
    pc = sample(RevolutionEven(make_profile("lollipop", R=10, r=5, L=30), 600))
    assert abs(pc.n - 600) <= 30


def test_product_grid():
    p = make_profile("barbell", R1=2, R2=2, L=4, r=1)
    pc = sample(Revolution(p, 10, 12))
    # the two pole rings collapse to single points
    assert pc.n == 8 * 12 + 2


def test_sphere_points():
    pc = sample(SphereEven(2.0, 500))
    assert pc.n == 500
    assert np.allclose(np.linalg.norm(pc.points, axis=1), 2.0, atol=1e-14)
    assert np.abs(pc.points.mean(axis=0)).max() < 0.01


def test_circle_and_torus():
    pc = sample(CircleShape(1.0, 6))
    assert pc.points[1] == pytest.approx([0.5, math.sqrt(3) / 2])
    t = sample(TorusGrid(1.0, 0.5, 8, 4)).points
    assert t.shape == (32, 4)
    assert np.allclose(np.hypot(t[:, 0], t[:, 1]), 1.0) and np.allclose(np.hypot(t[:, 2], t[:, 3]), 0.5)
    with pytest.raises(DomainError):
        sample(CircleShape(1.0, 2))
    with pytest.raises(DomainError):
        sample(TorusGrid(0.0, 1.0))


def test_photos():
    pc = sample(PhotoSet())
    assert np.array_equal(pc.points, PHOTOS)
    assert pc.labels == ("p1", "p2", "p3", "p4", "p5", "p6")
    d2 = np.sum((PHOTOS[:, None] - PHOTOS[None]) ** 2, axis=-1)
    # each photo has two neighbours at distance 3; the rest are farther
    near = np.sort(d2, axis=1)[:, 1:3]
    assert np.all(near == 9) and np.all(np.sort(d2, axis=1)[:, 3] >= 24)


def test_deterministic():
    p = make_profile("barbell", R1=3, R2=3, L=2, r=1)
    assert np.array_equal(sample(RevolutionEven(p, 300)).points, sample(RevolutionEven(p, 300)).points)
