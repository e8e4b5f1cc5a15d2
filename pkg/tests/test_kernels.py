import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from heatspec.errors import ApproximationWarning, DomainError, NumericError, SingularityError, UnsupportedError
from heatspec.kernels import (
    ClosedForm,
    EigenSum,
    ImageSum,
    Quadrature,
    constant_curvature_kernel,
    heat_kernel,
    log_constant_curvature_kernel,
    log_h2_quadrature,
    log_h3_closed_form,
    log_heat_kernel,
    millson_step,
)
from heatspec.manifolds import Circle, ConstantCurvature, FlatTorus, Hyperbolic2, Hyperbolic3, Sphere2

angle = st.floats(0.0, 2 * math.pi)
time = st.floats(0.02, 5.0)


def theta_oracle(R, delta, t):
    """Circle kernel through Jacobi's theta_3, in extended precision."""
    with mp.workdps(30):
        return float(mp.jtheta(3, mp.mpf(delta) / 2, mp.e ** (-mp.mpf(t) / R**2)) / (2 * mp.pi * R))


def h3_oracle(s, t):
    return (4 * math.pi * t) ** -1.5 * s / math.sinh(s) * math.exp(-t - s * s / (4 * t))


def h2_oracle(s, t):
    # McKean's integral, singularity removed by u = s + v^2
    def f(v):
        u = s + v * v
        # cosh u - cosh s = 2 sinh((u + s)/2) sinh((u - s)/2); divide out v^2
        if v == 0:
            den = math.sqrt(math.sinh(s)) if s > 0 else 0.0
            return 2 * s * math.exp(-s * s / (4 * t)) / den if den else 0.0
        den = math.sqrt(2 * math.sinh(s + 0.5 * v * v) * math.sinh(0.5 * v * v)) / v
        return 2 * u * math.exp(-(u * u) / (4 * t)) / den

    upper = math.sqrt(60.0 * math.sqrt(t) + 5.0 + s) + 1.0
    val, _ = quad(f, 0.0, upper, epsabs=0, epsrel=1e-13, limit=400)
    return math.sqrt(2) * math.exp(-t / 4) / (4 * math.pi * t) ** 1.5 * val


# frozen from theta_oracle / closed forms at 30 digits
@pytest.mark.parametrize(
    "R,delta,t,value",
    [
        (1.0, 0.0, 1.0, 0.28212397345676224),
        (0.5, 1.0, 0.3, 0.41971765174791218),
        (2.0, 2.5, 0.7, 4.4691102328835515e-05),
    ],
)
def test_circle_kernel_frozen_values(R, delta, t, value):
    # image sums are relatively accurate; eigen-sums to the absolute trace tail
    assert heat_kernel(Circle(R), delta, 0.0, t, ImageSum()) == pytest.approx(value, rel=1e-12)
    assert abs(heat_kernel(Circle(R), delta, 0.0, t, EigenSum(tol=1e-14)) - value) <= 1e-14


@given(st.sampled_from([0.5, 1.0, 2.0]), angle, angle, time)
def test_image_sum_matches_theta_function(R, p, q, t):
    assert heat_kernel(Circle(R), p, q, t) == pytest.approx(theta_oracle(R, p - q, t), rel=1e-12)


@given(st.floats(0.3, 3.0), angle, angle, time)
def test_image_sum_equals_eigen_sum(R, p, q, t):
    m = Circle(R)
    a = heat_kernel(m, p, q, t, ImageSum())
    b = heat_kernel(m, p, q, t, EigenSum(tol=1e-13))
    assert abs(a - b) <= 1e-11


@given(st.floats(0.3, 3.0), angle, angle, time)
def test_kernel_is_symmetric(R, p, q, t):
    m = Circle(R)
    assert heat_kernel(m, p, q, t) == pytest.approx(heat_kernel(m, q, p, t), rel=1e-14)


@given(st.floats(0.3, 3.0), angle, angle, time)
def test_circle_rescaling_identity(R, p, q, t):
    # h^{R}_t(p, q) = h^{1}_{t/R^2}(p, q) / R
    assert heat_kernel(Circle(R), p, q, t) == pytest.approx(heat_kernel(Circle(1.0), p, q, t / R**2) / R, rel=1e-12)


@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.tuples(angle, angle), st.tuples(angle, angle), time)
def test_torus_log_is_sum_of_circle_logs(A, B, p, q, t):
    lt = log_heat_kernel(FlatTorus(A, B), p, q, t)
    la = log_heat_kernel(Circle(A), p[0], q[0], t)
    lb = log_heat_kernel(Circle(B), p[1], q[1], t)
    assert lt == pytest.approx(la + lb, rel=1e-12, abs=1e-12)


def test_torus_image_equals_eigen_sum():
    m = FlatTorus(1.0, 0.7)
    p, q = (0.3, 1.9), (2.2, 5.0)
    for t in (0.1, 0.5, 1.0):
        a = heat_kernel(m, p, q, t, ImageSum())
        b = heat_kernel(m, p, q, t, EigenSum(tol=1e-13))
        assert abs(a - b) < 1e-11


def _circle_grid(n=256):
    return 2 * math.pi * np.arange(n) / n


@pytest.mark.parametrize("t", [0.05, 0.5, 2.0])
def test_normalization_and_semigroup(t):
    m = Circle(1.0)
    y = _circle_grid()
    w = 2 * math.pi / y.size
    # the trapezoid rule is spectrally accurate for smooth periodic integrands
    assert abs(np.sum(heat_kernel(m, 0.7, y, t)) * w - 1.0) <= 1e-10
    s = 0.3
    lhs = np.sum(heat_kernel(m, 0.7, y, s) * heat_kernel(m, y, 2.1, t)) * w
    assert abs(lhs - heat_kernel(m, 0.7, 2.1, s + t)) <= 1e-8


def test_log_kernel_survives_underflow():
    m = Circle(1.0)
    lh = log_heat_kernel(m, 0.0, math.pi / 2, 1e-4)
    assert heat_kernel(m, 0.0, math.pi / 2, 1e-4) == 0.0
    assert lh == pytest.approx(-0.5 * math.log(4e-4 * math.pi) - (math.pi / 2) ** 2 / 4e-4, rel=1e-14)


def test_thin_torus_needs_many_images():
    m = FlatTorus(1.0, 0.1)
    with pytest.raises(NumericError):
        heat_kernel(m, (0.0, 0.0), (0.0, 0.0), 5.0, ImageSum(1, adaptive=False))
    a = heat_kernel(m, (0.0, 0.0), (1.0, 2.0), 5.0, ImageSum(1))
    b = heat_kernel(m, (0.0, 0.0), (1.0, 2.0), 5.0, EigenSum(tol=1e-14))
    assert a == pytest.approx(b, rel=1e-12)


def test_broadcasting():
    p = np.linspace(0, 6, 7)
    t = np.array([[0.1], [1.0]])
    out = heat_kernel(Circle(1.0), p, 0.0, t)
    assert out.shape == (2, 7)
    assert out[1, 3] == pytest.approx(heat_kernel(Circle(1.0), p[3], 0.0, 1.0))


@pytest.mark.parametrize("s,t", [(1.0, 1.0), (0.1, 0.05), (4.0, 2.0), (0.5, 0.2)])
def test_h3_closed_form(s, t):
    assert math.exp(log_h3_closed_form(s, t)) == pytest.approx(h3_oracle(s, t), rel=1e-13)
    assert millson_step(1, s, t) == pytest.approx(h3_oracle(s, t), rel=1e-13)


def test_h3_spot_value():
    # (4 pi)^{-3/2} / sinh(1) * exp(-5/4)
    assert heat_kernel(Hyperbolic3(), 0.0, 1.0, 1.0) == pytest.approx(0.0054727407763734002, rel=1e-13)


def test_h3_at_zero_separation():
    assert math.exp(log_h3_closed_form(0.0, 1.0)) == pytest.approx((4 * math.pi) ** -1.5 * math.exp(-1))


@pytest.mark.parametrize("s,t", [(1.0, 1.0), (0.5, 0.2), (3.0, 2.0), (0.0, 0.5), (8.0, 0.3), (1e-6, 1.0)])
def test_h2_quadrature_matches_independent_quadrature(s, t):
    assert math.exp(log_h2_quadrature(s, t)) == pytest.approx(h2_oracle(s, t), rel=1e-9)


def test_h2_frozen_values():
    # mpmath quadrature at 30 digits
    assert heat_kernel(Hyperbolic2(), 0.0, 1.0, 1.0) == pytest.approx(0.041491183957822232, rel=1e-10)
    assert heat_kernel(Hyperbolic2(), 0.0, 3.0, 2.0) == pytest.approx(0.0038802213894533371, rel=1e-10)


def test_h2_normalization():
    x, w = np.polynomial.legendre.leggauss(80)
    a, b = 0.0, 12.0
    s = 0.5 * (b - a) * (x + 1)
    h = np.array([math.exp(log_h2_quadrature(v, 0.5)) for v in s])
    total = 0.5 * (b - a) * np.sum(w * h * 2 * math.pi * np.sinh(s))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_h2_small_time_extreme_is_finite():
    lh = log_heat_kernel(Hyperbolic2(), 0.0, 5.0, 1e-3)
    assert math.isfinite(lh) and lh < -6000


def test_millson_errors():
    with pytest.raises(SingularityError):
        millson_step(1, 0.0, 1.0)
    with pytest.raises(DomainError):
        millson_step(2, 1.0, 1.0)
    with pytest.raises(UnsupportedError):
        millson_step(3, 1.0, 1.0)
    with pytest.raises(DomainError):
        millson_step(1, -1.0, 1.0)


@given(st.floats(0.05, 5.0), st.floats(0.05, 3.0), st.floats(0.1, 4.0))
def test_constant_curvature_rescaling(s, t, a):
    # kappa = -a is H^3 with lengths scaled by 1/sqrt(a)
    got = log_constant_curvature_kernel(-a, 3, s, t)
    ref = 1.5 * math.log(a) + math.log(h3_oracle(math.sqrt(a) * s, a * t))
    assert got == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_constant_curvature_minus_one_is_hyperbolic():
    assert constant_curvature_kernel(-1.0, 3, 1.0, 1.0) == pytest.approx(heat_kernel(Hyperbolic3(), 0.0, 1.0, 1.0))
    assert constant_curvature_kernel(-1.0, 2, 1.0, 1.0) == pytest.approx(heat_kernel(Hyperbolic2(), 0.0, 1.0, 1.0))
    m = ConstantCurvature(-4.0, 2)
    assert heat_kernel(m, 0.0, 0.5, 0.25) == pytest.approx(4 * heat_kernel(Hyperbolic2(), 0.0, 1.0, 1.0), rel=1e-12)


def test_positive_curvature_is_flagged_approximation():
    with pytest.warns(ApproximationWarning):
        v = constant_curvature_kernel(1.0, 2, 0.4, 0.5)
    assert v == pytest.approx((1 + 3 * math.exp(-1.0) * math.cos(0.4)) / (4 * math.pi))
    with pytest.raises(UnsupportedError):
        constant_curvature_kernel(1.0, 3, 0.4, 0.5)
    with pytest.raises(DomainError):
        constant_curvature_kernel(0.0, 2, 0.4, 0.5)


def test_sphere_band_one_kernel():
    m = Sphere2()
    p, q = (0.3, 1.0), (2.0, 2.0)
    from heatspec.manifolds import geodesic_distance

    d = geodesic_distance(m, p, q)
    ref = (1 + 3 * math.exp(-2 * 0.7) * math.cos(d)) / (4 * math.pi)
    assert heat_kernel(m, p, q, 0.7) == pytest.approx(ref, rel=1e-13)
    with pytest.raises(NumericError):
        log_heat_kernel(m, (0.0, 0.0), (0.0, math.pi), 0.01)


def test_method_validation():
    with pytest.raises(DomainError):
        heat_kernel(Circle(1.0), 0.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        heat_kernel(Circle(1.0), 0.0, 1.0, -1.0)
    with pytest.raises(UnsupportedError):
        heat_kernel(Circle(1.0), 0.0, 1.0, 1.0, ClosedForm())
    with pytest.raises(UnsupportedError):
        heat_kernel(Hyperbolic3(), 0.0, 1.0, 1.0, ImageSum())
    with pytest.raises(UnsupportedError):
        heat_kernel(Hyperbolic2(), 0.0, 1.0, 1.0, EigenSum(5))
    with pytest.raises(DomainError):
        ImageSum(0)
    with pytest.raises(DomainError):
        Quadrature(0)


def test_no_warning_for_exact_kernels():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        heat_kernel(Hyperbolic3(), 0.0, 1.0, 1.0)
        heat_kernel(ConstantCurvature(-2.0, 3), 0.0, 1.0, 1.0)
