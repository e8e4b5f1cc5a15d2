"""Heat kernels of the model manifolds.

Several independent representations are provided so they can be checked
against each other:

* ``ImageSum``   sum of Euclidean Gaussians over the deck group (circle, flat torus)
* ``EigenSum``   partial Sturm-Liouville sum over the eigenbasis
* ``ClosedForm`` elementary formula for hyperbolic 3-space
* ``Quadrature`` McKean's integral for the hyperbolic plane

Every kernel is evaluated in the log domain first; ``heat_kernel`` simply
exponentiates ``log_heat_kernel`` so tiny small-time values keep full
relative accuracy for the Varadhan estimates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import (
    ApproximationWarning,
    DomainError,
    NumericError,
    SingularityError,
    UnsupportedError,
)
from .manifolds import (
    TWO_PI,
    AnalyticManifold,
    Circle,
    ConstantCurvature,
    FlatTorus,
    Hyperbolic2,
    Hyperbolic3,
    Sphere2,
    basis_terms,
    evaluate_basis,
    normalize_point,
)

# relative accuracy demanded from a truncated image sum
IMAGE_SUM_RTOL = 1e-14
# successive-refinement agreement for the hyperbolic-plane quadrature
QUADRATURE_RTOL = 1e-10


@dataclass(frozen=True)
class ImageSum:
    """Images ``|m| <= m_max`` per angle.

    With ``adaptive`` the count is doubled until the certified relative tail
    drops below ``IMAGE_SUM_RTOL``; otherwise an insufficient ``m_max`` raises
    NumericError.
    """

    m_max: int = 10
    adaptive: bool = True

    def __post_init__(self):
        if int(self.m_max) < 1:
            raise DomainError("m_max must be a positive integer")


@dataclass(frozen=True)
class EigenSum:
    """Partial eigen-sum over indices ``0..N``.

    With ``N=None`` the truncation is chosen so the heat-trace tail is below
    ``tol``.
    """

    N: int | None = None
    tol: float = 1e-12

    def __post_init__(self):
        if self.N is not None and int(self.N) < 0:
            raise DomainError("N must be nonnegative")
        if not self.tol > 0:
            raise DomainError("tol must be positive")


@dataclass(frozen=True)
class ClosedForm:
    pass


@dataclass(frozen=True)
class Quadrature:
    nodes: int = 16

    def __post_init__(self):
        if int(self.nodes) < 1:
            raise DomainError("nodes must be a positive integer")


KernelMethod = ImageSum | EigenSum | ClosedForm | Quadrature


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        raise DomainError("time must be positive and finite")
    return t


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _logsinh(x):
    """log(sinh(x)) for x > 0 without overflow."""
    x = np.asarray(x, dtype=float)
    big = x > 20.0
    with np.errstate(over="ignore", divide="ignore"):
        small = np.log(np.sinh(np.where(big, 1.0, x)))
    large = x - math.log(2.0) + np.log1p(-np.exp(-2.0 * np.where(big, x, 20.0)))
    return np.where(big, large, small)


def _log_s_over_sinh(s):
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.log(np.where(s > 0, s, 1.0)) - _logsinh(np.where(s > 0, s, 1.0))
    return np.where(s > 0, out, 0.0)


# ---------------------------------------------------------------------------
# circle and flat torus: image sums


def _signed_offset(d):
    """Reduce an angle difference to ``(-pi, pi]``."""
    r = np.mod(np.asarray(d, dtype=float) + math.pi, TWO_PI) - math.pi
    return np.where(r == -math.pi, math.pi, r)


def _image_log_tail(delta, R, t, m_max):
    """Log of a bound on (omitted images) / (largest image) for one circle factor.

    The images with ``|m| > m_max`` sit at distance at least
    ``x0 = R (2 pi (m_max + 1) - |delta|)``; consecutive ones are ``2 pi R``
    apart, so each tail is dominated by a geometric series.
    """
    a = TWO_PI * R
    x0 = R * (TWO_PI * (m_max + 1) - np.abs(delta))
    ratio = -a * x0 / (2.0 * t)
    return (
        math.log(2.0)
        - (x0**2 - (R * delta) ** 2) / (4.0 * t)
        - np.log(-np.expm1(ratio))
    )


def _log_circle_image(delta, R, t, m_max):
    m = np.arange(-m_max, m_max + 1, dtype=float)
    x = R * (delta[..., None] + TWO_PI * m)
    return logsumexp(-(x**2) / (4.0 * t[..., None]), axis=-1)


def _images_needed(delta, R, t, method: ImageSum, rtol):
    m_max = int(method.m_max)
    while True:
        worst = float(np.max(_image_log_tail(delta, R, t, m_max)))
        if worst <= math.log(rtol):
            return m_max
        if not method.adaptive or m_max > 100_000:
            raise NumericError(
                "image sum truncation too coarse; increase m_max",
                residual=math.exp(min(worst, 700.0)),
            )
        m_max *= 2


def _circle_log_image(m: Circle, p, q, t, method: ImageSum):
    delta = _signed_offset(normalize_point(m, p) - normalize_point(m, q))
    delta, t = np.broadcast_arrays(delta, t)
    k = _images_needed(delta, m.R, t, method, IMAGE_SUM_RTOL)
    return -0.5 * np.log(4.0 * math.pi * t) + _log_circle_image(delta, m.R, t, k)


def _torus_log_image(m: FlatTorus, p, q, t, method: ImageSum):
    p = normalize_point(m, p)
    q = normalize_point(m, q)
    d1 = _signed_offset(p[..., 0] - q[..., 0])
    d2 = _signed_offset(p[..., 1] - q[..., 1])
    d1, d2, t = np.broadcast_arrays(d1, d2, t)
    # (1 + r1)(1 + r2) - 1 <= rtol when each factor is within rtol / 3
    k1 = _images_needed(d1, m.A, t, method, IMAGE_SUM_RTOL / 3.0)
    k2 = _images_needed(d2, m.B, t, method, IMAGE_SUM_RTOL / 3.0)
    # literal double sum over the lattice of images
    a = np.arange(-k1, k1 + 1, dtype=float)
    b = np.arange(-k2, k2 + 1, dtype=float)
    x = (m.A * (d1[..., None, None] + TWO_PI * a[:, None])) ** 2
    y = (m.B * (d2[..., None, None] + TWO_PI * b[None, :])) ** 2
    tt = t[..., None, None]
    lse = logsumexp(-(x + y) / (4.0 * tt), axis=(-2, -1))
    return -np.log(4.0 * math.pi * t) + lse


# ---------------------------------------------------------------------------
# eigen-sums


def _eigen_count(m, t, method: EigenSum):
    if method.N is not None:
        return int(method.N) + 1
    from .truncation import Spectrum, tail_trace_bound

    tt = float(np.min(t))  # the smallest time needs the most terms
    return tail_trace_bound(Spectrum.from_manifold(m), tt, method.tol).N + 1


def eigen_sum(m: AnalyticManifold, p, q, t, N: int):
    """Partial sum ``sum_{j=0}^{N} exp(-lambda_j t) phi_j(p) phi_j(q)``."""
    t = _check_time(t)
    terms = basis_terms(m, int(N) + 1)
    lam = np.array([term.eigenvalue for term in terms])
    a = evaluate_basis(m, terms, p)
    b = evaluate_basis(m, terms, q)
    w = np.exp(-lam * np.asarray(t)[..., None])
    return _scalar(np.sum(w * a * b, axis=-1))


# ---------------------------------------------------------------------------
# hyperbolic spaces


def log_h3_closed_form(s, t):
    """log of ``(4 pi t)^{-3/2} (s / sinh s) exp(-t - s^2/4t)``."""
    s = np.abs(np.asarray(s, dtype=float))
    t = _check_time(t)
    return _scalar(-1.5 * np.log(4.0 * math.pi * t) + _log_s_over_sinh(s) - t - s**2 / (4.0 * t))


def _gauss_legendre_panels(nodes, panels, upper):
    x, w = np.polynomial.legendre.leggauss(nodes)
    h = upper / panels
    left = h * np.arange(panels)
    xs = (left[:, None] + 0.5 * h * (x[None, :] + 1.0)).ravel()
    ws = np.tile(0.5 * h * w, panels)
    return xs, ws


def _log_h2_integrand(v, s, t):
    # u = s + v^2 turns  u exp(-u^2/4t) / sqrt(cosh u - cosh s) du  into a regular
    # integrand; the difference of cosh values is formed as a product of sinh
    # values to avoid cancellation. exp(-s^2/4t) has been factored out.
    v2 = v * v
    log_den = 0.5 * (math.log(2.0) + _logsinh(s + 0.5 * v2) + _logsinh(0.5 * v2))
    return np.log(2.0 * v * (s + v2)) - v2 * (2.0 * s + v2) / (4.0 * t) - log_den


def log_h2_quadrature(s, t, nodes=16, max_panels=4096):
    """log of McKean's hyperbolic-plane kernel by composite Gauss-Legendre.

    The number of panels doubles until the integral changes by less than
    ``QUADRATURE_RTOL`` (relative); otherwise NumericError carries the last
    change as ``residual``.
    """
    s = abs(float(s))
    t = float(_check_time(t))
    # past v_max the Gaussian factor is below exp(-60)
    v_max = math.sqrt(-s + math.sqrt(s * s + 240.0 * t))
    prev = None
    panels = 1
    while panels <= max_panels:
        v, w = _gauss_legendre_panels(int(nodes), panels, v_max)
        log_int = float(logsumexp(_log_h2_integrand(v, s, t), b=w))
        if prev is not None and abs(log_int - prev) <= QUADRATURE_RTOL:
            break
        change = None if prev is None else abs(math.expm1(log_int - prev))
        prev = log_int
        panels *= 2
    else:
        raise NumericError("hyperbolic-plane quadrature did not converge", residual=change)
    pref = 0.5 * math.log(2.0) - 1.5 * math.log(4.0 * math.pi * t) - 0.25 * t - s * s / (4.0 * t)
    return pref + log_int


def millson_step(m_dim: int, s, t):
    """Hyperbolic kernel in dimension ``m_dim + 2`` from the one in ``m_dim``.

    Only the base case ``m_dim = 1`` is available: starting from the line's
    Gaussian ``(4 pi t)^{-1/2} exp(-s^2/4t)`` and its analytic
    ``s``-derivative, returns
    ``-(exp(-m t) / (2 pi sinh s)) d/ds h``, which is the kernel of H^3.
    """
    if int(m_dim) != m_dim or m_dim < 1 or m_dim % 2 == 0:
        raise DomainError("m_dim must be a positive odd integer")
    if m_dim != 1:
        raise UnsupportedError("only the step from dimension 1 to 3 is implemented")
    t = _check_time(t)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise DomainError("separation must be a nonnegative finite length")
    if np.any(s == 0):
        raise SingularityError("sinh(s) vanishes at s = 0")
    gauss = (4.0 * math.pi * t) ** -0.5 * np.exp(-(s**2) / (4.0 * t))
    dgauss = -s / (2.0 * t) * gauss
    return _scalar(-np.exp(-m_dim * t) / (TWO_PI * np.sinh(s)) * dgauss)


# ---------------------------------------------------------------------------
# constant curvature


def _log_sphere_band1(angle, t):
    # unit sphere, constant plus degree-one band (approximation)
    val = (1.0 + 3.0 * np.exp(-2.0 * t) * np.cos(angle)) / (4.0 * math.pi)
    if np.any(val <= 0):
        raise NumericError("band-limited sphere kernel is not positive here")
    return np.log(val)


def log_constant_curvature_kernel(kappa: float, n: int, s, t):
    kappa = float(kappa)
    if kappa == 0 or not math.isfinite(kappa):
        raise DomainError("curvature must be nonzero and finite")
    t = _check_time(t)
    s = np.abs(np.asarray(s, dtype=float))
    a = abs(kappa)
    if kappa < 0:
        if n == 3:
            return _scalar(1.5 * math.log(a) + log_h3_closed_form(math.sqrt(a) * s, a * t))
        if n == 2:
            f = np.vectorize(lambda ss, tt: log_h2_quadrature(ss, tt))
            return _scalar(math.log(a) + f(math.sqrt(a) * s, a * t))
    elif n == 2:
        warnings.warn(
            "positive-curvature kernel is the degree-one partial sum, not the exact kernel",
            ApproximationWarning,
            stacklevel=3,
        )
        return _scalar(math.log(a) + _log_sphere_band1(math.sqrt(a) * s, a * t))
    raise UnsupportedError(f"no kernel for curvature {kappa} in dimension {n}")


def constant_curvature_kernel(kappa: float, n: int, s, t):
    """Kernel of the space form of curvature ``kappa`` by rescaling.

    For ``kappa < 0``:
    ``|kappa|^{n/2} h^{H^n}_{|kappa| t}(|kappa|^{1/2} s)``. For ``kappa > 0``
    and ``n = 2`` the sphere kernel truncated after the degree-one band is
    returned with an ApproximationWarning.
    """
    return _scalar(np.exp(log_constant_curvature_kernel(kappa, n, s, t)))


# ---------------------------------------------------------------------------
# dispatch


def default_method(m: AnalyticManifold) -> KernelMethod:
    if isinstance(m, (Circle, FlatTorus)):
        return ImageSum()
    if isinstance(m, Hyperbolic3):
        return ClosedForm()
    if isinstance(m, Hyperbolic2):
        return Quadrature()
    if isinstance(m, Sphere2):
        return EigenSum(3)
    if isinstance(m, ConstantCurvature):
        if m.kappa > 0:
            return EigenSum(3)
        return ClosedForm() if m.n == 3 else Quadrature()
    raise UnsupportedError(f"unknown manifold {m!r}")


def _bad_method(m, method):
    return UnsupportedError(f"{type(method).__name__} is not available for {type(m).__name__}")


def log_heat_kernel(m: AnalyticManifold, p, q, t, method: KernelMethod | None = None):
    """Natural log of the heat kernel; see ``heat_kernel``."""
    t = _check_time(t)
    method = default_method(m) if method is None else method
    if isinstance(method, ImageSum):
        if isinstance(m, Circle):
            return _scalar(_circle_log_image(m, p, q, t, method))
        if isinstance(m, FlatTorus):
            return _scalar(_torus_log_image(m, p, q, t, method))
        raise _bad_method(m, method)
    if isinstance(method, EigenSum):
        val = np.asarray(heat_kernel(m, p, q, t, method))
        if np.any(val <= 0):
            raise NumericError("partial eigen-sum is not positive; its log is undefined")
        return _scalar(np.log(val))
    s = np.abs(normalize_point(m, p) - normalize_point(m, q))
    if isinstance(method, ClosedForm):
        if isinstance(m, Hyperbolic3):
            return log_h3_closed_form(s, t)
        if isinstance(m, ConstantCurvature) and m.kappa < 0 and m.n == 3:
            return log_constant_curvature_kernel(m.kappa, 3, s, t)
        raise _bad_method(m, method)
    if isinstance(method, Quadrature):
        if isinstance(m, Hyperbolic2):
            f = np.vectorize(lambda ss, tt: log_h2_quadrature(ss, tt, method.nodes))
            return _scalar(f(s, t))
        if isinstance(m, ConstantCurvature) and m.kappa < 0 and m.n == 2:
            return log_constant_curvature_kernel(m.kappa, 2, s, t)
        raise _bad_method(m, method)
    raise DomainError(f"unknown kernel method {method!r}")


def heat_kernel(m: AnalyticManifold, p, q, t, method: KernelMethod | None = None):
    """Heat kernel ``h_t(p, q)``.

    Parameters
    ----------
    m : AnalyticManifold
    p, q : point or array of points
        Chart coordinates (see ``heatspec.manifolds``); arrays broadcast.
    t : float or array
        Time, strictly positive.
    method : KernelMethod, optional
        ``ImageSum`` (circle, torus), ``EigenSum`` (circle, torus, sphere
        degree <= 1), ``ClosedForm`` (H^3), ``Quadrature`` (H^2). Chosen per
        manifold when omitted.

    Returns
    -------
    float or ndarray

    Raises
    ------
    DomainError
        ``t <= 0`` or invalid coordinates.
    UnsupportedError
        Method not valid for the manifold.
    NumericError
        Truncation or quadrature could not be certified.
    """
    t = _check_time(t)
    method = default_method(m) if method is None else method
    if isinstance(method, EigenSum):
        if isinstance(m, ConstantCurvature) and m.kappa > 0 and m.n == 2:
            s = np.abs(normalize_point(m, p) - normalize_point(m, q))
            return constant_curvature_kernel(m.kappa, 2, s, t)
        if not isinstance(m, (Circle, FlatTorus, Sphere2)):
            raise _bad_method(m, method)
        return eigen_sum(m, p, q, t, _eigen_count(m, t, method) - 1)
    return _scalar(np.exp(log_heat_kernel(m, p, q, t, method)))
