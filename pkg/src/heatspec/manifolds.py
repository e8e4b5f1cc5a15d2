"""Model manifolds with closed-form geometry and Laplace eigenbases.

Point conventions
-----------------
Circle        angle ``theta`` (radians); arc-length coordinate is ``R * theta``.
FlatTorus     pair ``(theta, phi)``; metric ``A^2 dtheta^2 + B^2 dphi^2``.
Sphere2       pair ``(theta, phi)`` with ``theta`` the azimuth and ``phi`` the
              polar angle in ``[0, pi]``; metric ``dphi^2 + sin(phi)^2 dtheta^2``.
Hyperbolic2/3, ConstantCurvature
              signed position along one fixed geodesic, so the distance of two
              points is simply ``|p - q|``. These spaces are homogeneous and the
              kernels depend only on that separation.

All angles are reduced to ``[0, 2*pi)`` on input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, UnsupportedError

TWO_PI = 2.0 * math.pi

# Relative tolerance for treating two analytic eigenvalues as equal.
_EIG_TOL = 1e-12


class AnalyticManifold:
    """Base class for the model manifolds."""

    dimension: int = 0

    @property
    def volume(self) -> float | None:
        return None

    @property
    def compact(self) -> bool:
        return self.volume is not None


@dataclass(frozen=True)
class Circle(AnalyticManifold):
    R: float = 1.0

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise DomainError(f"circle radius must be positive, got {self.R}")

    dimension = 1

    @property
    def volume(self):
        return TWO_PI * self.R


@dataclass(frozen=True)
class FlatTorus(AnalyticManifold):
    A: float = 1.0
    B: float = 1.0

    def __post_init__(self):
        for name, v in (("A", self.A), ("B", self.B)):
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"torus radius {name} must be positive, got {v}")

    dimension = 2

    @property
    def volume(self):
        return 4.0 * math.pi**2 * self.A * self.B


@dataclass(frozen=True)
class Sphere2(AnalyticManifold):
    dimension = 2

    @property
    def volume(self):
        return 4.0 * math.pi


@dataclass(frozen=True)
class Hyperbolic2(AnalyticManifold):
    dimension = 2


@dataclass(frozen=True)
class Hyperbolic3(AnalyticManifold):
    dimension = 3


@dataclass(frozen=True)
class ConstantCurvature(AnalyticManifold):
    """Simply connected space of constant sectional curvature ``kappa``."""

    kappa: float = -1.0
    n: int = 2

    def __post_init__(self):
        if self.kappa == 0 or not math.isfinite(self.kappa):
            raise DomainError("curvature must be a nonzero finite number")
        if self.n not in (2, 3):
            raise UnsupportedError(f"dimension {self.n} not supported (2 or 3 only)")

    @property
    def dimension(self):
        return self.n

    @property
    def volume(self):
        if self.kappa > 0 and self.n == 2:
            return 4.0 * math.pi / self.kappa
        return None


# ---------------------------------------------------------------------------
# coordinates and distance


def _check_finite(arr, what="point"):
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} has non-finite coordinates")


def reduce_angle(theta):
    """Reduce angles to ``[0, 2*pi)``."""
    r = np.mod(theta, TWO_PI)
    # mod can round up to exactly 2*pi for tiny negative inputs
    return np.where(r >= TWO_PI, 0.0, r)


def normalize_point(m: AnalyticManifold, p):
    """Validate ``p`` for ``m`` and return it in reduced coordinates.

    Scalars (or arrays of scalars) for one-dimensional charts; arrays whose last
    axis has length 2 for the torus and sphere.
    """
    arr = np.asarray(p, dtype=float)
    _check_finite(arr)
    if isinstance(m, Circle):
        return reduce_angle(arr)
    if isinstance(m, (FlatTorus, Sphere2)):
        if arr.shape[-1:] != (2,):
            raise DomainError(f"{type(m).__name__} points are (theta, phi) pairs")
        if isinstance(m, FlatTorus):
            return reduce_angle(arr)
        phi = arr[..., 1]
        if np.any(phi < 0) or np.any(phi > math.pi):
            raise DomainError("sphere polar angle must lie in [0, pi]")
        return np.stack([reduce_angle(arr[..., 0]), phi], axis=-1)
    if isinstance(m, (Hyperbolic2, Hyperbolic3, ConstantCurvature)):
        return arr
    raise UnsupportedError(f"unknown manifold {m!r}")


def _arc(d):
    d = np.abs(np.mod(d, TWO_PI))
    return np.minimum(d, TWO_PI - d)


def sphere_xyz(theta, phi):
    """Standard isometric embedding of the unit sphere."""
    s = np.sin(phi)
    return np.stack([s * np.cos(theta), s * np.sin(theta), np.cos(phi)], axis=-1)


def geodesic_distance(m: AnalyticManifold, p, q):
    """Riemannian distance between ``p`` and ``q``.

    Raises DomainError for coordinates outside the chart.
    """
    p = normalize_point(m, p)
    q = normalize_point(m, q)
    if isinstance(m, Circle):
        out = m.R * _arc(p - q)
    elif isinstance(m, FlatTorus):
        da = m.A * _arc(p[..., 0] - q[..., 0])
        db = m.B * _arc(p[..., 1] - q[..., 1])
        out = np.hypot(da, db)
    elif isinstance(m, Sphere2):
        a = sphere_xyz(p[..., 0], p[..., 1])
        b = sphere_xyz(q[..., 0], q[..., 1])
        # atan2 form stays accurate for nearly equal and nearly antipodal points
        out = np.arctan2(np.linalg.norm(np.cross(a, b), axis=-1), np.sum(a * b, axis=-1))
    else:
        out = np.abs(p - q)
    return float(out) if np.ndim(out) == 0 else out


def is_cut_locus_pair(m: AnalyticManifold, p, q, tol=1e-12) -> bool:
    """True when ``q`` is (numerically) a cut point of ``p``."""
    p = normalize_point(m, p)
    q = normalize_point(m, q)
    if isinstance(m, Circle):
        return bool(abs(_arc(p - q) - math.pi) <= tol)
    if isinstance(m, FlatTorus):
        return bool(
            abs(_arc(p[0] - q[0]) - math.pi) <= tol or abs(_arc(p[1] - q[1]) - math.pi) <= tol
        )
    if isinstance(m, Sphere2):
        return bool(abs(geodesic_distance(m, p, q) - math.pi) <= tol)
    return False


def riemannian_norm2(m: AnalyticManifold, x, v) -> float:
    """``g_x(v, v)`` in the chart coordinates of ``m``."""
    x = normalize_point(m, x)
    v = np.asarray(v, dtype=float)
    if isinstance(m, Circle):
        return float(m.R**2 * v**2)
    if isinstance(m, FlatTorus):
        return float(m.A**2 * v[0] ** 2 + m.B**2 * v[1] ** 2)
    if isinstance(m, Sphere2):
        return float(v[1] ** 2 + math.sin(x[1]) ** 2 * v[0] ** 2)
    raise UnsupportedError(f"no metric chart for {type(m).__name__}")


# ---------------------------------------------------------------------------
# eigenbases
#
# A basis function is a product of one factor per angle; each factor is
# "one", "sin(j .)" or "cos(j .)". Circle functions have a single factor.
# Sphere band-1 functions are labelled by the ambient coordinate they restrict.

_FACTOR_ORDER = {"sin": 0, "cos": 1}


@dataclass(frozen=True)
class BasisTerm:
    eigenvalue: float
    multiplicity: int
    label: tuple
    norm: float


@dataclass(frozen=True)
class EigenPair:
    """One Laplace eigenfunction with its eigenvalue.

    ``phi(x)`` evaluates the eigenfunction; ``dphi(x, v)`` its differential
    applied to the tangent vector ``v`` (chart components).
    """

    index: int
    eigenvalue: float
    multiplicity: int
    label: tuple
    phi: Callable = field(repr=False, compare=False)
    dphi: Callable = field(repr=False, compare=False)


def _circle_terms(m: Circle, count: int) -> list[BasisTerm]:
    terms = [BasisTerm(0.0, 1, ("one",), (TWO_PI * m.R) ** -0.5)]
    a = (math.pi * m.R) ** -0.5
    j = 1
    while len(terms) < count:
        lam = j * j / m.R**2
        terms.append(BasisTerm(lam, 2, ("sin", j), a))
        terms.append(BasisTerm(lam, 2, ("cos", j), a))
        j += 1
    return terms[:count]


def _torus_modes(A: float, B: float, count: int):
    """Lattice modes ``(j, k)`` sorted by eigenvalue, enough for ``count`` functions.

    Returns arrays ``lam, j, k, mult`` (one entry per (j, k) pair) and the
    cluster id that groups numerically equal eigenvalues.
    """
    lam_max = max(1.0 / A**2, 1.0 / B**2)
    while True:
        J = int(math.floor(A * math.sqrt(lam_max)))
        K = int(math.floor(B * math.sqrt(lam_max)))
        jj, kk = np.meshgrid(np.arange(J + 1), np.arange(K + 1), indexing="ij")
        jj = jj.ravel()
        kk = kk.ravel()
        lam = jj**2 / A**2 + kk**2 / B**2
        keep = lam <= lam_max
        jj, kk, lam = jj[keep], kk[keep], lam[keep]
        mult = np.where((jj == 0) & (kk == 0), 1, np.where((jj == 0) | (kk == 0), 2, 4))
        if mult.sum() >= count:
            break
        lam_max *= 2.0
    order = np.lexsort((kk, jj, lam))
    lam, jj, kk, mult = lam[order], jj[order], kk[order], mult[order]
    # group equal eigenvalues, then order each group lexicographically in (j, k)
    gap = np.diff(lam) > _EIG_TOL * np.maximum(1.0, lam[1:])
    cluster = np.concatenate([[0], np.cumsum(gap)])
    order = np.lexsort((kk, jj, cluster))
    lam, jj, kk, mult, cluster = lam[order], jj[order], kk[order], mult[order], cluster[order]
    # represent each cluster by its smallest member so equal values compare equal
    first = np.r_[True, cluster[1:] != cluster[:-1]]
    rep = lam[first][cluster]
    return rep, jj, kk, mult, cluster


def _torus_terms(m: FlatTorus, count: int) -> list[BasisTerm]:
    lam, jj, kk, mult, cluster = _torus_modes(m.A, m.B, count)
    cl_mult = np.bincount(cluster, weights=mult).astype(int)
    ab = m.A * m.B
    terms = []
    for l, j, k, c in zip(lam, jj, kk, cluster):
        j, k = int(j), int(k)
        total = int(cl_mult[c])
        if j == 0 and k == 0:
            terms.append(BasisTerm(0.0, total, ("one", 0, "one", 0), 1.0 / (TWO_PI * math.sqrt(ab))))
        elif k == 0:
            a = 1.0 / (math.pi * math.sqrt(2.0 * ab))
            terms += [BasisTerm(float(l), total, (f, j, "one", 0), a) for f in ("sin", "cos")]
        elif j == 0:
            a = 1.0 / (math.pi * math.sqrt(2.0 * ab))
            terms += [BasisTerm(float(l), total, ("one", 0, f, k), a) for f in ("sin", "cos")]
        else:
            a = 1.0 / (math.pi * math.sqrt(ab))
            terms += [
                BasisTerm(float(l), total, (f, j, g, k), a)
                for f in ("sin", "cos")
                for g in ("sin", "cos")
            ]
        if len(terms) >= count:
            break
    return terms[:count]


_SPHERE_A1 = math.sqrt(3.0 / (4.0 * math.pi))


def _sphere_terms(count: int) -> list[BasisTerm]:
    if count > 4:
        raise UnsupportedError("Sphere2 exposes only the constant and degree-1 eigenfunctions")
    terms = [BasisTerm(0.0, 1, ("one",), (4.0 * math.pi) ** -0.5)]
    terms += [BasisTerm(2.0, 3, (c,), _SPHERE_A1) for c in ("Z", "X", "Y")]
    return terms[:count]


def basis_terms(m: AnalyticManifold, count: int) -> list[BasisTerm]:
    """First ``count`` eigenfunctions of ``m`` (with multiplicity), in order."""
    if count < 1:
        raise DomainError("count must be at least 1")
    if isinstance(m, Circle):
        return _circle_terms(m, count)
    if isinstance(m, FlatTorus):
        return _torus_terms(m, count)
    if isinstance(m, Sphere2):
        return _sphere_terms(count)
    raise UnsupportedError(
        f"{type(m).__name__} has no discrete eigenbasis exposed (continuous spectrum)"
    )


def _factor(kind, j, x):
    if kind == "one":
        return np.ones_like(x)
    if kind == "sin":
        return np.sin(j * x)
    return np.cos(j * x)


def _dfactor(kind, j, x):
    if kind == "one":
        return np.zeros_like(x)
    if kind == "sin":
        return j * np.cos(j * x)
    return -j * np.sin(j * x)


def evaluate_basis(m: AnalyticManifold, terms, points) -> np.ndarray:
    """Eigenfunction values, shape ``points.shape[:-1] + (len(terms),)`` for 2-d charts."""
    x = normalize_point(m, points)
    cols = []
    if isinstance(m, Circle):
        for t in terms:
            kind = t.label[0]
            j = t.label[1] if kind != "one" else 0
            cols.append(t.norm * _factor(kind, j, x))
    elif isinstance(m, FlatTorus):
        th, ph = x[..., 0], x[..., 1]
        for t in terms:
            f, j, g, k = t.label
            cols.append(t.norm * _factor(f, j, th) * _factor(g, k, ph))
    elif isinstance(m, Sphere2):
        xyz = sphere_xyz(x[..., 0], x[..., 1])
        for t in terms:
            c = t.label[0]
            v = np.ones(xyz.shape[:-1]) if c == "one" else xyz[..., "XYZ".index(c)]
            cols.append(t.norm * v)
    else:
        raise UnsupportedError(f"no eigenbasis for {type(m).__name__}")
    return np.stack(cols, axis=-1)


def evaluate_basis_jacobian(m: AnalyticManifold, terms, point) -> np.ndarray:
    """Partial derivatives of each eigenfunction at one point.

    Returns shape ``(len(terms), dim)``; column ``a`` is the derivative along
    chart coordinate ``a``. ``dphi(v)`` is then ``J @ v``.
    """
    x = normalize_point(m, point)
    if isinstance(m, Circle):
        rows = []
        for t in terms:
            kind = t.label[0]
            j = t.label[1] if kind != "one" else 0
            rows.append([t.norm * _dfactor(kind, j, x)])
        return np.array(rows, dtype=float)
    if isinstance(m, FlatTorus):
        th, ph = float(x[0]), float(x[1])
        rows = []
        for t in terms:
            f, j, g, k = t.label
            rows.append(
                [
                    t.norm * _dfactor(f, j, th) * _factor(g, k, ph),
                    t.norm * _factor(f, j, th) * _dfactor(g, k, ph),
                ]
            )
        return np.array(rows, dtype=float)
    if isinstance(m, Sphere2):
        th, ph = float(x[0]), float(x[1])
        st, ct, sp, cp = math.sin(th), math.cos(th), math.sin(ph), math.cos(ph)
        # columns: d/dtheta, d/dphi
        grads = {
            "one": (0.0, 0.0),
            "X": (-sp * st, cp * ct),
            "Y": (sp * ct, cp * st),
            "Z": (0.0, -sp),
        }
        return np.array([[t.norm * g for g in grads[t.label[0]]] for t in terms])
    raise UnsupportedError(f"no eigenbasis for {type(m).__name__}")


def eigen_pairs(m: AnalyticManifold, count: int) -> list[EigenPair]:
    """First ``count`` eigenpairs, eigenvalues nondecreasing.

    Within an eigenspace the order is fixed: sine before cosine, and
    lexicographic ``(j, k)`` on tori. Hyperbolic spaces raise
    UnsupportedError (their spectrum is continuous).
    """
    terms = basis_terms(m, count)
    pairs = []
    for i, t in enumerate(terms):

        def phi(x, _t=t):
            return evaluate_basis(m, [_t], x)[..., 0]

        def dphi(x, v, _t=t):
            return float(evaluate_basis_jacobian(m, [_t], x)[0] @ np.atleast_1d(np.asarray(v, float)))

        pairs.append(EigenPair(i, t.eigenvalue, t.multiplicity, t.label, phi, dphi))
    return pairs


def eigenvalues(m: AnalyticManifold, count: int) -> np.ndarray:
    """Eigenvalues only (with multiplicity); much cheaper than ``eigen_pairs``."""
    if count < 1:
        raise DomainError("count must be at least 1")
    if isinstance(m, Circle):
        idx = np.arange(count)
        return ((idx + 1) // 2) ** 2 / m.R**2
    if isinstance(m, FlatTorus):
        lam, _, _, mult, _ = _torus_modes(m.A, m.B, count)
        return np.repeat(lam, mult)[:count]
    if isinstance(m, Sphere2):
        return np.array([t.eigenvalue for t in _sphere_terms(count)])
    raise UnsupportedError(f"{type(m).__name__} has a continuous spectrum")


def indices_for_eigenvalue(m: AnalyticManifold, value: float, search: int = 4096) -> list[int]:
    """Positions in the eigen-enumeration whose eigenvalue equals ``value``."""
    lam = eigenvalues(m, search)
    hit = np.flatnonzero(np.abs(lam - value) <= _EIG_TOL * max(1.0, abs(value)))
    if hit.size and hit[-1] == search - 1:
        return indices_for_eigenvalue(m, value, 2 * search)
    return [int(i) for i in hit]


# ---------------------------------------------------------------------------
# Cheeger's inequality, circle case


def circle_cheeger_constant(R: float = 1.0) -> float:
    """Cheeger constant of a circle of radius ``R``: two boundary points over half the length."""
    return 2.0 / (math.pi * R)


def cheeger_lower_bound(h: float) -> float:
    return 0.25 * h * h
