"""Heat-kernel embeddings of the model manifolds into Euclidean space.

Each mode maps a point ``x`` to ``c * (w_j phi_j(x))_j`` for a list of
eigen-indices ``j`` with per-coordinate weights ``w_j`` and a global factor
``c``:

=============== ================= ==================== =====================
mode            indices           w_j                  c
=============== ================= ==================== =====================
bbg_raw         1..N              exp(-lambda_j t/2)   1
bbg_rescaled    1..N              exp(-lambda_j t/2)   sqrt(2)(4pi)^{n/4} t^{(n+2)/4}
volume_scaled   1..N              exp(-lambda_j t/2)   sqrt(Vol)
unit_sphere     1..N              exp(-lambda_j t/2)   1 / |image|
selective       given             1 or exp(-lambda_j t/2)  1
diffusion       1..N              exp(-lambda_j tau)   1
=============== ================= ==================== =====================

``n`` is the manifold dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NumericError, UnsupportedError
from .manifolds import (
    TWO_PI,
    AnalyticManifold,
    basis_terms,
    evaluate_basis,
    evaluate_basis_jacobian,
    eigenvalues,
    normalize_point,
)
from .truncation import Spectrum, tail_trace_bound

MODES = ("bbg_raw", "bbg_rescaled", "volume_scaled", "unit_sphere", "selective", "diffusion")


@dataclass(frozen=True)
class EmbeddingSpec:
    """Which heat-kernel embedding to use; see the module table."""

    mode: str
    t: float | None = None
    N: int | None = None
    indices: tuple[int, ...] | None = None
    weighted: bool = False
    tau: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown embedding mode {self.mode!r}")
        if self.mode == "selective":
            if not self.indices:
                raise DomainError("selective embedding needs a nonempty index set")
            idx = tuple(int(i) for i in self.indices)
            if min(idx) < 0:
                raise DomainError("eigen-indices are nonnegative")
            object.__setattr__(self, "indices", idx)
            if self.weighted:
                self._need_positive("t", self.t)
            return
        if self.N is None or int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be an integer >= 1")
        if self.mode == "diffusion":
            if self.tau is None or not (math.isfinite(self.tau) and self.tau >= 0):
                raise DomainError("diffusion time tau must be nonnegative")
        else:
            self._need_positive("t", self.t)

    @staticmethod
    def _need_positive(name, v):
        if v is None or not (math.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be positive")

    @property
    def eigen_indices(self) -> tuple[int, ...]:
        if self.mode == "selective":
            return self.indices
        return tuple(range(1, int(self.N) + 1))

    @classmethod
    def bbg_raw(cls, t, N):
        return cls("bbg_raw", t=t, N=N)

    @classmethod
    def bbg_rescaled(cls, t, N):
        return cls("bbg_rescaled", t=t, N=N)

    @classmethod
    def volume_scaled(cls, t, N):
        return cls("volume_scaled", t=t, N=N)

    @classmethod
    def unit_sphere(cls, t, N):
        return cls("unit_sphere", t=t, N=N)

    @classmethod
    def selective(cls, indices, weighted=False, t=None):
        return cls("selective", t=t, indices=tuple(indices), weighted=weighted)

    @classmethod
    def diffusion(cls, tau, N):
        return cls("diffusion", tau=tau, N=N)


def rescaling_prefactor(n: int, t: float) -> float:
    """``sqrt(2) (4 pi)^{n/4} t^{(n+2)/4}``."""
    return math.sqrt(2.0) * (4.0 * math.pi) ** (n / 4.0) * t ** ((n + 2) / 4.0)


def _terms_and_weights(m: AnalyticManifold, spec: EmbeddingSpec):
    idx = spec.eigen_indices
    terms = basis_terms(m, max(idx) + 1)
    terms = [terms[i] for i in idx]
    lam = np.array([term.eigenvalue for term in terms])
    if spec.mode == "diffusion":
        w = np.exp(-lam * spec.tau)
    elif spec.mode == "selective" and not spec.weighted:
        w = np.ones_like(lam)
    else:
        w = np.exp(-0.5 * lam * spec.t)
    if spec.mode == "bbg_rescaled":
        w = w * rescaling_prefactor(m.dimension, spec.t)
    elif spec.mode == "volume_scaled":
        if m.volume is None:
            raise UnsupportedError("volume scaling needs a compact manifold")
        w = w * math.sqrt(m.volume)
    return terms, w


def embed_points(m: AnalyticManifold, points, spec: EmbeddingSpec) -> np.ndarray:
    """Embed a batch of points; returns shape ``batch + (len(indices),)``.

    Raises UnsupportedError for manifolds without an eigenbasis.
    """
    terms, w = _terms_and_weights(m, spec)
    y = evaluate_basis(m, terms, points) * w
    if spec.mode == "unit_sphere":
        y = y / np.linalg.norm(y, axis=-1, keepdims=True)
    if not np.all(np.isfinite(y)):
        raise NumericError("embedding produced non-finite coordinates")
    return y


def embed_point(m: AnalyticManifold, x, spec: EmbeddingSpec) -> np.ndarray:
    """Image of a single point."""
    return np.asarray(embed_points(m, x, spec), dtype=float).reshape(-1)


def embedding_jacobian(m: AnalyticManifold, x, spec: EmbeddingSpec) -> np.ndarray:
    """Derivative of the embedding at ``x``: shape ``(len(indices), dim)``."""
    terms, w = _terms_and_weights(m, spec)
    J = w[:, None] * evaluate_basis_jacobian(m, terms, x)
    if spec.mode == "unit_sphere":
        y = w * evaluate_basis(m, terms, x)
        r = np.linalg.norm(y)
        k = y / r
        J = (J - np.outer(k, k @ J)) / r
    return J


def pullback_tensor(m: AnalyticManifold, x, spec: EmbeddingSpec) -> np.ndarray:
    """Induced metric ``J^T J`` in chart coordinates."""
    J = embedding_jacobian(m, x, spec)
    return J.T @ J


def pullback_metric(m: AnalyticManifold, x, v, spec: EmbeddingSpec) -> float:
    """Squared Euclidean length of the image of the tangent vector ``v``."""
    J = embedding_jacobian(m, x, spec)
    dv = J @ np.atleast_1d(np.asarray(v, dtype=float))
    return float(dv @ dv)


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class Path:
    """Curve ``u -> point(u)`` on ``[0, 1]``.

    ``velocity`` returns chart-coordinate derivatives; when omitted it is
    formed by central differences.
    """

    point: Callable[[float], object]
    velocity: Callable[[float], object] | None = None

    def tangent(self, u: float):
        if self.velocity is not None:
            return self.velocity(u)
        h = 1e-6
        a = np.asarray(self.point(u + h), dtype=float)
        b = np.asarray(self.point(u - h), dtype=float)
        return (a - b) / (2.0 * h)

    @classmethod
    def circle_arc(cls, theta0: float, theta1: float):
        """Arc of a circle chart from ``theta0`` to ``theta1`` (no wrapping)."""
        d = theta1 - theta0
        return cls(lambda u: theta0 + d * u, lambda u: d)

    @classmethod
    def full_circle(cls):
        return cls.circle_arc(0.0, TWO_PI)

    @classmethod
    def constant(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(lambda u: x, lambda u: np.zeros_like(x))

    @classmethod
    def torus_line(cls, start, direction):
        """Straight line ``start + u * direction`` in torus angle coordinates."""
        s = np.asarray(start, dtype=float)
        d = np.asarray(direction, dtype=float)
        return cls(lambda u: s + u * d, lambda u: d)


def _midpoint_length(m, curve, spec, samples):
    u = (np.arange(samples) + 0.5) / samples
    speeds = [math.sqrt(max(pullback_metric(m, curve.point(ui), curve.tangent(ui), spec), 0.0)) for ui in u]
    return math.fsum(speeds) / samples


def embedded_curve_length(
    m: AnalyticManifold, curve: Path, spec: EmbeddingSpec, samples: int | None = None, rtol: float = 1e-9
) -> float:
    """Length of the image of ``curve`` under the embedding.

    With ``samples`` the composite midpoint rule with that many subintervals
    is returned. Otherwise the count doubles from 64 until two successive
    values agree to ``rtol`` (relative), up to ``2**20`` subintervals.
    """
    if samples is not None:
        if int(samples) < 2:
            raise DomainError("samples must be at least 2")
        return _midpoint_length(m, curve, spec, int(samples))
    n = 64
    prev = _midpoint_length(m, curve, spec, n)
    while n < 2**20:
        n *= 2
        cur = _midpoint_length(m, curve, spec, n)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise NumericError("curve length did not converge", residual=abs(cur - prev))


def truncation_for(m: AnalyticManifold, t: float, eps: float = 1e-12) -> int:
    """Coordinate count ``N`` whose omitted trace tail is below ``eps``.

    Rounded up so the last eigenspace is complete, keeping the embedding
    independent of the basis chosen inside an eigenspace.
    """
    N = max(tail_trace_bound(Spectrum.from_manifold(m), t, eps).N, 1)
    lam = eigenvalues(m, N + 1 + basis_terms(m, N + 1)[N].multiplicity)
    while N + 1 < lam.size and lam[N + 1] == lam[N]:
        N += 1
    return N


def theta_length(t: float, pairs: int | None = None) -> float:
    """Length of the unit circle under the rescaled embedding, in closed form.

    ``2 pi (4 pi^{-1/2} t^{3/2} sum_{j=1}^{J} j^2 exp(-j^2 t))^{1/2}`` with
    ``J = pairs`` frequencies (all of them when omitted).
    """
    if not t > 0:
        raise DomainError("time must be positive")
    if pairs is None:
        pairs = int(math.ceil(math.sqrt(80.0 / t))) + 2
    j = np.arange(1, int(pairs) + 1, dtype=float)
    s = math.fsum(j**2 * np.exp(-(j**2) * t))
    return TWO_PI * math.sqrt(4.0 / math.sqrt(math.pi) * t**1.5 * s)


def diffusion_distance(m: AnalyticManifold, x, y, tau: float, N: int) -> float:
    """``(sum_{j=1}^{N} exp(-2 lambda_j tau) (phi_j(x) - phi_j(y))^2)^{1/2}``."""
    if not (math.isfinite(tau) and tau > 0):
        raise DomainError("tau must be positive")
    spec = EmbeddingSpec.diffusion(tau, N)
    normalize_point(m, x)
    normalize_point(m, y)
    return float(np.linalg.norm(embed_point(m, x, spec) - embed_point(m, y, spec)))
