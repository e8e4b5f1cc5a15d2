"""Neighbourhood graphs on point clouds, Gaussian weights and graph Laplacians."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .eigensolver import (
    BLOCK_RTOL,
    SpectralDecomposition,
    apply_sign_convention,
    multiplicity_blocks,
    spectral_decompose,
)
from .errors import ConstructionError, DomainError

LAPLACIANS = ("unnormalized", "random_walk", "symmetric", "difference")
_ALIASES = {"rw": "random_walk", "sym": "symmetric", "L": "unnormalized", "dodziuk": "difference"}


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise DomainError("points must be an (n, D) array with D >= 1")
        if pts.shape[0] < 2:
            raise DomainError("a point cloud needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise DomainError("points must be finite")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != pts.shape[0]:
                raise DomainError("one label per point is required")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class KNN:
    k: int


@dataclass(frozen=True)
class Epsilon:
    eps: float


def parse_rule(text: str) -> KNN | Epsilon:
    """``"knn:8"`` or ``"eps:1.01"``."""
    m = re.fullmatch(r"\s*(knn|eps|epsilon)\s*:\s*([^\s]+)\s*", str(text))
    if not m:
        raise DomainError(f"graph rule {text!r} is not of the form knn:K or eps:E")
    if m.group(1) == "knn":
        try:
            return KNN(int(m.group(2)))
        except ValueError:
            raise DomainError(f"bad neighbour count in {text!r}") from None
    try:
        return Epsilon(float(m.group(2)))
    except ValueError:
        raise DomainError(f"bad radius in {text!r}") from None


@dataclass(frozen=True)
class WeightedGraph:
    """Symmetric nonnegative weight matrix.

    With ``self_loops`` the diagonal holds each vertex's self-weight (1 for
    Gaussian weights); otherwise the diagonal is zero.
    """

    W: np.ndarray
    self_loops: bool = False

    def __post_init__(self):
        W = np.array(self.W, dtype=float, copy=True)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise DomainError("weight matrix must be square")
        if not np.all(np.isfinite(W)) or np.any(W < 0):
            raise DomainError("weights must be finite and nonnegative")
        if not np.array_equal(W, W.T):
            raise DomainError("weight matrix must be exactly symmetric")
        if not self.self_loops and np.any(np.diag(W) != 0):
            raise DomainError("graph without self-loops must have a zero diagonal")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.W.sum(axis=1)

    @property
    def adjacency(self) -> np.ndarray:
        """Boolean off-diagonal adjacency."""
        A = self.W > 0
        np.fill_diagonal(A, False)
        return A

    def edges(self):
        """``(i, j, w)`` for ``i < j`` with nonzero weight, row-major."""
        i, j = np.nonzero(np.triu(self.W, 1))
        return [(int(a), int(b), float(self.W[a, b])) for a, b in zip(i, j)]

    def scaled(self, c: float) -> "WeightedGraph":
        if not c > 0:
            raise DomainError("scale must be positive")
        return WeightedGraph(self.W * c, self.self_loops)


def _check_connected_vertices(A):
    lonely = np.flatnonzero(~A.any(axis=1))
    if lonely.size:
        v = int(lonely[0])
        raise ConstructionError(f"vertex {v} has no neighbours", vertex=v)


def build_adjacency(pc: PointCloud, rule) -> WeightedGraph:
    """Binary neighbourhood graph (no self-loops).

    ``KNN(k)``: ``i ~ j`` when either is among the other's ``k`` nearest
    points (ties go to the lower index). ``Epsilon(e)``: ``i ~ j`` when
    ``|x_i - x_j| < e``.

    Raises
    ------
    ConstructionError
        Some vertex ends up with no neighbour; ``.vertex`` names it.
    """
    if isinstance(rule, str):
        rule = parse_rule(rule)
    d = cdist(pc.points, pc.points)
    n = pc.n
    if isinstance(rule, KNN):
        k = int(rule.k)
        if k < 1 or k > n - 1:
            raise DomainError(f"k must lie in [1, {n - 1}]")
        masked = d.copy()
        np.fill_diagonal(masked, np.inf)
        nearest = np.argsort(masked, axis=1, kind="stable")[:, :k]
        A = np.zeros((n, n), dtype=bool)
        A[np.repeat(np.arange(n), k), nearest.ravel()] = True
        A = A | A.T
    elif isinstance(rule, Epsilon):
        if not rule.eps > 0:
            raise DomainError("epsilon must be positive")
        A = d < rule.eps
        np.fill_diagonal(A, False)
    else:
        raise DomainError(f"unknown graph rule {rule!r}")
    _check_connected_vertices(A)
    return WeightedGraph(A.astype(float), self_loops=False)


def weight_matrix(g: WeightedGraph, pc: PointCloud, t: float, self_loops: bool = True) -> WeightedGraph:
    """Gaussian weights ``exp(-|x_i - x_j|^2 / t)`` on the edges of ``g``.

    The diagonal is set to ``exp(0) = 1`` when ``self_loops``.
    """
    if not (math.isfinite(t) and t > 0):
        raise DomainError("t must be positive and finite")
    if g.n != pc.n:
        raise DomainError("graph and point cloud sizes differ")
    d2 = cdist(pc.points, pc.points, "sqeuclidean")
    W = np.where(g.adjacency, np.exp(-d2 / t), 0.0)
    # mirror the upper triangle so symmetry is bitwise
    W = np.triu(W, 1)
    W = W + W.T
    if self_loops:
        np.fill_diagonal(W, 1.0)
    return WeightedGraph(W, self_loops=self_loops)


def inject_weights(W, self_loops: bool | None = None) -> WeightedGraph:
    """Graph from a given weight matrix (e.g. rounded published weights).

    ``self_loops`` defaults to whether the diagonal is nonzero.
    """
    W = np.asarray(W, dtype=float)
    if self_loops is None:
        self_loops = bool(np.any(np.diag(W) != 0))
    g = WeightedGraph(W, self_loops)
    _check_connected_vertices(g.adjacency)
    return g


def _kind(kind: str) -> str:
    kind = _ALIASES.get(kind, kind)
    if kind not in LAPLACIANS:
        raise DomainError(f"unknown Laplacian kind {kind!r}")
    return kind


def laplacian(g: WeightedGraph, kind: str = "symmetric") -> np.ndarray:
    """Graph Laplacian.

    ``unnormalized``  ``D - W``
    ``random_walk``   ``D^{-1} (D - W)``
    ``symmetric``     ``I - D^{-1/2} W D^{-1/2}``
    ``difference``    ``A - D_A`` with ``A`` the binary adjacency without loops

    Raises DomainError for a vertex of zero degree.
    """
    kind = _kind(kind)
    if kind == "difference":
        A = g.adjacency.astype(float)
        deg = A.sum(axis=1)
        if np.any(deg == 0):
            raise DomainError(f"vertex {int(np.argmin(deg))} has zero degree")
        return A - np.diag(deg)
    W = g.W
    D = g.degrees
    if np.any(D <= 0):
        raise DomainError(f"vertex {int(np.argmin(D))} has zero degree")
    if kind == "unnormalized":
        return np.diag(D) - W
    if kind == "random_walk":
        return np.eye(g.n) - W / D[:, None]
    s = 1.0 / np.sqrt(D)
    # elementwise product keeps the result exactly symmetric
    return np.eye(g.n) - W * np.outer(s, s)


def rw_spectrum(g: WeightedGraph, method: str = "jacobi", block_rtol: float = BLOCK_RTOL) -> SpectralDecomposition:
    """Spectrum of ``D^{-1} L`` through the symmetric Laplacian.

    Eigenvectors ``w`` of ``I - D^{-1/2} W D^{-1/2}`` map to ``v = D^{-1/2} w``,
    renormalised to unit length in the inner product weighted by
    ``D / mean(D)``. On a regular graph these weights are all 1 and ``v = w``.
    """
    sym = spectral_decompose(laplacian(g, "symmetric"), method=method, block_rtol=block_rtol)
    D = g.degrees
    weights = D / D.mean()
    V = sym.eigenvectors / np.sqrt(D)[:, None]
    V = V / np.sqrt(np.sum(weights[:, None] * V * V, axis=0))
    V = apply_sign_convention(V)
    rw = laplacian(g, "random_walk")
    norm = max(float(np.max(np.sum(np.abs(rw), axis=1))), np.finfo(float).tiny)
    residual = float(np.max(np.abs(rw @ V - V * sym.eigenvalues))) / norm
    return SpectralDecomposition(
        eigenvalues=sym.eigenvalues,
        eigenvectors=V,
        blocks=multiplicity_blocks(sym.eigenvalues, block_rtol),
        weights=weights,
        kind="random_walk",
        residual=residual,
        sweeps=sym.sweeps,
    )


def decompose(g: WeightedGraph, kind: str = "random_walk", method: str = "jacobi") -> SpectralDecomposition:
    """Spectrum of the chosen normalized Laplacian (``random_walk`` or ``symmetric``)."""
    kind = _kind(kind)
    if kind == "random_walk":
        return rw_spectrum(g, method=method)
    if kind == "symmetric":
        return spectral_decompose(laplacian(g, "symmetric"), method=method)
    dec = spectral_decompose(laplacian(g, kind), method=method)
    return SpectralDecomposition(
        dec.eigenvalues, dec.eigenvectors, dec.blocks, dec.weights, kind, dec.residual, dec.sweeps
    )


def median_squared_edge(g: WeightedGraph, pc: PointCloud) -> float:
    """Median squared length over the edges of ``g`` (a common bandwidth choice)."""
    i, j = np.nonzero(np.triu(g.adjacency, 1))
    diff = pc.points[i] - pc.points[j]
    return float(np.median(np.sum(diff * diff, axis=1)))
