"""Dense symmetric eigensolver (cyclic Jacobi rotations)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError, NumericError

MAX_SWEEPS = 100
OFF_RTOL = 1e-14
BLOCK_RTOL = 1e-8


@njit(cache=True)
def _off_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return math.sqrt(s)


@njit(cache=True)
def _jacobi(a, tol, max_sweeps):
    """Diagonalise ``a`` in place; returns (V, sweeps used, final off-norm).

    ``sweeps`` is -1 when the tolerance was not reached.
    """
    n = a.shape[0]
    v = np.eye(n)
    off = _off_norm(a)
    for sweep in range(max_sweeps):
        if off <= tol:
            return v, sweep, off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        off = _off_norm(a)
    if off <= tol:
        return v, max_sweeps, off
    return v, -1, off


def apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry of largest magnitude is positive."""
    vectors = np.array(vectors, dtype=float, copy=True)
    if vectors.size == 0:
        return vectors
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def multiplicity_blocks(values: np.ndarray, rtol: float = BLOCK_RTOL) -> tuple[tuple[int, int], ...]:
    """Half-open index ranges of numerically equal consecutive eigenvalues.

    Two neighbours belong together when they differ by at most ``rtol`` times
    the largest eigenvalue magnitude.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return ()
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    cuts = np.flatnonzero(np.diff(values) > rtol * scale) + 1
    edges = np.concatenate([[0], cuts, [values.size]])
    return tuple((int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and eigenvector columns.

    ``weights`` defines the inner product the columns are orthonormal in:
    ``<u, v> = sum(weights * u * v)``; all ones for the Euclidean product.
    ``residual`` is ``max_j ||M v_j - lambda_j v_j||_inf / ||M||_inf`` for the
    matrix that was actually decomposed.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    blocks: tuple[tuple[int, int], ...]
    weights: np.ndarray
    kind: str = "symmetric"
    residual: float = 0.0
    sweeps: int = 0

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]

    def gram(self) -> np.ndarray:
        V = self.eigenvectors
        return V.T @ (self.weights[:, None] * V)


def _check_symmetric(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("matrix must be square")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if float(np.max(np.abs(M - M.T))) > 1e-12 * max(scale, np.finfo(float).tiny):
        raise DomainError("matrix is not symmetric")
    return 0.5 * (M + M.T)


def _residual(M, values, vectors):
    norm = max(float(np.max(np.sum(np.abs(M), axis=1))), np.finfo(float).tiny)
    return float(np.max(np.abs(M @ vectors - vectors * values))) / norm


def spectral_decompose(M, method: str = "jacobi", block_rtol: float = BLOCK_RTOL) -> SpectralDecomposition:
    """Eigen-decomposition of a symmetric matrix.

    Parameters
    ----------
    M : (n, n) array_like
        Symmetric to 1e-12 relative (max-entry) tolerance.
    method : {"jacobi", "lapack"}
        ``"jacobi"`` runs cyclic Jacobi sweeps until the off-diagonal
        Frobenius norm is below ``1e-14 ||M||_F``; ``"lapack"`` defers to
        ``numpy.linalg.eigh``.

    Returns
    -------
    SpectralDecomposition
        Ascending eigenvalues, orthonormal columns with the sign convention
        applied, and multiplicity blocks.

    Raises
    ------
    DomainError
        Non-square, non-finite or non-symmetric input.
    NumericError
        Jacobi sweeps did not converge within ``MAX_SWEEPS``.
    """
    A = _check_symmetric(M)
    sweeps = 0
    if method == "jacobi":
        tol = OFF_RTOL * float(np.linalg.norm(A))
        work = np.array(A, dtype=np.float64, order="C", copy=True)
        V, sweeps, off = _jacobi(work, tol, MAX_SWEEPS)
        if sweeps < 0:
            raise NumericError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps", residual=off)
        values = np.diag(work).copy()
    elif method == "lapack":
        values, V = np.linalg.eigh(A)
    else:
        raise DomainError(f"unknown eigensolver {method!r}")
    order = np.argsort(values, kind="stable")
    values = values[order]
    V = apply_sign_convention(V[:, order])
    return SpectralDecomposition(
        eigenvalues=values,
        eigenvectors=V,
        blocks=multiplicity_blocks(values, block_rtol),
        weights=np.ones(A.shape[0]),
        kind="symmetric",
        residual=_residual(A, values, V),
        sweeps=sweeps,
    )
