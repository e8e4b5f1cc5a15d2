"""Eigenmaps, diffusion maps and block-wise orthogonal alignment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigensolver import SpectralDecomposition
from .errors import DomainError, SpectralRangeError


def _check_N(dec: SpectralDecomposition, N: int):
    if int(N) != N or N < 1:
        raise DomainError("N must be an integer >= 1")
    if dec.eigenvalues.size < N + 1:
        raise DomainError(f"need {N + 1} eigenpairs, decomposition has {dec.eigenvalues.size}")


def eigenmap(dec: SpectralDecomposition, N: int) -> np.ndarray:
    """Rows ``(v_1(i), ..., v_N(i))``; the constant ``v_0`` is skipped."""
    _check_N(dec, N)
    return np.array(dec.eigenvectors[:, 1 : N + 1])


def diffusion_weights(dec: SpectralDecomposition, tau: float, N: int) -> np.ndarray:
    """``(1 - mu_j)^tau`` for ``j = 1..N``.

    Raises SpectralRangeError when ``1 - mu_j < -1e-12``; smaller negative
    values are rounding and are clipped to 0.
    """
    if not (np.isfinite(tau) and tau >= 0):
        raise DomainError("tau must be nonnegative")
    _check_N(dec, N)
    base = 1.0 - dec.eigenvalues[1 : N + 1]
    if np.any(base < -1e-12):
        j = int(np.argmin(base)) + 1
        raise SpectralRangeError(f"1 - mu_{j} = {base[j - 1]:.3g} is negative")
    return np.power(np.clip(base, 0.0, None), tau)


def diffusion_map(dec: SpectralDecomposition, tau: float, N: int) -> np.ndarray:
    """Eigenmap columns scaled by ``(1 - mu_j)^tau``."""
    return eigenmap(dec, N) * diffusion_weights(dec, tau, N)


def column_blocks(dec: SpectralDecomposition, N: int) -> list[tuple[int, int]]:
    """Multiplicity blocks of eigen-indices ``1..N`` as eigenmap column ranges.

    A block cut by ``N`` is kept as the part that fits.
    """
    out = []
    for a, b in dec.blocks:
        a, b = max(a, 1), min(b, N + 1)
        if a < b:
            out.append((a - 1, b - 1))
    return out


@dataclass(frozen=True)
class AlignmentResult:
    Q: np.ndarray
    scale: float
    residual: float

    def to_dict(self) -> dict:
        return {
            "scale": float(self.scale),
            "residual": float(self.residual),
            "Q": [float(x) for x in np.asarray(self.Q).ravel()],
        }


def _normalize_blocks(blocks, ncols):
    if blocks is None:
        return [(0, ncols)]
    blocks = sorted((int(a), int(b)) for a, b in blocks)
    pos = 0
    for a, b in blocks:
        if a != pos or b <= a:
            raise DomainError("blocks must partition the columns into contiguous ranges")
        pos = b
    if pos != ncols:
        raise DomainError("blocks must cover every column")
    return blocks


def orthogonal_align(A, B, allow_scale: bool = False, blocks=None) -> AlignmentResult:
    """Best block-diagonal orthogonal ``Q`` (and scale) with ``A ~ scale * B @ Q``.

    Parameters
    ----------
    A, B : (n, N) array_like
        Target and moving embeddings.
    allow_scale : bool
        Fit one global positive scale.
    blocks : sequence of (start, stop), optional
        Column ranges rotated independently (default: one block).

    Returns
    -------
    AlignmentResult
        ``residual`` is the root-mean-square row error ``||A_i - scale B_i Q||``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.ndim != 2:
        raise DomainError(f"shape mismatch: {A.shape} vs {B.shape}")
    N = A.shape[1]
    Q = np.zeros((N, N))
    trace = 0.0
    for a, b in _normalize_blocks(blocks, N):
        U, s, Vt = np.linalg.svd(B[:, a:b].T @ A[:, a:b])
        Q[a:b, a:b] = U @ Vt
        trace += float(s.sum())
    scale = 1.0
    if allow_scale:
        bb = float(np.sum(B * B))
        if bb > 0 and trace > 0:
            scale = trace / bb
    R = A - scale * (B @ Q)
    residual = float(np.sqrt(np.mean(np.sum(R * R, axis=1))))
    return AlignmentResult(Q, scale, residual)
