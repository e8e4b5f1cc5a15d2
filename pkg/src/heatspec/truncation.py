"""Heat traces and truncation budgets.

A ``Spectrum`` is either a finite list of eigenvalues or a generator for the
first ``M`` eigenvalues of an analytic manifold together with a rigorous
bound on ``sum_{j >= M} exp(-lambda_j t)``. Budgets combine the exact finite
sum with that bound, so the reported tail is an upper bound, not an estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfc

from .errors import BudgetError, DomainError, UnsupportedError
from .manifolds import AnalyticManifold, Circle, FlatTorus, Sphere2, eigenvalues

MAX_TERMS = 1_000_000
# the remainder past the generated terms must be this small relative to eps
_REMAINDER_SHARE = 1e-3


def _circle_remainder(R):
    # lambda_j = ceil(j/2)^2 / R^2 >= a j^2 / t with a = t / (4 R^2)
    def bound(t, M):
        a = t / (4.0 * R * R)
        return math.exp(-a * M * M) + 0.5 * math.sqrt(math.pi / a) * erfc(math.sqrt(a) * M)

    return bound


def _torus_remainder(A, B):
    # Lattice points of the ellipse j^2/A^2 + k^2/B^2 <= L number at most
    # (2A sqrt(L) + 1)(2B sqrt(L) + 1), so lambda_j >= sigma_j^2 with sigma_j
    # the positive root of 4AB s^2 + 2(A+B) s + 1 = j + 1.
    def sigma(j):
        ab, apb = A * B, A + B
        return (-2.0 * apb + math.sqrt(4.0 * apb * apb + 16.0 * ab * j)) / (8.0 * ab)

    def bound(t, M):
        s = sigma(M)
        integral = 8.0 * A * B * math.exp(-t * s * s) / (2.0 * t) + 2.0 * (A + B) * 0.5 * math.sqrt(
            math.pi / t
        ) * erfc(math.sqrt(t) * s)
        return math.exp(-t * s * s) + integral

    return bound


def _sphere_values(count):
    ell = np.floor(np.sqrt(np.arange(count))).astype(float)
    return ell * (ell + 1.0)


def _sphere_remainder(t, M):
    ell = int(math.isqrt(M))
    rest = ((ell + 1) ** 2 - M) * math.exp(-ell * (ell + 1) * t)
    # (2l+1) exp(-l(l+1)t) decreases for 2l+1 > sqrt(2/t); integral comparison
    # from l = ell applies once that holds
    if 2 * ell + 1 <= math.sqrt(2.0 / t):
        return math.inf
    return rest + math.exp(-ell * (ell + 1) * t) / t


@dataclass(frozen=True)
class Spectrum:
    """Nondecreasing eigenvalue sequence.

    Exactly one of ``values`` (finite spectrum) or ``generator`` (returns the
    first ``M`` eigenvalues) is set. ``remainder(t, M)`` bounds
    ``sum_{j >= M} exp(-lambda_j t)`` for generated spectra; when absent the
    budget is flagged as uncertified.
    """

    values: np.ndarray | None = None
    generator: Callable[[int], np.ndarray] | None = None
    remainder: Callable[[float, int], float] | None = None
    name: str = ""

    def __post_init__(self):
        if (self.values is None) == (self.generator is None):
            raise DomainError("give exactly one of values or generator")
        if self.values is not None:
            v = np.asarray(self.values, dtype=float)
            if v.ndim != 1 or v.size == 0:
                raise DomainError("spectrum values must be a nonempty 1-d sequence")
            if np.any(np.diff(v) < 0):
                raise DomainError("spectrum values must be nondecreasing")
            object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values, name=""):
        return cls(values=np.asarray(values, dtype=float), name=name)

    @classmethod
    def from_manifold(cls, m: AnalyticManifold) -> "Spectrum":
        if isinstance(m, Circle):
            return cls(generator=lambda n: eigenvalues(m, n), remainder=_circle_remainder(m.R), name=repr(m))
        if isinstance(m, FlatTorus):
            return cls(
                generator=lambda n: eigenvalues(m, n), remainder=_torus_remainder(m.A, m.B), name=repr(m)
            )
        if isinstance(m, Sphere2):
            return cls(generator=_sphere_values, remainder=_sphere_remainder, name=repr(m))
        raise UnsupportedError(f"{type(m).__name__} has no discrete spectrum")

    @property
    def finite(self) -> bool:
        return self.values is not None

    def first(self, count: int) -> np.ndarray:
        if self.finite:
            if count > self.values.size:
                raise DomainError(f"spectrum has only {self.values.size} eigenvalues")
            return self.values[:count]
        return np.asarray(self.generator(count), dtype=float)


@dataclass(frozen=True)
class TruncationBudget:
    t: float
    eps: float
    N: int
    tail: float
    certified: bool = True


def _check(t, eps=None):
    if not (math.isfinite(t) and t > 0):
        raise DomainError("time must be positive and finite")
    if eps is not None and not (math.isfinite(eps) and eps > 0):
        raise DomainError("tolerance must be positive and finite")


def _tails(lam, t, remainder):
    """``tails[N] = sum_{j > N} exp(-lambda_j t)`` for N = 0..len-1, plus ``remainder``."""
    w = np.exp(-lam * t)
    # reversed cumulative sum adds the small terms first
    rev = np.cumsum(w[::-1])[::-1]
    return np.append(rev[1:], 0.0) + remainder


def tail_trace_bound(s: Spectrum, t: float, eps: float) -> TruncationBudget:
    """Smallest ``N`` with ``sum_{j > N} exp(-lambda_j t) < eps``.

    Raises
    ------
    BudgetError
        If no ``N`` within ``MAX_TERMS`` eigenvalues can be certified.
    """
    t, eps = float(t), float(eps)
    _check(t, eps)
    if s.finite:
        tails = _tails(s.values, t, 0.0)
        N = int(np.argmax(tails < eps))
        return TruncationBudget(t, eps, N, float(tails[N]), True)

    M = 64
    certified = s.remainder is not None
    while True:
        lam = s.first(M)
        if certified:
            rem = s.remainder(t, M)
        else:
            # geometric extrapolation from the last two generated terms
            a, b = np.exp(-lam[-2:] * t)
            if b == 0.0:
                rem = 0.0  # the terms have already underflowed
            else:
                rem = math.inf if b >= a else b * b / (a - b)
        if rem < _REMAINDER_SHARE * eps:
            break
        if 2 * M > MAX_TERMS:
            if rem < eps:
                break
            raise BudgetError(
                f"tail not below {eps} within {MAX_TERMS} eigenvalues at t={t}", residual=rem
            )
        M *= 2
    tails = _tails(lam, t, rem)
    ok = tails < eps
    if not ok.any():
        raise BudgetError(f"tail not below {eps} at t={t}", residual=float(tails[-1]))
    N = int(np.argmax(ok))
    return TruncationBudget(t, eps, N, float(tails[N]), certified)


def heat_trace(s: Spectrum, t: float, N: int | None = None) -> float:
    """``sum_{j=0}^{N} exp(-lambda_j t)``.

    With ``N=None`` a finite spectrum is summed completely and a generated one
    until the certified tail is below 1e-12.
    """
    t = float(t)
    _check(t)
    if N is None:
        N = s.values.size - 1 if s.finite else tail_trace_bound(s, t, 1e-12).N
    if int(N) != N or N < 0:
        raise DomainError("N must be a nonnegative integer")
    lam = s.first(int(N) + 1)
    return float(np.sum(np.exp(-lam * t)[::-1]))


def circle_uniform_sl_number(R: float, t: float, eps: float) -> int:
    """Smallest ``N`` with ``sup |h_t - h_t^N| < eps`` on a circle of radius ``R``.

    Uses ``|phi_j|^2 <= 1 / (pi R)`` for every nonconstant eigenfunction.
    """
    _check(float(t), float(eps))
    return tail_trace_bound(Spectrum.from_manifold(Circle(R)), t, eps * math.pi * R).N
