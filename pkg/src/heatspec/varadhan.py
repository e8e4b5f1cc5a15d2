"""Squared distance from small-time heat kernels, ``d^2 ~ -4 t log h_t``."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedError
from .kernels import log_heat_kernel
from .manifolds import (
    AnalyticManifold,
    ConstantCurvature,
    Sphere2,
    geodesic_distance,
    is_cut_locus_pair,
)


def varadhan_estimate(h, t):
    """``-4 t log h``.

    Raises DomainError for ``h <= 0`` or ``t <= 0``.
    """
    h = np.asarray(h, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(h <= 0) or not np.all(np.isfinite(h)):
        raise DomainError("kernel value must be positive and finite")
    if np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise DomainError("time must be positive and finite")
    out = -4.0 * t * np.log(h)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class VaradhanRow:
    t: float
    estimate: float
    truth: float
    abs_error: float


@dataclass(frozen=True)
class VaradhanReport:
    """Rows ordered by decreasing ``t``.

    ``cut_locus`` marks pairs whose distance is realised by two geodesics;
    ``nonmonotone`` lists row indices where the error grew compared with the
    previous (larger) time.
    """

    rows: tuple[VaradhanRow, ...]
    cut_locus: bool = False
    nonmonotone: tuple[int, ...] = field(default_factory=tuple)

    def threshold_time(self, eps: float) -> float | None:
        """Largest ``t`` in the sweep whose error is below ``eps``."""
        ok = [r.t for r in self.rows if r.abs_error < eps]
        return max(ok) if ok else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "estimate", "truth", "abs_error"])
        for r in self.rows:
            w.writerow([format(v, ".17g") for v in (r.t, r.estimate, r.truth, r.abs_error)])
        return buf.getvalue()


def varadhan_sweep(m: AnalyticManifold, p, q, t_list, method=None) -> VaradhanReport:
    """Tabulate ``-4 t log h_t(p, q)`` against the true ``d(p, q)^2``.

    Times are sorted into decreasing order. The kernel is taken in log form so
    values far below the floating-point range still give finite estimates.
    Band-limited sphere kernels are refused because they have no small-time
    asymptotics.
    """
    if isinstance(m, Sphere2) or (isinstance(m, ConstantCurvature) and m.kappa > 0):
        raise UnsupportedError("only the degree-one sphere kernel is available; it has no small-time limit")
    ts = sorted((float(t) for t in t_list), reverse=True)
    if not ts:
        raise DomainError("t_list is empty")
    if any(not (math.isfinite(t) and t > 0) for t in ts):
        raise DomainError("times must be positive and finite")
    d2 = float(geodesic_distance(m, p, q)) ** 2
    rows = []
    for t in ts:
        est = -4.0 * t * float(log_heat_kernel(m, p, q, t, method))
        rows.append(VaradhanRow(t, est, d2, abs(est - d2)))
    bad = tuple(i for i in range(1, len(rows)) if rows[i].abs_error > rows[i - 1].abs_error)
    return VaradhanReport(tuple(rows), is_cut_locus_pair(m, p, q), bad)
