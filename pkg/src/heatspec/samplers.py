"""Deterministic point clouds for the experiments and worked examples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError
from .graphs import PointCloud

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

PHOTOS = np.array(
    [
        [1, 2, 3, 2, 3, 4, 3, 4, 3],
        [3, 4, 3, 4, 3, 2, 3, 2, 1],
        [2, 3, 4, 3, 4, 3, 4, 3, 2],
        [2, 1, 2, 1, 2, 3, 2, 3, 4],
        [3, 2, 1, 2, 1, 2, 1, 2, 3],
        [4, 3, 2, 3, 2, 1, 2, 1, 2],
    ],
    dtype=float,
)


# ---------------------------------------------------------------------------
# profiles of surfaces of revolution ds^2 + f(s)^2 dtheta^2


@dataclass(frozen=True)
class RevolutionProfile:
    """Piecewise profile ``f`` on ``[s_min, s_max]``.

    ``pieces`` lists ``(s_start, s_end, kind, a, b)``: ``kind`` is
    ``"rise"`` for ``a sin((s - s_start) / a + b)`` starting from angle
    ``b``, ``"fall"`` for ``a sin((s_end - s) / a)``, ``"flat"`` for ``a``.
    """

    kind: str
    params: tuple[float, ...]
    pieces: tuple[tuple[float, float, str, float, float], ...]

    @property
    def s_min(self) -> float:
        return self.pieces[0][0]

    @property
    def s_max(self) -> float:
        return self.pieces[-1][1]

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(p[1] for p in self.pieces[:-1])

    @staticmethod
    def _piece(p, s):
        s0, s1, kind, a, b = p
        if kind == "rise":
            return a * np.sin((s - s0) / a + b)
        if kind == "fall":
            return a * np.sin((s1 - s) / a)
        return np.full_like(s, a)

    def piece_values(self, i: int, s):
        return self._piece(self.pieces[i], np.asarray(s, dtype=float))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < self.s_min - 1e-12) or np.any(s > self.s_max + 1e-12):
            raise DomainError("profile evaluated outside its domain")
        out = np.zeros_like(s)
        for i, p in enumerate(self.pieces):
            last = i == len(self.pieces) - 1
            mask = (s >= p[0]) & ((s <= p[1]) if last else (s < p[1]))
            out = np.where(mask, self._piece(p, s), out)
        out = np.maximum(out, 0.0)
        return float(out) if out.ndim == 0 else out

    def continuity_residual(self) -> float:
        """Largest jump of ``f`` across the breakpoints."""
        jumps = [
            abs(float(self._piece(a, np.float64(a[1]))) - float(self._piece(b, np.float64(b[0]))))
            for a, b in zip(self.pieces[:-1], self.pieces[1:])
        ]
        return max(jumps, default=0.0)

    @property
    def area(self) -> float:
        """``2 pi int f ds``, exact per piece."""
        total = 0.0
        for s0, s1, kind, a, b in self.pieces:
            if kind == "flat":
                total += a * (s1 - s0)
            elif kind == "rise":
                u1 = (s1 - s0) / a + b
                total += a * a * (math.cos(b) - math.cos(u1))
            else:
                total += a * a * (1.0 - math.cos((s1 - s0) / a))
        return 2.0 * math.pi * total


def _cap_angle(R: float, r: float) -> float:
    """Angle ``alpha`` in ``[pi/2, pi]`` with ``R sin(alpha) = r``.

    The larger root makes the cap the bulk of the sphere (the bulb of a
    barbell rather than a shallow dimple). Found by bisection.
    """
    if r == R:
        return math.pi / 2.0
    return bisect(lambda a: R * math.sin(a) - r, math.pi / 2.0, math.pi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def _validate(r, L, radii):
    for v in (r, L, *radii):
        if not math.isfinite(v):
            raise DomainError("profile parameters must be finite")
    if r <= 0 or min(radii) <= 0:
        raise DomainError("radii must be positive")
    if L < 0:
        raise DomainError("cylinder length must be nonnegative")
    if r > min(radii):
        raise DomainError(f"neck radius r={r} exceeds the sphere radius {min(radii)}")


def make_profile(kind: str, **params) -> RevolutionProfile:
    """Barbell ``(R1, R2, L, r)`` or lollipop ``(R, r, L)`` profile.

    Barbell: sphere of radius ``R1``, cylinder of radius ``r`` on
    ``[-L/2, L/2]``, sphere of radius ``R2``. Each cap runs from its pole to
    the angle ``alpha_i`` with ``R_i sin(alpha_i) = r``, so
    ``s_{R_i} = L/2 + R_i alpha_i``.
    Lollipop: sphere of radius ``R``, cylinder, and a hemispherical cap of
    radius ``r``.
    """
    if kind == "barbell":
        R1, R2, L, r = (float(params[k]) for k in ("R1", "R2", "L", "r"))
        _validate(r, L, (R1, R2))
        a1, a2 = _cap_angle(R1, r), _cap_angle(R2, r)
        s1, s2 = L / 2.0 + R1 * a1, L / 2.0 + R2 * a2
        pieces = (
            (-s1, -L / 2.0, "rise", R1, 0.0),
            (-L / 2.0, L / 2.0, "flat", r, 0.0),
            (L / 2.0, s2, "fall", R2, 0.0),
        )
        return RevolutionProfile("barbell", (R1, R2, L, r), pieces)
    if kind == "lollipop":
        R, r, L = (float(params[k]) for k in ("R", "r", "L"))
        _validate(r, L, (R,))
        a = _cap_angle(R, r)
        sR = L / 2.0 + R * a
        sr = L / 2.0 + r * math.pi / 2.0
        pieces = (
            (-sR, -L / 2.0, "rise", R, 0.0),
            (-L / 2.0, L / 2.0, "flat", r, 0.0),
            (L / 2.0, sr, "fall", r, 0.0),
        )
        return RevolutionProfile("lollipop", (R, r, L), pieces)
    raise DomainError(f"unknown profile kind {kind!r}")


# ---------------------------------------------------------------------------
# shape specifications


@dataclass(frozen=True)
class CircleShape:
    R: float = 1.0
    n: int = 6


@dataclass(frozen=True)
class TorusGrid:
    A: float = 1.0
    B: float = 1.0
    n_theta: int = 16
    n_phi: int = 16


@dataclass(frozen=True)
class SphereEven:
    R: float = 1.0
    n: int = 500


@dataclass(frozen=True)
class Revolution:
    """Product grid: ``n_s`` equally spaced profile levels times ``n_theta`` angles."""

    profile: RevolutionProfile
    n_s: int
    n_theta: int


@dataclass(frozen=True)
class RevolutionEven:
    """About ``n`` points spread evenly by area over the surface."""

    profile: RevolutionProfile
    n: int


@dataclass(frozen=True)
class PhotoSet:
    pass


ShapeSpec = CircleShape | TorusGrid | SphereEven | Revolution | RevolutionEven | PhotoSet


def _need(cond, msg):
    if not cond:
        raise DomainError(msg)


def _positive(*vals):
    return all(math.isfinite(v) and v > 0 for v in vals)


def _ring(f, s, count, offset):
    th = (np.arange(count) + offset) * (2.0 * math.pi / count)
    return np.column_stack([f * np.cos(th), f * np.sin(th), np.full(count, s)])


def _surface(profile: RevolutionProfile, levels, counts, offsets):
    rows = []
    f = profile(np.asarray(levels))
    for s, fs, c, off in zip(levels, np.atleast_1d(f), counts, offsets):
        if fs <= 0:
            rows.append(np.array([[0.0, 0.0, s]]))
        else:
            rows.append(_ring(fs, s, c, off))
    return np.vstack(rows)


def sample(spec: ShapeSpec) -> PointCloud:
    """Points for a shape specification (no randomness involved).

    ``Revolution`` and ``RevolutionEven`` map ``(s, theta)`` to
    ``(f(s) cos theta, f(s) sin theta, s)``; rings where ``f = 0`` collapse to
    one pole point, and a ring too short for two points keeps a single one.
    """
    if isinstance(spec, CircleShape):
        _need(_positive(spec.R) and spec.n >= 3, "circle needs R > 0 and n >= 3")
        th = 2.0 * math.pi * np.arange(spec.n) / spec.n
        return PointCloud(spec.R * np.column_stack([np.cos(th), np.sin(th)]))
    if isinstance(spec, TorusGrid):
        _need(_positive(spec.A, spec.B), "torus radii must be positive")
        _need(spec.n_theta >= 3 and spec.n_phi >= 3, "grid counts must be >= 3")
        th = 2.0 * math.pi * np.arange(spec.n_theta) / spec.n_theta
        ph = 2.0 * math.pi * np.arange(spec.n_phi) / spec.n_phi
        T, P = np.meshgrid(th, ph, indexing="ij")
        T, P = T.ravel(), P.ravel()
        return PointCloud(
            np.column_stack([spec.A * np.cos(T), spec.A * np.sin(T), spec.B * np.cos(P), spec.B * np.sin(P)])
        )
    if isinstance(spec, SphereEven):
        _need(_positive(spec.R) and spec.n >= 3, "sphere needs R > 0 and n >= 3")
        i = np.arange(spec.n, dtype=float)
        z = 1.0 - (2.0 * i + 1.0) / spec.n
        rho = np.sqrt(1.0 - z * z)
        th = i * GOLDEN_ANGLE
        pts = np.column_stack([rho * np.cos(th), rho * np.sin(th), z])
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        return PointCloud(spec.R * pts)
    if isinstance(spec, Revolution):
        _need(spec.n_s >= 3 and spec.n_theta >= 3, "counts must be >= 3")
        p = spec.profile
        levels = np.linspace(p.s_min, p.s_max, spec.n_s)
        return PointCloud(_surface(p, levels, [spec.n_theta] * spec.n_s, [0.0] * spec.n_s))
    if isinstance(spec, RevolutionEven):
        _need(spec.n >= 3, "n must be >= 3")
        p = spec.profile
        h = math.sqrt(p.area / spec.n)
        n_s = max(3, int(round((p.s_max - p.s_min) / h)) + 1)
        levels = np.linspace(p.s_min, p.s_max, n_s)
        f = np.atleast_1d(p(levels))
        counts = [max(1, int(round(2.0 * math.pi * fs / h))) for fs in f]
        offsets = [0.5 * (k % 2) for k in range(n_s)]
        return PointCloud(_surface(p, levels, counts, offsets))
    if isinstance(spec, PhotoSet):
        return PointCloud(PHOTOS.copy(), labels=tuple(f"p{i}" for i in range(1, 7)))
    raise DomainError(f"unknown shape spec {spec!r}")
