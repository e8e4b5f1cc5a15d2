"""Self-contained verification suites behind ``heatspec verify``.

Each suite returns a ``SuiteReport`` with one ``Check`` per assertion. The
sample points are fixed low-discrepancy sequences, so reports are
reproducible without seeds.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

from . import embeddings as emb
from .eigenmaps import eigenmap, orthogonal_align
from .graphs import KNN, Epsilon, build_adjacency, inject_weights, median_squared_edge, rw_spectrum, weight_matrix
from .kernels import (
    EigenSum,
    ImageSum,
    log_constant_curvature_kernel,
    heat_kernel,
    log_heat_kernel,
    log_h3_closed_form,
    millson_step,
)
from .manifolds import (
    Circle,
    FlatTorus,
    circle_cheeger_constant,
    cheeger_lower_bound,
    indices_for_eigenvalue,
)
from .samplers import CircleShape, PhotoSet, RevolutionEven, SphereEven, make_profile, sample
from .varadhan import varadhan_sweep

SQRT3 = math.sqrt(3.0)
# relative rounding allowance when an inequality is tight
BOUND_RTOL = 1e-12
PHOTO_TARGET = np.array(
    [
        [SQRT3 / 2, 0.5],
        [-SQRT3 / 2, 0.5],
        [0.0, 1.0],
        [SQRT3 / 2, -0.5],
        [0.0, -1.0],
        [-SQRT3 / 2, -0.5],
    ]
)


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    op: str = "<="
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, value, limit, op="<=", detail=""):
        value, limit = float(value), float(limit)
        ok = {"<=": value <= limit, ">=": value >= limit, ">": value > limit}[op]
        self.checks.append(Check(name, value, limit, bool(ok), op, detail))

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def angle_pairs(count: int) -> np.ndarray:
    """Deterministic, well-spread pairs of angles in ``[0, 2 pi)``."""
    k = np.arange(1, count + 1)
    a = np.mod(k * (math.sqrt(5.0) - 1.0) / 2.0, 1.0)
    b = np.mod(k * (math.sqrt(2.0) - 1.0), 1.0)
    return 2.0 * math.pi * np.column_stack([a, b])


def hexagon_target() -> np.ndarray:
    i = np.arange(6)
    return np.column_stack([np.cos(2 * np.pi * i / 6), np.sin(2 * np.pi * i / 6)]) / SQRT3


def hexagon_eigenvalue(t: float = 1.0) -> float:
    q = math.exp(-1.0 / t)
    return 2.0 * q / (1.0 + 2.0 * q) * 0.5


# ---------------------------------------------------------------------------
# suites


def suite_poisson() -> SuiteReport:
    rep = SuiteReport("poisson")
    pairs = angle_pairs(20)
    worst = 0.0
    for R in (0.5, 1.0, 2.0):
        m = Circle(R)
        for t in (0.1, 0.5, 1.0, 2.0):
            a = heat_kernel(m, pairs[:, 0], pairs[:, 1], t, ImageSum(10))
            b = heat_kernel(m, pairs[:, 0], pairs[:, 1], t, EigenSum(tol=1e-12))
            worst = max(worst, float(np.max(np.abs(a - b))))
    rep.add("max |image - eigen| over R, t, 20 pairs", worst, 1e-9)
    h = heat_kernel(Circle(1.0), 0.0, 0.0, 1.0)
    rep.add("|h_1(0,0) - 0.282124|", abs(h - 0.282124), 1e-5, detail=f"h_1(0,0) = {h:.10f}")
    return rep


def suite_varadhan() -> SuiteReport:
    rep = SuiteReport("varadhan")
    r = varadhan_sweep(Circle(1.0), 0.0, math.pi / 2, [1e-2, 1e-3, 1e-4])
    for row, lim in zip(r.rows, (0.12, 0.02, 0.003)):
        rep.add(f"abs error at t={row.t:g}", row.abs_error, lim, detail=f"estimate {row.estimate:.8f}")
    errs = [row.abs_error for row in r.rows]
    rep.add("non-decreasing steps in the error", sum(x <= y for x, y in zip(errs, errs[1:])), 0)
    return rep


def suite_theta() -> SuiteReport:
    rep = SuiteReport("theta")
    m = Circle(1.0)
    N = emb.truncation_for(m, 0.01, 1e-12)
    L = emb.embedded_curve_length(m, emb.Path.full_circle(), emb.EmbeddingSpec.bbg_rescaled(0.01, N))
    rep.add("|L - 2 pi| at t=0.01", abs(L - 2 * math.pi), 1e-6, detail=f"N={N}, L={L:.12f}")
    L1 = emb.theta_length(1.0)
    rep.add("|L - 6.27703| at t=1 (closed form)", abs(L1 - 6.27703), 1e-4, detail=f"L={L1:.8f}")
    return rep


def hexagon_decomposition(t: float = 1.0):
    pc = sample(CircleShape(1.0, 6))
    g = weight_matrix(build_adjacency(pc, Epsilon(1.01)), pc, t)
    return rw_spectrum(g)


def suite_hexagon() -> SuiteReport:
    rep = SuiteReport("hexagon")
    dec = hexagon_decomposition(1.0)
    mu = hexagon_eigenvalue(1.0)
    rep.add(
        "|mu_1 - formula|",
        max(abs(dec.eigenvalues[1] - mu), abs(dec.eigenvalues[2] - mu)),
        1e-10,
        detail=f"mu_1 = mu_2 = {dec.eigenvalues[1]:.12f}",
    )
    res = orthogonal_align(hexagon_target(), eigenmap(dec, 2)).residual
    rep.add("eigenmap residual vs circle of radius 1/sqrt(3)", res, 1e-10)
    return rep


def photo_graph():
    """The photo 6-cycle with the published rounded weights 0.05 and unit diagonal."""
    pc = sample(PhotoSet())
    adj = build_adjacency(pc, Epsilon(4.0))
    W = 0.05 * adj.W
    np.fill_diagonal(W, 1.0)
    return inject_weights(W)


def suite_photos() -> SuiteReport:
    rep = SuiteReport("photos")
    dec = rw_spectrum(photo_graph())
    res = orthogonal_align(PHOTO_TARGET, eigenmap(dec, 2), allow_scale=True)
    rep.add("eigenmap residual (with scale)", res.residual, 1e-10, detail=f"scale {res.scale:.12f}")
    rep.add("|mu_1 - 1/22|", abs(dec.eigenvalues[1] - 1.0 / 22.0), 1e-12)
    return rep


def thin_torus_selective_spec():
    m = FlatTorus(1.0, 0.1)
    block = indices_for_eigenvalue(m, 100.0)
    # theta-dependent pair first, then the phi pair
    order = block[2:] + block[:2]
    return m, emb.EmbeddingSpec.selective(order, weighted=False)


def suite_selective() -> SuiteReport:
    rep = SuiteReport("selective")
    m, spec = thin_torus_selective_spec()
    target = np.diag([500.0 / math.pi**2, 5.0 / math.pi**2])
    grid = 2 * math.pi * np.arange(32) / 32
    worst = max(
        float(np.max(np.abs(emb.pullback_tensor(m, (a, b), spec) - target))) for a in grid for b in grid
    )
    rep.add("max |pullback - diag(500, 5)/pi^2| on 32x32", worst, 1e-12)
    return rep


def suite_thin_torus() -> SuiteReport:
    rep = SuiteReport("thin-torus")
    m = FlatTorus(1.0, 0.1)
    t = 0.3
    N = 18  # 19 terms: the constant and nine theta frequencies
    th = np.linspace(0, 2 * math.pi, 13, endpoint=False)
    ph = np.linspace(0, 2 * math.pi, 11, endpoint=False)
    var = 0.0
    dev = 0.0
    for th1 in th:
        for th2 in th[::3]:
            vals = [heat_kernel(m, (th1, p1), (th2, p2), t, EigenSum(N)) for p1 in ph[::2] for p2 in ph[::3]]
            var = max(var, max(vals) - min(vals))
            circ = heat_kernel(Circle(1.0), th1, th2, t, EigenSum(N)) / (2 * math.pi * 0.1)
            dev = max(dev, max(abs(v - circ) for v in vals))
    rep.add("sup variation in phi", var, 1e-14)
    rep.add("max |torus - circle / (0.2 pi)|", dev, 1e-12)
    return rep


def suite_millson() -> SuiteReport:
    rep = SuiteReport("millson")
    s = np.linspace(0.1, 5.0, 10)
    t = np.array([0.05, 0.2, 0.5, 1.0, 2.0])
    S, T = np.meshgrid(s, t)
    rec = millson_step(1, S, T)
    closed = np.exp(log_h3_closed_form(S, T))
    rep.add("max |recurrence - closed form| (50 points)", np.max(np.abs(rec - closed)), 1e-12)
    h = millson_step(1, 1.0, 1.0)
    rep.add("|h(1,1) - 5.473e-3|", abs(h - 5.473e-3), 1e-6, detail=f"h = {h:.12g}")
    return rep


def suite_bounds() -> SuiteReport:
    rep = SuiteReport("bounds")
    s = np.linspace(0.0, math.pi, 41)
    ts = np.logspace(-3, 1, 25)
    S, T = np.meshgrid(s, ts)
    # logs avoid underflow; the slack absorbs rounding where the two agree to
    # machine precision (small t, where one image dominates)
    log_flat = -0.5 * np.log(4 * math.pi * T) - S**2 / (4 * T)
    log_circle = log_heat_kernel(Circle(1.0), 0.0, S, T)
    rep.add("flat-comparison violations", int(np.sum(log_circle < log_flat - BOUND_RTOL)), 0)
    s3 = np.linspace(0.0, 6.0, 31)
    S3, T3 = np.meshgrid(s3, ts)
    # compared as logs: both kernels underflow at small t
    lo = log_constant_curvature_kernel(-4.0, 3, S3, T3)
    hi = log_h3_closed_form(S3, T3)
    rep.add("curvature-ordering violations (kappa=-4 vs -1)", int(np.sum(lo > hi + BOUND_RTOL)), 0)
    bad = sum(1 for R in (0.5, 1.0, 2.0) if 1.0 / R**2 < cheeger_lower_bound(circle_cheeger_constant(R)))
    rep.add("Cheeger inequality violations", bad, 0)
    return rep


def sphere_alignment(n: int = 500, k: int = 8):
    pc = sample(SphereEven(1.0, n))
    adj = build_adjacency(pc, KNN(k))
    t = median_squared_edge(adj, pc)
    dec = rw_spectrum(weight_matrix(adj, pc, t))
    E = eigenmap(dec, 3)
    A = pc.points
    res = orthogonal_align(A, E, allow_scale=True)
    rms = float(np.sqrt(np.mean(np.sum(A * A, axis=1))))
    return res, rms, t, dec


def suite_sphere_map() -> SuiteReport:
    rep = SuiteReport("sphere-map")
    res, rms, t, _ = sphere_alignment()
    rep.add("residual / RMS", res.residual / rms, 0.1, detail=f"t = {t:.6g}, scale {res.scale:.6g}")
    return rep


def revolution_eigenmap(profile, n: int = 600, k: int = 8, N: int = 3):
    pc = sample(RevolutionEven(profile, n))
    adj = build_adjacency(pc, KNN(k))
    dec = rw_spectrum(weight_matrix(adj, pc, median_squared_edge(adj, pc)))
    return pc, dec, eigenmap(dec, N)


def _height_correlation(pc, E):
    return abs(float(np.corrcoef(E[:, 0], pc.points[:, 2])[0, 1]))


def suite_barbell() -> SuiteReport:
    rep = SuiteReport("barbell")
    pc, dec, E = revolution_eigenmap(make_profile("barbell", R1=20, R2=20, L=100, r=5))
    rep.add("|Pearson(col 1, height)|, long cylinder", _height_correlation(pc, E), 0.9, ">=")
    pc, dec, E = revolution_eigenmap(make_profile("barbell", R1=20, R2=20, L=1, r=5))
    rep.add("min pairwise image distance, short cylinder", pdist(E).min(), 0.0, ">")
    return rep


def suite_lollipop() -> SuiteReport:
    rep = SuiteReport("lollipop")
    p = make_profile("lollipop", R=10, r=2, L=50)
    rep.add("profile continuity residual", p.continuity_residual(), 1e-12)
    pc, dec, E = revolution_eigenmap(p)
    rep.add("|Pearson(col 1, height)|, long stick", _height_correlation(pc, E), 0.9, ">=")
    pc, dec, E = revolution_eigenmap(make_profile("lollipop", R=10, r=2, L=1))
    rep.add("min pairwise image distance, short stick", pdist(E).min(), 0.0, ">")
    return rep


SUITES = {
    "poisson": suite_poisson,
    "varadhan": suite_varadhan,
    "theta": suite_theta,
    "hexagon": suite_hexagon,
    "photos": suite_photos,
    "selective": suite_selective,
    "thin-torus": suite_thin_torus,
    "millson": suite_millson,
    "bounds": suite_bounds,
    "sphere-map": suite_sphere_map,
    "barbell": suite_barbell,
    "lollipop": suite_lollipop,
}


def run_suite(name: str) -> SuiteReport:
    return SUITES[name]()
