"""Command-line front end: ``heatspec sample | graph | embed | analytic | verify``.

Every flag may instead come from ``--config FILE``, a JSON object whose keys
are the flag names (``n_theta`` or ``n-theta``). Flags given on the command
line win over the file. Unknown keys are rejected.

Exit codes: 0 success, 1 invalid input, 2 usage error, 3 numeric failure or
a failed verification.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path as FilePath

import numpy as np

from . import embeddings as emb
from . import io
from .eigenmaps import diffusion_map, eigenmap
from .errors import HeatSpecError, NumericError
from .graphs import build_adjacency, decompose, inject_weights, median_squared_edge, weight_matrix
from .kernels import ClosedForm, EigenSum, ImageSum, Quadrature, heat_kernel, log_heat_kernel
from .manifolds import (
    Circle,
    ConstantCurvature,
    FlatTorus,
    Hyperbolic2,
    Hyperbolic3,
    Sphere2,
    eigenvalues,
)
from .samplers import (
    CircleShape,
    PhotoSet,
    Revolution,
    RevolutionEven,
    SphereEven,
    TorusGrid,
    make_profile,
    sample,
)
from .truncation import Spectrum, heat_trace, tail_trace_bound
from .varadhan import varadhan_sweep
from .verify import SUITES, run_suite

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SHAPES = ("circle", "torus", "sphere", "barbell", "lollipop", "photoset")
MANIFOLDS = ("circle", "torus", "sphere", "h2", "h3", "curvature")
QUERIES = ("heat-kernel", "varadhan", "length", "spectrum")
KERNEL_METHODS = ("image", "eigen", "closed", "quadrature")


class InputError(HeatSpecError, ValueError):
    """Bad values supplied on the command line or in a config file."""


# ---------------------------------------------------------------------------
# parser


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heatspec", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name, help):
        sp = sub.add_parser(name, help=help, allow_abbrev=False)
        sp.add_argument("--config", metavar="JSON", help="read flags from a JSON object")
        return sp

    s = command("sample", "write a deterministic point cloud")
    s.add_argument("--shape", choices=SHAPES)
    s.add_argument("--radius", "--R", dest="R", type=float, help="circle/sphere/lollipop bulb radius")
    s.add_argument("--n", type=int, help="number of points")
    s.add_argument("--A", type=float, help="torus first radius")
    s.add_argument("--B", type=float, help="torus second radius")
    s.add_argument("--n-theta", type=int)
    s.add_argument("--n-phi", type=int)
    s.add_argument("--R1", type=float)
    s.add_argument("--R2", type=float)
    s.add_argument("--L", type=float, help="cylinder length")
    s.add_argument("--r", type=float, help="neck (cylinder) radius")
    s.add_argument("--n-s", type=int, help="profile levels; selects the product grid for surfaces of revolution")
    s.add_argument("--out")

    g = command("graph", "build a weighted neighbourhood graph")
    g.add_argument("--points")
    g.add_argument("--rule", help="knn:K or eps:E")
    g.add_argument("--t", help="Gaussian width, or 'median' for the median squared edge length")
    g.add_argument("--no-self-loops", action="store_const", const=True, dest="no_self_loops")
    g.add_argument("--out")

    e = command("embed", "eigenmap or diffusion map of a point cloud")
    e.add_argument("--points")
    e.add_argument("--graph", help="graph JSON instead of --rule")
    e.add_argument("--inject-w", help="weights as graph JSON or {\"W\": matrix}")
    e.add_argument("--rule", help="knn:K or eps:E")
    e.add_argument("--t", help="Gaussian width, or 'median'")
    e.add_argument("--laplacian", choices=("rw", "sym"))
    e.add_argument("--mode", choices=("eigenmap", "diffusion"))
    e.add_argument("--N", type=int)
    e.add_argument("--tau", type=float)
    e.add_argument("--method", choices=("jacobi", "lapack"))
    e.add_argument("--out")

    a = command("analytic", "heat kernels, Varadhan sweeps, curve lengths and spectra")
    a.add_argument("--query", choices=QUERIES)
    a.add_argument("--manifold", choices=MANIFOLDS)
    a.add_argument("--R", type=float, help="circle radius")
    a.add_argument("--A", type=float)
    a.add_argument("--B", type=float)
    a.add_argument("--kappa", type=float)
    a.add_argument("--dim", type=int, help="dimension for --manifold curvature")
    a.add_argument("--p", help="point, comma separated coordinates")
    a.add_argument("--q", help="point, comma separated coordinates")
    a.add_argument("--t", help="time or comma separated times")
    a.add_argument("--method", choices=KERNEL_METHODS)
    a.add_argument("--N", type=int, help="eigenfunction count (eigen method, length, spectrum)")
    a.add_argument("--eps", type=float, help="trace-tail tolerance")
    a.add_argument("--count", type=int, help="eigenvalues to list")
    a.add_argument("--out")

    v = command("verify", "run a verification suite")
    v.add_argument("--suite", choices=tuple(SUITES))
    v.add_argument("--out")
    return p


DEFAULTS = {
    "sample": {"R": 1.0, "A": 1.0, "B": 1.0, "n_theta": 16, "n_phi": 16},
    "graph": {"t": "median", "no_self_loops": False},
    "embed": {"t": "median", "laplacian": "rw", "mode": "eigenmap", "N": 2, "method": "jacobi"},
    "analytic": {"manifold": "circle", "R": 1.0, "A": 1.0, "B": 1.0, "eps": 1e-12, "count": 10},
    "verify": {},
}


def _subparser(parser, name):
    action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return action.choices[name]


def _merge_config(parser, args):
    """Fill unset flags from ``--config`` and then from ``DEFAULTS``."""
    sp = _subparser(parser, args.command)
    known = {a.dest for a in sp._actions if a.dest not in ("help", "config")}
    if args.config:
        try:
            cfg = json.loads(FilePath(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise InputError("config must be a JSON object")
        cfg = {str(k).replace("-", "_"): v for k, v in cfg.items()}
        cfg.pop("command", None)
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise InputError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
        for k, val in cfg.items():
            if getattr(args, k) is None:
                action = next(a for a in sp._actions if a.dest == k)
                if action.choices is not None and val not in action.choices:
                    sp.error(f"argument --{k.replace('_', '-')}: invalid choice {val!r}")
                if action.type is not None:
                    try:
                        val = action.type(val)
                    except (TypeError, ValueError):
                        raise InputError(f"config key {k}: bad value {val!r}") from None
                elif action.const is True and not isinstance(val, bool):
                    raise InputError(f"config key {k} must be true or false")
                setattr(args, k, val)
    for k, val in DEFAULTS[args.command].items():
        if getattr(args, k) is None:
            setattr(args, k, val)
    return args


def _require(sp, args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        sp.error("missing required " + ", ".join("--" + n.replace("_", "-") for n in missing))


# ---------------------------------------------------------------------------
# value parsing


def _floats(text, what) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma separated numbers, got {text!r}") from None


def _point(text, what):
    vals = _floats(text, what)
    return vals[0] if len(vals) == 1 else tuple(vals)


def _width(text, adj, pc) -> float:
    if isinstance(text, str) and text.strip().lower() == "median":
        return median_squared_edge(adj, pc)
    vals = _floats(text, "--t")
    if len(vals) != 1:
        raise InputError("--t takes one value")
    return vals[0]


def _fmt(x) -> str:
    return format(float(x), ".10g")


# ---------------------------------------------------------------------------
# commands


def cmd_sample(args, sp) -> int:
    _require(sp, args, "shape", "out")
    shape = args.shape
    if shape == "circle":
        spec = CircleShape(args.R, args.n if args.n is not None else 6)
    elif shape == "torus":
        spec = TorusGrid(args.A, args.B, args.n_theta, args.n_phi)
    elif shape == "sphere":
        spec = SphereEven(args.R, args.n if args.n is not None else 500)
    elif shape in ("barbell", "lollipop"):
        if shape == "barbell":
            _require(sp, args, "R1", "R2", "L", "r")
            prof = make_profile("barbell", R1=args.R1, R2=args.R2, L=args.L, r=args.r)
        else:
            _require(sp, args, "L", "r")
            prof = make_profile("lollipop", R=args.R, r=args.r, L=args.L)
        if args.n_s is not None:
            spec = Revolution(prof, args.n_s, args.n_theta)
        else:
            spec = RevolutionEven(prof, args.n if args.n is not None else 600)
    else:
        spec = PhotoSet()
    pc = sample(spec)
    io.write_point_cloud(pc, args.out)
    lo, hi = pc.points.min(axis=0), pc.points.max(axis=0)
    print(f"{pc.n} points in R^{pc.dim} -> {args.out}")
    print("bounding box: [" + ", ".join(f"[{_fmt(a)}, {_fmt(b)}]" for a, b in zip(lo, hi)) + "]")
    return EXIT_OK


def _weighted_graph(args, pc, self_loops=True):
    adj = build_adjacency(pc, args.rule)
    t = _width(args.t, adj, pc)
    return weight_matrix(adj, pc, t, self_loops=self_loops), t


def cmd_graph(args, sp) -> int:
    _require(sp, args, "points", "rule", "out")
    pc = io.read_point_cloud(args.points)
    g, t = _weighted_graph(args, pc, self_loops=not args.no_self_loops)
    io.write_graph(g, args.out)
    print(f"{g.n} vertices, {len(g.edges())} edges, t = {_fmt(t)} -> {args.out}")
    return EXIT_OK


def _read_weights(path):
    try:
        d = json.loads(FilePath(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from None
    if isinstance(d, dict) and "W" in d:
        return inject_weights(np.asarray(d["W"], dtype=float))
    if isinstance(d, list):
        return inject_weights(np.asarray(d, dtype=float))
    g = io.graph_from_dict(d)
    return inject_weights(g.W, g.self_loops)


def cmd_embed(args, sp) -> int:
    _require(sp, args, "points", "out")
    pc = io.read_point_cloud(args.points)
    sources = [x for x in (args.graph, args.inject_w, args.rule) if x is not None]
    if len(sources) != 1:
        sp.error("give exactly one of --rule, --graph, --inject-w")
    if args.inject_w is not None:
        g = _read_weights(args.inject_w)
    elif args.graph is not None:
        g = io.read_graph(args.graph)
    else:
        g, _ = _weighted_graph(args, pc)
    if g.n != pc.n:
        raise InputError(f"graph has {g.n} vertices but the point file has {pc.n} rows")
    kind = "random_walk" if args.laplacian == "rw" else "symmetric"
    dec = decompose(g, kind, method=args.method)
    if args.mode == "diffusion":
        if args.tau is None:
            sp.error("--mode diffusion needs --tau")
        E = diffusion_map(dec, args.tau, args.N)
    else:
        E = eigenmap(dec, args.N)
    io.write_embedding(E, args.out)
    print("eigenvalues: " + " ".join(_fmt(x) for x in dec.eigenvalues[: args.N + 1]))
    print(f"{E.shape[0]} x {E.shape[1]} embedding -> {args.out}")
    return EXIT_OK


def _manifold(args):
    name = args.manifold
    if name == "circle":
        return Circle(args.R)
    if name == "torus":
        return FlatTorus(args.A, args.B)
    if name == "sphere":
        return Sphere2()
    if name == "h2":
        return Hyperbolic2()
    if name == "h3":
        return Hyperbolic3()
    if args.kappa is None or args.dim is None:
        raise InputError("--manifold curvature needs --kappa and --dim")
    return ConstantCurvature(args.kappa, args.dim)


def _kernel_method(args):
    if args.method is None:
        return None
    if args.method == "eigen":
        return EigenSum(args.N)
    return {"image": ImageSum, "closed": ClosedForm, "quadrature": Quadrature}[args.method]()


def _emit(args, text: str, obj: dict):
    print(text, end="" if text.endswith("\n") else "\n")
    if args.out:
        if args.out.endswith(".csv"):
            FilePath(args.out).write_text(obj["csv"])
        else:
            io.write_json({k: v for k, v in obj.items() if k != "csv"}, args.out)


def cmd_analytic(args, sp) -> int:
    _require(sp, args, "query")
    m = _manifold(args)
    if args.query in ("heat-kernel", "varadhan"):
        _require(sp, args, "p", "q", "t")
        p, q = _point(args.p, "--p"), _point(args.q, "--q")
        ts = _floats(args.t, "--t")
        method = _kernel_method(args)
        if args.query == "varadhan":
            rep = varadhan_sweep(m, p, q, ts, method)
            rows = [vars(r) for r in rep.rows]
            _emit(args, rep.to_csv(), {"rows": rows, "cut_locus": rep.cut_locus, "csv": rep.to_csv()})
            return EXIT_OK
        rows = []
        for t in ts:
            lh = float(log_heat_kernel(m, p, q, t, method))
            h = float(heat_kernel(m, p, q, t, method))
            rows.append({"t": t, "h": h, "log_h": lh})
        lines = ["t,h,log_h"] + [",".join(format(r[k], ".17g") for k in ("t", "h", "log_h")) for r in rows]
        text = "\n".join(lines) + "\n"
        _emit(args, text, {"rows": rows, "csv": text})
        return EXIT_OK
    if args.query == "length":
        _require(sp, args, "t")
        if not isinstance(m, Circle):
            raise InputError("length queries are available for the circle")
        (t,) = _floats(args.t, "--t")
        N = args.N if args.N is not None else emb.truncation_for(m, t)
        L = emb.embedded_curve_length(m, emb.Path.full_circle(), emb.EmbeddingSpec.bbg_rescaled(t, N))
        closed = emb.theta_length(t) if m.R == 1.0 else None
        out = {"t": t, "N": N, "length": L, "closed_form": closed, "two_pi_gap": abs(L - 2 * math.pi)}
        text = "\n".join(f"{k}: {v}" for k, v in out.items())
        _emit(args, text, {**out, "csv": "t,N,length\n" + f"{t!r},{N},{L!r}\n"})
        return EXIT_OK
    spec = Spectrum.from_manifold(m)
    lam = eigenvalues(m, args.count)
    out = {"eigenvalues": [float(x) for x in lam]}
    lines = ["eigenvalues: " + " ".join(_fmt(x) for x in lam)]
    if args.t is not None:
        (t,) = _floats(args.t, "--t")
        budget = tail_trace_bound(spec, t, args.eps)
        out.update(t=t, eps=args.eps, N=budget.N, tail=budget.tail, trace=heat_trace(spec, t))
        lines.append(f"t = {_fmt(t)}: N = {budget.N} (tail {budget.tail:.3g} < {args.eps:g}), trace {_fmt(out['trace'])}")
    _emit(args, "\n".join(lines), {**out, "csv": "j,eigenvalue\n" + "".join(f"{j},{x!r}\n" for j, x in enumerate(out["eigenvalues"]))})
    return EXIT_OK


def cmd_verify(args, sp) -> int:
    _require(sp, args, "suite")
    rep = run_suite(args.suite)
    for c in rep.checks:
        flag = "PASS" if c.passed else "FAIL"
        extra = f"  ({c.detail})" if c.detail else ""
        print(f"{flag} {args.suite}: {c.name} = {c.value:.6g} {c.op} {c.limit:g}{extra}")
    print(f"{args.suite}: {'pass' if rep.passed else 'FAIL'}")
    if args.out:
        io.write_json(rep.to_dict(), args.out)
    return EXIT_OK if rep.passed else EXIT_NUMERIC


COMMANDS = {
    "sample": cmd_sample,
    "graph": cmd_graph,
    "embed": cmd_embed,
    "analytic": cmd_analytic,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = _merge_config(parser, args)
        return COMMANDS[args.command](args, _subparser(parser, args.command))
    except SystemExit as exc:
        return int(exc.code or 0)
    except NumericError as exc:
        print(f"heatspec: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (HeatSpecError, OSError, ValueError, TypeError) as exc:
        print(f"heatspec: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
