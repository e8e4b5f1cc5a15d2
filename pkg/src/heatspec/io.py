"""CSV and JSON formats for point clouds, graphs, embeddings and reports."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import DomainError
from .graphs import PointCloud, WeightedGraph

REPORT_VERSION = "1"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_point_cloud(pc: PointCloud, path) -> None:
    """CSV with header ``x0,...,x{D-1}[,label]``; floats round-trip exactly."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = [f"x{k}" for k in range(pc.dim)]
        if pc.labels is not None:
            header.append("label")
        w.writerow(header)
        for i, row in enumerate(pc.points):
            out = [_fmt(v) for v in row]
            if pc.labels is not None:
                out.append(pc.labels[i])
            w.writerow(out)


def read_point_cloud(path) -> PointCloud:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty point file")
    header = rows[0]
    has_label = bool(header) and header[-1] == "label"
    dim = len(header) - int(has_label)
    if dim < 1 or header[:dim] != [f"x{k}" for k in range(dim)]:
        raise DomainError(f"{path}: header must be x0,...,x{{D-1}}[,label]")
    try:
        pts = np.array([[float(v) for v in r[:dim]] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None
    if any(len(r) != len(header) for r in rows[1:]):
        raise DomainError(f"{path}: ragged rows")
    labels = tuple(r[dim] for r in rows[1:]) if has_label else None
    return PointCloud(pts.reshape(-1, dim), labels)


def graph_to_dict(g: WeightedGraph) -> dict:
    return {
        "n": g.n,
        "self_loops": bool(g.self_loops),
        "edges": [[i, j, w] for i, j, w in g.edges()],
        "diag": [float(x) for x in np.diag(g.W)],
    }


def graph_from_dict(d: dict) -> WeightedGraph:
    try:
        n = int(d["n"])
        W = np.zeros((n, n))
        for i, j, w in d["edges"]:
            i, j = int(i), int(j)
            if not 0 <= i < j < n:
                raise DomainError(f"edge ({i}, {j}) must satisfy 0 <= i < j < n")
            W[i, j] = W[j, i] = float(w)
        diag = d.get("diag")
        if diag is not None:
            if len(diag) != n:
                raise DomainError("diag must have n entries")
            np.fill_diagonal(W, np.asarray(diag, dtype=float))
        return WeightedGraph(W, bool(d.get("self_loops", False)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed graph JSON: {exc}") from None


def write_graph(g: WeightedGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(g), indent=1) + "\n")


def read_graph(path) -> WeightedGraph:
    try:
        return graph_from_dict(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: {exc}") from None


def write_embedding(E, path) -> None:
    """CSV with header ``idx,c0,...,c{N-1}``."""
    E = np.asarray(E, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["idx"] + [f"c{k}" for k in range(E.shape[1])])
        for i, row in enumerate(E):
            w.writerow([str(i)] + [_fmt(v) for v in row])


def read_embedding(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["idx"]:
        raise DomainError(f"{path}: header must start with idx")
    return np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=float)


def write_json(obj: dict, path) -> None:
    """Write a report, stamping it with the format ``version``."""
    out = {"version": REPORT_VERSION, **obj}
    Path(path).write_text(json.dumps(out, indent=1, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")
