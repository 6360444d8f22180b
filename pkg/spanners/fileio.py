"""
Instance and spanner files.

Point files hold one point per row (whitespace or comma separated). A
file whose first line is a single integer n, followed by n rows of n
distances, holds a distance matrix instead; so does a file whose first
line is ``# matrix``. Spanners are written in one of three formats:

- ``edges``: a ``# n m eps`` header, then ``u v weight`` per line
- ``csv``: a ``u,v,weight`` header, then one edge per row
- ``json``: one document with the metrics and the edge list
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from .exceptions import BadInputFile
from .greedy import Spanner, check_eps
from .metric import METRIC_RTOL, MetricSpace, PointSet, WeightedGraph, validate_metric

SCHEMA_VERSION = 1
FORMATS = ("edges", "csv", "json")
MATRIX_MARKER = "# matrix"
FIELD_SEP = r"[,\s]+"
WEIGHT_FORMAT = "%.12g"


def _read_table(path: Path, skiprows: int = 0) -> np.ndarray:
    try:
        df = pd.read_csv(path, sep=FIELD_SEP, header=None, comment="#", engine="python", skiprows=skiprows)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise BadInputFile(f"{path}: {e}") from e
    df = df.dropna(axis=1, how="all")
    try:
        return df.to_numpy(dtype=float)
    except ValueError as e:
        raise BadInputFile(f"{path}: non-numeric entry ({e})") from e


def read_points(path: Path | str) -> PointSet:
    """Load a point file into a PointSet."""
    path = Path(path)
    table = _read_table(path)
    if table.size == 0:
        raise BadInputFile(f"{path}: no points")
    if not np.isfinite(table).all():
        raise BadInputFile(f"{path}: missing or non-finite coordinates")
    return PointSet(table)


@dataclass(frozen=True)
class MatrixHeader:
    """How a distance-matrix file announces itself: ``size`` lines or the marker."""

    size: int | None = None


def matrix_header(path: Path | str) -> MatrixHeader | None:
    """
    Tell a matrix file from a point file by its first line.

    A first line holding a single integer n, followed by rows of more than
    one field, heads an n x n matrix. A first line of ``# matrix`` marks a
    matrix of any size. One-column files are points even when they start
    with an integer.
    """
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
        if first.lower() == MATRIX_MARKER:
            return MatrixHeader()
        if not first.isdigit():
            return None
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                return MatrixHeader(int(first)) if len(re.split(FIELD_SEP, line)) > 1 else None
    return None


def read_matrix(path: Path | str, rtol: float = METRIC_RTOL, header: MatrixHeader | None = None) -> MetricSpace:
    """
    Load and validate a distance-matrix file.

    Raises:
        BadInputFile: Rows are ragged, or their count or length differs
            from the declared size.
    """
    path = Path(path)
    header = header or matrix_header(path) or MatrixHeader()
    table = _read_table(path, skiprows=0 if header.size is None else 1)
    if header.size is not None and table.shape != (header.size, header.size):
        raise BadInputFile(f"{path}: header declares {header.size} x {header.size} distances, got shape {table.shape}")
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise BadInputFile(f"{path}: distance matrix must be square, got shape {table.shape}")
    if not np.isfinite(table).all():
        raise BadInputFile(f"{path}: missing or non-finite distances")
    return validate_metric(table, rtol)


def read_instance(path: Path | str, p: float = 2) -> MetricSpace:
    """
    Load a point or matrix file as a metric space.

    Raises:
        BadInputFile: The file can't be parsed.
        SpanlabError: The matrix is not a metric, or points repeat.
    """
    try:
        header = matrix_header(path)
    except OSError as e:
        raise BadInputFile(f"{path}: {e}") from e
    if header is not None:
        return read_matrix(path, header=header)
    return MetricSpace.from_points(read_points(path), p=p)


@dataclass(frozen=True)
class SpannerFile:
    """Edges as read from disk, before they are matched to an instance."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    n: int | None = None
    eps: float | None = None


def _sorted_edges(s: Spanner) -> list[tuple[int, int, float]]:
    g = s.graph
    return [(int(g.u[k]), int(g.v[k]), float(g.w[k])) for k in g.sorted_order().tolist()]


def write_spanner(path: Path | str, s: Spanner, fmt: str = "edges", metrics: dict[str, Any] | None = None) -> None:
    """
    Write a spanner's edges in (weight, u, v) order.

    Args:
        path: Output file.
        s: The spanner.
        fmt: One of ``edges``, ``csv`` or ``json``.
        metrics: Metrics embedded in the ``json`` format.
    """
    edges = _sorted_edges(s)
    if fmt == "json":
        write_json(
            path,
            {
                "schema": SCHEMA_VERSION,
                "n": s.n,
                "m": s.m,
                "eps": s.eps,
                "metrics": metrics or {},
                "edges": [[u, v, w] for u, v, w in edges],
            },
        )
        return
    if fmt == "csv":
        lines = ["u,v,weight"] + [f"{u},{v},{WEIGHT_FORMAT % w}" for u, v, w in edges]
    elif fmt == "edges":
        lines = [f"# {s.n} {s.m} {s.eps!r}"] + [f"{u} {v} {WEIGHT_FORMAT % w}" for u, v, w in edges]
    else:
        raise BadInputFile(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")


def read_spanner(path: Path | str) -> SpannerFile:
    """Read a spanner written by ``write_spanner`` in any format."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise BadInputFile(f"{path}: {e}") from e
    head = text.lstrip()[:1]

    if head in ("{", "["):
        try:
            doc = json.loads(text)
            rows = np.asarray(doc["edges"], dtype=float).reshape(-1, 3)
            return SpannerFile(rows[:, 0].astype(np.int64), rows[:, 1].astype(np.int64), rows[:, 2], doc.get("n"), doc.get("eps"))
        except (ValueError, KeyError, TypeError) as e:
            raise BadInputFile(f"{path}: malformed spanner JSON ({e})") from e

    n = eps = None
    if head == "#":
        header = text.lstrip().splitlines()[0].lstrip("#").split()
        try:
            n, eps = int(header[0]), float(header[2])
        except (IndexError, ValueError) as e:
            raise BadInputFile(f"{path}: malformed header {' '.join(header)!r}") from e
        try:
            df = pd.read_csv(path, sep=r"\s+", header=None, comment="#", names=["u", "v", "weight"])
        except pd.errors.EmptyDataError:
            df = pd.DataFrame(columns=["u", "v", "weight"])
        except pd.errors.ParserError as e:
            raise BadInputFile(f"{path}: {e}") from e
    else:
        try:
            df = pd.read_csv(path)
        except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
            raise BadInputFile(f"{path}: {e}") from e
        if set(df.columns) != {"u", "v", "weight"}:
            raise BadInputFile(f"{path}: expected columns u,v,weight, got {list(df.columns)}")
    if df.isna().any().any():
        raise BadInputFile(f"{path}: incomplete edge rows")
    return SpannerFile(
        df["u"].to_numpy(dtype=np.int64), df["v"].to_numpy(dtype=np.int64), df["weight"].to_numpy(dtype=float), n, eps
    )


def spanner_from_file(base: WeightedGraph, sf: SpannerFile, eps: float | None = None, rtol: float = METRIC_RTOL) -> Spanner:
    """
    Match file edges to ``base`` edges.

    Weights come from ``base``; the file's weights must agree within
    ``rtol`` so that re-reading a spanner reproduces its metrics exactly.

    Raises:
        BadInputFile: Unknown edge, weight mismatch, or vertex count mismatch.
        InvalidEps: No usable eps in the file or in the arguments.
    """
    if sf.n is not None and sf.n != base.n:
        raise BadInputFile(f"spanner is over {sf.n} vertices, instance has {base.n}")
    eps = check_eps(eps if eps is not None else sf.eps)
    ids: list[int] = []
    for a, b, w in zip(sf.u.tolist(), sf.v.tolist(), sf.w.tolist()):
        key = (min(a, b), max(a, b))
        k = base.edge_index.get(key)
        if k is None:
            raise BadInputFile(f"edge {key} is not an instance edge")
        if not np.isclose(w, base.w[k], rtol=rtol, atol=0.0):
            raise BadInputFile(f"edge {key}: file weight {w!r} differs from instance weight {base.w[k]!r}")
        ids.append(k)
    if len(set(ids)) != len(ids):
        raise BadInputFile("spanner file lists an edge twice")
    order = sorted(ids, key=lambda k: (base.w[k], base.u[k], base.v[k]))
    return Spanner(base, np.asarray(order, dtype=np.int64), eps)


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_json(path: Path | str, data: Any) -> None:
    """Write ``data`` as sorted, indented JSON (byte-stable for equal input)."""
    _atomic_write_text(Path(path), json.dumps(data, indent=2, sort_keys=True) + "\n")
