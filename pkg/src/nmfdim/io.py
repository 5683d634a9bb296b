"""Plain CSV matrix persistence with round-trip precision."""

import json
import os

import numpy as np

from .exceptions import MatrixIOError, MatrixParseError, RaggedRowsError
from .linalg import as_matrix


def write_matrix_csv(matrix, path):
    """Write a matrix as headerless CSV with 17 significant digits per entry."""
    m = as_matrix(matrix)
    try:
        with open(path, "w", encoding="ascii") as fh:
            for row in m:
                fh.write(",".join("%.17g" % x for x in row))
                fh.write("\n")
    except OSError as exc:
        raise MatrixIOError(f"cannot write {path}: {exc}") from exc


def read_matrix_csv(path):
    """Read a headerless numeric CSV written by :func:`write_matrix_csv`."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise MatrixIOError(f"cannot read {path}: {exc}") from exc
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise MatrixParseError(f"{path} contains no data")
    rows = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise RaggedRowsError(
                f"{path}:{lineno} has {len(fields)} columns, expected {width}"
            )
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise MatrixParseError(f"{path}:{lineno}: {exc}") from exc
    return as_matrix(np.array(rows, dtype=float), name=path)


def write_json(obj, path):
    """Deterministic JSON writer (sorted keys, trailing newline)."""
    try:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise MatrixIOError(f"cannot write {path}: {exc}") from exc


def read_json(path):
    try:
        with open(path, "r", encoding="ascii") as fh:
            return json.load(fh)
    except OSError as exc:
        raise MatrixIOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"{path}: {exc}") from exc


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
