"""JSON matrix files.

Layout::

    {"kind": "density" | "observable" | "unitary",
     "dim": 4, "dA": 2, "dB": 2,
     "entries": [[re, im], ...]}      # dim*dim pairs, row-major

``dA``/``dB`` are optional; a density file without them loads as a plain
`DensityMatrix`.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .linalg import ValidationError, is_unitary
from .states import DensityMatrix, bipartite
from .uncertainty import Observable

KINDS = ("density", "observable", "unitary")


class ParseError(ValueError):
    """A matrix file is not well-formed JSON of the expected layout."""


def dumps(matrix, kind: str = "density", dims=None) -> str:
    m = np.asarray(getattr(matrix, "matrix", matrix), dtype=complex)
    if dims is None:
        dims = getattr(matrix, "dims", None)
    doc = {"kind": kind, "dim": int(m.shape[0])}
    if dims is not None:
        doc["dA"], doc["dB"] = int(dims[0]), int(dims[1])
    doc["entries"] = [[float(z.real), float(z.imag)] for z in m.ravel()]
    return json.dumps(doc)


def save(path, matrix, kind: str = "density", dims=None) -> None:
    Path(path).write_text(dumps(matrix, kind, dims) + "\n")


def parse(text: str) -> dict:
    """Parse and shape-check a matrix document; returns kind, matrix, dims."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("matrix file must hold a JSON object")
    kind = doc.get("kind", "density")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}")
    try:
        dim = int(doc["dim"])
        entries = np.asarray(doc["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or malformed field: {exc}") from None
    if dim < 1 or entries.shape != (dim * dim, 2):
        raise ParseError(f"expected {dim * dim} [re, im] pairs, got array of shape {entries.shape}")
    matrix = (entries[:, 0] + 1j * entries[:, 1]).reshape(dim, dim)
    dims = None
    if "dA" in doc or "dB" in doc:
        try:
            dims = (int(doc["dA"]), int(doc["dB"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"dA and dB must be given together: {exc}") from None
    return {"kind": kind, "matrix": matrix, "dims": dims}


def load(path):
    """Load and validate a matrix file.

    Returns a (Bipartite)DensityMatrix, an Observable, or a unitary ndarray
    depending on the declared kind.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc)) from None
    doc = parse(text)
    m = doc["matrix"]
    if doc["kind"] == "density":
        return bipartite(m, *doc["dims"]) if doc["dims"] else DensityMatrix(m)
    if doc["kind"] == "observable":
        return Observable(m)
    if not is_unitary(m):
        raise ValidationError("matrix declared unitary is not unitary")
    return m


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
