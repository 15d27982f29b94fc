"""JSON wire formats.

Matrix object: {"n": int, "re": [[...]], "im": [[...]]} with row-major
n x n arrays of finite doubles; omitting "im" means a real matrix.

Block object, either split or flat:
  {"A": Matrix, "X": Matrix, "B": Matrix}
  {"n": int, "H": Matrix}        # 2n x 2n matrix split at n
A bare Matrix object of even dimension is also accepted as a flat block
split at the midpoint.
"""

from __future__ import annotations

import json

import numpy as np

from .blocks import Block2x2, split
from . import linalg


class FormatError(ValueError):
    """Structurally invalid matrix or block JSON."""


def matrix_to_dict(m) -> dict:
    m = linalg.as_square_matrix(m)
    out = {"n": int(m.shape[0]), "re": m.real.tolist()}
    if np.any(m.imag != 0.0):
        out["im"] = m.imag.tolist()
    return out


def matrix_from_dict(data) -> np.ndarray:
    if not isinstance(data, dict):
        raise FormatError("matrix object must be a JSON object")
    if "re" not in data:
        raise FormatError('matrix object needs a "re" field')
    re = np.asarray(data["re"], dtype=float)
    if re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise FormatError(f'"re" must be a square 2d array, got shape {re.shape}')
    n = int(data.get("n", re.shape[0]))
    if n != re.shape[0]:
        raise FormatError(f'"n"={n} disagrees with array shape {re.shape}')
    if "im" in data and data["im"] is not None:
        im = np.asarray(data["im"], dtype=float)
        if im.shape != re.shape:
            raise FormatError('"im" must match the shape of "re"')
    else:
        im = np.zeros_like(re)
    m = re + 1j * im
    if not np.all(np.isfinite(re)) or not np.all(np.isfinite(im)):
        raise FormatError("matrix entries must be finite")
    return m


def block_to_dict(block: Block2x2) -> dict:
    return {
        "A": matrix_to_dict(block.a),
        "X": matrix_to_dict(block.x),
        "B": matrix_to_dict(block.b),
    }


def block_from_dict(data) -> Block2x2:
    if not isinstance(data, dict):
        raise FormatError("block object must be a JSON object")
    if "A" in data or "X" in data or "B" in data:
        missing = [key for key in ("A", "X", "B") if key not in data]
        if missing:
            raise FormatError(f"block object is missing fields: {missing}")
        return Block2x2(
            a=matrix_from_dict(data["A"]),
            x=matrix_from_dict(data["X"]),
            b=matrix_from_dict(data["B"]),
        )
    if "H" in data:
        h = matrix_from_dict(data["H"])
        n = data.get("n")
        return split(h, None if n is None else int(n))
    if "re" in data:
        h = matrix_from_dict(data)
        if h.shape[0] % 2:
            raise FormatError("flat block matrix must have even dimension")
        return split(h)
    raise FormatError('expected "A"/"X"/"B", "H", or a flat matrix object')


def load_blocks(path: str) -> list[Block2x2]:
    """Read one block, a list of blocks, or JSON-lines of blocks."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        blocks = []
        for line in text.splitlines():
            if line.strip():
                blocks.append(block_from_dict(json.loads(line)))
        return blocks
    if isinstance(data, list):
        return [block_from_dict(item) for item in data]
    return [block_from_dict(data)]


def dumps(obj) -> str:
    """Deterministic single-line JSON; rejects NaN/Infinity outright."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)
