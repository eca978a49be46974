"""Matrix file formats: the CSMAT1 binary container and full-precision CSV.

CSMAT1 layout: 6-byte magic b"CSMAT1", two 32-bit little-endian unsigned
dims (n, N), one 64-bit little-endian float (the scaling factor already
applied to the stored entries), then n*N 64-bit little-endian floats in
row-major order.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .ensembles import MeasurementMatrix
from .errors import ValidationError

MAGIC = b"CSMAT1"
_HEADER = struct.Struct("<6sIId")


def fmt_float(x: float) -> str:
    """Shortest decimal that round-trips the 64-bit float."""
    return repr(float(x))


def save_csmat(matrix: MeasurementMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, matrix.n, matrix.N, matrix.scaling))
        fh.write(np.ascontiguousarray(matrix.entries, dtype="<f8").tobytes())


def load_csmat(path) -> MeasurementMatrix:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise ValidationError(f"{path}: truncated CSMAT1 header")
        magic, n, N, scaling = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValidationError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        body = fh.read(8 * n * N)
    if len(body) != 8 * n * N:
        raise ValidationError(f"{path}: expected {n * N} entries, file is short")
    entries = np.frombuffer(body, dtype="<f8").reshape(n, N)
    prov = {"ensemble": f"file:{os.path.basename(str(path))}", "seed": None, "theta": None}
    return MeasurementMatrix(entries.astype(float), scaling=scaling, provenance=prov)


def save_matrix_csv(matrix: MeasurementMatrix, path) -> None:
    """One matrix row per line, comma-separated, round-trip precision."""
    with open(path, "w", newline="") as fh:
        for row in matrix.entries:
            fh.write(",".join(fmt_float(v) for v in row))
            fh.write("\n")


def load_matrix_csv(path, scaling: float = 1.0) -> MeasurementMatrix:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rows.append([float(tok) for tok in line.split(",")])
    if not rows:
        raise ValidationError(f"{path}: empty matrix CSV")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValidationError(f"{path}: ragged rows (widths {sorted(widths)})")
    prov = {"ensemble": f"file:{os.path.basename(str(path))}", "seed": None, "theta": None}
    return MeasurementMatrix(np.array(rows), scaling=scaling, provenance=prov)


def load_matrix(path) -> MeasurementMatrix:
    """Dispatch on extension: .csmat binary, anything else parsed as CSV."""
    if str(path).endswith(".csmat"):
        return load_csmat(path)
    return load_matrix_csv(path)


def load_vector_csv(path) -> np.ndarray:
    """Vector from a CSV file: one value per line, or one comma-separated line."""
    vals = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals.extend(float(tok) for tok in line.split(",") if tok)
    if not vals:
        raise ValidationError(f"{path}: empty vector CSV")
    return np.array(vals)
