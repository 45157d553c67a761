"""Plain-text matrix exchange formats.

Native format ("CMAT v1"): a header line `cmat <rows> <cols> <complex|real>`
followed by rows*cols whitespace-separated entries in row-major order,
complex entries as `<re> <im>` pairs.  Values are printed with 17
significant digits, which round-trips doubles exactly.  The reader also
accepts the MatrixMarket dense-array format (header-sniffed), whose
entries are column-major.
"""

from __future__ import annotations

import numpy as np

from .errors import MatrixFormatError
from .kernel import as_matrix


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_matrix(path, a) -> None:
    """Write a matrix in CMAT v1; real arrays get the `real` entry kind."""
    a = np.asarray(a)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError("only matrices and vectors can be saved")
    rows, cols = a.shape
    is_complex = np.iscomplexobj(a)
    kind = "complex" if is_complex else "real"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"cmat {rows} {cols} {kind}\n")
        for i in range(rows):
            if is_complex:
                parts = [f"{_fmt(v.real)} {_fmt(v.imag)}" for v in a[i]]
            else:
                parts = [_fmt(v) for v in a[i]]
            fh.write(" ".join(parts) + "\n")


def _parse_cmat(header: list[str], body: list[str], path) -> np.ndarray:
    if len(header) != 4:
        raise MatrixFormatError(f"{path}: malformed cmat header")
    try:
        rows, cols = int(header[1]), int(header[2])
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: bad dimensions in header") from exc
    kind = header[3]
    if kind not in ("complex", "real") or rows < 0 or cols < 0:
        raise MatrixFormatError(f"{path}: bad cmat header fields")
    per_entry = 2 if kind == "complex" else 1
    expected = rows * cols * per_entry
    if len(body) != expected:
        raise MatrixFormatError(
            f"{path}: expected {expected} numbers, found {len(body)}"
        )
    try:
        values = np.array([float(tok) for tok in body])
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: non-numeric entry") from exc
    if kind == "complex":
        values = values[0::2] + 1j * values[1::2]
    return values.reshape(rows, cols)


def _parse_matrix_market(lines: list[str], path) -> np.ndarray:
    header = lines[0].split()
    if len(header) < 4 or header[1].lower() != "matrix":
        raise MatrixFormatError(f"{path}: unsupported MatrixMarket header")
    layout = header[2].lower()
    field = header[3].lower()
    if layout != "array":
        raise MatrixFormatError(f"{path}: only dense 'array' MatrixMarket supported")
    if field not in ("real", "complex", "integer"):
        raise MatrixFormatError(f"{path}: unsupported field {field!r}")
    if len(header) >= 5 and header[4].lower() != "general":
        raise MatrixFormatError(f"{path}: only 'general' symmetry supported")
    data = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not data:
        raise MatrixFormatError(f"{path}: missing size line")
    dims = data[0].split()
    if len(dims) != 2:
        raise MatrixFormatError(f"{path}: bad size line {data[0]!r}")
    rows, cols = int(dims[0]), int(dims[1])
    body = " ".join(data[1:]).split()
    per_entry = 2 if field == "complex" else 1
    if len(body) != rows * cols * per_entry:
        raise MatrixFormatError(
            f"{path}: expected {rows * cols * per_entry} numbers, found {len(body)}"
        )
    try:
        values = np.array([float(tok) for tok in body])
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: non-numeric entry") from exc
    if field == "complex":
        values = values[0::2] + 1j * values[1::2]
    # MatrixMarket array data runs down columns.
    return values.reshape(cols, rows).T


def load_matrix(path) -> np.ndarray:
    """Read a CMAT v1 or MatrixMarket dense-array file as complex128."""
    try:
        with open(path, "r", encoding="ascii", errors="replace") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise MatrixFormatError(f"{path}: empty file")
    first = lines[0].lstrip()
    if first.lower().startswith("%%matrixmarket"):
        a = _parse_matrix_market(lines, path)
    elif first.startswith("cmat"):
        body = " ".join(lines[1:]).split()
        a = _parse_cmat(lines[0].split(), body, path)
    else:
        raise MatrixFormatError(f"{path}: unrecognized header {lines[0]!r}")
    try:
        return as_matrix(a)
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
