"""Matrix Market and CSV input/output for dense matrices.

Output always uses the ``array`` format with 17 significant digits, which
round-trips every double exactly.  Input accepts ``array`` and
``coordinate`` layouts with ``real``, ``integer`` or ``complex`` fields and
``general``, ``symmetric``, ``skew-symmetric`` or ``hermitian`` symmetry.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["MatrixParseError", "read_matrix", "write_mtx", "read_mtx", "read_csv"]


class MatrixParseError(ValueError):
    def __init__(self, message: str, path=None, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(f"{message}{where}")
        self.path = str(path) if path is not None else None
        self.line = line
        self.column = column

    def record(self) -> dict:
        return {
            "error": "parse",
            "message": str(self),
            "path": self.path,
            "line": self.line,
            "column": self.column,
        }


_FIELDS = {"real", "integer", "complex", "double"}
_SYMMETRIES = {"general", "symmetric", "skew-symmetric", "hermitian"}


def _number(tok: str, path, line: int, col: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise MatrixParseError(f"not a number: {tok!r}", path, line, col) from None


def read_mtx(path) -> np.ndarray:
    path = Path(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise MatrixParseError("missing %%MatrixMarket header", path, 1, 1)
    head = lines[0].split()
    if len(head) != 5 or head[1].lower() != "matrix":
        raise MatrixParseError("header must read '%%MatrixMarket matrix <format> <field> <symmetry>'", path, 1)
    fmt, field, sym = (h.lower() for h in head[2:])
    if fmt not in ("array", "coordinate"):
        raise MatrixParseError(f"unsupported format {fmt!r}", path, 1, 3)
    if field not in _FIELDS:
        raise MatrixParseError(f"unsupported field {field!r}", path, 1, 4)
    if sym not in _SYMMETRIES:
        raise MatrixParseError(f"unsupported symmetry {sym!r}", path, 1, 5)
    cplx = field == "complex"
    body = [(k + 1, ln.split()) for k, ln in enumerate(lines) if k > 0 and ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MatrixParseError("missing size line", path, len(lines))
    size_line, size = body[0]
    want = 2 if fmt == "array" else 3
    if len(size) != want:
        raise MatrixParseError(f"size line needs {want} integers", path, size_line)
    try:
        dims = [int(x) for x in size]
    except ValueError:
        raise MatrixParseError("size line must hold integers", path, size_line) from None
    nrow, ncol = dims[0], dims[1]
    if nrow != ncol:
        raise MatrixParseError(f"matrix is {nrow}x{ncol}, not square", path, size_line)
    if nrow < 1:
        raise MatrixParseError("matrix is empty", path, size_line)
    n = nrow
    a = np.zeros((n, n), dtype=np.complex128 if cplx else np.float64)
    per = 2 if cplx else 1
    entries = body[1:]

    def value(tokens, offset, line):
        if cplx:
            return complex(_number(tokens[offset], path, line, offset + 1), _number(tokens[offset + 1], path, line, offset + 2))
        return _number(tokens[offset], path, line, offset + 1)

    def place(i, j, v):
        a[i, j] = v
        if i != j:
            if sym == "symmetric":
                a[j, i] = v
            elif sym == "skew-symmetric":
                a[j, i] = -v
            elif sym == "hermitian":
                a[j, i] = np.conj(v)

    if fmt == "array":
        if sym == "general":
            cells = [(i, j) for j in range(n) for i in range(n)]
        elif sym == "skew-symmetric":
            cells = [(i, j) for j in range(n) for i in range(j + 1, n)]
        else:
            cells = [(i, j) for j in range(n) for i in range(j, n)]
        if len(entries) != len(cells):
            raise MatrixParseError(f"expected {len(cells)} entries, found {len(entries)}", path,
                                   entries[-1][0] if entries else size_line)
        for (line, tokens), (i, j) in zip(entries, cells):
            if len(tokens) != per:
                raise MatrixParseError(f"expected {per} value(s) per entry", path, line, len(tokens))
            place(i, j, value(tokens, 0, line))
    else:
        nnz = dims[2]
        if len(entries) != nnz:
            raise MatrixParseError(f"expected {nnz} entries, found {len(entries)}", path,
                                   entries[-1][0] if entries else size_line)
        for line, tokens in entries:
            if len(tokens) != 2 + per:
                raise MatrixParseError(f"expected {2 + per} fields per entry", path, line, len(tokens))
            try:
                i, j = int(tokens[0]) - 1, int(tokens[1]) - 1
            except ValueError:
                raise MatrixParseError("row/column index must be an integer", path, line, 1) from None
            if not (0 <= i < n and 0 <= j < n):
                raise MatrixParseError(f"index ({i + 1}, {j + 1}) out of range", path, line, 1)
            place(i, j, value(tokens, 2, line))
    if not np.all(np.isfinite(a)):
        raise MatrixParseError("matrix has non-finite entries", path)
    return a


def read_csv(path) -> np.ndarray:
    path = Path(path)
    try:
        a = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2, comments="#")
    except ValueError as exc:
        raise MatrixParseError(str(exc), path) from None
    if a.shape[0] != a.shape[1]:
        raise MatrixParseError(f"matrix is {a.shape[0]}x{a.shape[1]}, not square", path)
    if not np.all(np.isfinite(a)):
        raise MatrixParseError("matrix has non-finite entries", path)
    return a


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    """Read ``path``; format from ``fmt`` (``"matrix-market"``/``"csv"``) or the suffix."""
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "matrix-market"
    if fmt == "csv":
        return read_csv(path)
    if fmt in ("matrix-market", "mtx", "mm"):
        return read_mtx(path)
    raise ValueError(f"unknown format {fmt!r}")


def write_mtx(path, a: np.ndarray, comment: str | None = None) -> None:
    a = np.asarray(a)
    cplx = np.iscomplexobj(a)
    out = [f"%%MatrixMarket matrix array {'complex' if cplx else 'real'} general"]
    if comment:
        out.extend(f"% {line}" for line in comment.splitlines())
    out.append(f"{a.shape[0]} {a.shape[1]}")
    for x in a.T.ravel():
        if cplx:
            out.append(f"{x.real:.16e} {x.imag:.16e}")
        else:
            out.append(f"{x:.16e}")
    Path(path).write_text("\n".join(out) + "\n")
