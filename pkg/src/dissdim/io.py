"""On-disk formats for atomic measures and gridded fields, plus CSV reports.

Measure files: one text header line

    dissdim-measure v1 d=<int> n=<int>

followed either by ``n`` text lines ``x_1 ... x_d t w`` or, in the binary
variant, by ``n`` records of (d+2) little-endian float64.  The two bodies
are told apart by the exact byte length of the binary payload.

Field files: one text header line

    dissdim-field v1 d=<int> nx=<int> nt=<int> a=<f> b=<f> T=<f> components=u[,p][,theta]

followed by little-endian float64 samples in (t-major, then x lexicographic,
then component) order.  A CSV body (rows ``t,x,u[,p][,theta]``) is supported
for d = 1.
"""

from __future__ import annotations

import io as _io

import numpy as np

from .aniso_measure import AtomicMeasure
from .fields import GriddedField

__all__ = [
    "MalformedFileError",
    "write_measure",
    "read_measure",
    "write_field",
    "read_field",
    "ladder_csv",
    "box_count_csv",
]

MEASURE_MAGIC = "dissdim-measure v1"
FIELD_MAGIC = "dissdim-field v1"


class MalformedFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _parse_header(line: str, magic: str, path: str) -> dict:
    parts = line.strip().split()
    if parts[: len(magic.split())] != magic.split():
        raise MalformedFileError(f"{path}: expected header {magic!r}", line=1)
    fields = {}
    for token in parts[len(magic.split()):]:
        if "=" not in token:
            raise MalformedFileError(f"{path}: bad header token {token!r}", line=1)
        key, value = token.split("=", 1)
        fields[key] = value
    return fields


# ---------------------------------------------------------------------------
# Measures.
# ---------------------------------------------------------------------------

def write_measure(path, mu: AtomicMeasure, binary: bool = False) -> None:
    header = f"{MEASURE_MAGIC} d={mu.d} n={mu.n_atoms}\n"
    rows = np.column_stack([mu.positions, mu.times, mu.weights])
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if binary:
            fh.write(rows.astype("<f8").tobytes())
        else:
            buf = _io.StringIO()
            for row in rows:
                buf.write(" ".join(repr(float(v)) for v in row))
                buf.write("\n")
            fh.write(buf.getvalue().encode("ascii"))


def read_measure(path) -> AtomicMeasure:
    with open(path, "rb") as fh:
        raw = fh.read()
    newline = raw.find(b"\n")
    if newline < 0:
        raise MalformedFileError(f"{path}: missing header line", line=1)
    header = _parse_header(raw[:newline].decode("ascii", "replace"), MEASURE_MAGIC, str(path))
    try:
        d = int(header["d"])
        n = int(header["n"])
    except (KeyError, ValueError) as exc:
        raise MalformedFileError(f"{path}: header needs integer d= and n= ({exc})", line=1)
    body = raw[newline + 1:]
    if len(body) == n * (d + 2) * 8:
        rows = np.frombuffer(body, dtype="<f8").reshape(n, d + 2)
    else:
        rows = np.zeros((n, d + 2))
        text = body.decode("ascii", "replace").splitlines()
        if len(text) < n:
            raise MalformedFileError(f"{path}: expected {n} atom lines, found {len(text)}",
                                     line=len(text) + 1)
        for i in range(n):
            parts = text[i].split()
            if len(parts) != d + 2:
                raise MalformedFileError(
                    f"{path}: expected {d + 2} columns, found {len(parts)}", line=i + 2)
            try:
                rows[i] = [float(v) for v in parts]
            except ValueError:
                raise MalformedFileError(f"{path}: non-numeric entry", line=i + 2)
    try:
        return AtomicMeasure(rows[:, :d], rows[:, d], rows[:, d + 1], d=d)
    except ValueError as exc:
        raise MalformedFileError(f"{path}: {exc}")


# ---------------------------------------------------------------------------
# Fields.
# ---------------------------------------------------------------------------

def _components(field: GriddedField) -> list[str]:
    comps = ["u"]
    if field.p is not None:
        comps.append("p")
    if field.theta is not None:
        comps.append("theta")
    return comps


def _sample_matrix(field: GriddedField) -> np.ndarray:
    """Samples flattened to (nt * nx^d, n_components) in header order."""
    blocks = [field.u.reshape(field.nt, -1, field.d)]
    for arr in (field.p, field.theta):
        if arr is not None:
            blocks.append(arr.reshape(field.nt, -1, 1))
    return np.concatenate(blocks, axis=2).reshape(-1, sum(b.shape[2] for b in blocks))


def write_field(path, field: GriddedField, binary: bool = True) -> None:
    if not binary and field.d != 1:
        raise ValueError("the CSV body is only defined for d = 1")
    comps = ",".join(_components(field))
    header = (f"{FIELD_MAGIC} d={field.d} nx={field.nx} nt={field.nt} "
              f"a={field.a!r} b={field.b!r} T={field.T!r} components={comps}\n")
    mat = _sample_matrix(field)
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if binary:
            fh.write(mat.astype("<f8").tobytes())
        else:
            xs = field.x_axis
            ts = field.t_axis
            buf = _io.StringIO()
            for k in range(field.nt):
                for i in range(field.nx):
                    row = mat[k * field.nx + i]
                    buf.write(",".join([repr(float(ts[k])), repr(float(xs[i]))]
                                       + [repr(float(v)) for v in row]))
                    buf.write("\n")
            fh.write(buf.getvalue().encode("ascii"))


def read_field(path) -> GriddedField:
    with open(path, "rb") as fh:
        raw = fh.read()
    newline = raw.find(b"\n")
    if newline < 0:
        raise MalformedFileError(f"{path}: missing header line", line=1)
    header = _parse_header(raw[:newline].decode("ascii", "replace"), FIELD_MAGIC, str(path))
    try:
        d = int(header["d"])
        nx = int(header["nx"])
        nt = int(header["nt"])
        a = float(header["a"])
        b = float(header["b"])
        big_t = float(header["T"])
        comps = header["components"].split(",")
    except (KeyError, ValueError) as exc:
        raise MalformedFileError(f"{path}: bad field header ({exc})", line=1)
    n_cols = d + ("p" in comps) + ("theta" in comps)
    n_nodes = nt * nx ** d
    body = raw[newline + 1:]
    if len(body) == n_nodes * n_cols * 8:
        mat = np.frombuffer(body, dtype="<f8").reshape(n_nodes, n_cols)
    else:
        if d != 1:
            raise MalformedFileError(
                f"{path}: binary payload has {len(body)} bytes, "
                f"expected {n_nodes * n_cols * 8}", line=2)
        text = body.decode("ascii", "replace").splitlines()
        if len(text) < n_nodes:
            raise MalformedFileError(f"{path}: expected {n_nodes} rows, found {len(text)}",
                                     line=len(text) + 1)
        mat = np.zeros((n_nodes, n_cols))
        for i in range(n_nodes):
            parts = text[i].split(",")
            if len(parts) != n_cols + 2:
                raise MalformedFileError(
                    f"{path}: expected {n_cols + 2} columns, found {len(parts)}", line=i + 2)
            try:
                mat[i] = [float(v) for v in parts[2:]]
            except ValueError:
                raise MalformedFileError(f"{path}: non-numeric entry", line=i + 2)
    spatial = (nx,) * d
    u = mat[:, :d].reshape((nt,) + spatial + (d,))
    cursor = d
    p = theta = None
    if "p" in comps:
        p = mat[:, cursor].reshape((nt,) + spatial)
        cursor += 1
    if "theta" in comps:
        theta = mat[:, cursor].reshape((nt,) + spatial)
    try:
        return GriddedField(d, a, b, nx, big_t, nt, u, p=p, theta=theta)
    except ValueError as exc:
        raise MalformedFileError(f"{path}: {exc}")


# ---------------------------------------------------------------------------
# CSV reports.
# ---------------------------------------------------------------------------

def ladder_csv(ladder) -> str:
    lines = ["delta,density,fit_slope,residual"]
    for delta, rho in zip(ladder.scales, ladder.densities):
        lines.append(f"{delta!r},{rho!r},{ladder.fitted_slope!r},{ladder.fit_residual!r}")
    return "\n".join(lines) + "\n"


def box_count_csv(scales, result) -> str:
    lines = ["delta,count,fit_slope,residual"]
    for delta, count in zip(scales, result.counts):
        lines.append(f"{float(delta)!r},{count},{result.dim_estimate!r},{result.fit_residual!r}")
    return "\n".join(lines) + "\n"
