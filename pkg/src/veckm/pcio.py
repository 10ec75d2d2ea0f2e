"""File I/O: xyz and ascii-PLY point clouds, binary and CSV encoding exports.

Binary encoding container (all little-endian, 40-byte header):

    offset  size  field
    0       4     magic, the bytes "VKM1"
    4       8     n (u64), number of rows
    12      8     d (u64), entries per row
    20      8     alpha (f64), A-basis bandwidth
    28      8     neighborhood value (f64): radius if sharp, beta if soft
    36      1     kind: 0 = sharp, 1 = soft
    37      1     normalized: 0 or 1
    38      1     precision: 0 = f64 pairs, 1 = f32 pairs
    39      1     reserved, must be 0

The payload is n*d complex entries in row-major order, each stored as a
(real, imag) pair of the declared precision. Headers are validated before
any payload allocation; payloads over 16 GiB are rejected outright. Writing
and reading back at f64 is bit-identical.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .encoder import AdjacencySpec, EncodingMatrix
from .errors import (CloudParseError, EmptyInputError, EncodingFormatError,
                     ParameterError)
from .shapes import PointCloud

CLOUD_FORMATS = ("xyz", "ply_ascii")
ENCODING_MAGIC = b"VKM1"
MAX_PAYLOAD_BYTES = 16 * 2**30

_HEADER = struct.Struct("<4sQQddBBBB")
_KIND_CODES = {"sharp": 0, "soft": 1}
_KIND_NAMES = {0: "sharp", 1: "soft"}
_FLOAT_FMT = "%.17g"


def _resolve_format(path, fmt: str | None) -> str:
    if fmt is None:
        return "ply_ascii" if Path(path).suffix.lower() == ".ply" else "xyz"
    if fmt not in CLOUD_FORMATS:
        raise ParameterError(f"unknown cloud format {fmt!r}; expected one of {CLOUD_FORMATS}")
    return fmt


def _near_unit(rows: np.ndarray) -> bool:
    lengths = np.linalg.norm(rows, axis=1)
    return bool(np.all(np.abs(lengths - 1.0) <= 1e-3))


def _attach_normals(coords, normal_cols, name: str) -> PointCloud:
    """Build the cloud, keeping candidate normal columns only when near-unit.

    Coarsely printed normals (unit only to ~1e-3) are renormalized so the
    cloud invariant (unit within 1e-6) holds; rows that are already unit to
    1e-9 pass through untouched, keeping write/read round trips bitwise.
    """
    normals = None
    if normal_cols is not None and _near_unit(normal_cols):
        lengths = np.linalg.norm(normal_cols, axis=1)
        if np.all(np.abs(lengths - 1.0) <= 1e-9):
            normals = normal_cols
        else:
            normals = normal_cols / lengths[:, None]
    return PointCloud(coords=coords, normals=normals, name=name)


def _read_xyz(path) -> PointCloud:
    coords = []
    extras = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts:
                continue
            if len(parts) < 3:
                raise CloudParseError(f"expected at least 3 columns, got {len(parts)}", line_no)
            try:
                vals = [float(tok) for tok in parts]
            except ValueError as exc:
                raise CloudParseError(f"non-numeric column ({exc})", line_no) from None
            coords.append(vals[:3])
            extras.append(vals[3:6] if len(vals) >= 6 else None)
    if not coords:
        raise EmptyInputError(f"{path}: no points found")
    pts = np.asarray(coords, dtype=np.float64)
    normal_cols = None
    if all(e is not None for e in extras):
        normal_cols = np.asarray(extras, dtype=np.float64)
    return _attach_normals(pts, normal_cols, Path(path).stem)


def _read_ply(path) -> PointCloud:
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "ply":
        raise CloudParseError("not a PLY file (missing 'ply' magic line)", 1)

    elements: list[tuple[str, int]] = []  # (name, count) in declaration order
    vertex_props: list[str] = []
    fmt_seen = False
    header_end = None
    for i, raw in enumerate(lines[1:], start=2):
        parts = raw.split()
        if not parts:
            continue
        key = parts[0]
        if key == "comment":
            continue
        if key == "format":
            if len(parts) < 2 or parts[1] != "ascii":
                raise CloudParseError(
                    "binary PLY is not supported; convert to ascii first", i)
            fmt_seen = True
        elif key == "element":
            if len(parts) != 3:
                raise CloudParseError("malformed element declaration", i)
            try:
                count = int(parts[2])
            except ValueError:
                raise CloudParseError(f"bad element count {parts[2]!r}", i) from None
            elements.append((parts[1], count))
        elif key == "property":
            if not elements:
                raise CloudParseError("property declared before any element", i)
            if elements[-1][0] == "vertex":
                vertex_props.append(parts[-1])
        elif key == "end_header":
            header_end = i
            break
        else:
            raise CloudParseError(f"unrecognized header keyword {key!r}", i)
    if header_end is None:
        raise CloudParseError("header never terminated with end_header", len(lines))
    if not fmt_seen:
        raise CloudParseError("missing format declaration", header_end)

    vertex_count = dict(elements).get("vertex")
    if vertex_count is None:
        raise CloudParseError("no vertex element declared", header_end)
    for axis in ("x", "y", "z"):
        if axis not in vertex_props:
            raise CloudParseError(f"vertex element is missing property {axis!r}", header_end)
    has_normals = all(f"n{axis}" in vertex_props for axis in ("x", "y", "z"))
    col = {name: j for j, name in enumerate(vertex_props)}

    coords = np.empty((vertex_count, 3), dtype=np.float64)
    normal_cols = np.empty((vertex_count, 3), dtype=np.float64) if has_normals else None
    cursor = header_end  # 1-based line index of end_header
    for elem_name, count in elements:
        if elem_name != "vertex":
            cursor += count  # skip other elements wholesale
            continue
        for k in range(count):
            line_no = cursor + 1 + k
            if line_no > len(lines):
                raise CloudParseError(
                    f"expected {count} vertex lines, file ended after {k}", len(lines))
            parts = lines[line_no - 1].split()
            if len(parts) < len(vertex_props):
                raise CloudParseError(
                    f"expected {len(vertex_props)} vertex columns, got {len(parts)}", line_no)
            try:
                vals = [float(tok) for tok in parts[:len(vertex_props)]]
            except ValueError as exc:
                raise CloudParseError(f"non-numeric vertex column ({exc})", line_no) from None
            coords[k] = (vals[col["x"]], vals[col["y"]], vals[col["z"]])
            if has_normals:
                normal_cols[k] = (vals[col["nx"]], vals[col["ny"]], vals[col["nz"]])
        cursor += count
    if vertex_count == 0:
        raise EmptyInputError(f"{path}: PLY declares zero vertices")
    return _attach_normals(coords, normal_cols, Path(path).stem)


def read_cloud(path, fmt: str | None = None) -> PointCloud:
    """Read a point cloud from an xyz or ascii-PLY file.

    ``fmt`` is inferred from the extension when omitted (".ply" means
    ply_ascii, anything else xyz). xyz lines carry at least three floats;
    columns 4-6, when present on every line and near-unit, become normals.
    """
    fmt = _resolve_format(path, fmt)
    return _read_xyz(path) if fmt == "xyz" else _read_ply(path)


def write_cloud(pc: PointCloud, path, fmt: str | None = None) -> None:
    """Write a cloud as xyz (3 or 6 columns) or ascii PLY."""
    fmt = _resolve_format(path, fmt)
    has_normals = pc.normals is not None
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fmt == "ply_ascii":
            fh.write("ply\nformat ascii 1.0\n")
            fh.write(f"element vertex {pc.n}\n")
            fh.write("property double x\nproperty double y\nproperty double z\n")
            if has_normals:
                fh.write("property double nx\nproperty double ny\nproperty double nz\n")
            fh.write("end_header\n")
        for j in range(pc.n):
            cols = list(pc.coords[j])
            if has_normals:
                cols.extend(pc.normals[j])
            fh.write(" ".join(_FLOAT_FMT % v for v in cols) + "\n")


def write_encoding(m: EncodingMatrix, path, precision: str = "f64") -> None:
    """Write an encoding matrix in the binary container described above."""
    if precision not in ("f64", "f32"):
        raise ParameterError(f"precision must be 'f64' or 'f32', got {precision!r}")
    header = _HEADER.pack(
        ENCODING_MAGIC, m.n, m.dim, m.alpha, m.neighborhood.value,
        _KIND_CODES[m.neighborhood.kind], int(m.normalized),
        0 if precision == "f64" else 1, 0)
    payload = np.ascontiguousarray(m.rows, dtype="<c16" if precision == "f64" else "<c8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_encoding(path) -> EncodingMatrix:
    """Read a binary encoding file back into an EncodingMatrix.

    The header is fully validated before the payload is touched; truncated
    or oversized files raise EncodingFormatError without returning a
    partial matrix. f32 payloads are widened back to complex128.
    """
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise EncodingFormatError(f"{path}: truncated header ({len(head)} bytes)")
        magic, n, d, alpha, nb_value, kind, normalized, precision, reserved = _HEADER.unpack(head)
        if magic != ENCODING_MAGIC:
            raise EncodingFormatError(f"{path}: bad magic {magic!r}")
        if kind not in _KIND_NAMES:
            raise EncodingFormatError(f"{path}: unknown neighborhood kind code {kind}")
        if normalized not in (0, 1):
            raise EncodingFormatError(f"{path}: bad normalized flag {normalized}")
        if precision not in (0, 1):
            raise EncodingFormatError(f"{path}: bad precision code {precision}")
        if reserved != 0:
            raise EncodingFormatError(f"{path}: nonzero reserved byte {reserved}")
        if n < 1 or d < 1:
            raise EncodingFormatError(f"{path}: empty matrix ({n} x {d})")
        item = 16 if precision == 0 else 8
        expected = n * d * item
        if expected > MAX_PAYLOAD_BYTES:
            raise EncodingFormatError(
                f"{path}: payload would be {expected} bytes, over the 16 GiB cap")
        payload = fh.read(expected)
        if len(payload) != expected:
            raise EncodingFormatError(
                f"{path}: truncated payload ({len(payload)} of {expected} bytes)")
        if fh.read(1) != b"":
            raise EncodingFormatError(f"{path}: trailing data after payload")
    rows = np.frombuffer(payload, dtype="<c16" if precision == 0 else "<c8")
    rows = rows.reshape(n, d).astype(np.complex128)
    nb = AdjacencySpec(_KIND_NAMES[kind], nb_value)
    return EncodingMatrix(rows, normalized=bool(normalized), alpha=alpha, neighborhood=nb)


def write_encoding_csv(m: EncodingMatrix, path) -> None:
    """CSV export: one header row, then n lines of 2d floats (re, im pairs)."""
    names = []
    for k in range(m.dim):
        names.append(f"re{k}")
        names.append(f"im{k}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for j in range(m.n):
            row = m.rows[j]
            cells = []
            for k in range(m.dim):
                cells.append(_FLOAT_FMT % row[k].real)
                cells.append(_FLOAT_FMT % row[k].imag)
            fh.write(",".join(cells) + "\n")
