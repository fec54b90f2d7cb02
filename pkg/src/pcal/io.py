"""CSV, binary and JSON serialization of signals, decompositions and reports."""
from __future__ import annotations

import json
import struct

import numpy as np

from .errors import ValidationError
from .grid import GridSignal, GridSpec, lp_of_array
from .littlewood_paley import DyadicPartition, blocks_array, partition_for

MAGIC = b"PCAL"
VERSION = 1
_HEADER = struct.Struct("<4sIQdI")


def _fmt(v) -> str:
    return "%.17g" % v


def csv_text(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text(path, text: str):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def signal_csv(f: GridSignal) -> str:
    """Columns x, channel_0, ... (channels flattened in C order)."""
    if f.is_complex:
        raise ValidationError("CSV export is for real signals")
    chans = f.values.reshape(-1, f.spec.N)
    header = ["x"] + [f"channel_{i}" for i in range(chans.shape[0])]
    rows = ([float(x)] + [float(c) for c in col] for x, col in zip(f.x, chans.T))
    return csv_text(header, rows)


def read_signal_csv(path, L: float | None = None) -> GridSignal:
    """Inverse of :func:`signal_csv`; L is recovered from the x column."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x = data[:, 0]
    N = x.size
    if L is None:
        L = -float(x[0])
    spec = GridSpec(L, N)
    if np.max(np.abs(x - spec.x)) > 1e-9 * L:
        raise ValidationError(f"{path}: x column is not the grid of L={L}, N={N}")
    v = data[:, 1:].T
    return GridSignal(spec, v[0] if v.shape[0] == 1 else v)


def dump_binary(f: GridSignal) -> bytes:
    """Header (magic, version u32, N u64, L f64, m u32) then little-endian f64 samples."""
    if f.is_complex:
        raise ValidationError("binary export is for real signals")
    m = f.m
    head = _HEADER.pack(MAGIC, VERSION, f.spec.N, f.spec.L, m)
    return head + np.ascontiguousarray(f.values.reshape(m, f.spec.N), dtype="<f8").tobytes()


def load_binary(blob: bytes) -> GridSignal:
    if len(blob) < _HEADER.size:
        raise ValidationError("binary dump is truncated")
    magic, version, N, L, m = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValidationError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValidationError(f"unsupported dump version {version}")
    need = _HEADER.size + 8 * N * m
    if len(blob) != need:
        raise ValidationError(f"binary dump has {len(blob)} bytes, expected {need}")
    v = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape(m, N).astype(float)
    return GridSignal(GridSpec(L, N), v[0] if m == 1 else v)


def decomposition_rows(f: GridSignal, p: float, alpha: float,
                       part: DyadicPartition | None = None) -> list[tuple]:
    """(j, l2 norm, lp norm, 2^{j alpha} lp norm) for j = -1 ... J+1."""
    part = partition_for(f, part)
    B = blocks_array(f.values, part)
    nch = len(f.shape)
    l2 = lp_of_array(B, 2.0, f.spec.dx, nch)
    lp = lp_of_array(B, p, f.spec.dx, nch)
    rows = []
    for i, j in enumerate(part.levels):
        rows.append((j, float(l2[i]), float(lp[i]), float(2.0 ** (alpha * j) * lp[i])))
    return rows


def decomposition_csv(f: GridSignal, p: float, alpha: float,
                      part: DyadicPartition | None = None) -> str:
    return csv_text(["j", "l2_norm", "lp_norm", "weighted_norm"],
                    decomposition_rows(f, p, alpha, part))


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        if np.isnan(f):
            return "nan"
        if np.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    return v


def report_json(report: dict) -> str:
    """Deterministic JSON: sorted keys, non-finite floats as strings."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"
