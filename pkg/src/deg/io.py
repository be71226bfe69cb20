"""Binary file formats: HVEC vector files, HQRY query files, HGT ground truth.

All integers are little-endian u32 unless stated otherwise; vector payloads
are float32, row-major.  Files round-trip bit-exactly.
"""

from __future__ import annotations

import struct
from typing import Tuple

import numpy as np

__all__ = [
    "FileFormatError",
    "read_hgt",
    "read_hqry",
    "read_hvec",
    "write_hgt",
    "write_hqry",
    "write_hvec",
]

HVEC_MAGIC = b"HVEC"
HQRY_MAGIC = b"HQRY"
HGT_MAGIC = b"HGT1"


class FileFormatError(ValueError):
    """Raised on bad magic, malformed headers, or truncated payloads."""


def _read_exact(fh, size: int) -> bytes:
    data = fh.read(size)
    if len(data) != size:
        raise FileFormatError("truncated file")
    return data


def write_hvec(path, vectors: np.ndarray) -> None:
    """HVEC: magic | u32 count | u32 dim | count*dim float32 rows."""
    arr = np.ascontiguousarray(vectors, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError("vectors must be a 2-D array")
    with open(path, "wb") as fh:
        fh.write(HVEC_MAGIC)
        fh.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
        fh.write(arr.tobytes())


def read_hvec(path) -> np.ndarray:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4) != HVEC_MAGIC:
            raise FileFormatError(f"{path}: not an HVEC file")
        count, dim = struct.unpack("<II", _read_exact(fh, 8))
        payload = _read_exact(fh, 4 * count * dim)
        if fh.read(1):
            raise FileFormatError(f"{path}: trailing bytes")
    return np.frombuffer(payload, dtype="<f4").reshape(count, dim).copy()


def write_hqry(path, e_queries: np.ndarray, s_queries: np.ndarray,
               alphas: np.ndarray, k: int) -> None:
    """HQRY: magic | u32 count | u32 d | u32 m | u32 k | per query e, s, alpha."""
    e = np.ascontiguousarray(e_queries, dtype="<f4")
    s = np.ascontiguousarray(s_queries, dtype="<f4")
    a = np.asarray(alphas, dtype="<f4")
    if e.shape[0] != s.shape[0] or e.shape[0] != a.shape[0]:
        raise ValueError("query arrays disagree on row count")
    if k < 1:
        raise ValueError("k must be positive")
    with open(path, "wb") as fh:
        fh.write(HQRY_MAGIC)
        fh.write(struct.pack("<IIII", e.shape[0], e.shape[1], s.shape[1], k))
        for i in range(e.shape[0]):
            fh.write(e[i].tobytes())
            fh.write(s[i].tobytes())
            fh.write(struct.pack("<f", float(a[i])))


def read_hqry(path) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Returns (e_queries, s_queries, alphas, k)."""
    with open(path, "rb") as fh:
        if _read_exact(fh, 4) != HQRY_MAGIC:
            raise FileFormatError(f"{path}: not an HQRY file")
        count, d, m, k = struct.unpack("<IIII", _read_exact(fh, 16))
        e = np.empty((count, d), dtype=np.float32)
        s = np.empty((count, m), dtype=np.float32)
        alphas = np.empty(count, dtype=np.float64)
        row = 4 * (d + m + 1)
        for i in range(count):
            payload = _read_exact(fh, row)
            e[i] = np.frombuffer(payload, dtype="<f4", count=d)
            s[i] = np.frombuffer(payload, dtype="<f4", count=m, offset=4 * d)
            alphas[i] = np.frombuffer(payload, dtype="<f4", count=1, offset=4 * (d + m))[0]
        if fh.read(1):
            raise FileFormatError(f"{path}: trailing bytes")
    return e, s, alphas, k


def write_hgt(path, ids: np.ndarray, dists: np.ndarray) -> None:
    """HGT: magic | u32 count | u32 k | per query k u32 ids then k float32 dists."""
    ids = np.ascontiguousarray(ids, dtype="<u4")
    dists = np.ascontiguousarray(dists, dtype="<f4")
    if ids.shape != dists.shape or ids.ndim != 2:
        raise ValueError("ids and dists must be matching 2-D arrays")
    with open(path, "wb") as fh:
        fh.write(HGT_MAGIC)
        fh.write(struct.pack("<II", ids.shape[0], ids.shape[1]))
        for i in range(ids.shape[0]):
            fh.write(ids[i].tobytes())
            fh.write(dists[i].tobytes())


def read_hgt(path) -> Tuple[np.ndarray, np.ndarray]:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4) != HGT_MAGIC:
            raise FileFormatError(f"{path}: not an HGT file")
        count, k = struct.unpack("<II", _read_exact(fh, 8))
        ids = np.empty((count, k), dtype=np.int64)
        dists = np.empty((count, k), dtype=np.float32)
        for i in range(count):
            ids[i] = np.frombuffer(_read_exact(fh, 4 * k), dtype="<u4")
            dists[i] = np.frombuffer(_read_exact(fh, 4 * k), dtype="<f4")
        if fh.read(1):
            raise FileFormatError(f"{path}: trailing bytes")
    return ids, dists
