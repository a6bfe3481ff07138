"""Binary matrix records: magic "DEMB", u32 version, u32 n_rows, u32 dim, f32 data.

All integers and floats are little-endian. Data is row-major IEEE-754 single
precision. One file may hold a single record (embedding files) or several
records back to back (parameter checkpoints).
"""
import struct

import numpy as np

from .errors import DataError, ParseError

MAGIC = b"DEMB"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def encode_matrix(values: np.ndarray) -> bytes:
    """Serialize a 2-D float array to one DEMB record."""
    arr = np.ascontiguousarray(values, dtype="<f4")
    if arr.ndim != 2:
        raise DataError(f"DEMB records are 2-D, got shape {arr.shape}")
    header = _HEADER.pack(MAGIC, VERSION, arr.shape[0], arr.shape[1])
    return header + arr.tobytes()


def decode_matrix(buf: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    """Read one DEMB record starting at ``offset``.

    Returns the float32 matrix and the offset just past the record.
    """
    if len(buf) - offset < _HEADER.size:
        raise ParseError("truncated DEMB header")
    magic, version, n_rows, dim = _HEADER.unpack_from(buf, offset)
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ParseError(f"unsupported DEMB version {version}")
    start = offset + _HEADER.size
    nbytes = 4 * n_rows * dim
    if len(buf) - start < nbytes:
        raise ParseError(f"truncated DEMB payload: need {nbytes} bytes")
    flat = np.frombuffer(buf, dtype="<f4", count=n_rows * dim, offset=start)
    return flat.reshape(n_rows, dim).copy(), start + nbytes
