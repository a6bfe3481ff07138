"""Writer for the DEMB binary matrix format.

Layout: magic ``DEMB``, u32 version, u32 n_rows, u32 dim, then row-major
IEEE-754 single precision. All fields little-endian. This mirrors the
consumer side byte for byte; the format is the contract between the two
tools.
"""
import struct

import numpy as np

MAGIC = b"DEMB"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def encode_matrix(values: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(values, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"DEMB records are 2-D, got shape {arr.shape}")
    return _HEADER.pack(MAGIC, VERSION, arr.shape[0], arr.shape[1]) + arr.tobytes()


def write_matrix(values: np.ndarray, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_matrix(values))
