"""Writer for the .cemb embedding-matrix container.

Layout: a 26-byte little-endian header ``<4sIBBQQ`` (magic ``CEMB``,
format version, role byte, dtype byte, row count, column count) followed by
the row-major float32 payload.  Implemented here independently so files can
be produced without the consumer package installed; consumers validate the
same layout on read.
"""

import struct

import numpy as np

from .errors import ValidationError

MAGIC = b"CEMB"
VERSION = 1
DTYPE_F32 = 0
ROLE_CONTEXT = 0
ROLE_QUERY = 1
ROLE_COMPRESSED = 2

_HEADER = struct.Struct("<4sIBBQQ")


def write_cemb(path, role: int, data) -> None:
    if role not in (ROLE_CONTEXT, ROLE_QUERY, ROLE_COMPRESSED):
        raise ValidationError(f"unknown role {role}")
    arr = np.ascontiguousarray(data, dtype="<f4")
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValidationError(f"expected a 2-D matrix with columns, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError("refusing to write non-finite values")
    header = _HEADER.pack(MAGIC, VERSION, role, DTYPE_F32, *arr.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(arr.tobytes())
