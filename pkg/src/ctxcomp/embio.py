"""Bit-exact I/O for embedding matrices (``.cemb`` files).

Layout: a 26-byte little-endian header followed by the row-major float32
payload.  Header fields: magic ``CEMB``, version u32 (=1), role u8
(0=context, 1=query, 2=compressed), dtype u8 (0 = IEEE-754 binary32 LE),
rows u64, cols u64.  Endianness is fixed regardless of host so files are
portable byte-for-byte.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, TruncatedError, ValidationError

MAGIC = b"CEMB"
VERSION = 1
DTYPE_F32 = 0

ROLE_CONTEXT = 0
ROLE_QUERY = 1
ROLE_COMPRESSED = 2
_ROLES = (ROLE_CONTEXT, ROLE_QUERY, ROLE_COMPRESSED)

_HEADER = struct.Struct("<4sIBBQQ")
HEADER_SIZE = _HEADER.size  # 26


@dataclass
class EmbeddingMatrix:
    """A rows×cols matrix of finite float32 token states, row i = token i."""

    role: int
    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValidationError(f"embedding matrix must be 2-D, got {arr.ndim}-D")
        self.data = arr
        self.validate()

    def validate(self):
        if self.role not in _ROLES:
            raise ValidationError(f"unknown role byte {self.role}")
        if self.data.shape[1] < 1:
            raise ValidationError("embedding matrix needs at least one column")
        if not np.all(np.isfinite(self.data)):
            raise ValidationError("embedding matrix contains NaN or Inf")

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]


def write_embeddings(m: EmbeddingMatrix, sink) -> None:
    """Serialize ``m`` to a binary stream; byte-identical for identical input."""
    m.validate()
    rows, cols = m.data.shape
    sink.write(_HEADER.pack(MAGIC, VERSION, m.role, DTYPE_F32, rows, cols))
    payload = np.ascontiguousarray(m.data, dtype="<f4")
    sink.write(payload.tobytes())


def read_embeddings(source) -> EmbeddingMatrix:
    """Parse a binary stream; rejects malformed input rather than truncating."""
    head = source.read(HEADER_SIZE)
    if len(head) < HEADER_SIZE:
        raise TruncatedError(f"header is {len(head)} bytes, expected {HEADER_SIZE}")
    magic, version, role, dtype, rows, cols = _HEADER.unpack(head)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if dtype != DTYPE_F32:
        raise FormatError(f"unsupported dtype byte {dtype}")
    if role not in _ROLES:
        raise FormatError(f"unknown role byte {role}")
    if cols < 1:
        raise FormatError("cols must be >= 1")
    expected = rows * cols * 4
    payload = source.read(expected)
    if len(payload) != expected:
        raise TruncatedError(
            f"payload is {len(payload)} bytes, header promises {expected}"
        )
    if source.read(1) != b"":
        raise FormatError("trailing bytes after payload")
    data = np.frombuffer(payload, dtype="<f4").reshape(rows, cols)
    return EmbeddingMatrix(role=role, data=data.copy())


def write_cemb(m: EmbeddingMatrix, path) -> None:
    with open(Path(path), "wb") as fh:
        write_embeddings(m, fh)


def read_cemb(path) -> EmbeddingMatrix:
    with open(Path(path), "rb") as fh:
        return read_embeddings(fh)
