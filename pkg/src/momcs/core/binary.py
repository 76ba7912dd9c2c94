"""
Little-endian binary codec for dense float64 arrays.

Layout: 4 magic bytes, u32 number of dimensions, one u32 per dimension, then the row-major f64 payload.
The same conventions (u32/f64 little endian, row-major) are used by the generator weight file.
"""
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from momcs.core.errors import MomcsError

ARRAY_MAGIC = b"GNA1"
U32 = np.dtype("<u4")
F64 = np.dtype("<f8")


class ArrayFileError(MomcsError):
    """Raised when a binary array file cannot be decoded."""

    pass


def encode_array(array: np.ndarray) -> bytes:
    array = np.asarray(array, dtype=np.float64)
    header = np.asarray([array.ndim, *array.shape], dtype=U32).tobytes()
    return ARRAY_MAGIC + header + np.ascontiguousarray(array, dtype=F64).tobytes()


def decode_array(payload: bytes) -> np.ndarray:
    """
    Decode bytes produced by `encode_array`.
    Args:
        payload: raw file content

    Returns:
        A float64 array with the recorded shape.

    Raises:
        ArrayFileError: on bad magic, short header, or a payload whose size disagrees with the header.
    """
    if payload[:4] != ARRAY_MAGIC:
        raise ArrayFileError(f"Bad magic {payload[:4]!r}, expected {ARRAY_MAGIC!r}")
    ndim, offset = _read_u32(payload, 4, 1)
    shape, offset = _read_u32(payload, offset, int(ndim[0]))
    expected = int(np.prod(shape, dtype=np.int64)) * F64.itemsize
    body = payload[offset:]
    if len(body) != expected:
        raise ArrayFileError(f"Header announces {expected} payload bytes but the file holds {len(body)}")
    return np.frombuffer(body, dtype=F64).astype(np.float64).reshape(tuple(int(d) for d in shape))


def write_array(path: Union[str, Path], array: np.ndarray) -> None:
    Path(path).write_bytes(encode_array(array))


def read_array(path: Union[str, Path]) -> np.ndarray:
    return decode_array(Path(path).read_bytes())


def _read_u32(payload: bytes, offset: int, count: int) -> Tuple[np.ndarray, int]:
    end = offset + count * U32.itemsize
    if len(payload) < end:
        raise ArrayFileError("File ends inside the header")
    return np.frombuffer(payload[offset:end], dtype=U32), end
