"""
Reading and writing generator weight files.

Layout (all little endian):
    "GNW1" magic, u32 layer count d, (d + 1) u32 layer dims, u8 final_relu flag,
    then for every layer the row-major f64 weight entries followed by the f64 bias entries.
"""
import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from momcs.core.binary import F64, U32
from momcs.core.errors import MomcsError

from .network import GeneratorNet

logger = logging.getLogger(__name__)

WEIGHTS_MAGIC = b"GNW1"


class WeightFileError(MomcsError):
    """Base error for malformed weight files."""

    pass


class BadMagicError(WeightFileError):
    """The file does not start with the weight-file magic bytes."""

    pass


class TruncatedWeightFileError(WeightFileError):
    """The file ends before the header or the payload announced by the header is complete."""

    pass


class WeightPayloadMismatchError(WeightFileError):
    """The header and the payload disagree (invalid dims or bytes left over after the last layer)."""

    pass


def encode_weights(net: GeneratorNet) -> bytes:
    header = [
        WEIGHTS_MAGIC,
        np.asarray([net.depth], dtype=U32).tobytes(),
        np.asarray(net.layer_dims, dtype=U32).tobytes(),
        np.asarray([1 if net.final_relu else 0], dtype=np.uint8).tobytes(),
    ]
    payload = []
    for w, b in zip(net.weights, net.biases):
        payload.append(np.ascontiguousarray(w, dtype=F64).tobytes())
        payload.append(np.ascontiguousarray(b, dtype=F64).tobytes())
    return b"".join(header + payload)


def decode_weights(payload: bytes) -> GeneratorNet:
    """
    Decode the content of a weight file.
    Raises:
        BadMagicError: wrong magic bytes
        TruncatedWeightFileError: the header or a layer is cut short
        WeightPayloadMismatchError: zero dims, zero layers or trailing bytes
    """
    if len(payload) < 4 or payload[:4] != WEIGHTS_MAGIC:
        raise BadMagicError(f"Bad magic {payload[:4]!r}, expected {WEIGHTS_MAGIC!r}")
    offset = 4
    depth, offset = _take(payload, offset, U32, 1, "layer count")
    depth = int(depth[0])
    if depth < 1:
        raise WeightPayloadMismatchError("Weight file declares zero layers")
    dims, offset = _take(payload, offset, U32, depth + 1, "layer dims")
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise WeightPayloadMismatchError(f"Weight file declares invalid layer dims {dims}")
    flag, offset = _take(payload, offset, np.dtype(np.uint8), 1, "final_relu flag")
    weights: List[np.ndarray] = []
    biases: List[np.ndarray] = []
    for layer, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
        w, offset = _take(payload, offset, F64, fan_in * fan_out, f"weights of layer {layer}")
        b, offset = _take(payload, offset, F64, fan_out, f"biases of layer {layer}")
        weights.append(w.reshape(fan_out, fan_in))
        biases.append(b)
    if offset != len(payload):
        raise WeightPayloadMismatchError(f"{len(payload) - offset} bytes left after the last layer of dims {dims}")
    return GeneratorNet(layer_dims=tuple(dims), weights=tuple(weights), biases=tuple(biases), final_relu=bool(flag[0]))


def save_weights(net: GeneratorNet, path: Union[str, Path]) -> None:
    """
    Write `net` to `path` in the weight-file format.
    """
    Path(path).write_bytes(encode_weights(net))
    logger.debug("Saved generator %s to %s", net, path)


def load_weights(path: Union[str, Path]) -> GeneratorNet:
    """
    Load a generator from a weight file. Round trips with `save_weights` are bit-exact.
    """
    net = decode_weights(Path(path).read_bytes())
    logger.debug("Loaded generator %s from %s", net, path)
    return net


def _take(payload: bytes, offset: int, dtype: np.dtype, count: int, what: str) -> Tuple[np.ndarray, int]:
    end = offset + count * dtype.itemsize
    if len(payload) < end:
        available = max(len(payload) - offset, 0) // dtype.itemsize
        raise TruncatedWeightFileError(f"File truncated in {what}: expected {count} values, found {available}")
    return np.frombuffer(payload[offset:end], dtype=dtype).copy(), end
