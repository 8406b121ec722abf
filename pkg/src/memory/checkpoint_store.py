"""Binary checkpoint blobs

Layout (all integers little-endian):

    8 bytes   magic b"PPRLCKPT"
    u32       format version
    u32       header length H
    H bytes   UTF-8 JSON header {"tensors": [...], "meta": {...}}
    ...       tensor payloads, back to back, in header order

Each tensor entry records name, dtype (numpy little-endian string), shape,
offset and nbytes relative to the start of the payload section.
"""

import json
import logging
import os
import struct
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

from src.errors import CheckpointError

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"PPRLCKPT"
CHECKPOINT_VERSION = 1
_PREFIX = struct.Struct("<8sII")


def _little_endian(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    if array.dtype.byteorder == ">":
        array = array.astype(array.dtype.newbyteorder("<"))
    return array


def encode_checkpoint(tensors: Dict[str, np.ndarray], meta: Dict[str, Any]) -> bytes:
    """Serialize named arrays plus JSON-able metadata into one blob"""
    entries = []
    payloads = []
    offset = 0
    for name, array in tensors.items():
        array = _little_endian(np.asarray(array))
        raw = array.tobytes()
        entries.append({
            "name": name,
            "dtype": array.dtype.str,
            "shape": list(array.shape),
            "offset": offset,
            "nbytes": len(raw)
        })
        payloads.append(raw)
        offset += len(raw)

    try:
        header = json.dumps({"tensors": entries, "meta": meta}, sort_keys=True).encode("utf-8")
    except TypeError as exc:
        raise CheckpointError(f"checkpoint metadata is not JSON-serializable: {exc}")
    return _PREFIX.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(header)) + header + b"".join(payloads)


def decode_checkpoint(blob: bytes) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
    """Inverse of encode_checkpoint"""
    if len(blob) < _PREFIX.size:
        raise CheckpointError("checkpoint is truncated")
    magic, version, header_length = _PREFIX.unpack_from(blob)
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointError(f"not a checkpoint (magic {magic!r})")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")

    start = _PREFIX.size
    try:
        header = json.loads(blob[start:start + header_length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"corrupt checkpoint header: {exc}")

    payload = memoryview(blob)[start + header_length:]
    tensors: Dict[str, np.ndarray] = {}
    for entry in header["tensors"]:
        end = entry["offset"] + entry["nbytes"]
        if end > len(payload):
            raise CheckpointError(f"tensor {entry['name']} runs past the end of the checkpoint")
        data = np.frombuffer(payload[entry["offset"]:end], dtype=np.dtype(entry["dtype"]))
        tensors[entry["name"]] = data.reshape(entry["shape"]).copy()
    return tensors, header["meta"]


def write_checkpoint(path: Union[str, Path], tensors: Dict[str, np.ndarray], meta: Dict[str, Any]) -> Path:
    """Write atomically via a temporary sibling file"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = encode_checkpoint(tensors, meta)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(blob)
    os.replace(tmp, path)
    logger.info(f"[CheckpointStore] Wrote {path} ({len(blob)} bytes, {len(tensors)} tensors)")
    return path


def read_checkpoint(path: Union[str, Path]) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    with open(path, "rb") as f:
        return decode_checkpoint(f.read())


def read_checkpoint_meta(path: Union[str, Path]) -> Dict[str, Any]:
    """Metadata only; tensor payloads are not read"""
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    with open(path, "rb") as f:
        prefix = f.read(_PREFIX.size)
        if len(prefix) < _PREFIX.size:
            raise CheckpointError("checkpoint is truncated")
        magic, version, header_length = _PREFIX.unpack(prefix)
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointError(f"not a checkpoint (magic {magic!r})")
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        try:
            header = json.loads(f.read(header_length).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CheckpointError(f"corrupt checkpoint header: {exc}")
    return header["meta"]
