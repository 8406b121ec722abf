"""Replay storage and checkpoint blobs"""

from .replay_buffer import ReplayBuffer
from .checkpoint_store import (
    CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
    encode_checkpoint,
    decode_checkpoint,
    write_checkpoint,
    read_checkpoint,
    read_checkpoint_meta,
)

__all__ = [
    "ReplayBuffer",
    "CHECKPOINT_MAGIC",
    "CHECKPOINT_VERSION",
    "encode_checkpoint",
    "decode_checkpoint",
    "write_checkpoint",
    "read_checkpoint",
    "read_checkpoint_meta",
]
