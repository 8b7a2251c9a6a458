"""Hierarchical, counter-based random streams.

A stream is identified by ``(master_seed, path)``. The path is hashed into a
Philox key, and the Philox counter addresses positions inside the stream, so
any slice of any stream can be regenerated independently of what was drawn
before it. This is what makes simulations independent of execution order and
thread count.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Union

import numpy as np

Label = Union[int, str, float]

_UINT64_PER_COUNTER = 4  # Philox4x64 emits four 64-bit words per counter step
_TINY = 2.0**-54


def label_to_int(label: Label) -> int:
    """Map a path label to a nonnegative integer, stably across processes."""
    if isinstance(label, bool):
        label = int(label)
    if isinstance(label, (int, np.integer)) and label >= 0:
        return int(label)
    if isinstance(label, (float, np.floating)):
        payload = b"f" + struct.pack("<d", float(label))
    elif isinstance(label, (int, np.integer)):
        payload = b"i" + str(int(label)).encode()
    else:
        payload = b"s" + str(label).encode("utf-8")
    # Offset by 2**64 so hashed labels never collide with small literal ints.
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little") + 2**64


def derive_seed(master_seed: int, *labels: Label) -> int:
    """Derive a new 64-bit master seed from a seed and a path."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(label_to_int(x) for x in labels))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class RngStream:
    """An addressable substream of uniform variates.

    Two streams with equal ``master_seed`` and ``path`` yield identical
    sequences; extending the path with ``child`` gives an independent stream.
    """

    master_seed: int
    path: tuple[Label, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed}")
        object.__setattr__(self, "path", tuple(self.path))

    def child(self, *labels: Label) -> RngStream:
        return RngStream(self.master_seed, self.path + tuple(labels))

    def _key(self) -> np.ndarray:
        ss = np.random.SeedSequence(
            int(self.master_seed), spawn_key=tuple(label_to_int(x) for x in self.path)
        )
        return ss.generate_state(2, np.uint64)

    def generator(self, offset: int = 0) -> np.random.Generator:
        """A numpy Generator positioned at ``offset`` (must be a multiple of 4)."""
        if offset % _UINT64_PER_COUNTER:
            raise ValueError("offset must be a multiple of 4")
        return np.random.Generator(
            np.random.Philox(key=self._key(), counter=offset // _UINT64_PER_COUNTER)
        )

    def uniforms(self, n: int, offset: int = 0) -> np.ndarray:
        """Uniforms on the open interval (0, 1) at positions ``[offset, offset + n)``."""
        head = offset % _UINT64_PER_COUNTER
        u = self.generator(offset - head).random(n + head)[head:]
        # random() returns k * 2**-53 < 1; only the k = 0 endpoint needs moving.
        return np.maximum(u, _TINY)

    def block(self, first_row: int, n_rows: int, width: int) -> np.ndarray:
        """Rows ``first_row .. first_row + n_rows - 1`` of a ``width``-column table.

        Row ``k`` always occupies stream positions ``[k * width, (k + 1) * width)``.
        """
        return self.uniforms(n_rows * width, first_row * width).reshape(n_rows, width)
