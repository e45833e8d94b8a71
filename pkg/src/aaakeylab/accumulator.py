"""The accumulating key register: XOR in one column per exchange epoch."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bitcore import BitMatrix


@dataclass(frozen=True)
class KeyState:
    """Running key after some number of accumulation epochs.

    epoch counts how many columns have been folded in; epoch 0 always
    carries the all-zero key.
    """

    key: tuple[int, ...]
    epoch: int

    def __post_init__(self):
        key = tuple(int(b) for b in self.key)
        if any(b not in (0, 1) for b in key):
            raise ValueError("key bits must be 0 or 1")
        if self.epoch < 0:
            raise ValueError("epoch must be non-negative")
        if self.epoch == 0 and any(key):
            raise ValueError("epoch 0 must carry the zero key")
        object.__setattr__(self, "key", key)

    @property
    def length(self) -> int:
        return len(self.key)

    def to_hex(self) -> str:
        """Lowercase hex export, key bit 0 most significant.

        Keys whose length is not a multiple of four are left-padded with
        zero bits before packing.
        """
        value = 0
        for b in self.key:
            value = (value << 1) | b
        width = max(1, (self.length + 3) // 4)
        return format(value, f"0{width}x")


def aaa_reinit(length: int) -> KeyState:
    """Fresh register of the given width, epoch 0, all zero."""
    if length < 0:
        raise ValueError("key length must be non-negative")
    return KeyState(key=(0,) * length, epoch=0)


def aaa_update(state: KeyState, column) -> KeyState:
    """Fold one more time step into the key: K_j = K_{j-1} xor X_j."""
    col = np.asarray(column).ravel()
    if col.size != state.length:
        raise ValueError(f"column of {col.size} bits does not fit a {state.length}-bit key")
    if col.size and not np.isin(col, (0, 1)).all():
        raise ValueError("column cells must be 0 or 1")
    new_key = tuple(int(k ^ int(c)) for k, c in zip(state.key, col))
    return KeyState(key=new_key, epoch=state.epoch + 1)


def aaa_accumulate(x: BitMatrix) -> KeyState:
    """Fold all columns of an exchange matrix, epoch by epoch."""
    state = aaa_reinit(x.rows)
    for i in range(x.cols):
        state = aaa_update(state, x.column(i))
    return state


def partition_accumulate(x: BitMatrix, partition: Sequence[Iterable[int]]) -> np.ndarray:
    """Fold disjoint groups of time steps into separate key bits.

    Args:
        x: exchange matrix, L rows by j columns.
        partition: collections of 0-based column indices; the groups must
            be disjoint, non-empty, and lie inside range(j).

    Returns:
        A len(partition) x L array; entry [s, l] is the XOR of row l over
        the columns in group s.
    """
    seen: set[int] = set()
    groups = []
    for part in partition:
        idx = sorted(int(i) for i in part)
        if not idx:
            raise ValueError("partition groups must be non-empty")
        if idx[0] < 0 or idx[-1] >= x.cols:
            raise ValueError(f"column index outside range(0, {x.cols})")
        overlap = seen.intersection(idx)
        if overlap:
            raise ValueError(f"partition groups overlap on columns {sorted(overlap)}")
        seen.update(idx)
        groups.append(idx)
    out = np.zeros((len(groups), x.rows), dtype=np.uint8)
    for s, idx in enumerate(groups):
        out[s] = x.bits[:, idx].sum(axis=1) & 1
    return out
