"""Bit-level primitives: binary matrices, XOR folds, entropy, GF(2) rank."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG2 = math.log(2.0)


def _as_binary_array(data, name: str) -> np.ndarray:
    arr = np.asarray(data)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} cells must be 0 or 1")
    # column-major so appending one more time step is an append, not a copy
    out = np.asfortranarray(arr, dtype=np.uint8)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class BitMatrix:
    """An L x j array of exchanged bits: rows are key bits, columns time steps."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _as_binary_array(self.bits, "BitMatrix"))

    @property
    def rows(self) -> int:
        return self.bits.shape[0]

    @property
    def cols(self) -> int:
        return self.bits.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.bits[:, i]

    def with_column(self, column) -> "BitMatrix":
        col = np.asarray(column, dtype=np.uint8).reshape(self.rows, 1)
        return BitMatrix(np.hstack([self.bits, col]))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))


@dataclass(frozen=True)
class Gf2Matrix:
    """A binary matrix treated as a linear map over GF(2)."""

    cells: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cells", _as_binary_array(self.cells, "Gf2Matrix"))

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    def apply(self, vector) -> np.ndarray:
        """Multiply by a bit vector over GF(2)."""
        v = np.asarray(vector, dtype=np.uint8)
        if v.shape != (self.cols,):
            raise ValueError(f"vector length {v.shape} does not match {self.cols} columns")
        return (self.cells.astype(np.uint64) @ v.astype(np.uint64) & 1).astype(np.uint8)


def xor_fold(bits) -> int:
    """Fold a non-empty bit sequence with XOR.

    Args:
        bits: iterable of 0/1 values, at least one element.

    Returns:
        The parity of the sequence as an int in {0, 1}.
    """
    arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
    if arr.size == 0:
        raise ValueError("empty fold: need at least one bit")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("xor_fold takes bits in {0, 1}")
    return int(arr.sum() & 1)


def binary_entropy(alpha: float) -> float:
    """Entropy of a Bernoulli(alpha) bit, in bits (base-2 logs, 0*log0 = 0)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"binary_entropy needs a probability in [0, 1], got {alpha}")
    if alpha == 0.0 or alpha == 1.0:
        return 0.0
    return -(alpha * math.log(alpha) + (1.0 - alpha) * math.log(1.0 - alpha)) / LOG2


def gf2_rank(matrix) -> int:
    """Rank of a binary matrix over GF(2).

    Rows are packed into Python ints and reduced against an XOR basis,
    which keeps the elimination exact for any matrix size.
    """
    if isinstance(matrix, Gf2Matrix):
        arr = matrix.cells
    else:
        arr = _as_binary_array(matrix, "gf2_rank argument")
    basis: dict[int, int] = {}
    rank = 0
    for row in arr:
        packed = int.from_bytes(np.packbits(row).tobytes(), "big")
        while packed:
            pivot = packed.bit_length()
            if pivot not in basis:
                basis[pivot] = packed
                rank += 1
                break
            packed ^= basis[pivot]
    return rank
