"""Erasure eavesdropper: per-bit and per-file interception models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitcore import BitMatrix
from .seeding import STREAM_INTERCEPT, rng_from

PER_BIT = "per_bit"
PER_FILE = "per_file"

#: Trit value marking a cell Eve missed.
ERASED = 2


@dataclass(frozen=True)
class InterceptSchedule:
    """Miss probabilities for the eavesdropper.

    In per-bit mode mu is an L x j array and every cell is erased
    independently.  In per-file mode mu has length j and one coin per
    time step erases the whole column at once.
    """

    mode: str
    mu: np.ndarray

    def __post_init__(self):
        if self.mode not in (PER_BIT, PER_FILE):
            raise ValueError(f"unknown intercept mode {self.mode!r}")
        arr = np.asarray(self.mu, dtype=np.float64)
        expected_ndim = 2 if self.mode == PER_BIT else 1
        if arr.ndim != expected_ndim:
            raise ValueError(f"{self.mode} schedule needs a {expected_ndim}-d mu, got shape {arr.shape}")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("miss probabilities must lie in [0, 1]")
        arr.flags.writeable = False
        object.__setattr__(self, "mu", arr)

    @classmethod
    def per_bit(cls, mu) -> "InterceptSchedule":
        return cls(PER_BIT, np.atleast_2d(np.asarray(mu, dtype=np.float64)))

    @classmethod
    def per_file(cls, mu) -> "InterceptSchedule":
        return cls(PER_FILE, mu)

    @property
    def steps(self) -> int:
        return self.mu.shape[-1]


@dataclass(frozen=True)
class EveView:
    """Eve's record of the exchange: intercepted bits, or ERASED markers."""

    trits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.trits)
        if arr.ndim != 2:
            raise ValueError("EveView must be 2-dimensional")
        if arr.size and not np.isin(arr, (0, 1, ERASED)).all():
            raise ValueError("EveView cells must be 0, 1 or ERASED")
        out = np.asfortranarray(arr, dtype=np.uint8)
        out.flags.writeable = False
        object.__setattr__(self, "trits", out)

    @property
    def rows(self) -> int:
        return self.trits.shape[0]

    @property
    def cols(self) -> int:
        return self.trits.shape[1]

    @property
    def missed(self) -> np.ndarray:
        """Boolean mask of erased cells."""
        return self.trits == ERASED


def intercept_per_bit(x: BitMatrix, schedule: InterceptSchedule, seed) -> EveView:
    """Erase each cell independently with its own miss probability."""
    if schedule.mode != PER_BIT:
        raise ValueError("intercept_per_bit needs a per-bit schedule")
    if schedule.mu.shape != x.bits.shape:
        raise ValueError(
            f"schedule shape {schedule.mu.shape} does not match bits {x.bits.shape}"
        )
    rng = rng_from(seed, STREAM_INTERCEPT)
    erased = rng.random(x.bits.shape) < schedule.mu
    trits = np.where(erased, np.uint8(ERASED), x.bits)
    return EveView(trits)


def intercept_per_file(x: BitMatrix, schedule: InterceptSchedule, seed) -> EveView:
    """Erase whole columns: one coin per time step shared by all rows."""
    if schedule.mode != PER_FILE:
        raise ValueError("intercept_per_file needs a per-file schedule")
    if schedule.mu.shape != (x.cols,):
        raise ValueError(
            f"schedule length {schedule.mu.shape} does not match {x.cols} time steps"
        )
    rng = rng_from(seed, STREAM_INTERCEPT)
    erased_cols = rng.random(x.cols) < schedule.mu
    trits = np.where(erased_cols[None, :], np.uint8(ERASED), x.bits)
    return EveView(trits)
