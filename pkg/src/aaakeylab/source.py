"""Bit sources: i.i.d. packet bits, Markov-correlated bits, packet selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitcore import BitMatrix
from .seeding import STREAM_SOURCE, rng_from


@dataclass(frozen=True)
class MarkovParams:
    """Stay probabilities for a first-order binary chain.

    alphas[i] is the probability that bit i+2 repeats bit i+1, so a chain
    of length j needs j-1 entries.  The first bit is uniform, which keeps
    every marginal uniform regardless of the alphas.
    """

    alphas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"stay probability {a} outside [0, 1]")

    @property
    def length(self) -> int:
        """Chain length implied by the parameter list."""
        return len(self.alphas) + 1


@dataclass(frozen=True)
class PacketSelector:
    """Which bits of a raw packet feed the key protocol.

    offsets are absolute bit positions, counted MSB-first within each byte.
    transform is an opaque tag carried along for bookkeeping; no transforms
    are applied here.
    """

    packet_id: int
    offsets: tuple[int, ...]
    transform: str | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(int(o) for o in self.offsets))
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError("selector offsets must be distinct")
        if any(o < 0 for o in self.offsets):
            raise ValueError("selector offsets must be non-negative")


def gen_iid_bits(rows: int, cols: int, seed) -> BitMatrix:
    """Draw a rows x cols matrix of independent uniform bits."""
    if rows < 0 or cols < 0:
        raise ValueError("dimensions must be non-negative")
    rng = rng_from(seed, STREAM_SOURCE)
    return BitMatrix(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))


def gen_markov_bits(cols: int, params: MarkovParams, seed) -> BitMatrix:
    """Draw a single correlated bit row: uniform start, then stay/flip steps.

    Args:
        cols: chain length j.
        params: stay probabilities, length j-1.
        seed: integer seed or an existing Generator.

    Returns:
        A 1 x cols BitMatrix.  Correlated sources model one key bit only,
        so no multi-row variant exists.
    """
    if cols < 1:
        raise ValueError("Markov chain needs at least one step")
    if params.length != cols:
        raise ValueError(
            f"chain of length {cols} needs {cols - 1} stay probabilities, got {len(params.alphas)}"
        )
    rng = rng_from(seed, STREAM_SOURCE)
    row = np.empty(cols, dtype=np.uint8)
    row[0] = rng.integers(0, 2)
    u = rng.random(cols - 1)
    for i, a in enumerate(params.alphas):
        stay = u[i] < a
        row[i + 1] = row[i] if stay else 1 - row[i]
    return BitMatrix(row.reshape(1, cols))


def select_bits(packet: bytes, selector: PacketSelector) -> np.ndarray:
    """Extract the selector's bit positions from a packet.

    Bit k of the packet is bit (k % 8) of byte (k // 8), MSB first.
    """
    nbits = 8 * len(packet)
    for off in selector.offsets:
        if off >= nbits:
            raise ValueError(f"offset {off} outside packet of {nbits} bits")
    if not selector.offsets:
        return np.zeros(0, dtype=np.uint8)
    unpacked = np.unpackbits(np.frombuffer(packet, dtype=np.uint8))
    return unpacked[list(selector.offsets)]
