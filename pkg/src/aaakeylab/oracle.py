"""Reference computations: exact enumeration, Monte Carlo, extractor, pad transport.

The exact oracle never uses the closed forms.  It enumerates source
realizations jointly with erasure patterns, builds Eve's view for every
pair, and evaluates the conditional entropy from the definition.  That
keeps it an independent check on everything in `equivocation`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bitcore import Gf2Matrix, gf2_rank
from .eavesdropper import PER_BIT, PER_FILE, InterceptSchedule
from .equivocation import capacity
from .seeding import STREAM_EXTRACTOR, STREAM_MC, rng_from
from .source import MarkovParams

#: Enumeration budget: longest schedule any exact path will expand.
MAX_TIME_STEPS = 12
#: Enumeration budget: most cells the row-factorized per-bit path accepts.
MAX_CELLS = 16
#: Enumeration budget: most cells the non-factorized joint path accepts.
MAX_JOINT_CELLS = 8

_BATCH = 4096


class EnumerationLimitError(ValueError):
    """An exact enumeration would exceed its budget; use the Monte Carlo path."""


@dataclass(frozen=True)
class OracleConfig:
    """What to enumerate: interception schedule, key width, source model.

    source None means independent uniform bits; a MarkovParams instance
    selects the correlated single-row source.  The budget fields bound
    the exact enumeration and normally keep their defaults.
    """

    intercept: InterceptSchedule
    key_length: int
    source: MarkovParams | None = None
    max_time_steps: int = MAX_TIME_STEPS
    max_cells: int = MAX_CELLS
    max_joint_cells: int = MAX_JOINT_CELLS

    def __post_init__(self):
        if self.key_length < 1:
            raise ValueError("key length must be at least 1")
        if self.intercept.mode == PER_BIT and self.intercept.mu.shape[0] != self.key_length:
            raise ValueError(
                f"per-bit schedule has {self.intercept.mu.shape[0]} rows "
                f"for a {self.key_length}-bit key"
            )
        if self.source is not None:
            if self.key_length != 1:
                raise ValueError("correlated sources model a single key bit")
            if self.source.length != self.intercept.steps:
                raise ValueError(
                    f"source of length {self.source.length} does not match "
                    f"{self.intercept.steps} intercept steps"
                )

    @property
    def steps(self) -> int:
        return self.intercept.steps


@dataclass(frozen=True)
class _EnumTables:
    """Per-length lookup tables shared by every enumeration of that length."""

    bits: np.ndarray      # (2^j, j) float, all bit strings
    stay: np.ndarray      # (2^j, j-1) float, repeat indicators between steps
    group: np.ndarray     # (4^j,) flat id of (Eve view, key bit) per (x, s) pair
    n_groups: int


@lru_cache(maxsize=6)
def _enum_tables(j: int) -> _EnumTables:
    n = 1 << j
    idx = np.arange(n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(j, dtype=np.int64)[None, :]) & 1
    pow3 = 3 ** np.arange(j, dtype=np.int64)
    parity = bits.sum(axis=1) & 1
    observed = bits @ pow3
    # trit code of Eve's view for value x under erasure pattern s:
    # kept digits contribute x_i * 3^i, erased ones a fixed 2 * 3^i
    overlap = bits @ (bits * pow3).T
    trit = observed[:, None] - overlap + 2 * observed[None, :]
    del overlap
    group = (trit * 2 + parity[:, None]).ravel()
    del trit
    stay = (bits[:, 1:] == bits[:, :-1]).astype(np.float64)
    return _EnumTables(
        bits=bits.astype(np.float64),
        stay=stay,
        group=group,
        n_groups=2 * 3**j,
    )


@lru_cache(maxsize=8)
def _pattern_tables(j: int) -> tuple[np.ndarray, np.ndarray]:
    n = 1 << j
    idx = np.arange(n, dtype=np.int64)
    bits = ((idx[:, None] >> np.arange(j, dtype=np.int64)[None, :]) & 1).astype(np.float64)
    return bits, bits.any(axis=1)


def _pattern_probs(patterns: np.ndarray, mu_batch: np.ndarray) -> np.ndarray:
    """P of each erasure pattern (columns of `patterns`) per schedule row."""
    m = mu_batch[:, None, :]
    return np.prod(patterns[None] * m + (1.0 - patterns[None]) * (1.0 - m), axis=2)


def _masses_entropy(masses: np.ndarray) -> np.ndarray:
    """H(K | E) from joint masses shaped (batch, n_views, n_key_values)."""
    view_mass = masses.sum(axis=2, keepdims=True)
    pos = masses > 0.0
    ratio = np.divide(masses, view_mass, out=np.ones_like(masses), where=pos)
    # the + 0.0 turns a fully deterministic system's -0.0 into +0.0
    return -(masses * np.log2(ratio)).sum(axis=(1, 2)) + 0.0


def _check_mu_batch(mu_batch) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(mu_batch, dtype=np.float64))
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("miss probabilities must lie in [0, 1]")
    return arr


def _enumerate_rows(mu_batch: np.ndarray, weight_fn) -> np.ndarray:
    """Entropy of one accumulated bit per schedule row, by full enumeration.

    weight_fn(tables, lo, hi) returns the source probability of every bit
    string for schedules lo:hi.
    """
    total, j = mu_batch.shape
    if j == 0:
        return np.zeros(total)
    t = _enum_tables(j)
    n = t.bits.shape[0]
    out = np.empty(total)
    step = max(1, _BATCH // n)
    for lo in range(0, total, step):
        hi = min(total, lo + step)
        ps = _pattern_probs(t.bits, mu_batch[lo:hi])
        px = weight_fn(t, lo, hi)
        weights = (px[:, :, None] * ps[:, None, :]).reshape(hi - lo, -1)
        offsets = np.arange(hi - lo, dtype=np.int64)[:, None] * t.n_groups
        keys = (t.group[None, :] + offsets).ravel()
        masses = np.bincount(keys, weights=weights.ravel(), minlength=(hi - lo) * t.n_groups)
        masses = masses.reshape(hi - lo, t.n_groups // 2, 2)
        out[lo:hi] = _masses_entropy(masses)
    return out


def exact_eps_rows_iid(mu_rows) -> np.ndarray:
    """Exact single-bit equivocation for a batch of independent-bit schedules."""
    batch = _check_mu_batch(mu_rows)
    if batch.shape[1] > MAX_TIME_STEPS:
        raise EnumerationLimitError(
            f"enumeration over {batch.shape[1]} steps exceeds the budget of "
            f"{MAX_TIME_STEPS}; use mc_equivocation_independent"
        )
    uniform = 0.5 ** batch.shape[1]

    def weight_fn(tables, lo, hi):
        return np.full((hi - lo, tables.bits.shape[0]), uniform)

    return _enumerate_rows(batch, weight_fn)


def exact_eps_rows_markov(mu_rows, alpha_rows) -> np.ndarray:
    """Exact single-bit equivocation for a batch of correlated-source schedules."""
    batch = _check_mu_batch(mu_rows)
    alphas = np.atleast_2d(np.asarray(alpha_rows, dtype=np.float64))
    if alphas.shape != (batch.shape[0], max(batch.shape[1] - 1, 0)):
        raise ValueError(
            f"alpha batch of shape {alphas.shape} does not match schedules {batch.shape}"
        )
    if alphas.size and (alphas.min() < 0.0 or alphas.max() > 1.0):
        raise ValueError("stay probabilities must lie in [0, 1]")
    if batch.shape[1] > MAX_TIME_STEPS:
        raise EnumerationLimitError(
            f"enumeration over {batch.shape[1]} steps exceeds the budget of "
            f"{MAX_TIME_STEPS}; use a shorter schedule"
        )

    def weight_fn(tables, lo, hi):
        a = alphas[lo:hi, None, :]
        stay = tables.stay[None]
        return 0.5 * np.prod(stay * a + (1.0 - stay) * (1.0 - a), axis=2)

    return _enumerate_rows(batch, weight_fn)


def exact_eps_per_file(key_length: int, mu_rows) -> np.ndarray:
    """Exact key equivocation for per-file schedules, one value per row.

    Enumerates the 2^j column-erasure patterns.  A pattern with no erased
    column pins the key; any erased column leaves all key bits independent
    and uniform, hence key_length bits of entropy.
    """
    if key_length < 1:
        raise ValueError("key length must be at least 1")
    batch = _check_mu_batch(mu_rows)
    j = batch.shape[1]
    if j > MAX_TIME_STEPS:
        raise EnumerationLimitError(
            f"enumeration over {j} steps exceeds the budget of {MAX_TIME_STEPS}; "
            f"use mc_equivocation_independent"
        )
    if j == 0:
        return np.zeros(batch.shape[0])
    patterns, any_erased = _pattern_tables(j)
    out = np.empty(batch.shape[0])
    step = max(1, (_BATCH * 32) // patterns.shape[0])
    for lo in range(0, batch.shape[0], step):
        ps = _pattern_probs(patterns, batch[lo : lo + step])
        out[lo : lo + step] = ps[:, any_erased].sum(axis=1)
    return key_length * out


def exact_equivocation(config: OracleConfig) -> float:
    """Exact equivocation of the accumulated key for one configuration.

    Enumerates every source realization against every erasure pattern and
    evaluates H(key | Eve's view) from the joint distribution.  Raises
    EnumerationLimitError when the configured budget is too small.
    """
    mu = config.intercept.mu
    j = config.steps
    if config.source is not None:
        if j > config.max_time_steps:
            raise EnumerationLimitError(
                f"enumeration over {j} steps exceeds the budget of "
                f"{config.max_time_steps}; no exact path is available"
            )
        row = mu.reshape(1, -1)
        return float(exact_eps_rows_markov(row, np.asarray(config.source.alphas).reshape(1, -1))[0])
    if config.intercept.mode == PER_BIT:
        if config.key_length * j > config.max_cells or j > config.max_time_steps:
            raise EnumerationLimitError(
                f"enumeration over {config.key_length} x {j} cells exceeds the "
                f"budget ({config.max_cells} cells, {config.max_time_steps} steps); "
                f"use mc_equivocation_independent"
            )
        # rows are independent, so the joint entropy factorizes over rows
        return float(exact_eps_rows_iid(mu).sum())
    if j > config.max_time_steps:
        raise EnumerationLimitError(
            f"enumeration over {j} steps exceeds the budget of "
            f"{config.max_time_steps}; use mc_equivocation_independent"
        )
    return float(exact_eps_per_file(config.key_length, mu.reshape(1, -1))[0])


def exact_equivocation_joint(mu) -> float:
    """Non-factorized exact equivocation for a per-bit schedule.

    Enumerates all L*j cells jointly, never assuming row independence.
    Exponentially more expensive than exact_equivocation; exists to test
    the factorization, so the budget is small.
    """
    arr = _check_mu_batch(mu)
    rows, j = arr.shape
    cells = rows * j
    if cells > MAX_JOINT_CELLS:
        raise EnumerationLimitError(
            f"joint enumeration over {cells} cells exceeds the budget of {MAX_JOINT_CELLS}"
        )
    if j == 0:
        return 0.0
    n = 1 << cells
    idx = np.arange(n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(cells, dtype=np.int64)[None, :]) & 1
    pow3 = 3 ** np.arange(cells, dtype=np.int64)
    observed = bits @ pow3
    trit = observed[:, None] - bits @ (bits * pow3).T + 2 * observed[None, :]
    key_values = (bits.reshape(n, rows, j).sum(axis=2) & 1) @ (1 << np.arange(rows, dtype=np.int64))
    group = (trit * (1 << rows) + key_values[:, None]).ravel()
    flat_mu = arr.ravel()
    ps = np.prod(bits * flat_mu + (1.0 - bits) * (1.0 - flat_mu), axis=1)
    weights = (0.5**cells) * np.broadcast_to(ps[None, :], (n, n)).ravel()
    masses = np.bincount(group, weights=weights, minlength=(3**cells) * (1 << rows))
    masses = masses.reshape(1, 3**cells, 1 << rows)
    return float(_masses_entropy(masses)[0])


def mc_equivocation_independent(config: OracleConfig, trials: int, seed) -> tuple[float, float]:
    """Monte Carlo estimate of the key equivocation for independent sources.

    A key bit is secret in a trial exactly when at least one of its
    contributors was erased, so the per-row estimate is that fraction of
    trials.  Returns (estimate, standard error); the error combines the
    plug-in binomial variance across rows.

    Correlated sources have no erasure-counting shortcut and are refused.
    """
    if config.source is not None:
        raise ValueError(
            "unsupported model: the Monte Carlo estimator needs independent source bits"
        )
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = rng_from(seed, STREAM_MC)
    mu = config.intercept.mu
    if config.intercept.mode == PER_BIT:
        estimate = 0.0
        variance = 0.0
        for row in mu:
            hit = (rng.random((trials, row.size)) < row).any(axis=1)
            p = hit.mean()
            estimate += p
            variance += p * (1.0 - p) / trials
        return float(estimate), float(math.sqrt(variance))
    hit = (rng.random((trials, mu.size)) < mu).any(axis=1)
    p = float(hit.mean())
    stderr = config.key_length * math.sqrt(p * (1.0 - p) / trials)
    return config.key_length * p, stderr


@dataclass(frozen=True)
class ExtractorRun:
    """One run of the linear hash extractor.

    Per time step i the hash has exactly floor(mu_i * n) rows, so the
    output length is the sum of those row counts.  restricted_ranks holds
    the rank of each hash restricted to the realizations Eve missed; the
    output bits are uniform given Eve's view exactly when that rank is
    full.
    """

    n: int
    mu: tuple[float, ...]
    hashes: tuple[Gf2Matrix, ...]
    outputs: tuple[tuple[int, ...], ...]
    missed_counts: tuple[int, ...]
    restricted_ranks: tuple[int, ...]

    @property
    def output_length(self) -> int:
        return sum(len(y) for y in self.outputs)

    @property
    def full_row_rank(self) -> tuple[bool, ...]:
        return tuple(r == h.rows for r, h in zip(self.restricted_ranks, self.hashes))


def sample_extractor_inputs(n: int, mu, seed) -> tuple[np.ndarray, np.ndarray]:
    """Draw n realizations of a bit sequence plus Eve's miss mask.

    Realization m, step i is erased independently with probability mu[i].
    Returns (bits, missed), both shaped (n, len(mu)).
    """
    sched = np.asarray(mu, dtype=np.float64)
    if sched.ndim != 1:
        raise ValueError("mu must be a flat schedule")
    if sched.size and (sched.min() < 0.0 or sched.max() > 1.0):
        raise ValueError("miss probabilities must lie in [0, 1]")
    if n < 1:
        raise ValueError("need at least one realization")
    rng = rng_from(seed, STREAM_EXTRACTOR)
    bits = rng.integers(0, 2, size=(n, sched.size), dtype=np.uint8)
    missed = rng.random((n, sched.size)) < sched[None, :]
    return bits, missed


def hash_extract(bits, missed, mu, seed) -> ExtractorRun:
    """Compress each time step's realizations through a random linear hash.

    Args:
        bits: (n, j) array, realization m of step i at [m, i].
        missed: (n, j) boolean array of Eve's misses.
        mu: the j miss probabilities, fixing floor(mu_i * n) output rows.
        seed: seeds the hash draws only.

    Returns:
        ExtractorRun with the hashes, outputs and rank diagnostics.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    missed = np.asarray(missed, dtype=bool)
    sched = tuple(float(m) for m in mu)
    if bits.ndim != 2 or bits.shape != missed.shape:
        raise ValueError("bits and missed must be matching (n, j) arrays")
    n, j = bits.shape
    if len(sched) != j:
        raise ValueError(f"schedule of {len(sched)} entries does not match {j} steps")
    if any(not 0.0 <= m <= 1.0 for m in sched):
        raise ValueError("miss probabilities must lie in [0, 1]")
    rng = rng_from(seed, STREAM_EXTRACTOR, 1)
    hashes = []
    outputs = []
    counts = []
    ranks = []
    for i, m in enumerate(sched):
        rows = math.floor(m * n)
        h = Gf2Matrix(rng.integers(0, 2, size=(rows, n), dtype=np.uint8))
        hashes.append(h)
        outputs.append(tuple(int(b) for b in h.apply(bits[:, i])))
        miss = missed[:, i]
        counts.append(int(miss.sum()))
        ranks.append(gf2_rank(h.cells[:, miss]) if rows else 0)
    return ExtractorRun(
        n=n,
        mu=sched,
        hashes=tuple(hashes),
        outputs=tuple(outputs),
        missed_counts=tuple(counts),
        restricted_ranks=tuple(ranks),
    )


def full_row_rank_prob(rows: int, cols: int) -> float:
    """P that a uniform random rows x cols GF(2) matrix has full row rank."""
    if rows < 0 or cols < 0:
        raise ValueError("dimensions must be non-negative")
    if rows == 0:
        return 1.0
    if rows > cols:
        return 0.0
    return math.prod(1.0 - 2.0 ** (t - 1 - cols) for t in range(1, rows + 1))


def expected_full_row_rank_prob(n: int, mu: float) -> float:
    """Full-rank probability of the restricted hash, averaged over misses.

    The number of missed realizations is Binomial(n, mu); each count k
    leaves a floor(mu * n) x k restricted matrix.
    """
    if n < 1:
        raise ValueError("need at least one realization")
    if not 0.0 <= mu <= 1.0:
        raise ValueError("miss probability must lie in [0, 1]")
    rows = math.floor(mu * n)
    total = 0.0
    for k in range(n + 1):
        pk = math.comb(n, k) * mu**k * (1.0 - mu) ** (n - k)
        total += pk * full_row_rank_prob(rows, k)
    return total


def otp_encode(secret, pad) -> np.ndarray:
    """XOR a secret block with an accumulated pad; applying it twice decodes."""
    s = np.asarray(secret, dtype=np.uint8)
    p = np.asarray(pad, dtype=np.uint8)
    if s.shape != p.shape:
        raise ValueError(f"secret shape {s.shape} does not match pad shape {p.shape}")
    if s.size and not (np.isin(s, (0, 1)).all() and np.isin(p, (0, 1)).all()):
        raise ValueError("secret and pad must be bits")
    return s ^ p


def otp_rate(mu) -> float:
    """Secure bits per exchange carried by pad transport: the capacity itself."""
    return capacity(mu)
