"""Closed-form equivocation of the accumulated key against erasure eavesdroppers.

All quantities are in bits.  The schedules are the eavesdropper's miss
probabilities; the key itself never appears, only how uncertain Eve is
about it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bitcore import binary_entropy


def _check_prob(value: float, name: str) -> float:
    v = float(value)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return v


def _check_schedule(mu) -> list[float]:
    return [_check_prob(m, "miss probability") for m in mu]


def eps_bit(mu) -> float:
    """Equivocation of one accumulated key bit under independent misses.

    The bit stays secret as long as Eve missed at least one of its
    contributors, so the value is 1 - prod(1 - mu_i).  An empty schedule
    gives 0: before any exchange the register is known.
    """
    sched = _check_schedule(mu)
    return 1.0 - math.prod(1.0 - m for m in sched)


def eps_recursive(eps_prev: float, mu_next: float) -> float:
    """One accumulation step: eps' = (1 - mu)*eps + mu.

    Iterating from eps = 0 reproduces eps_bit over the whole schedule.
    """
    e = _check_prob(eps_prev, "equivocation")
    m = _check_prob(mu_next, "miss probability")
    return (1.0 - m) * e + m


def eps_key_independent(mu) -> float:
    """Key equivocation when every cell is erased independently.

    Args:
        mu: L x j array-like of per-cell miss probabilities.

    Returns:
        Sum of the per-row single-bit equivocations; rows are independent
        so the joint uncertainty is additive.
    """
    return float(sum(eps_bit(row) for row in mu))


def eps_key_file(key_length: int, mu) -> float:
    """Key equivocation when each time step is erased as one file.

    One coin per column means all L bits share the same miss events, so
    the key equivocation is L times the single-bit value.
    """
    if key_length < 0:
        raise ValueError("key length must be non-negative")
    return key_length * eps_bit(mu)


def capacity(mu) -> float:
    """Secret-key capacity of the exchanged bits: sum of miss probabilities.

    Assumes independent uniform source bits; with correlated sources this
    is only the independence yardstick.
    """
    return float(sum(_check_schedule(mu)))


def maurer_bounds(mu) -> tuple[float, float]:
    """Lower and upper secret-key bounds for independent uniform bits.

    The lower bound sums H(X_i) - I(X_i; E_i) and the upper bound sums
    H(X_i | E_i).  For the erasure eavesdropper both collapse to the same
    number, which pins the capacity exactly.
    """
    sched = _check_schedule(mu)
    lower = sum(1.0 - (1.0 - m) for m in sched)
    upper = sum(m for m in sched)
    return (lower, upper)


def markov_eps2(mu1: float, mu2: float, alpha2: float) -> float:
    """Equivocation of the two-step key bit for a correlated source.

    Weights come from the four observation patterns: a single missed bit
    leaves a stay/flip guess worth h(alpha2), two missed bits leave the
    key uniform.
    """
    m1 = _check_prob(mu1, "miss probability")
    m2 = _check_prob(mu2, "miss probability")
    a2 = _check_prob(alpha2, "stay probability")
    partial = m1 * (1.0 - m2) + (1.0 - m1) * m2
    return partial * binary_entropy(a2) + m1 * m2


def markov_eps2_exact(mu1: float, mu2: float, alpha2: float) -> float:
    """Enumeration-grade two-step equivocation for a correlated source.

    The key bit equals the flip indicator of the second transition, so
    Eve's posterior is Bernoulli(alpha2) whenever she misses either bit,
    giving (mu1 + mu2 - mu1*mu2) * h(alpha2).  markov_eps2 scores the
    doubly missed pattern as uniform instead; the two agree exactly when
    mu1*mu2 == 0 or alpha2 == 1/2, and otherwise differ by
    mu1*mu2*(1 - h(alpha2)).
    """
    m1 = _check_prob(mu1, "miss probability")
    m2 = _check_prob(mu2, "miss probability")
    a2 = _check_prob(alpha2, "stay probability")
    return (m1 + m2 - m1 * m2) * binary_entropy(a2)


@dataclass(frozen=True)
class MarkovHelpers:
    """Posterior building blocks for the three-step correlated key bit.

    middle_given_ends maps the observed pair (x1, x3) to the probability
    that the hidden middle bit equals x1's side of the chain, i.e. that
    the first transition was a stay.  end_pair_prob maps (x1, x3) to its
    joint probability.  single_middle / double_middle / single_end cover
    the patterns with two misses.  degenerate flags pairs whose posterior
    was a 0/0 ratio; their weight is zero so the value 1/2 is a harmless
    placeholder.
    """

    middle_given_ends: dict[tuple[int, int], float]
    end_pair_prob: dict[tuple[int, int], float]
    single_middle: float
    double_middle: float
    single_end: float
    degenerate: bool


def markov_helpers(alpha2: float, alpha3: float) -> MarkovHelpers:
    """Posterior probabilities used by the three-step closed form."""
    a2 = _check_prob(alpha2, "stay probability")
    a3 = _check_prob(alpha3, "stay probability")
    b2, b3 = 1.0 - a2, 1.0 - a3
    # equal ends can come from stay-stay or flip-flip; unequal from one flip
    equal_mass = a2 * a3 + b2 * b3
    unequal_mass = b2 * a3 + a2 * b3
    numer = {
        (0, 0): a2 * a3,
        (1, 1): b2 * b3,
        (1, 0): b2 * a3,
        (0, 1): a2 * b3,
    }
    denom = {
        (0, 0): equal_mass,
        (1, 1): equal_mass,
        (1, 0): unequal_mass,
        (0, 1): unequal_mass,
    }
    middle = {}
    degenerate = False
    for pair, num in numer.items():
        d = denom[pair]
        if d == 0.0:
            middle[pair] = 0.5
            degenerate = True
        else:
            middle[pair] = num / d
    pair_prob = {
        (0, 0): 0.5 * equal_mass,
        (1, 1): 0.5 * equal_mass,
        (1, 0): 0.5 * unequal_mass,
        (0, 1): 0.5 * unequal_mass,
    }
    return MarkovHelpers(
        middle_given_ends=middle,
        end_pair_prob=pair_prob,
        single_middle=a2,
        double_middle=equal_mass,
        single_end=a3,
        degenerate=degenerate,
    )


def markov_eps3(mu1: float, mu2: float, mu3: float, alpha2: float, alpha3: float) -> float:
    """Equivocation of the three-step key bit for a correlated source.

    Each erasure pattern contributes its probability times the entropy of
    the key posterior it leaves behind; the fully observed pattern pins
    the key and contributes nothing.
    """
    m1 = _check_prob(mu1, "miss probability")
    m2 = _check_prob(mu2, "miss probability")
    m3 = _check_prob(mu3, "miss probability")
    h = markov_helpers(alpha2, alpha3)
    n1, n2, n3 = 1.0 - m1, 1.0 - m2, 1.0 - m3

    value = 0.0
    value += m1 * n2 * n3 * binary_entropy(h.single_middle)
    value += n1 * n2 * m3 * binary_entropy(h.single_end)
    # middle bit hidden: posterior depends on which end pair Eve saw
    middle_term = sum(
        h.end_pair_prob[pair] * binary_entropy(h.middle_given_ends[pair])
        for pair in sorted(h.end_pair_prob)
    )
    value += n1 * m2 * n3 * middle_term
    value += m1 * m2 * n3 * binary_entropy(h.single_middle)
    value += m1 * n2 * m3 * binary_entropy(h.double_middle)
    value += n1 * m2 * m3 * binary_entropy(h.single_end)
    value += m1 * m2 * m3
    return value


def markov_eps3_symmetric(mu: float, alpha: float) -> float:
    """Three-step equivocation when all misses and stays share one value."""
    m = _check_prob(mu, "miss probability")
    a = _check_prob(alpha, "stay probability")
    n, b = 1.0 - m, 1.0 - a
    pair = a * a + b * b
    stay_given_equal = 0.5 if pair == 0.0 else a * a / pair
    return (
        m**3
        + 2.0 * m * n * binary_entropy(a)
        + m * m * n * binary_entropy(pair)
        + m * n * n * (2.0 * a * b + pair * binary_entropy(stay_given_equal))
    )


def mu_hat(alpha: float) -> float:
    """Threshold miss probability below which a third correlated step helps.

    The three-step bit beats the two-step bit exactly when the common miss
    probability is below this value; it is 0 at deterministic chains and
    1 at a fair chain, increasing in between.
    """
    a = _check_prob(alpha, "stay probability")
    b = 1.0 - a
    pair = a * a + b * b
    stay_given_equal = 0.5 if pair == 0.0 else a * a / pair
    eta = 2.0 * a * b + pair * binary_entropy(stay_given_equal)
    return eta / (1.0 + eta - binary_entropy(pair))


@dataclass(frozen=True)
class EquivocationReport:
    """One scenario's equivocation summary, all entries in bits."""

    closed_form: float | None
    oracle: float | None
    mc_estimate: float | None
    mc_stderr: float | None
    capacity: float
    gap: float | None

    def __post_init__(self):
        if self.closed_form is not None and self.closed_form < 0.0:
            raise ValueError("equivocation cannot be negative")
