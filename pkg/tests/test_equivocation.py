"""Tests for the closed-form equivocation formulas.

The reference enumerator below recomputes small cases from first
principles with plain dictionaries, independently of both the package's
closed forms and its vectorized oracle.
"""

import itertools
import math

import pytest

from aaakeylab.bitcore import binary_entropy
from aaakeylab.equivocation import (
    EquivocationReport,
    capacity,
    eps_bit,
    eps_key_file,
    eps_key_independent,
    eps_recursive,
    markov_eps2,
    markov_eps2_exact,
    markov_eps3,
    markov_eps3_symmetric,
    markov_helpers,
    maurer_bounds,
    mu_hat,
)


def reference_single_bit_equivocation(mu, alphas=None):
    """Entropy of the XOR key bit given Eve's view, by direct enumeration.

    Enumerates every source word and erasure pattern, accumulates the
    joint mass of (view, key), and sums view-conditional entropies.
    alphas, when given, make source bit i+1 repeat bit i with probability
    alphas[i]; otherwise bits are independent and uniform.
    """
    j = len(mu)
    joint = {}
    for word in itertools.product((0, 1), repeat=j):
        p_word = 0.5
        for i in range(1, j):
            stay = alphas[i - 1] if alphas is not None else 0.5
            p_word *= stay if word[i] == word[i - 1] else 1.0 - stay
        key = 0
        for bit in word:
            key ^= bit
        for pattern in itertools.product((0, 1), repeat=j):
            p_pat = 1.0
            for i in range(j):
                p_pat *= mu[i] if pattern[i] else 1.0 - mu[i]
            if p_pat == 0.0:
                continue
            view = tuple("?" if pattern[i] else word[i] for i in range(j))
            mass = joint.setdefault(view, {})
            mass[key] = mass.get(key, 0.0) + p_word * p_pat
    total = 0.0
    for mass in joint.values():
        view_mass = sum(mass.values())
        for p in mass.values():
            if p > 0.0:
                total -= p * math.log2(p / view_mass)
    return total


def test_eps_bit_basics():
    assert eps_bit([]) == 0.0
    assert eps_bit([0.3]) == pytest.approx(0.3, abs=1e-15)
    assert eps_bit([0.5, 0.5]) == 0.75
    assert eps_bit([0.2, 1.0, 0.0]) == 1.0
    with pytest.raises(ValueError):
        eps_bit([0.5, 1.01])


def test_eps_bit_matches_reference():
    for mu in ([0.3], [0.4, 0.7], [0.2, 0.5, 0.9], [0.0, 0.6, 1.0, 0.25]):
        assert eps_bit(mu) == pytest.approx(
            reference_single_bit_equivocation(mu), abs=1e-12
        )


def test_eps_recursive_step():
    assert eps_recursive(0.0, 0.4) == 0.4
    assert eps_recursive(0.75, 0.5) == pytest.approx(0.875, abs=1e-15)
    with pytest.raises(ValueError):
        eps_recursive(1.5, 0.5)


def test_eps_key_independent_adds_rows():
    mu = [[0.3, 0.6], [0.9, 0.1]]
    expected = eps_bit(mu[0]) + eps_bit(mu[1])
    assert eps_key_independent(mu) == pytest.approx(expected, abs=1e-15)
    assert eps_key_independent(mu) == pytest.approx(1.63, abs=1e-12)


def test_eps_key_file_scales():
    assert eps_key_file(3, [0.5, 0.5]) == pytest.approx(2.25, abs=1e-15)
    assert eps_key_file(128, [0.2, 1.0, 0.3]) == 128.0
    with pytest.raises(ValueError):
        eps_key_file(-1, [0.5])


def test_capacity_and_maurer_agree():
    mu = [0.1, 0.2, 0.7]
    assert capacity(mu) == pytest.approx(1.0, abs=1e-15)
    lower, upper = maurer_bounds(mu)
    assert lower == pytest.approx(capacity(mu), abs=1e-15)
    assert upper == pytest.approx(capacity(mu), abs=1e-15)


def test_capacity_never_below_equivocation():
    for mu in ([0.5] * 6, [0.05] * 10, [0.9, 0.8, 0.7], [1.0, 0.0]):
        assert capacity(mu) >= eps_bit(mu) - 1e-12


def test_markov_eps2_frozen_value():
    """Two-step closed form at mu=(0.4, 0.7), alpha=0.8."""
    expected = (0.4 * 0.3 + 0.6 * 0.7) * binary_entropy(0.8) + 0.4 * 0.7
    value = markov_eps2(0.4, 0.7, 0.8)
    assert value == pytest.approx(expected, abs=1e-15)
    assert value == pytest.approx(0.6698411712391756, abs=1e-12)


def test_markov_eps2_exact_matches_reference():
    """The enumeration route equals (mu1 + mu2 - mu1*mu2) * h(alpha2)."""
    for m1, m2, a in [(0.4, 0.7, 0.8), (0.2, 0.9, 0.3), (0.5, 0.5, 0.65)]:
        brute = reference_single_bit_equivocation([m1, m2], alphas=[a])
        assert markov_eps2_exact(m1, m2, a) == pytest.approx(brute, abs=1e-12)
    assert markov_eps2_exact(0.4, 0.7, 0.8) == pytest.approx(
        0.5919810378076371, abs=1e-12
    )


def test_markov_eps2_two_routes_disagree_off_domain():
    """The closed form exceeds enumeration by mu1*mu2*(1 - h(alpha2)).

    Both routes are kept: markov_eps2 carries the closed form, and
    markov_eps2_exact carries the enumerable value.  They agree exactly
    when mu1*mu2 vanishes or alpha2 is one half.
    """
    for m1 in (0.0, 0.3, 1.0):
        for m2 in (0.0, 0.6, 1.0):
            for a in (0.0, 0.25, 0.5, 1.0):
                gap = markov_eps2(m1, m2, a) - markov_eps2_exact(m1, m2, a)
                predicted = m1 * m2 * (1.0 - binary_entropy(a))
                assert gap == pytest.approx(predicted, abs=1e-12)
                if m1 * m2 == 0.0 or a == 0.5:
                    assert abs(gap) < 1e-15
    assert markov_eps2(0.4, 0.7, 0.8) > markov_eps2_exact(0.4, 0.7, 0.8)


def test_markov_eps2_reduces_to_iid_at_half():
    for m1 in (0.0, 0.4, 1.0):
        for m2 in (0.1, 0.8):
            assert markov_eps2(m1, m2, 0.5) == pytest.approx(
                eps_bit([m1, m2]), abs=1e-12
            )


def test_markov_eps2_correlation_reduces_secrecy():
    """Any bias in the chain lowers the two-step equivocation."""
    for a in (0.0, 0.1, 0.35, 0.65, 0.9, 1.0):
        assert markov_eps2(0.4, 0.6, a) <= markov_eps2(0.4, 0.6, 0.5) + 1e-15
    assert markov_eps2(0.4, 0.6, 0.0) == pytest.approx(0.24, abs=1e-15)
    assert markov_eps2(0.4, 0.6, 1.0) == pytest.approx(0.24, abs=1e-15)


def test_markov_helpers_values():
    h = markov_helpers(0.3, 0.6)
    assert h.middle_given_ends[(0, 0)] == pytest.approx(0.18 / 0.46, abs=1e-15)
    assert h.middle_given_ends[(0, 0)] == pytest.approx(0.391304347826087, abs=1e-12)
    assert h.middle_given_ends[(0, 1)] == pytest.approx(0.12 / 0.54, abs=1e-15)
    assert h.end_pair_prob[(0, 0)] == pytest.approx(0.23, abs=1e-15)
    assert h.end_pair_prob[(1, 0)] == pytest.approx(0.27, abs=1e-15)
    assert sum(h.end_pair_prob.values()) == pytest.approx(1.0, abs=1e-15)
    assert h.single_middle == 0.3
    assert h.double_middle == pytest.approx(0.18 + 0.28, abs=1e-15)
    assert h.single_end == 0.6
    assert not h.degenerate


def test_markov_helpers_degenerate_pairs():
    """alpha2=0, alpha3=1 makes equal ends impossible; flag it, weight 1/2."""
    h = markov_helpers(0.0, 1.0)
    assert h.degenerate
    assert h.middle_given_ends[(0, 0)] == 0.5
    assert h.end_pair_prob[(0, 0)] == 0.0


def test_markov_eps3_frozen_value():
    value = markov_eps3(0.4, 0.4, 0.4, 0.3, 0.3)
    assert value == pytest.approx(0.6937216236475565, abs=1e-12)
    assert markov_eps3_symmetric(0.4, 0.3) == pytest.approx(value, abs=1e-12)


def test_markov_eps3_matches_reference():
    cases = [
        (0.4, 0.7, 0.2, 0.8, 0.3),
        (0.5, 0.5, 0.5, 0.25, 0.9),
        (0.1, 0.9, 0.6, 0.0, 1.0),
        (1.0, 0.3, 0.8, 0.45, 0.45),
    ]
    for m1, m2, m3, a2, a3 in cases:
        brute = reference_single_bit_equivocation([m1, m2, m3], alphas=[a2, a3])
        assert markov_eps3(m1, m2, m3, a2, a3) == pytest.approx(brute, abs=1e-12)


def test_markov_eps3_limits():
    for m in (0.0, 0.3, 1.0):
        assert markov_eps3(m, m, m, 0.5, 0.5) == pytest.approx(
            eps_bit([m, m, m]), abs=1e-12
        )
        assert markov_eps3(m, m, m, 1.0, 1.0) == pytest.approx(m**3, abs=1e-12)
        assert markov_eps3(m, m, m, 0.0, 0.0) == pytest.approx(m**3, abs=1e-12)


def test_weak_correlation_grows_equivocation_iff_entropy_above_half():
    """Near alpha = 1/2 the two-step value beats one step iff h(alpha) > 1/2.

    With equal miss probabilities below one, d(eps2)/dj at j=2 keeps the
    sign of h(alpha) - 1/2 for alpha close to 1/2.
    """
    m = 0.6
    assert markov_eps2(m, m, 0.45) > eps_bit([m])
    assert markov_eps2(m, m, 0.55) > eps_bit([m])
    h_low = 0.89  # binary_entropy(0.89) is well below 1/2
    assert binary_entropy(h_low) < 0.5
    assert markov_eps2(m, m, h_low) < eps_bit([m])


def test_mu_hat_endpoints_and_symmetry():
    assert mu_hat(0.0) == 0.0
    assert mu_hat(1.0) == 0.0
    assert mu_hat(0.5) == 1.0
    for k in range(51):
        a = k / 50
        assert abs(mu_hat(a) - mu_hat(1.0 - a)) < 1e-12


def test_mu_hat_threshold_splits_growth():
    """eps3 > eps2 exactly when mu is below the threshold."""
    for a in (0.1, 0.25, 0.4):
        t = mu_hat(a)
        below = max(t - 0.05, t / 2)
        above = min(t + 0.05, (1 + t) / 2)
        assert markov_eps3_symmetric(below, a) > markov_eps2(below, below, a)
        assert markov_eps3_symmetric(above, a) < markov_eps2(above, above, a)


def test_mu_hat_strictly_increasing_left_half():
    values = [mu_hat(k / 1000) for k in range(0, 501)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_equivocation_report_fields():
    report = EquivocationReport(
        closed_form=0.75,
        oracle=0.75,
        mc_estimate=0.7498,
        mc_stderr=0.0014,
        capacity=1.0,
        gap=0.25,
    )
    assert report.capacity == 1.0
    with pytest.raises(ValueError):
        EquivocationReport(
            closed_form=-0.1,
            oracle=None,
            mc_estimate=None,
            mc_stderr=None,
            capacity=0.5,
            gap=None,
        )
