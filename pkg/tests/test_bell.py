import math
from fractions import Fraction

import numpy as np
import pytest

from qcalc import (
    AnalyzerConfig,
    ConfigError,
    CredibleSetSpec,
    InvariantError,
    LengthError,
    OutcomeSequence,
    break_stats,
    born,
    exhaustive_break_bound_check,
    future_product,
    singlet_setup,
    pair_correlation,
    partial_trace,
    qq_empty,
    sample_pair,
    tail_log10,
    triangle_bound,
)

CANONICAL = AnalyzerConfig.from_degrees(0, 90, 45, -45)

COS2_22_5 = 0.8535533905932737  # frozen from the closed-form oracle below
COS2_67_5 = 0.14644660940672624


def closed_form_same_rate(theta_left, theta_right):
    """cos^2 of half the relative angle; the oracle, never used in qcalc."""
    return math.cos((theta_left - theta_right) / 2.0) ** 2


class TestSingletSetup:
    def test_equal_angles_with_flip_always_agree(self):
        cfg = AnalyzerConfig.from_degrees(30, 90, 30, -45)
        orbit, bindles = singlet_setup(cfg)
        same = sum(
            born(orbit, future_product(bindles["A"].elements[i], bindles["J"].elements[i]))
            for i in (0, 1)
        )
        assert same == pytest.approx(1.0, abs=1e-12)

    def test_canonical_geometry(self):
        # relative angles 45/45/45/135 degrees
        table = pair_correlation(CANONICAL).as_dict()
        assert table["AJ"] == pytest.approx(table["AK"], abs=1e-12)
        assert table["AJ"] == pytest.approx(table["BJ"], abs=1e-12)
        assert table["BK"] == pytest.approx(1.0 - table["AJ"], abs=1e-12)

    def test_singlet_wing_marginals_are_mixed(self):
        orbit, _ = singlet_setup(CANONICAL)
        for wing in ("left", "right"):
            red = partial_trace(orbit.op, {wing})
            np.testing.assert_allclose(red.entries, np.eye(2) / 2, atol=1e-12)

    def test_bindles_are_complete(self):
        _, bindles = singlet_setup(CANONICAL)
        for b in bindles.values():
            assert float(b.norm) == pytest.approx(1.0, abs=1e-12)


class TestPairCorrelation:
    def test_canonical_values(self):
        table = pair_correlation(CANONICAL)
        assert table.aj == pytest.approx(COS2_22_5, abs=1e-12)
        assert table.ak == pytest.approx(COS2_22_5, abs=1e-12)
        assert table.bj == pytest.approx(COS2_22_5, abs=1e-12)
        assert table.bk == pytest.approx(COS2_67_5, abs=1e-12)

    def test_direct_trace_oracle(self):
        # independent 4x4 construction of the same-outcome effect
        theta_a, theta_j = CANONICAL.a, CANONICAL.j

        def proj(theta, sign):
            n = np.array([math.sin(theta), math.cos(theta)])
            pauli = n[0] * np.array([[0, 1], [1, 0]]) + n[1] * np.diag([1.0, -1.0])
            return (np.eye(2) + sign * pauli) / 2

        vec = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2)
        rho = np.outer(vec, vec)
        same = np.kron(proj(theta_a, +1), proj(theta_j, -1)) + np.kron(
            proj(theta_a, -1), proj(theta_j, +1)
        )
        expected = np.trace(rho @ same).real
        assert pair_correlation(CANONICAL).aj == pytest.approx(expected, abs=1e-12)

    def test_matches_closed_form_for_random_configs(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            angles = rng.uniform(0, 2 * math.pi, 4)
            cfg = AnalyzerConfig(*angles)
            table = pair_correlation(cfg).as_dict()
            expect = {
                "AJ": closed_form_same_rate(cfg.a, cfg.j),
                "AK": closed_form_same_rate(cfg.a, cfg.k),
                "BJ": closed_form_same_rate(cfg.b, cfg.j),
                "BK": closed_form_same_rate(cfg.b, cfg.k),
            }
            for pair in expect:
                assert table[pair] == pytest.approx(expect[pair], abs=1e-12)

    def test_perfect_correlation_config(self):
        cfg = AnalyzerConfig.from_degrees(0, 90, 0, -45)
        assert pair_correlation(cfg).aj == pytest.approx(1.0, abs=1e-12)

    def test_no_flip_inverts_equal_angle_agreement(self):
        cfg = AnalyzerConfig.from_degrees(0, 90, 0, -45, label_flip=False)
        assert pair_correlation(cfg).aj == pytest.approx(0.0, abs=1e-12)


class TestBreakStats:
    def test_identical(self):
        seq = OutcomeSequence(np.array([0, 1, 1, 0]))
        assert break_stats(seq, seq) == (0, 0.0)

    def test_complementary(self):
        a = OutcomeSequence(np.array([0, 1, 1, 0]))
        b = OutcomeSequence(np.array([1, 0, 0, 1]))
        assert break_stats(a, b) == (4, 1.0)

    def test_direct_count(self):
        a = OutcomeSequence(np.array([0, 1, 1, 0]))
        b = OutcomeSequence(np.array([0, 0, 1, 1]))
        assert break_stats(a, b) == (2, 0.5)

    def test_length_mismatch(self):
        with pytest.raises(LengthError):
            break_stats(
                OutcomeSequence(np.array([0, 1])), OutcomeSequence(np.array([0, 1, 0]))
            )

    def test_bits_validated(self):
        with pytest.raises(InvariantError):
            OutcomeSequence(np.array([0, 2]))


class TestTriangleBound:
    def test_paper_figures_exact(self):
        assert triangle_bound(0.15, 0.15, 0.15) == 0.45

    def test_perfect_correlations(self):
        assert triangle_bound(0.0, 0.0, 0.0) == 0.0

    def test_caps_at_one(self):
        assert triangle_bound(0.5, 0.4, 0.4) == 1.0

    def test_rate_range_validated(self):
        with pytest.raises(InvariantError):
            triangle_bound(1.2, 0.1, 0.1)

    def test_exhaustive_small_length(self):
        covered, counterexamples = exhaustive_break_bound_check(6)
        assert covered == 2 ** 24
        assert counterexamples == []

    def test_random_length_64_samples(self):
        rng = np.random.default_rng(123)
        n = 1_000_000
        u = rng.integers(0, 2 ** 63, size=n, dtype=np.uint64)
        v = rng.integers(0, 2 ** 63, size=n, dtype=np.uint64)
        w = rng.integers(0, 2 ** 63, size=n, dtype=np.uint64)
        lhs = np.bitwise_count(u ^ v ^ w).astype(np.int64)
        rhs = (
            np.bitwise_count(u).astype(np.int64)
            + np.bitwise_count(v)
            + np.bitwise_count(w)
        )
        assert np.all(lhs <= rhs)


from hypothesis import given, settings
from hypothesis import strategies as st


@settings(max_examples=200, deadline=None)
@given(
    bits=st.lists(
        st.lists(st.integers(0, 1), min_size=8, max_size=8),
        min_size=4,
        max_size=4,
    )
)
def test_triangle_bound_property(bits):
    b, j, a, k = (OutcomeSequence(np.array(row)) for row in bits)
    outer = break_stats(b, k)[1]
    bound = triangle_bound(
        break_stats(b, j)[1], break_stats(j, a)[1], break_stats(a, k)[1]
    )
    assert outer <= bound + 1e-12


@settings(max_examples=100, deadline=None)
@given(
    theta=st.floats(min_value=0.0, max_value=2 * math.pi),
    phi=st.floats(min_value=0.0, max_value=2 * math.pi),
)
def test_same_rate_closed_form_property(theta, phi):
    cfg = AnalyzerConfig(theta, 0.0, phi, 0.0)
    assert pair_correlation(cfg).aj == pytest.approx(
        closed_form_same_rate(theta, phi), abs=1e-12
    )


def oracle_qq_search(n: int, favored: Fraction, epsilon: Fraction) -> bool:
    """Raw enumeration over difference triples; True when the set is empty."""
    max_breaks = min(n, math.floor(n * (1 - favored + epsilon)))
    needed = math.ceil(n * (favored - epsilon))
    codes = np.arange(1 << n, dtype=np.uint32)
    weights = np.bitwise_count(codes).astype(np.int64)
    allowed = codes[weights <= max_breaks]
    if allowed.size == 0:
        return needed > 0
    pair_xor = np.unique(allowed[:, None] ^ allowed[None, :])
    best = np.max(np.bitwise_count(pair_xor[:, None] ^ allowed[None, :]))
    return int(best) < needed


class TestQQEmpty:
    def test_paper_case_empty(self):
        empty, certificate = qq_empty(1_000_000, 0.85, 0.01)
        assert empty
        assert certificate["required_break_rate"] == 0.84
        assert certificate["triangle_break_rate_max"] == 0.48
        assert certificate["inequality"] == "0.84 > 0.48"

    def test_weaker_correlations_nonempty_with_witness(self):
        empty, certificate = qq_empty(10, 0.70, 0.0)
        assert not empty
        assert certificate["witness_method"] == "exhaustive search"
        witness = certificate["witness"]
        for link in ("rate_BJ", "rate_JA", "rate_AK"):
            assert witness[link] <= 0.3 + 1e-12
        assert witness["rate_BK"] >= 0.7 - 1e-12
        # the witness really is credible under the exact band
        ref_j = OutcomeSequence(np.array([int(c) for c in witness["J"]]))
        cand_b = OutcomeSequence(np.array([int(c) for c in witness["B"]]))
        spec = CredibleSetSpec(ref_j, expected_break_rate=0.3, epsilon=1e-9)
        assert spec.admits(cand_b)

    def test_perfect_correlation_case(self):
        empty, certificate = qq_empty(10, 1.0, 0.0)
        assert empty
        assert certificate["achievable_breaks"] == 0

    def test_large_n_constructed_witness(self):
        empty, certificate = qq_empty(1000, 0.70, 0.0)
        assert not empty
        assert certificate["witness_method"] == "disjoint-support construction"
        witness = certificate["witness"]
        assert witness["rate_BK"] >= 0.7

    def test_agrees_with_exhaustive_search(self):
        for favored in (0.6, 0.7, 0.8, 0.85, 1.0):
            for epsilon in (0.0, 0.05):
                f = Fraction(str(favored))
                e = Fraction(str(epsilon))
                for n in range(1, 13):
                    got, _ = qq_empty(n, favored, epsilon)
                    want = oracle_qq_search(n, f, e)
                    assert got == want, (favored, epsilon, n, got, want)

    def test_favored_range_validated(self):
        with pytest.raises(ConfigError):
            qq_empty(10, 0.4, 0.0)


class TestSamplePair:
    def test_zero_relative_angle_never_breaks(self):
        cfg = AnalyzerConfig.from_degrees(0, 90, 0, -45)
        left, right = sample_pair(cfg, "AJ", 2000, seed=5)
        assert break_stats(left, right)[0] == 0

    def test_deterministic_per_seed(self):
        one = sample_pair(CANONICAL, "AJ", 500, seed=11)
        two = sample_pair(CANONICAL, "AJ", 500, seed=11)
        np.testing.assert_array_equal(one[0].bits, two[0].bits)
        np.testing.assert_array_equal(one[1].bits, two[1].bits)

    def test_different_seeds_differ(self):
        one = sample_pair(CANONICAL, "AJ", 500, seed=11)
        other = sample_pair(CANONICAL, "AJ", 500, seed=12)
        assert not np.array_equal(one[0].bits, other[0].bits)

    def test_million_runs_within_binomial_band(self):
        left, right = sample_pair(CANONICAL, "AJ", 1_000_000, seed=42)
        _, break_rate = break_stats(left, right)
        assert 0.8505 <= 1.0 - break_rate <= 0.8565

    def test_unknown_pair(self):
        with pytest.raises(ConfigError):
            sample_pair(CANONICAL, "XY", 10, seed=0)


def oracle_tail_sum(n, p, lo, hi):
    """Naive summation oracle: exact comb times float powers."""
    total = 0.0
    for k in range(n + 1):
        frac = Fraction(k, n)
        if Fraction(str(lo)) <= frac <= Fraction(str(hi)):
            continue
        total += math.comb(n, k) * (p ** k) * ((1 - p) ** (n - k))
    return total


class TestTailLog10:
    def test_empty_tail_sentinel(self):
        assert tail_log10(10, 0.5, 0.0, 1.0) == float("-inf")

    def test_matches_naive_summation(self):
        for n in (10, 100, 500, 1000):
            for p, lo, hi in ((0.85, 0.84, 0.86), (0.5, 0.4, 0.6), (0.3, 0.1, 0.35)):
                naive = oracle_tail_sum(n, p, lo, hi)
                if naive == 0.0:
                    assert tail_log10(n, p, lo, hi) == float("-inf")
                    continue
                got = tail_log10(n, p, lo, hi)
                assert got == pytest.approx(math.log10(naive), rel=1e-10)

    def test_strict_edges_use_decimal_boundaries(self):
        # k/n exactly on the band edge counts as inside
        inside_edge = tail_log10(100, 0.85, 0.84, 0.86)
        naive = oracle_tail_sum(100, 0.85, 0.84, 0.86)
        assert inside_edge == pytest.approx(math.log10(naive), rel=1e-10)

    def test_million_run_band(self):
        value = tail_log10(1_000_000, 0.85, 0.84, 0.86)
        assert -175.0 <= value <= -160.0

    def test_argument_validation(self):
        with pytest.raises(ConfigError):
            tail_log10(10, 1.5, 0.1, 0.2)
        with pytest.raises(ConfigError):
            tail_log10(10, 0.5, 0.6, 0.4)
        with pytest.raises(ConfigError):
            tail_log10(10 ** 8, 0.5, 0.1, 0.2)


class TestAnalyzerConfig:
    def test_angles_normalized(self):
        cfg = AnalyzerConfig(2 * math.pi + 0.25, 0.0, 0.0, 0.0)
        assert cfg.a == pytest.approx(0.25)

    def test_nonfinite_rejected(self):
        with pytest.raises(InvariantError):
            AnalyzerConfig(math.nan, 0.0, 0.0, 0.0)
