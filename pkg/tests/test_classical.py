"""Classical processes: word measures, correlations, and the exact classifier."""

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import spinsource as ss
from spinsource.errors import CapExceededError, ShapeMismatchError

APERIODIC_T = np.array([[0.9, 0.1], [0.2, 0.8]])
PERIOD2_T = np.array([[0.0, 1.0], [1.0, 0.0]])


def brute_correlation(process, f, g, gap):
    """Oracle: enumerate every word of length mf + gap + mg."""
    f, g = np.asarray(f, dtype=complex), np.asarray(g, dtype=complex)
    mf, mg = f.ndim, g.ndim
    total = 0.0 + 0j
    for word in itertools.product(range(process.alphabet_size), repeat=mf + gap + mg):
        total += (
            ss.word_probability(process, word)
            * f[word[:mf]]
            * g[word[mf + gap :]]
        )
    return total


class TestStationaryDistribution:
    def test_aperiodic(self):
        pi, unique = ss.stationary_distribution(APERIODIC_T)
        assert unique
        assert np.allclose(pi, [2 / 3, 1 / 3], atol=1e-12)

    def test_period2(self):
        pi, unique = ss.stationary_distribution(PERIOD2_T)
        assert unique and np.allclose(pi, [0.5, 0.5], atol=1e-12)

    def test_reducible_not_unique(self):
        _, unique = ss.stationary_distribution(np.eye(2))
        assert not unique

    def test_markov_defaults_to_stationary(self):
        chain = ss.MarkovProcess(APERIODIC_T)
        assert chain.is_stationary()
        assert np.allclose(chain.initial, [2 / 3, 1 / 3], atol=1e-12)


class TestWordProbabilities:
    def test_markov_word(self):
        chain = ss.MarkovProcess(APERIODIC_T)
        assert ss.word_probability(chain, (0, 1)) == pytest.approx(1 / 15, abs=1e-12)

    def test_mixture_word(self):
        mix = ss.MixtureProcess(
            [0.5, 0.5], (ss.IIDProcess([0.9, 0.1]), ss.IIDProcess([0.1, 0.9]))
        )
        assert ss.word_probability(mix, (0, 0)) == pytest.approx(0.41, abs=1e-12)

    @pytest.mark.parametrize("length", [1, 2, 3, 4])
    def test_marginal_table_matches_word_probability(self, length):
        chain = ss.MarkovProcess(APERIODIC_T)
        table = ss.marginal_table(chain, length)
        for word in itertools.product(range(2), repeat=length):
            assert table[word] == pytest.approx(ss.word_probability(chain, word), abs=1e-12)

    def test_tables_sum_to_one(self):
        mix = ss.MixtureProcess(
            [0.3, 0.7], (ss.MarkovProcess(APERIODIC_T), ss.IIDProcess([0.5, 0.5]))
        )
        for length in range(1, 5):
            assert ss.marginal_table(mix, length).sum() == pytest.approx(1.0, abs=1e-12)

    def test_word_cap(self):
        with pytest.raises(CapExceededError):
            ss.marginal_table(ss.IIDProcess([0.5, 0.5]), 25)

    def test_symbol_out_of_range(self):
        with pytest.raises(ValueError):
            ss.word_probability(ss.IIDProcess([0.5, 0.5]), (0, 2))


class TestConsistency:
    @pytest.mark.parametrize(
        "process",
        [
            ss.IIDProcess([0.8, 0.2]),
            ss.MarkovProcess(APERIODIC_T),
            ss.MarkovProcess(PERIOD2_T),
            ss.MixtureProcess([0.5, 0.5], (ss.IIDProcess([0.9, 0.1]), ss.IIDProcess([0.1, 0.9]))),
        ],
    )
    def test_stationary_processes_pass(self, process):
        report = ss.check_classical_consistency(process, max_len=5)
        assert report.consistent and report.stationary

    def test_nonstationary_start_fails_left_only(self):
        chain = ss.MarkovProcess(APERIODIC_T, initial=[1.0, 0.0])
        report = ss.check_classical_consistency(chain, max_len=4)
        assert report.consistent
        assert not report.stationary
        assert report.left_deviation > 1e-2

    def test_tampered_table_fails(self):
        table = ss.measure_table(ss.MarkovProcess(APERIODIC_T), 3)
        bad = np.array(table.tables[1])
        bad[0, 0] += 0.05
        bad[0, 1] -= 0.05
        tampered = ss.MeasureTable(2, (table.tables[0], bad, table.tables[2]))
        report = ss.check_measure_consistency(tampered)
        assert not report.consistent
        # the redistributed mass is detectable from word (0,) sideways
        # and from (0,0)/(0,1) upward; any of those may rank worst
        assert report.worst_word in {(0,), (0, 0), (0, 1)}
        assert report.right_deviation == pytest.approx(0.05, abs=1e-12)

    def test_measure_table_prob_accessor(self):
        chain = ss.MarkovProcess(APERIODIC_T)
        table = ss.measure_table(chain, 3)
        assert table.prob((0, 1, 1)) == pytest.approx(
            ss.word_probability(chain, (0, 1, 1)), abs=1e-14
        )
        with pytest.raises(ValueError):
            table.prob((0, 0, 0, 0))


class TestCorrelation:
    def test_aperiodic_indicator_decay(self):
        # corr(gap) - target = pi0 * pi1 * lambda2^(gap+1) = (2/9) 0.7^(gap+1)
        chain = ss.MarkovProcess(APERIODIC_T)
        f = np.array([1.0, 0.0])
        target = 4 / 9
        for gap in range(6):
            corr = ss.classical_correlation(chain, f, f, gap)
            assert corr.real - target == pytest.approx((2 / 9) * 0.7 ** (gap + 1), abs=1e-12)

    def test_period2_indicator(self):
        chain = ss.MarkovProcess(PERIOD2_T)
        f = np.array([1.0, 0.0])
        for gap in range(6):
            expected = 0.5 if gap % 2 == 1 else 0.0
            assert ss.classical_correlation(chain, f, f, gap).real == pytest.approx(expected)

    def test_mixture_indicator_constant(self):
        mix = ss.MixtureProcess(
            [0.5, 0.5], (ss.IIDProcess([0.9, 0.1]), ss.IIDProcess([0.1, 0.9]))
        )
        f = np.array([1.0, 0.0])
        sweep = ss.classical_correlation_sweep(mix, f, f, range(5))
        assert np.allclose(sweep, 0.41, atol=1e-12)

    def test_iid_factorizes(self):
        iid = ss.IIDProcess([0.3, 0.7])
        f = np.array([2.0, -1.0])
        g = np.array([[0.5, 1.5], [2.5, -0.5]])
        sweep = ss.classical_correlation_sweep(iid, f, g, range(4))
        expected = ss.block_mean(iid, f) * ss.block_mean(iid, g)
        assert np.allclose(sweep, expected, atol=1e-12)

    @pytest.mark.parametrize("gap", [0, 1, 3])
    @pytest.mark.parametrize("mf,mg", [(1, 1), (2, 1), (2, 2)])
    def test_matches_brute_force(self, gap, mf, mg):
        chain = ss.MarkovProcess(APERIODIC_T)
        rng = np.random.default_rng(5 * gap + mf + 10 * mg)
        f = rng.standard_normal((2,) * mf) + 1j * rng.standard_normal((2,) * mf)
        g = rng.standard_normal((2,) * mg) + 1j * rng.standard_normal((2,) * mg)
        got = ss.classical_correlation(chain, f, g, gap)
        assert got == pytest.approx(brute_correlation(chain, f, g, gap), abs=1e-12)

    def test_mixture_matches_brute_force(self):
        mix = ss.MixtureProcess(
            [0.4, 0.6], (ss.MarkovProcess(APERIODIC_T), ss.IIDProcess([0.2, 0.8]))
        )
        f = np.array([[1.0, 0.0], [0.0, -1.0]])
        got = ss.classical_correlation(mix, f, f, 2)
        assert got == pytest.approx(brute_correlation(mix, f, f, 2), abs=1e-12)

    def test_block_mean(self):
        chain = ss.MarkovProcess(APERIODIC_T)
        f = np.array([1.0, 0.0])
        assert ss.block_mean(chain, f) == pytest.approx(2 / 3, abs=1e-12)

    def test_table_shape_validation(self):
        with pytest.raises(ShapeMismatchError):
            ss.classical_correlation(ss.IIDProcess([0.5, 0.5]), np.ones((2, 3)), np.ones(2), 0)

    @given(st.integers(0, 30))
    def test_sweep_matches_pointwise(self, gap):
        chain = ss.MarkovProcess(APERIODIC_T)
        f = np.array([0.25, 1.5])
        sweep = ss.classical_correlation_sweep(chain, f, f, [gap])
        assert sweep[0] == pytest.approx(ss.classical_correlation(chain, f, f, gap))


class TestClassifier:
    def test_iid(self):
        report = ss.classify_process(ss.IIDProcess([0.8, 0.2]))
        assert report.verdicts == (True, True, True) and report.period == 1

    def test_aperiodic(self):
        report = ss.classify_process(ss.MarkovProcess(APERIODIC_T))
        assert report.verdicts == (True, True, True)
        assert report.irreducible and report.period == 1 and report.stationary

    def test_period2(self):
        report = ss.classify_process(ss.MarkovProcess(PERIOD2_T))
        assert report.verdicts == (True, False, False)
        assert report.period == 2 and report.unique_stationary

    def test_period3_cycle(self):
        cycle = np.roll(np.eye(3), 1, axis=1)
        report = ss.classify_process(ss.MarkovProcess(cycle))
        assert report.period == 3 and report.verdicts == (True, False, False)

    def test_distinct_mixture(self):
        mix = ss.MixtureProcess(
            [0.5, 0.5], (ss.IIDProcess([0.9, 0.1]), ss.IIDProcess([0.1, 0.9]))
        )
        assert ss.classify_process(mix).verdicts == (False, False, False)

    def test_degenerate_mixture_inherits(self):
        same = ss.MixtureProcess(
            [0.5, 0.5], (ss.IIDProcess([0.8, 0.2]), ss.IIDProcess([0.8, 0.2]))
        )
        assert ss.classify_process(same).verdicts == (True, True, True)

    def test_reducible_chain(self):
        chain = ss.MarkovProcess(np.eye(2), initial=[0.5, 0.5])
        report = ss.classify_process(chain)
        assert report.verdicts == (False, False, False)
        assert not report.irreducible and not report.unique_stationary

    def test_transient_state_ignored(self):
        # absorbing state 0; stationary support is {0}, which mixes trivially
        chain = ss.MarkovProcess(np.array([[1.0, 0.0], [0.5, 0.5]]))
        report = ss.classify_process(chain)
        assert report.verdicts == (True, True, True)

    def test_nonstationary_start_flagged(self):
        chain = ss.MarkovProcess(APERIODIC_T, initial=[1.0, 0.0])
        report = ss.classify_process(chain)
        assert not report.stationary and report.verdicts == (True, True, True)


class TestProcessValidation:
    def test_bad_probs(self):
        with pytest.raises(ValueError):
            ss.IIDProcess([0.7, 0.7])

    def test_bad_rows(self):
        with pytest.raises(ValueError):
            ss.MarkovProcess([[0.5, 0.6], [0.5, 0.5]])

    def test_negative_entry(self):
        with pytest.raises(ValueError):
            ss.MarkovProcess([[1.2, -0.2], [0.5, 0.5]])

    def test_nested_mixture_rejected(self):
        inner = ss.MixtureProcess([1.0], (ss.IIDProcess([0.5, 0.5]),))
        with pytest.raises(TypeError):
            ss.MixtureProcess([1.0], (inner,))

    def test_alphabet_size_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            ss.MixtureProcess(
                [0.5, 0.5], (ss.IIDProcess([0.5, 0.5]), ss.IIDProcess([1 / 3] * 3))
            )
