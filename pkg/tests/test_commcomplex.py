import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonq import commcomplex as cc
from photonq.network import ghz_state
from photonq.statevec import joint_distribution

unit = st.floats(0, 1)


def brute_force_python(n):
    """Plain-loop exhaustive search, independent of the vectorized one."""
    inputs = [x for x in itertools.product((0, 1), repeat=n) if sum(x) % 2 == 0]
    best = 0
    for flat in itertools.product((-1, 1), repeat=2 * n):
        wins = 0
        for x in inputs:
            sign = 1
            for i, xi in enumerate(x):
                sign *= flat[2 * i + xi]
            wins += sign == math.cos(math.pi * sum(x) / 2)
        best = max(best, wins)
    return Fraction(best, len(inputs))


class TestInputsAndFunction:
    def test_promise_inputs_three(self):
        assert cc.promise_inputs(3) == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]

    @pytest.mark.parametrize("n", [3, 5, 7, 9])
    def test_promise_input_count(self, n):
        inputs = cc.promise_inputs(n)
        assert len(inputs) == 2 ** (n - 1) == len(set(inputs))
        assert all(sum(x) % 2 == 0 for x in inputs)

    @pytest.mark.parametrize("n", [2, 4, 1, 17])
    def test_promise_inputs_reject(self, n):
        with pytest.raises(ValueError):
            cc.promise_inputs(n)

    @pytest.mark.parametrize("x,expected", [
        ((0, 0, 0), 1), ((0, 1, 1), -1), ((0, 0, 0, 1, 1), -1), ((0, 1, 1, 1, 1), 1),
    ])
    def test_f_value(self, x, expected):
        assert cc.f_value(x) == expected == round(math.cos(math.pi * sum(x) / 2))

    def test_f_value_odd_weight(self):
        with pytest.raises(ValueError):
            cc.f_value((1, 0, 0))

    def test_bell_functional(self):
        bf = cc.bell_functional(3)
        assert bf.bound == 8
        for x, g in bf.g.items():
            assert g == pytest.approx(4 * math.cos(math.pi / 2 * sum(x)), abs=1e-12)
            assert (g == 0) == (sum(x) % 2 == 1)


class TestClassicalBound:
    @pytest.mark.parametrize("n,expected", [(3, 0.75), (5, 0.625)])
    def test_p_classical_values(self, n, expected):
        assert cc.p_classical(n) == pytest.approx(expected, abs=1e-15)

    def test_p_classical_domain(self):
        with pytest.raises(ValueError):
            cc.p_classical(0)
        assert cc.p_classical(4) == pytest.approx(0.5 * (1 + 1 / math.sqrt(8)))

    @pytest.mark.parametrize("n,expected", [(3, Fraction(3, 4)), (5, Fraction(5, 8)), (7, Fraction(9, 16))])
    def test_bruteforce_equals_formula(self, n, expected):
        best, optimal = cc.classical_bruteforce(n)
        assert best == expected == cc.p_classical_fraction(n)
        assert float(best) == pytest.approx(cc.p_classical(n), abs=1e-15)
        assert all(cc.success_rate(s) == best for s in optimal[:50])

    @pytest.mark.parametrize("n", [3, 5])
    def test_bruteforce_matches_plain_loop(self, n):
        assert cc.classical_bruteforce(n)[0] == brute_force_python(n)

    def test_all_plus_strategy(self):
        strategy = cc.ClassicalStrategy(((1, 1),) * 3)
        assert cc.success_rate(strategy) == Fraction(1, 4)

    def test_optimal_strategies_are_lexicographic(self):
        _, optimal = cc.classical_bruteforce(3)
        flat = [tuple(v for pair in s.signs for v in pair) for s in optimal]
        assert flat == sorted(flat)
        assert optimal[0].signs == ((-1, -1),) * 3

    def test_bruteforce_range(self):
        with pytest.raises(ValueError):
            cc.classical_bruteforce(9)


class TestQuantumSide:
    def test_correlation_examples(self):
        assert cc.quantum_correlation(3, (0, 0, 0), 1) == 1
        assert cc.quantum_correlation(3, (0, 1, 1), 1) == -1
        assert cc.quantum_correlation(3, (1, 0, 1), 0) == 0

    @pytest.mark.parametrize("n", [3, 5])
    @pytest.mark.parametrize("V", [0.0, 0.37, 1.0])
    def test_statevector_agrees_with_closed_form(self, n, V):
        for x in cc.promise_inputs(n):
            assert cc.quantum_correlation_statevector(n, x, V) == pytest.approx(
                cc.quantum_correlation(n, x, V), abs=1e-9
            )

    @pytest.mark.parametrize("n", [3, 5])
    def test_ghz_outcomes_always_multiply_to_f(self, n):
        # Sign product over the full Born distribution in bases B(-pi x_i / 2).
        for x in cc.promise_inputs(n):
            dist = joint_distribution(ghz_state(n), [-math.pi * xi / 2 for xi in x])
            signs = np.array([(-1) ** bin(i).count("1") for i in range(2**n)])
            assert float(dist @ signs) == pytest.approx(cc.f_value(x), abs=1e-12)

    @pytest.mark.parametrize("n", [3, 5])
    def test_strict_subset_marginals_vanish(self, n):
        x = cc.promise_inputs(n)[-1]
        dist = joint_distribution(ghz_state(n), [-math.pi * xi / 2 for xi in x])
        for size in range(1, n):
            for subset in itertools.combinations(range(n), size):
                mask = sum(1 << q for q in subset)
                signs = np.array([(-1) ** bin(i & mask).count("1") for i in range(2**n)])
                assert float(dist @ signs) == pytest.approx(0, abs=1e-12)

    def test_bell_value(self):
        assert cc.bell_value(3, 1.0) == pytest.approx(16, abs=1e-9)
        assert cc.bell_bound(3) == 8
        assert cc.critical_visibility(3) == pytest.approx(0.5, abs=1e-12)
        assert cc.bell_value(3, 0.5) == pytest.approx(8, abs=1e-9)
        sv = sum(cc.g_coefficient(x) * cc.quantum_correlation_statevector(3, x, 1.0)
                 for x in cc.promise_inputs(3))
        assert sv == pytest.approx(16, abs=1e-9)

    @pytest.mark.parametrize("n", [3, 5, 7, 9])
    def test_bell_value_closed_form_and_boundary(self, n):
        assert cc.bell_value(n, 1.0) == pytest.approx(2 ** ((3 * n - 1) / 2), rel=1e-12)
        v = cc.critical_visibility(n)
        assert cc.bell_value(n, v) == pytest.approx(cc.bell_bound(n), abs=1e-9)


class TestAnalyticSuccess:
    def test_perfect_apparatus(self):
        assert cc.analytic_success(3, 1, 1) == 1.0

    @settings(max_examples=50)
    @given(n=st.integers(1, 30), V=unit)
    def test_zero_efficiency_is_classical(self, n, V):
        assert cc.analytic_success(n, V, 0) == cc.p_classical(n)

    def test_four_partner_example(self):
        # eta^4 V + (1-eta)^4 Pc + (1 - eta^4 V - (1-eta)^4)/2, by hand:
        pc4 = 0.5 + 0.5 / math.sqrt(8)
        by_hand = 0.36864 + 0.0016 * pc4 + 0.62976 * 0.5
        assert cc.analytic_success(4, 0.9, 0.8) == pytest.approx(by_hand, abs=1e-12)
        assert cc.analytic_success(4, 0.9, 0.8) == pytest.approx(0.684603, abs=1e-6)
        assert cc.p_classical(4) == pytest.approx(0.676777, abs=1e-6)
        assert cc.analytic_success(3, 0.9, 0.8) == pytest.approx(0.7324, abs=1e-12)

    def test_degenerate_limits(self):
        for n in (3, 4, 5, 8):
            assert cc.analytic_success(n, 0, 1) == pytest.approx(0.5)
            assert cc.analytic_success(n, 1, 1) == pytest.approx(1)

    @settings(max_examples=100)
    @given(n=st.integers(1, 40), eta=unit, v1=unit, v2=unit)
    def test_monotone_in_visibility(self, n, eta, v1, v2):
        lo, hi = sorted((v1, v2))
        assert cc.analytic_success(n, lo, eta) <= cc.analytic_success(n, hi, eta) + 1e-15

    def test_rejects_bad_noise(self):
        with pytest.raises(ValueError):
            cc.analytic_success(3, 1.2, 0.5)
        with pytest.raises(ValueError):
            cc.analytic_success(3, 0.5, -0.1)


class TestMinPartners:
    def test_examples(self):
        assert cc.min_partners(0.9, 0.8) == 4
        assert cc.min_partners(0.9, 0.8, odd_only=True) == 5
        assert cc.analytic_success(5, 0.9, 0.8) == pytest.approx(0.647496, abs=1e-6)
        assert cc.min_partners(1, 1) == 3
        assert cc.min_partners(1, 1, odd_only=True) == 3

    def test_none_when_no_advantage(self):
        assert cc.min_partners(0.0, 0.9) is None
        assert cc.min_partners(0.9, 0.0) is None


class TestScan:
    def test_cells(self):
        cells = {(s.n, s.V, s.eta): s for s in cc.scan_region([3, 4], [0.4, 0.9], [0.8, 1.0])}
        assert cells[(4, 0.9, 0.8)].advantage
        assert not cells[(3, 0.9, 0.8)].advantage
        assert cells[(3, 0.4, 1.0)].p_quantum == pytest.approx(0.7)
        assert not cells[(3, 0.4, 1.0)].advantage

    def test_order_and_zero_efficiency(self):
        samples = cc.scan_region([5, 3], [1.0, 0.5], [0.0, 0.7])
        keys = [(s.n, s.V, s.eta) for s in samples]
        assert keys == sorted(keys)
        assert all(not s.advantage for s in samples if s.eta == 0)
        for s in samples:
            assert s.p_classical == cc.p_classical(s.n)
            assert s.advantage == (s.p_quantum > s.p_classical)

    def test_empty_and_invalid(self):
        assert cc.scan_region([], [0.5], [0.5]) == []
        with pytest.raises(ValueError):
            cc.scan_region([2], [0.5], [0.5])

    @settings(max_examples=30)
    @given(n=st.integers(3, 12), eta=unit, v1=unit, v2=unit)
    def test_advantage_region_is_up_set_in_v(self, n, eta, v1, v2):
        lo, hi = sorted((v1, v2))
        if cc.has_advantage(n, lo, eta):
            assert cc.has_advantage(n, hi, eta)


class TestMonteCarlo:
    def test_perfect_is_certain(self):
        est, se = cc.monte_carlo(3, 1.0, 1.0, 100_000, seed=0)
        assert est == 1.0 and se == 0.0

    @pytest.mark.parametrize("n,V,eta", [(3, 0.9, 0.8), (3, 0.0, 1.0), (5, 0.8, 0.6), (7, 0.9, 0.9)])
    def test_within_three_sigma(self, n, V, eta):
        est, se = cc.monte_carlo(n, V, eta, 100_000, seed=0)
        assert abs(est - cc.analytic_success(n, V, eta)) <= 3 * se

    def test_all_detectors_failing_reproduces_classical_optimum(self):
        est, se = cc.monte_carlo(5, 0.7, 0.0, 100_000, seed=1)
        assert abs(est - 0.625) <= 3 * se

    def test_reproducible_and_seed_sensitive(self):
        assert cc.monte_carlo(5, 0.8, 0.7, 10_000, seed=7) == cc.monte_carlo(5, 0.8, 0.7, 10_000, seed=7)
        assert cc.monte_carlo(5, 0.8, 0.7, 10_000, seed=7) != cc.monte_carlo(5, 0.8, 0.7, 10_000, seed=8)

    def test_blocks_are_order_independent(self):
        trials = 3 * cc.MC_BLOCK + 17
        sizes = [cc.MC_BLOCK] * 3 + [17]
        wins = sum(cc.simulate_block(5, 0.7, 0.7, 3, b, sizes[b]) for b in reversed(range(4)))
        est, _ = cc.monte_carlo(5, 0.7, 0.7, trials, seed=3)
        assert est == wins / trials

    @pytest.mark.parametrize("n", [4, 1, 11])
    def test_rejects_invalid_party_counts(self, n):
        with pytest.raises(ValueError):
            cc.monte_carlo(n, 1, 1, 10)

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            cc.monte_carlo(3, 1, 1, 0)
