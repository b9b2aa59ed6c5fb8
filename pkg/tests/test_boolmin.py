import random
import time
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from mapex.boolmin import Implicant, evaluate_dnf, minimize
from mapex.errors import (
    MintermConflictError,
    MinimizationTimeout,
    TooManyVariablesError,
)
from oracles import dnf_truth, minimal_cover_size


def partitions(n_vars):
    """Every (ones, zeros) split of the full assignment space, with don't-cares."""
    space = range(1 << n_vars)
    for labels in product((0, 1, None), repeat=1 << n_vars):
        ones = [m for m in space if labels[m] == 1]
        zeros = [m for m in space if labels[m] == 0]
        yield ones, zeros


def check_against_oracle(ones, zeros, n_vars):
    dnf = minimize(ones, zeros, n_vars)
    for m in ones:
        assert dnf_truth(dnf, m)
    for z in zeros:
        assert not dnf_truth(dnf, z)
    assert len(dnf) == minimal_cover_size(ones, zeros, n_vars)
    return dnf


class TestSmallFunctions:
    def test_and_function(self):
        dnf = minimize({0b11}, {0b00, 0b01, 0b10}, 2)
        assert dnf == [Implicant(0b11, 0b11)]

    def test_or_function(self):
        dnf = minimize({0b01, 0b10, 0b11}, {0b00}, 2)
        assert dnf == [Implicant(0b01, 0b01), Implicant(0b10, 0b10)]
        assert all(imp.n_literals == 1 for imp in dnf)

    def test_tautology_when_no_zeros(self):
        assert minimize({0b01}, set(), 2) == [Implicant(0, 0)]

    def test_empty_ones_is_false(self):
        assert minimize(set(), {0b00, 0b11}, 2) == []

    def test_dont_cares_merge(self):
        # ones {00}, zeros {11}: either single-literal cube works; cover size 1
        dnf = minimize({0b00}, {0b11}, 2)
        assert len(dnf) == 1
        assert dnf[0].n_literals == 1


class TestOracle:
    def test_exhaustive_v2(self):
        for ones, zeros in partitions(2):
            check_against_oracle(ones, zeros, 2)

    def test_random_v3(self):
        rng = random.Random(1234)
        cases = 0
        while cases < 220:
            labels = [rng.choice((0, 1, None)) for _ in range(8)]
            ones = [m for m in range(8) if labels[m] == 1]
            zeros = [m for m in range(8) if labels[m] == 0]
            check_against_oracle(ones, zeros, 3)
            cases += 1

    @settings(max_examples=120, deadline=None)
    @given(st.integers(min_value=1, max_value=4), st.data())
    def test_functional_correctness_random(self, n_vars, data):
        space = list(range(1 << n_vars))
        ones = data.draw(st.sets(st.sampled_from(space)))
        zeros = data.draw(st.sets(st.sampled_from(space))) - ones
        dnf = minimize(ones, zeros, n_vars)
        for m in ones:
            assert dnf_truth(dnf, m)
        for z in zeros:
            assert not dnf_truth(dnf, z)


class TestPrimality:
    def test_dropping_any_literal_covers_a_zero(self):
        rng = random.Random(99)
        for _ in range(60):
            labels = [rng.choice((0, 1, None)) for _ in range(16)]
            ones = [m for m in range(16) if labels[m] == 1]
            zeros = [m for m in range(16) if labels[m] == 0]
            if not ones or not zeros:
                continue
            for imp in minimize(ones, zeros, 4):
                for v, _ in imp.literals():
                    weakened_mask = imp.care_mask & ~(1 << v)
                    weakened = (weakened_mask, imp.values & weakened_mask)
                    assert any(
                        (z & weakened[0]) == weakened[1] for z in zeros
                    ), "dropping a literal should cover some zero"


class TestDeterminism:
    def test_identical_inputs_identical_output(self):
        rng = random.Random(7)
        for _ in range(20):
            ones = set(rng.sample(range(32), 6))
            zeros = set(rng.sample(range(32), 6)) - ones
            first = minimize(ones, zeros, 5)
            second = minimize(set(reversed(sorted(ones))), zeros, 5)
            assert first == second

    def test_clause_order_is_canonical(self):
        dnf = minimize({0b01, 0b10, 0b11}, {0b00}, 2)
        keys = [imp.sort_key() for imp in dnf]
        assert keys == sorted(keys)


class TestGuardrails:
    def test_conflict_error_lists_offenders(self):
        with pytest.raises(MintermConflictError) as exc:
            minimize({1, 2}, {2, 3}, 2)
        assert exc.value.offenders == (2,)

    def test_variable_guardrail(self):
        with pytest.raises(TooManyVariablesError) as exc:
            minimize({0}, {1}, 25)
        assert "withrf" in str(exc.value).lower()
        assert exc.value.n_vars == 25

    def test_guardrail_is_configurable(self):
        assert minimize({0}, {1}, 25, max_vars=30)

    def test_cooperative_timeout(self):
        ones = set(range(0, 64, 2))
        zeros = set(range(1, 64, 2))
        with pytest.raises(MinimizationTimeout) as exc:
            minimize(ones, zeros, 6, deadline=time.monotonic() - 1.0)
        assert exc.value.primes_found >= 0

    def test_out_of_range_minterm(self):
        with pytest.raises(ValueError):
            minimize({4}, set(), 2)

    def test_implicant_invariant(self):
        with pytest.raises(ValueError):
            Implicant(0b01, 0b10)


class TestEvaluate:
    def test_evaluate_dnf_matches_cover(self):
        dnf = minimize({0b101, 0b111}, {0b000, 0b010}, 3)
        for m in range(8):
            assert evaluate_dnf(dnf, m) == dnf_truth(dnf, m)
