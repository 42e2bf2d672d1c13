"""Tests for the heuristic and exact concentration solvers."""

import itertools
from fractions import Fraction
from typing import Iterator, Optional, Tuple

import numpy as np
import pytest

from src.admissibility import AdmissibilityMatrix
from src.rules import RuleId
from src.searcher import (
    AutoSearcher,
    BranchAndBoundSearcher,
    GreedySearcher,
    bench_exact,
    cap_bound,
    fill_bound,
    greedy_pass,
    hhi,
    mrci_exact,
    mrci_heuristic,
    popularity_order,
    random_admissibility,
    summarize,
)
from src.utils.errors import ValidationError

R = RuleId
NO_BUDGET = BranchAndBoundSearcher(time_budget=None)


def _brute_force(matrix: AdmissibilityMatrix) -> int:
    options = [np.flatnonzero(row) for row in matrix.admissible]
    best = 0
    for choice in itertools.product(*options):
        counts = np.bincount(choice, minlength=matrix.num_rules)
        best = max(best, int(np.sum(counts**2)))
    return best


def _small_matrix(seed: int) -> AdmissibilityMatrix:
    rng = np.random.default_rng(seed)
    num_rows = int(rng.integers(1, 8))
    admissible = rng.random((num_rows, 4)) < 0.4
    empty = ~admissible.any(axis=1)
    admissible[empty, rng.integers(0, 4, size=int(empty.sum()))] = True
    return AdmissibilityMatrix((R.MMN, R.MMX, R.SAL, R.REG), admissible)


def _partitions(total: int, max_parts: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Non-increasing positive parts summing to ``total``: every share vector on the grid up to order."""
    largest = total if largest is None else largest
    if total == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(total, largest), 0, -1):
        for rest in _partitions(total - first, max_parts - 1, first):
            yield (first,) + rest


class TestConcentration:
    @pytest.mark.parametrize(
        "counts, t_total, expected",
        [([7], 7, 1.0), ([6, 1], 7, 37 / 49), ([4, 3], 7, 25 / 49), ([1, 1, 1, 1], 4, 0.25)],
    )
    def test_hhi(self, counts, t_total, expected):
        assert hhi(counts, t_total) == pytest.approx(expected, abs=1e-12)

    def test_hhi_rejects_bad_counts(self):
        with pytest.raises(ValidationError):
            hhi([3, 3], 7)
        with pytest.raises(ValidationError):
            hhi([-1, 8], 7)

    def test_cap_bound_matches_grid_search(self):
        grid = 20
        best = {}
        for parts in _partitions(grid, max_parts=len(R)):
            largest, value = parts[0], sum(n * n for n in parts)
            if 2 * largest >= grid:
                assert value / grid**2 <= cap_bound(largest / grid) + 1e-12
                best[largest] = max(best.get(largest, 0), value)

        assert sorted(best) == list(range(grid // 2, grid + 1))
        for largest, value in best.items():
            assert cap_bound(largest / grid) == pytest.approx(value / grid**2, abs=1e-12)

    def test_cap_bound_domain(self):
        with pytest.raises(ValidationError):
            cap_bound(0.4)

    @pytest.mark.parametrize(
        "capacities, remaining, expected",
        [([3, 2, 2], 4, 13), ([], 0, 0), ([5], 3, 9), ([1, 1, 1], 3, 3)],
    )
    def test_fill_bound(self, capacities, remaining, expected):
        assert fill_bound(capacities, remaining) == expected


class TestToySolvers:
    """Both solvers on the seven-menu worked example."""

    def test_heuristic(self, toy_matrix):
        result = GreedySearcher(restarts=100, seed=0).run(toy_matrix)

        assert result.fraction == Fraction(37, 49)
        assert result.value == pytest.approx(37 / 49, abs=1e-12)
        assert not result.certified
        assert result.counts[R.SAL] == 6

    def test_exact(self, toy_matrix):
        result = mrci_exact(toy_matrix)

        assert result.fraction == Fraction(37, 49)
        assert result.certified
        result.assignment.check(toy_matrix)

    def test_exact_is_certified_at_the_root(self, toy_matrix):
        result = NO_BUDGET.run(toy_matrix)

        assert result.value == pytest.approx(cap_bound(6 / 7), abs=1e-12)
        assert result.certified
        assert result.nodes == 0

    def test_without_salience(self, toy_matrix):
        reduced = toy_matrix.without([R.SAL])

        assert mrci_exact(reduced).fraction == Fraction(25, 49)
        assert mrci_heuristic(reduced, restarts=100).fraction == Fraction(25, 49)

    def test_popularity_order(self, toy_matrix):
        order = popularity_order(toy_matrix)

        assert order[:3] == (R.SAL, R.REG, R.A1)
        assert order[-1] == R.ID

    def test_greedy_pass(self, toy_matrix):
        assignment = greedy_pass(toy_matrix, popularity_order(toy_matrix))

        assert assignment.rule_of == (R.SAL, R.A1, R.SAL, R.SAL, R.SAL, R.SAL, R.SAL)
        assert assignment.numerator == 37

    def test_greedy_pass_needs_a_permutation(self, toy_matrix):
        with pytest.raises(ValidationError):
            greedy_pass(toy_matrix, [R.SAL, R.REG])


class TestSolverProperties:
    def test_single_menu(self):
        matrix = AdmissibilityMatrix((R.SAL, R.A1, R.A2), np.array([[True, False, True]]))

        assert GreedySearcher(restarts=3).run(matrix).value == 1.0
        assert NO_BUDGET.run(matrix).value == 1.0

    def test_heuristic_is_deterministic(self, random_matrices):
        for matrix in random_matrices[:20]:
            first = GreedySearcher(restarts=30, seed=(9, 1)).run(matrix)
            second = GreedySearcher(restarts=30, seed=(9, 1)).run(matrix)
            assert first.numerator == second.numerator
            assert first.assignment == second.assignment

    def test_parallel_restarts_match_serial(self, random_matrices):
        for matrix in random_matrices[:5]:
            serial = GreedySearcher(restarts=40, seed=3).run(matrix)
            parallel = GreedySearcher(restarts=40, seed=3, n_jobs=2).run(matrix)
            assert serial.numerator == parallel.numerator

    def test_bounds(self, random_matrices):
        for matrix in random_matrices:
            result = NO_BUDGET.run(matrix)
            result.assignment.check(matrix)
            alpha = matrix.alpha
            top = matrix.counts.max() / matrix.num_rows

            assert result.assignment.numerator == result.numerator
            assert alpha**2 + (1 - alpha) ** 2 <= result.value + 1e-12
            assert top**2 <= result.value + 1e-12
            assert result.value <= cap_bound(top) + 1e-12
            assert result.value <= 1.0

    def test_full_column_iff_one(self, random_matrices):
        for matrix in random_matrices:
            full_column = bool(matrix.admissible.all(axis=0).any())
            assert (NO_BUDGET.run(matrix).value == 1.0) == full_column

    def test_replication_invariance(self, random_matrices):
        for matrix in random_matrices[:30]:
            replicated = matrix.replicate(2)
            assert NO_BUDGET.run(replicated).value == pytest.approx(NO_BUDGET.run(matrix).value, abs=1e-12)
            greedy = GreedySearcher(restarts=20, seed=5)
            assert greedy.run(replicated).value == pytest.approx(greedy.run(matrix).value, abs=1e-12)

    def test_forced_singletons(self, random_matrices):
        for matrix in random_matrices:
            assignment = NO_BUDGET.run(matrix).assignment
            for t in np.flatnonzero(matrix.admissible.sum(axis=1) == 1):
                (only,) = matrix.row_set(int(t))
                assert assignment.rule_of[t] == only

    def test_adding_a_rule_never_lowers_the_optimum(self, random_matrices):
        rng = np.random.default_rng(17)
        for matrix in random_matrices:
            base = matrix.without([R.SAL])
            extended = base.with_column(R.SAL, rng.random(matrix.num_rows) < 0.5)
            assert NO_BUDGET.run(extended).numerator >= NO_BUDGET.run(base).numerator

    def test_exact_dominates_heuristic(self, random_matrices):
        for matrix in random_matrices:
            exact = NO_BUDGET.run(matrix)
            fast = GreedySearcher(restarts=10, seed=1).run(matrix)
            assert exact.certified
            assert fast.numerator <= exact.numerator

    def test_exact_matches_brute_force(self):
        for seed in range(60):
            matrix = _small_matrix(seed)
            assert NO_BUDGET.run(matrix).numerator == _brute_force(matrix)

    def test_budget_exhaustion_returns_uncertified_incumbent(self):
        rng = np.random.default_rng(0)
        rules = (R.ID, R.MMN, R.MMX, R.MAP, R.PW, R.SAL, R.REG, R.DIS)
        admissible = rng.random((200, len(rules))) < 0.3
        empty = ~admissible.any(axis=1)
        admissible[empty, rng.integers(0, len(rules), size=int(empty.sum()))] = True
        matrix = AdmissibilityMatrix(rules, admissible)

        result = BranchAndBoundSearcher(time_budget=1e-9, check_every=1).run(matrix)

        assert not result.certified
        result.assignment.check(matrix)
        assert result.assignment.numerator == result.numerator

    def test_invalid_settings(self):
        with pytest.raises(ValidationError):
            GreedySearcher(restarts=0)
        with pytest.raises(ValidationError):
            BranchAndBoundSearcher(time_budget=0)


class TestAutoSearcher:
    def test_small_library_is_solved_exactly(self, toy_matrix):
        result = AutoSearcher().run(toy_matrix)

        assert result.method == "exact"
        assert result.certified

    def test_large_library_falls_back_to_heuristic(self, toy_matrix):
        result = AutoSearcher(heuristic=GreedySearcher(restarts=10), max_exact_rules=4).run(toy_matrix)

        assert result.method == "heuristic"
        assert result.fraction == Fraction(37, 49)


@pytest.mark.slow
class TestBenchmark:
    """Heuristic against exact search on 200 seeded random instances."""

    def test_heuristic_agrees_with_exact(self):
        rows = bench_exact(instances=200, restarts=100, seed=0)
        agree, mean_gap, _ = summarize(rows)

        assert all(row.certified for row in rows)
        assert all(row.gap >= -1e-12 for row in rows)
        assert agree >= 0.95
        assert mean_gap <= 0.005
