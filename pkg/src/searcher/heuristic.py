import time
from typing import List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.admissibility import AdmissibilityMatrix
from src.rules import RULE_ORDER, RuleId
from src.searcher.base import HEURISTIC, Assignment, BaseSearcher, MrciResult, hhi_numerator
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger
from src.utils.rng import STREAM_RESTART, SeedLike, make_rng

log = ContextLogger(__name__)


def popularity_order(matrix: AdmissibilityMatrix) -> Tuple[RuleId, ...]:
    """Rules by descending coverage, ties broken by declaration order."""
    counts = matrix.counts
    ranked = sorted(
        range(matrix.num_rules), key=lambda j: (-int(counts[j]), RULE_ORDER[matrix.rules[j]])
    )
    return tuple(matrix.rules[j] for j in ranked)


def greedy_pass(matrix: AdmissibilityMatrix, order: Sequence[RuleId]) -> Assignment:
    """Walks ``order``; each rule claims every still-unassigned menu where it is admissible.

    :param matrix: The admissibility matrix.
    :param order: A permutation of ``matrix.rules``.
    :return: The resulting `Assignment`; it covers every menu since no row is empty.
    """
    order = tuple(RuleId.parse(rule) for rule in order)
    if sorted(order, key=RULE_ORDER.__getitem__) != sorted(matrix.rules, key=RULE_ORDER.__getitem__):
        raise ValidationError(f"order {order} is not a permutation of the library {matrix.rules}")
    rule_of: List = [None] * matrix.num_rows
    unassigned = np.ones(matrix.num_rows, dtype=bool)
    for rule in order:
        claimed = matrix.column(rule) & unassigned
        for t in np.flatnonzero(claimed):
            rule_of[t] = rule
        unassigned &= ~claimed
    return Assignment(matrix.rules, tuple(rule_of))


def _best_of(masks: Sequence[int], orders: np.ndarray, offset: int) -> Tuple[int, int]:
    best_value, best_index = -1, -1
    for i, order in enumerate(orders):
        value = hhi_numerator(BaseSearcher.greedy_counts(masks, order))
        if value > best_value:
            best_value, best_index = value, offset + i
    return best_value, best_index


class GreedySearcher(BaseSearcher):
    """Popularity-first greedy pass followed by seeded random-restart passes."""

    method = HEURISTIC

    def __init__(self, restarts: int = 100, seed: SeedLike = 0, n_jobs: int = 1) -> None:
        """
        :param restarts: Total number of greedy passes K, the popularity-first one included.
        :param seed: Seed (or seed key) of this solver's restart stream.
        :param n_jobs: joblib workers evaluating chunks of restarts.
        """
        if restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {restarts}")
        self.restarts = int(restarts)
        self.seed = seed
        self.n_jobs = n_jobs

    def orders(self, num_rules: int, first: Sequence[int]) -> np.ndarray:
        """Column orders of all K restarts: ``first`` then K-1 uniform permutations."""
        rng = make_rng(self.seed, STREAM_RESTART)
        shuffled = rng.permuted(np.tile(np.arange(num_rules), (self.restarts - 1, 1)), axis=1)
        return np.vstack([np.asarray(first, dtype=np.int64)[None, :], shuffled])

    def run(self, matrix: AdmissibilityMatrix) -> MrciResult:
        start = time.perf_counter()
        masks = matrix.bitmasks
        first = [matrix.index(rule) for rule in popularity_order(matrix)]
        orders = self.orders(matrix.num_rules, first)

        if self.n_jobs == 1:
            best_value, best_index = _best_of(masks, orders, 0)
        else:
            chunks = np.array_split(np.arange(len(orders)), min(len(orders), 4 * abs(self.n_jobs)))
            found = Parallel(n_jobs=self.n_jobs, backend="loky")(
                delayed(_best_of)(masks, orders[chunk], int(chunk[0])) for chunk in chunks if chunk.size
            )
            # earliest restart wins ties
            best_value, best_index = max(found, key=lambda vi: (vi[0], -vi[1]))

        order = [matrix.rules[j] for j in orders[best_index]]
        assignment = greedy_pass(matrix, order)
        result = MrciResult(
            assignment=assignment,
            numerator=best_value,
            t_total=matrix.num_rows,
            method=self.method,
            restarts_used=self.restarts,
            seed=self.seed,
            certified=False,
            nodes=self.restarts,
            runtime=time.perf_counter() - start,
        )
        log.bind(subject=matrix.subject_id).debug(
            f"Greedy MRCI {result.value:.6f} after {self.restarts} restarts (best at #{best_index + 1})"
        )
        return result


def mrci_heuristic(matrix: AdmissibilityMatrix, restarts: int = 100, seed: SeedLike = 0) -> MrciResult:
    return GreedySearcher(restarts=restarts, seed=seed).run(matrix)
