from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.admissibility import Dataset, RecommendationTable, recommendation_table
from src.rules import BASELINE_LIBRARY, RuleId
from src.searcher import GreedySearcher
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger
from src.utils.rng import STREAM_PERMUTATION, SeedLike, child_seed, make_rng

log = ContextLogger(__name__)


def attention_floor(alpha: float) -> float:
    """Concentration ``alpha^2 + (1 - alpha)^2`` reached by the attention rules alone."""
    return alpha**2 + (1.0 - alpha) ** 2


def permute_choices(dataset: Dataset, sigma: Sequence[int]) -> Dataset:
    """Keeps the menus and replaces choice ``d_t`` by ``d_sigma(t)`` (0-based ``sigma``)."""
    sigma = np.asarray(sigma, dtype=np.int64)
    if sigma.shape != (len(dataset),):
        raise ValidationError(f"permutation of length {sigma.size} for {len(dataset)} observations")
    if not np.array_equal(np.sort(sigma), np.arange(len(dataset))):
        raise ValidationError("sigma is not a permutation of the observation indices")
    return dataset.with_choices(dataset.choices[sigma])


def match_shares(table: RecommendationTable, choices: Sequence[int]) -> np.ndarray:
    """Per-rule share of menus where the rule's recommended side equals the choice."""
    return table.strict(choices).mean(axis=0)


def match_share(table: RecommendationTable, choices: Sequence[int]) -> float:
    """Largest feasible rule share ``max_f M_f``; at least ``max(alpha, 1 - alpha)``."""
    return float(match_shares(table, choices).max())


@dataclass(frozen=True)
class PermTestResult:
    """Conditional permutation test of excess rule concentration."""

    observed_mrci: float
    observed_numerator: int
    t_total: int
    num_permutations: int
    null_samples: Tuple[float, ...]
    null_numerators: Tuple[int, ...]
    null_match_shares: Tuple[float, ...]
    exceed_count: int
    p_value: float
    p_value_raw: float
    z_count: int
    alpha: float
    seed: SeedLike
    restarts: int
    inner_restarts: int

    @property
    def mc_std_error(self) -> float:
        """Monte Carlo standard error of the raw exceedance fraction."""
        p = self.p_value_raw
        return float(np.sqrt(p * (1.0 - p) / self.num_permutations))


def _permuted_runs(
    table: RecommendationTable,
    choices: np.ndarray,
    seed: SeedLike,
    inner_restarts: int,
    indices: Iterable[int],
) -> List[Tuple[int, int, float]]:
    runs = []
    for b in indices:
        permuted = choices[make_rng(seed, STREAM_PERMUTATION, b).permutation(choices.size)]
        matrix = table.matrix(permuted)
        searcher = GreedySearcher(restarts=inner_restarts, seed=child_seed(seed, STREAM_PERMUTATION, b))
        runs.append((b, searcher.run(matrix).numerator, float(matrix.counts.max()) / choices.size))
    return runs


def permutation_test(
    dataset: Dataset,
    num_permutations: int = 500,
    inner_restarts: int = 100,
    restarts: int = 100,
    seed: SeedLike = 0,
    library: Iterable[RuleId] = BASELINE_LIBRARY,
    n_jobs: int = 1,
) -> PermTestResult:
    """Right-tail permutation p-value of the observed MRCI, conditional on the choice count.

    The observed and the permuted datasets are scored with the same greedy statistic:
    the observed one with ``restarts`` restarts, permutation ``b`` with ``inner_restarts``
    restarts after shuffling the choices with stream ``(seed, b)``.

    :param dataset: The subject's dataset.
    :param num_permutations: B.
    :param inner_restarts: R, greedy restarts per permuted dataset.
    :param restarts: K, greedy restarts for the observed dataset.
    :param seed: Seed of the whole test.
    :param library: Rule library.
    :param n_jobs: joblib workers over chunks of permutations.
    :return: The `PermTestResult`, with p-value ``(1 + count) / (1 + B)``.
    """
    if num_permutations < 1:
        raise ValidationError(f"num_permutations must be >= 1, got {num_permutations}")
    if restarts < 1 or inner_restarts < 1:
        raise ValidationError(f"restarts must be >= 1, got K={restarts}, R={inner_restarts}")
    table = recommendation_table(dataset, library)
    choices = dataset.choices
    observed = GreedySearcher(restarts=restarts, seed=seed).run(table.matrix(choices, dataset.subject_id))

    if n_jobs == 1:
        runs = _permuted_runs(table, choices, seed, inner_restarts, range(num_permutations))
    else:
        chunks = np.array_split(np.arange(num_permutations), min(num_permutations, 4 * abs(n_jobs)))
        parts = Parallel(n_jobs=n_jobs, backend="loky")(
            delayed(_permuted_runs)(table, choices, seed, inner_restarts, chunk.tolist())
            for chunk in chunks
            if chunk.size
        )
        runs = [run for part in parts for run in part]
    runs.sort(key=lambda run: run[0])

    numerators = tuple(numerator for _, numerator, _ in runs)
    exceed = sum(numerator >= observed.numerator for numerator in numerators)
    t_squared = len(dataset) ** 2
    result = PermTestResult(
        observed_mrci=observed.value,
        observed_numerator=observed.numerator,
        t_total=len(dataset),
        num_permutations=num_permutations,
        null_samples=tuple(numerator / t_squared for numerator in numerators),
        null_numerators=numerators,
        null_match_shares=tuple(share for _, _, share in runs),
        exceed_count=exceed,
        p_value=(1 + exceed) / (1 + num_permutations),
        p_value_raw=exceed / num_permutations,
        z_count=dataset.z_count,
        alpha=dataset.alpha,
        seed=seed,
        restarts=restarts,
        inner_restarts=inner_restarts,
    )
    log.bind(subject=dataset.subject_id).info(
        f"Permutation test: MRCI={result.observed_mrci:.4f}, p={result.p_value:.4f} (B={num_permutations})"
    )
    return result
