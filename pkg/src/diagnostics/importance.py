from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from src.admissibility import AdmissibilityMatrix, Dataset, admissibility_matrix
from src.rules import ATTENTION_RULES, BASELINE_LIBRARY, RULE_ORDER, RuleId
from src.searcher import BaseSearcher, MrciResult
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger
from src.utils.rng import STREAM_ORDER, SeedLike, make_rng

log = ContextLogger(__name__)

DataLike = Union[Dataset, AdmissibilityMatrix]


def as_matrix(data: DataLike, library: Iterable[RuleId] = BASELINE_LIBRARY) -> AdmissibilityMatrix:
    if isinstance(data, AdmissibilityMatrix):
        return data
    return admissibility_matrix(data, library)


def effective_rules(mrci: float) -> float:
    """Effective number of rules ``1 / MRCI``."""
    if not mrci > 0:
        raise ValidationError(f"MRCI must be positive, got {mrci}")
    return 1.0 / mrci


def _gain(full: MrciResult, reduced: MrciResult) -> float:
    drop = Fraction(full.numerator - reduced.numerator, full.numerator)
    return float(min(max(drop, Fraction(0)), Fraction(1)))


def concentration_gain(
    data: DataLike,
    rule: RuleId,
    searcher: BaseSearcher,
    library: Iterable[RuleId] = BASELINE_LIBRARY,
    full: Optional[MrciResult] = None,
) -> float:
    """Relative drop of the MRCI when ``rule`` is removed from the library.

    Both solves use ``searcher``. A heuristic solve of the reduced library can land above
    the full one; the gain is then clamped at zero.

    :param data: A dataset, or its precomputed admissibility matrix.
    :param rule: A non-attention rule.
    :param searcher: The solver used for both terms.
    :param library: Library used when ``data`` is a dataset.
    :param full: Optional precomputed solve of the full library.
    :return: The gain in ``[0, 1]``.
    """
    rule = RuleId.parse(rule)
    if rule in ATTENTION_RULES:
        raise ValidationError(f"concentration gain is undefined for attention rule {rule}")
    matrix = as_matrix(data, library)
    if rule not in matrix.rules:
        return 0.0
    full = full or searcher.run(matrix)
    return _gain(full, searcher.run(matrix.without([rule])))


@dataclass(frozen=True)
class DeletionWalk:
    """One deletion order and the deletion-stable set it leaves behind."""

    order: Tuple[RuleId, ...]
    survivors: FrozenSet[RuleId]


def _walk_orders(
    matrix: AdmissibilityMatrix,
    searcher: BaseSearcher,
    target: int,
    seed: SeedLike,
    indices: Iterable[int],
) -> List[DeletionWalk]:
    candidates = [rule for rule in matrix.rules if rule not in ATTENTION_RULES]
    solved: Dict[FrozenSet[RuleId], int] = {}
    walks = []
    for k in indices:
        rng = make_rng(seed, STREAM_ORDER, k)
        order = tuple(candidates[j] for j in rng.permutation(len(candidates)))
        removed: FrozenSet[RuleId] = frozenset()
        for rule in order:
            trial = removed | {rule}
            if trial not in solved:
                solved[trial] = searcher.run(matrix.without(trial)).numerator
            if solved[trial] == target:
                removed = trial
        walks.append(DeletionWalk(order, frozenset(candidates) - removed))
    return walks


def deletion_walks(
    data: DataLike,
    num_orders: int = 100,
    seed: SeedLike = 0,
    searcher: Optional[BaseSearcher] = None,
    library: Iterable[RuleId] = BASELINE_LIBRARY,
    full: Optional[MrciResult] = None,
    n_jobs: int = 1,
) -> List[DeletionWalk]:
    """Runs ``num_orders`` seeded deletion walks over the non-attention rules.

    A rule is deleted when the MRCI of the reduced library still equals the full-library
    MRCI, compared as exact integer numerators. Orders are split into chunks across joblib
    workers; order ``k`` always draws from stream ``(seed, k)``.
    """
    if num_orders < 1:
        raise ValidationError(f"num_orders must be >= 1, got {num_orders}")
    if searcher is None:
        raise ValidationError("deletion walks need a searcher")
    matrix = as_matrix(data, library)
    target = (full or searcher.run(matrix)).numerator

    if n_jobs == 1:
        return _walk_orders(matrix, searcher, target, seed, range(num_orders))
    chunks = np.array_split(np.arange(num_orders), min(num_orders, 4 * abs(n_jobs)))
    parts = Parallel(n_jobs=n_jobs, backend="loky")(
        delayed(_walk_orders)(matrix, searcher, target, seed, chunk.tolist())
        for chunk in chunks
        if chunk.size
    )
    return [walk for part in parts for walk in part]


def stability_scores(
    data: DataLike,
    num_orders: int = 100,
    seed: SeedLike = 0,
    searcher: Optional[BaseSearcher] = None,
    library: Iterable[RuleId] = BASELINE_LIBRARY,
    walks: Optional[List[DeletionWalk]] = None,
    n_jobs: int = 1,
) -> Dict[RuleId, float]:
    """Share of deletion orders in which each non-attention rule survives."""
    matrix = as_matrix(data, library)
    if walks is None:
        walks = deletion_walks(matrix, num_orders, seed, searcher, n_jobs=n_jobs)
    candidates = [rule for rule in matrix.rules if rule not in ATTENTION_RULES]
    return {
        rule: sum(rule in walk.survivors for walk in walks) / len(walks) for rule in candidates
    }


@dataclass(frozen=True)
class DiagnosticsReport:
    mrci: float
    numerator: int
    t_total: int
    n_eff: float
    method: str
    gain: Dict[RuleId, float]
    stability: Dict[RuleId, float]
    walks: Tuple[DeletionWalk, ...] = field(default=(), repr=False)

    @property
    def orders(self) -> Tuple[Tuple[RuleId, ...], ...]:
        return tuple(walk.order for walk in self.walks)


def diagnose(
    data: DataLike,
    searcher: BaseSearcher,
    num_orders: int = 100,
    seed: SeedLike = 0,
    library: Iterable[RuleId] = BASELINE_LIBRARY,
    n_jobs: int = 1,
) -> DiagnosticsReport:
    """MRCI, effective number of rules, concentration gains and stability scores in one pass."""
    matrix = as_matrix(data, library)
    full = searcher.run(matrix)
    candidates = sorted(
        (rule for rule in matrix.rules if rule not in ATTENTION_RULES), key=RULE_ORDER.__getitem__
    )
    gain = {rule: concentration_gain(matrix, rule, searcher, full=full) for rule in candidates}
    walks = deletion_walks(matrix, num_orders, seed, searcher, full=full, n_jobs=n_jobs)
    stability = stability_scores(matrix, walks=walks)
    log.bind(subject=matrix.subject_id).info(
        f"MRCI={full.value:.4f} n_eff={effective_rules(full.value):.3f} over {num_orders} orders"
    )
    return DiagnosticsReport(
        mrci=full.value,
        numerator=full.numerator,
        t_total=full.t_total,
        n_eff=effective_rules(full.value),
        method=full.method,
        gain=gain,
        stability=stability,
        walks=tuple(walks),
    )
