from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.admissibility.dataset import Dataset, Observation
from src.lotteries import Menu
from src.rules import (
    ATTENTION_RULES,
    BASELINE_LIBRARY,
    AttentionConstant,
    RuleId,
    parse_library,
    recommendation_side,
)
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger

log = ContextLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class RecommendationTable:
    """Choice-independent side each rule strictly recommends at each menu (1, 2, or 0)."""

    rules: Tuple[RuleId, ...]
    sides: np.ndarray

    def __post_init__(self) -> None:
        sides = np.asarray(self.sides, dtype=np.int8)
        if sides.ndim != 2 or sides.shape[1] != len(self.rules):
            raise ValidationError(
                f"sides must be a T x {len(self.rules)} array, got shape {sides.shape}"
            )
        if not np.isin(sides, (0, 1, 2)).all():
            raise ValidationError("recommendation sides must be 0, 1 or 2")
        object.__setattr__(self, "sides", _frozen(sides))

    @property
    def num_rows(self) -> int:
        return self.sides.shape[0]

    def strict(self, choices: Sequence[int]) -> np.ndarray:
        """Boolean T x |F| strict-discriminability indicator for the given choice sides."""
        chosen = np.asarray(choices, dtype=np.int8)
        if chosen.shape != (self.num_rows,):
            raise ValidationError(f"expected {self.num_rows} choices, got shape {chosen.shape}")
        first = (chosen == 1)[:, None]
        return ((self.sides == 1) & first) | ((self.sides == 2) & ~first)

    def matrix(self, choices: Sequence[int], subject_id: str = "") -> "AdmissibilityMatrix":
        return AdmissibilityMatrix(self.rules, self.strict(choices), subject_id)


@dataclass(frozen=True, eq=False)
class AdmissibilityMatrix:
    """T x |F| boolean matrix ``a[t, f]``: rule ``f`` strictly discriminates the choice at ``t``."""

    rules: Tuple[RuleId, ...]
    admissible: np.ndarray
    subject_id: str = ""

    def __post_init__(self) -> None:
        rules = tuple(RuleId.parse(rule) for rule in self.rules)
        if len(set(rules)) != len(rules):
            raise ValidationError(f"duplicate rules in {rules}")
        admissible = np.asarray(self.admissible, dtype=bool)
        if admissible.ndim != 2 or admissible.shape[1] != len(rules) or admissible.shape[0] < 1:
            raise ValidationError(
                f"admissibility must be a T x {len(rules)} array with T >= 1, "
                f"got shape {admissible.shape}"
            )
        empty = np.flatnonzero(~admissible.any(axis=1))
        if empty.size:
            raise ValidationError(f"empty strict set at rows {(empty + 1).tolist()}")
        if RuleId.A1 in rules and RuleId.A2 in rules:
            a1 = admissible[:, rules.index(RuleId.A1)]
            a2 = admissible[:, rules.index(RuleId.A2)]
            if not np.all(a1 ^ a2):
                raise ValidationError("attention parity violated: A1 and A2 must split the rows")
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "admissible", _frozen(admissible))

    @property
    def num_rows(self) -> int:
        return self.admissible.shape[0]

    @property
    def num_rules(self) -> int:
        return len(self.rules)

    @property
    def counts(self) -> np.ndarray:
        """Per-rule coverage counts, in column order."""
        return self.admissible.sum(axis=0)

    @property
    def alpha(self) -> Optional[float]:
        """Share of first-listed choices, read off the A1 column (``None`` without attention rules)."""
        if RuleId.A1 in self.rules:
            return float(self.column(RuleId.A1).mean())
        if RuleId.A2 in self.rules:
            return 1.0 - float(self.column(RuleId.A2).mean())
        return None

    def index(self, rule: RuleId) -> int:
        rule = RuleId.parse(rule)
        try:
            return self.rules.index(rule)
        except ValueError:
            raise ValidationError(f"rule {rule} is not in the library {self.rules}") from None

    def column(self, rule: RuleId) -> np.ndarray:
        return self.admissible[:, self.index(rule)]

    def row_set(self, t: int) -> FrozenSet[RuleId]:
        """Strict set at 0-based row ``t``."""
        return frozenset(rule for rule, ok in zip(self.rules, self.admissible[t]) if ok)

    @cached_property
    def bitmasks(self) -> Tuple[int, ...]:
        """Per-rule row sets packed into integers (bit ``t`` set iff ``a[t, f]``)."""
        masks = []
        for j in range(self.num_rules):
            mask = 0
            for t in np.flatnonzero(self.admissible[:, j]):
                mask |= 1 << int(t)
            masks.append(mask)
        return tuple(masks)

    def without(self, rules: Iterable[RuleId]) -> "AdmissibilityMatrix":
        drop = {RuleId.parse(rule) for rule in rules}
        if drop & ATTENTION_RULES:
            raise ValidationError("attention rules A1/A2 cannot be removed from the library")
        keep = [j for j, rule in enumerate(self.rules) if rule not in drop]
        return AdmissibilityMatrix(
            tuple(self.rules[j] for j in keep), self.admissible[:, keep], self.subject_id
        )

    def with_column(self, rule: RuleId, column: Sequence[bool]) -> "AdmissibilityMatrix":
        rule = RuleId.parse(rule)
        if rule in self.rules:
            raise ValidationError(f"rule {rule} is already in the library")
        column = np.asarray(column, dtype=bool).reshape(-1, 1)
        return AdmissibilityMatrix(
            self.rules + (rule,), np.hstack([self.admissible, column]), self.subject_id
        )

    def replicate(self, k: int) -> "AdmissibilityMatrix":
        if k < 1:
            raise ValidationError(f"replication factor must be >= 1, got {k}")
        return AdmissibilityMatrix(self.rules, np.tile(self.admissible, (k, 1)), self.subject_id)


def _sides_for(menus: Sequence[Menu], rules: Sequence[RuleId], m: AttentionConstant) -> List[List[int]]:
    return [[recommendation_side(rule, menu, m) for rule in rules] for menu in menus]


def recommendation_table(
    dataset: Dataset,
    library: Iterable[RuleId] = BASELINE_LIBRARY,
    n_jobs: int = 1,
) -> RecommendationTable:
    """Perceives every menu of ``dataset`` under every rule of ``library`` once.

    The result depends on the menus only and is memoised in the dataset's cache, which
    permuted copies of the dataset share.

    :param dataset: The subject's dataset.
    :param library: Rules to evaluate (A1/A2 are always added).
    :param n_jobs: joblib workers; rows are split into contiguous chunks.
    :return: The `RecommendationTable`.
    """
    rules = parse_library(library)
    key = ("recommendations", rules)
    if key in dataset.cache:
        return dataset.cache[key]

    menus = dataset.menus
    if n_jobs == 1 or len(menus) < 2:
        rows = _sides_for(menus, rules, dataset.attention)
    else:
        chunks = np.array_split(np.arange(len(menus)), min(len(menus), 4 * abs(n_jobs)))
        parts = Parallel(n_jobs=n_jobs, backend="loky")(
            delayed(_sides_for)([menus[t] for t in chunk], rules, dataset.attention)
            for chunk in chunks
            if chunk.size
        )
        rows = [row for part in parts for row in part]

    table = RecommendationTable(rules, np.asarray(rows, dtype=np.int8))
    dataset.cache[key] = table
    log.bind(subject=dataset.subject_id).debug(
        f"Perceived {len(menus)} menus under {len(rules)} rules"
    )
    return table


def strict_set(
    obs: Observation, library: Iterable[RuleId], m: AttentionConstant
) -> FrozenSet[RuleId]:
    """Rules whose perceived chosen alternative strictly dominates the perceived other one."""
    wanted = 1 if obs.choice == 1 else 2
    return frozenset(
        rule for rule in parse_library(library) if recommendation_side(rule, obs.menu, m) == wanted
    )


def admissibility_matrix(
    dataset: Dataset,
    library: Iterable[RuleId] = BASELINE_LIBRARY,
    n_jobs: int = 1,
) -> AdmissibilityMatrix:
    """Builds the admissibility matrix of ``dataset`` under ``library``."""
    table = recommendation_table(dataset, library, n_jobs=n_jobs)
    return table.matrix(dataset.choices, dataset.subject_id)


def coverage(matrix: AdmissibilityMatrix) -> Dict[RuleId, float]:
    """Share of menus at which each rule is strictly admissible."""
    shares = matrix.counts / matrix.num_rows
    return {rule: float(share) for rule, share in zip(matrix.rules, shares)}
