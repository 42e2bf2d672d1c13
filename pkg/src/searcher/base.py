import abc
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from src.admissibility import AdmissibilityMatrix
from src.rules import RuleId
from src.utils.errors import ValidationError
from src.utils.rng import SeedLike

HEURISTIC = "heuristic"
EXACT = "exact"


def hhi_numerator(counts: Iterable[int]) -> int:
    return sum(int(n) * int(n) for n in counts)


def hhi(counts: Iterable[int], t_total: int) -> float:
    """Herfindahl-Hirschman index ``sum(n_f^2) / T^2`` of integer rule counts.

    >>> hhi([6, 1], 7)
    0.7551020408163265
    """
    counts = [int(n) for n in counts]
    if t_total < 1 or any(n < 0 for n in counts) or sum(counts) != t_total:
        raise ValidationError(f"counts {counts} do not sum to T={t_total}")
    return hhi_numerator(counts) / t_total**2


def cap_bound(m: float) -> float:
    """Largest HHI of shares that are each at most ``m``, for ``m`` in ``[1/2, 1]``."""
    if not 0.5 - 1e-12 <= m <= 1.0 + 1e-12:
        raise ValidationError(f"cap must lie in [0.5, 1], got {m}")
    return m**2 + (1.0 - m) ** 2


@dataclass(frozen=True)
class Assignment:
    """One admissible rule per menu, with the implied rule counts."""

    rules: Tuple[RuleId, ...]
    rule_of: Tuple[RuleId, ...]

    @property
    def t_total(self) -> int:
        return len(self.rule_of)

    @property
    def counts(self) -> Dict[RuleId, int]:
        counts = {rule: 0 for rule in self.rules}
        for rule in self.rule_of:
            counts[rule] += 1
        return counts

    @property
    def numerator(self) -> int:
        return hhi_numerator(self.counts.values())

    def check(self, matrix: AdmissibilityMatrix) -> None:
        """Raises unless every menu is assigned a rule admissible there."""
        if len(self.rule_of) != matrix.num_rows:
            raise ValidationError(
                f"assignment covers {len(self.rule_of)} menus, matrix has {matrix.num_rows}"
            )
        for t, rule in enumerate(self.rule_of):
            if not matrix.admissible[t, matrix.index(rule)]:
                raise ValidationError(f"rule {rule} is not admissible at menu {t + 1}")


@dataclass(frozen=True)
class MrciResult:
    """Maximal rule concentration found by a solver, kept as the exact ratio ``numerator / T^2``."""

    assignment: Assignment
    numerator: int
    t_total: int
    method: str
    restarts_used: int
    seed: Optional[SeedLike]
    certified: bool
    nodes: int = 0
    runtime: float = 0.0

    @property
    def value(self) -> float:
        return self.numerator / self.t_total**2

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.t_total**2)

    @property
    def counts(self) -> Dict[RuleId, int]:
        return self.assignment.counts

    def same_value(self, other: "MrciResult") -> bool:
        return self.numerator * other.t_total**2 == other.numerator * self.t_total**2


class BaseSearcher:
    """A solver for the maximal rule concentration of an admissibility matrix."""

    method: str = ""

    @staticmethod
    def greedy_counts(masks: Sequence[int], order: Sequence[int]) -> Tuple[int, ...]:
        """Claim counts of a greedy pass over column bitmasks, in ``order``."""
        covered = 0
        claims = [0] * len(masks)
        for j in order:
            new = masks[j] & ~covered
            if new:
                claims[j] = new.bit_count()
                covered |= new
        return tuple(claims)

    @abc.abstractmethod
    def run(self, matrix: AdmissibilityMatrix) -> MrciResult:
        pass
