from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Sequence, Tuple

from src.lotteries import Lottery, Menu, fsd_strict
from src.utils.errors import ValidationError


class RuleId(str, Enum):
    """Identifiers of the baseline perception rules, in their fixed declaration order."""

    ID = "ID"
    MMN = "MMN"
    MMX = "MMX"
    MAP = "MAP"
    PW = "PW"
    SAL = "SAL"
    REG = "REG"
    DIS = "DIS"
    A1 = "A1"
    A2 = "A2"

    @classmethod
    def parse(cls, name: object) -> "RuleId":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().upper())
        except ValueError:
            raise ValidationError(
                f"unknown rule id {name!r}, expected one of {[r.value for r in cls]}"
            ) from None

    @property
    def is_attention(self) -> bool:
        return self in ATTENTION_RULES

    def __str__(self) -> str:
        return self.value


RULE_ORDER: Dict[RuleId, int] = {rule: i for i, rule in enumerate(RuleId)}
ATTENTION_RULES = frozenset({RuleId.A1, RuleId.A2})
BASELINE_LIBRARY: Tuple[RuleId, ...] = tuple(RuleId)


def parse_library(names: Iterable[object], force_attention: bool = True) -> Tuple[RuleId, ...]:
    """Parses rule names into a deduplicated library in declaration order.

    :param names: Rule names or `RuleId` values.
    :param force_attention: Whether A1 and A2 are added when missing.
    :return: The library as a tuple of `RuleId`.
    """
    rules = {RuleId.parse(name) for name in names}
    if force_attention:
        rules |= ATTENTION_RULES
    if not rules:
        raise ValidationError("the rule library is empty")
    return tuple(sorted(rules, key=RULE_ORDER.__getitem__))


@dataclass(frozen=True)
class AttentionConstant:
    """The dominated sure payoff ``-M`` used by the attention rules."""

    m_big: float

    @classmethod
    def from_menus(cls, menus: Sequence[Menu]) -> "AttentionConstant":
        if not menus:
            raise ValidationError("cannot derive the attention constant from no menus")
        return cls(max(menu.max_abs_payoff for menu in menus) + 1.0)

    def check(self, menus: Sequence[Menu]) -> None:
        worst = max(menu.max_abs_payoff for menu in menus)
        if not self.m_big > worst:
            raise ValidationError(
                f"attention constant {self.m_big} must exceed the largest |payoff| {worst}"
            )


@dataclass(frozen=True)
class PerceivedMenu:
    perceived_a: Lottery
    perceived_b: Lottery
    rule: RuleId

    def side(self) -> int:
        """The alternative the rule strictly recommends: 1, 2, or 0 when neither dominates."""
        if fsd_strict(self.perceived_a, self.perceived_b):
            return 1
        if fsd_strict(self.perceived_b, self.perceived_a):
            return 2
        return 0
