from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

from src.lotteries.coupling import acts_to_lotteries, product_coupling
from src.lotteries.lottery import ActTable, Lottery
from src.utils.errors import ValidationError

MARGINAL_FORM = "marginal"
JOINT_FORM = "joint"


@dataclass(frozen=True)
class Menu:
    """A binary menu, given either as two marginal lotteries or as one act table.

    Context rules read :attr:`joint`; marginal-form menus fall back to the product coupling.
    """

    lotteries: Optional[Tuple[Lottery, Lottery]] = None
    acts: Optional[ActTable] = None
    label_a: str = "A"
    label_b: str = "B"

    def __post_init__(self) -> None:
        if (self.lotteries is None) == (self.acts is None):
            raise ValidationError("a menu needs exactly one of marginal lotteries or an act table")
        if self.lotteries is not None and len(self.lotteries) != 2:
            raise ValidationError("a marginal-form menu holds exactly two lotteries")

    @classmethod
    def of_lotteries(
        cls, first: Lottery, second: Lottery, label_a: str = "A", label_b: str = "B"
    ) -> "Menu":
        return cls(lotteries=(first, second), label_a=label_a, label_b=label_b)

    @classmethod
    def of_acts(cls, table: ActTable, label_a: str = "A", label_b: str = "B") -> "Menu":
        return cls(acts=table, label_a=label_a, label_b=label_b)

    @property
    def form(self) -> str:
        return JOINT_FORM if self.acts is not None else MARGINAL_FORM

    @cached_property
    def marginals(self) -> Tuple[Lottery, Lottery]:
        if self.lotteries is not None:
            return self.lotteries
        return acts_to_lotteries(self.acts)

    @cached_property
    def joint(self) -> ActTable:
        if self.acts is not None:
            return self.acts
        return product_coupling(*self.lotteries)

    @property
    def max_abs_payoff(self) -> float:
        first, second = self.marginals
        return max(abs(first.min_prize), abs(first.max_prize), abs(second.min_prize), abs(second.max_prize))

    def swapped(self) -> "Menu":
        """The mirrored menu, second alternative listed first."""
        if self.acts is not None:
            return Menu(acts=self.acts.swapped(), label_a=self.label_b, label_b=self.label_a)
        first, second = self.lotteries
        return Menu(lotteries=(second, first), label_a=self.label_b, label_b=self.label_a)
