"""The ten parameter-free perception rules.

Each rule maps an objective menu onto a perceived pair of lotteries. New rules are
added by declaring a `RuleId` member and registering a perception function in
``PERCEPTIONS``.
"""

from typing import Callable, Dict, Tuple

import numpy as np

from src.lotteries import ActTable, Lottery, Menu, contrast
from src.rules.base import AttentionConstant, PerceivedMenu, RuleId
from src.utils.errors import ValidationError

MODAL_TIE_TOL = 1e-12
PW_FLOOR = 0.2
PW_CAP = 0.8

Perception = Callable[[Menu, AttentionConstant], Tuple[Lottery, Lottery]]


def modal_payoff(lottery: Lottery) -> float:
    """Most likely payoff, ties broken toward the highest payoff.

    >>> from src.lotteries import make_lottery
    >>> modal_payoff(make_lottery([0, 100], [0.5, 0.5]))
    100.0
    """
    probs = np.asarray(lottery.probs)
    tied = probs >= probs.max() - MODAL_TIE_TOL
    return float(np.asarray(lottery.prizes)[tied].max())


def pw_distort(lottery: Lottery) -> Lottery:
    """Coarse probability weighting: clamp every probability into [0.2, 0.8], then renormalise."""
    weights = np.clip(np.asarray(lottery.probs), PW_FLOOR, PW_CAP)
    return Lottery(lottery.prizes, tuple((weights / weights.sum()).tolist()))


def state_contrasts(table: ActTable) -> np.ndarray:
    a = table.payoffs(1)
    b = table.payoffs(2)
    return np.abs(a - b) / (np.abs(a) + np.abs(b) + 1.0)


def salient_state(table: ActTable) -> int:
    """Index (0-based) of the first state attaining the maximal contrast."""
    return int(np.argmax(state_contrasts(table)))


def regret_severity(table: ActTable, side: int) -> float:
    """Worst foregone payoff of alternative ``side`` across states, floored at zero."""
    own = table.payoffs(side)
    other = table.payoffs(2 if side == 1 else 1)
    return float(max(np.max(other - own), 0.0))


def disappointment_severity(lottery: Lottery) -> float:
    """Largest contrast between the modal reference payoff and a strictly lower payoff."""
    reference = modal_payoff(lottery)
    lower = [z for z in lottery.prizes if z < reference]
    if not lower:
        return 0.0
    return max(contrast(reference, z) for z in lower)


def _identity(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    return menu.marginals


def _minimum(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    first, second = menu.marginals
    return Lottery.sure(first.min_prize), Lottery.sure(second.min_prize)


def _maximum(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    first, second = menu.marginals
    return Lottery.sure(first.max_prize), Lottery.sure(second.max_prize)


def _modal(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    first, second = menu.marginals
    return Lottery.sure(modal_payoff(first)), Lottery.sure(modal_payoff(second))


def _weighting(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    first, second = menu.marginals
    return pw_distort(first), pw_distort(second)


def _salience(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    table = menu.joint
    state = salient_state(table)
    return Lottery.sure(table.payoffs_a[state]), Lottery.sure(table.payoffs_b[state])


def _regret(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    table = menu.joint
    return Lottery.sure(-regret_severity(table, 1)), Lottery.sure(-regret_severity(table, 2))


def _disappointment(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    first, second = menu.marginals
    return (
        Lottery.sure(-disappointment_severity(first)),
        Lottery.sure(-disappointment_severity(second)),
    )


def _attend_first(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    return menu.marginals[0], Lottery.sure(-m.m_big)


def _attend_second(menu: Menu, m: AttentionConstant) -> Tuple[Lottery, Lottery]:
    return Lottery.sure(-m.m_big), menu.marginals[1]


PERCEPTIONS: Dict[RuleId, Perception] = {
    RuleId.ID: _identity,
    RuleId.MMN: _minimum,
    RuleId.MMX: _maximum,
    RuleId.MAP: _modal,
    RuleId.PW: _weighting,
    RuleId.SAL: _salience,
    RuleId.REG: _regret,
    RuleId.DIS: _disappointment,
    RuleId.A1: _attend_first,
    RuleId.A2: _attend_second,
}


def perceive(rule: RuleId, menu: Menu, m: AttentionConstant) -> PerceivedMenu:
    """Applies rule ``rule`` to ``menu``.

    :param rule: A `RuleId` or its name.
    :param menu: The objective menu.
    :param m: The attention constant of the dataset the menu belongs to.
    :return: The perceived menu.
    """
    rule = RuleId.parse(rule)
    try:
        perception = PERCEPTIONS[rule]
    except KeyError:
        raise ValidationError(f"rule {rule} has no registered perception") from None
    perceived_a, perceived_b = perception(menu, m)
    return PerceivedMenu(perceived_a, perceived_b, rule)


def recommendation_side(rule: RuleId, menu: Menu, m: AttentionConstant) -> int:
    """Side (1 or 2) whose perceived lottery strictly dominates under ``rule``; 0 if none."""
    return perceive(rule, menu, m).side()
