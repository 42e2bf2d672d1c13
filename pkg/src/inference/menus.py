from typing import Sequence, Tuple

import numpy as np

from src.lotteries import Menu, make_lottery
from src.utils.errors import ValidationError
from src.utils.rng import STREAM_MENUS, SeedLike, make_rng

# probabilities of the high outcome, on the grid used by two-outcome risk problems
HIGH_PROBABILITIES: Tuple[float, ...] = (
    0.01, 0.05, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95, 0.99, 1.0,
)


def sample_menus(
    num_menus: int,
    seed: SeedLike = 0,
    low: int = -50,
    high: int = 150,
    probabilities: Sequence[float] = HIGH_PROBABILITIES,
) -> Tuple[Menu, ...]:
    """Draws two-outcome risk menus ``(H w.p. pH, L otherwise)`` with integer payoffs.

    Menus whose two alternatives coincide are redrawn.

    :param num_menus: Number of menus T.
    :param seed: Seed of the menu stream.
    :param low: Smallest payoff.
    :param high: Largest payoff.
    :param probabilities: Grid the high-outcome probability is drawn from.
    """
    if num_menus < 1:
        raise ValidationError(f"num_menus must be >= 1, got {num_menus}")
    if low >= high:
        raise ValidationError(f"payoff range [{low}, {high}] is empty")
    rng = make_rng(seed, STREAM_MENUS)
    grid = np.asarray(probabilities, dtype=float)

    def draw():
        low_payoff, high_payoff = np.sort(rng.integers(low, high + 1, size=2))
        p = float(rng.choice(grid))
        return make_lottery([high_payoff, low_payoff], [p, 1.0 - p])

    menus = []
    while len(menus) < num_menus:
        first, second = draw(), draw()
        if first != second:
            menus.append(Menu.of_lotteries(first, second))
    return tuple(menus)
