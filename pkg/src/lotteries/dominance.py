import numpy as np

from src.lotteries.lottery import PROB_TOL, Lottery


def fsd_weak(l1: Lottery, l2: Lottery) -> bool:
    """Weak first-order stochastic dominance of ``l1`` over ``l2``.

    Compares right-tail sums ``P(X >= z)`` at every prize in the union of both supports,
    with absolute tolerance ``1e-12``.
    """
    if l1.is_degenerate and l2.is_degenerate:
        return l1.prizes[0] >= l2.prizes[0]
    grid = np.union1d(l1.prizes, l2.prizes)
    return bool(np.all(l1.tail_sums(grid) >= l2.tail_sums(grid) - PROB_TOL))


def fsd_strict(l1: Lottery, l2: Lottery) -> bool:
    """Strict part of :func:`fsd_weak`: ``l1`` dominates ``l2`` and not conversely."""
    return fsd_weak(l1, l2) and not fsd_weak(l2, l1)


def contrast(x: float, y: float) -> float:
    """Diminishing-sensitivity contrast ``|x - y| / (|x| + |y| + 1)``, always in ``[0, 1)``."""
    return abs(x - y) / (abs(x) + abs(y) + 1.0)
