from typing import Tuple

import numpy as np

from src.lotteries.lottery import PROB_TOL, ActTable, Lottery, make_act_table, make_lottery


def product_coupling(l1: Lottery, l2: Lottery) -> ActTable:
    """Independent coupling of two marginals.

    States are ``(i, j)`` pairs in lexicographic order over the ascending supports, with
    probability ``p1[i] * p2[j]``.
    """
    p = np.outer(l1.probs, l2.probs).ravel()
    payoffs_a = np.repeat(l1.prizes, len(l2.prizes))
    payoffs_b = np.tile(l2.prizes, len(l1.prizes))
    return ActTable(
        tuple((p / p.sum()).tolist()), tuple(payoffs_a.tolist()), tuple(payoffs_b.tolist())
    )


def _quantile_coupling(l1: Lottery, l2: Lottery, reverse: bool) -> ActTable:
    z1 = np.asarray(l1.prizes)
    z2 = np.asarray(l2.prizes)
    c1 = np.cumsum(l1.probs)
    c2 = np.cumsum(l2.probs[::-1] if reverse else l2.probs)
    z2 = z2[::-1] if reverse else z2
    c1[-1] = c2[-1] = 1.0

    cuts = np.union1d(c1, c2)
    cuts = cuts[np.concatenate(([True], np.diff(cuts) > PROB_TOL))]
    cuts[-1] = 1.0
    widths = np.diff(np.concatenate(([0.0], cuts)))
    midpoints = cuts - widths / 2.0
    index_1 = np.minimum(np.searchsorted(c1, midpoints), len(z1) - 1)
    index_2 = np.minimum(np.searchsorted(c2, midpoints), len(z2) - 1)
    return make_act_table(widths, z1[index_1], z2[index_2])


def comonotone_coupling(l1: Lottery, l2: Lottery) -> ActTable:
    """Perfectly positively dependent coupling: both alternatives pay their u-quantile."""
    return _quantile_coupling(l1, l2, reverse=False)


def countermonotone_coupling(l1: Lottery, l2: Lottery) -> ActTable:
    """Perfectly negatively dependent coupling: the second alternative pays its (1-u)-quantile."""
    return _quantile_coupling(l1, l2, reverse=True)


def acts_to_lotteries(table: ActTable) -> Tuple[Lottery, Lottery]:
    """Groups each alternative's state payoffs into its canonical marginal lottery."""
    return (
        make_lottery(table.payoffs_a, table.state_probs),
        make_lottery(table.payoffs_b, table.state_probs),
    )
