from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from src.utils.errors import ValidationError

# invariant tolerance on probability sums and tail comparisons
PROB_TOL = 1e-12
# tolerance accepted from raw inputs before renormalisation
INPUT_PROB_TOL = 1e-9
PRIZE_DECIMALS = 9


def canonical_amounts(values: Iterable[float]) -> np.ndarray:
    """Rounds monetary amounts to the canonical grid (and turns ``-0.0`` into ``0.0``)."""
    return np.round(np.asarray(values, dtype=float).ravel(), PRIZE_DECIMALS) + 0.0


@dataclass(frozen=True, eq=False)
class Lottery:
    """Finite-support distribution over monetary prizes, prizes strictly increasing."""

    prizes: Tuple[float, ...]
    probs: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.prizes) == 0:
            raise ValidationError("a lottery needs at least one prize")
        if len(self.prizes) != len(self.probs):
            raise ValidationError(
                f"length mismatch: {len(self.prizes)} prizes vs {len(self.probs)} probabilities"
            )
        z = np.asarray(self.prizes, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        if np.any(np.diff(z) <= 0):
            raise ValidationError(f"prizes must be strictly increasing, got {self.prizes}")
        if np.any(p <= 0):
            raise ValidationError(f"probabilities must be positive, got {self.probs}")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValidationError(f"probabilities sum to {p.sum()!r}, expected 1")

    @classmethod
    def sure(cls, amount: float) -> "Lottery":
        return cls((float(canonical_amounts([amount])[0]),), (1.0,))

    @property
    def is_degenerate(self) -> bool:
        return len(self.prizes) == 1

    @property
    def min_prize(self) -> float:
        return self.prizes[0]

    @property
    def max_prize(self) -> float:
        return self.prizes[-1]

    def tail_sums(self, grid: np.ndarray) -> np.ndarray:
        """Right-tail probabilities ``P(X >= z)`` for every ``z`` in an ascending grid."""
        tails = np.cumsum(np.asarray(self.probs)[::-1])[::-1]
        index = np.searchsorted(np.asarray(self.prizes), grid, side="left")
        return np.append(tails, 0.0)[index]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lottery):
            return NotImplemented
        return self.prizes == other.prizes and bool(
            np.allclose(self.probs, other.probs, rtol=0.0, atol=PROB_TOL)
        )

    def __hash__(self) -> int:
        return hash(self.prizes)

    def __repr__(self) -> str:
        pairs = ", ".join(f"{z:g}: {p:.6g}" for z, p in zip(self.prizes, self.probs))
        return f"Lottery({{{pairs}}})"


def make_lottery(prizes: Iterable[float], probs: Iterable[float]) -> Lottery:
    """Builds a canonical lottery from raw prize/probability lists.

    Duplicate prizes are merged, zero-probability entries dropped and prizes sorted. The
    probabilities are renormalised when their sum is off by more than ``1e-12``.

    :param prizes: Monetary amounts, in any order, possibly repeated.
    :param probs: Non-negative probabilities summing to 1 within ``1e-9``.
    :return: The canonical `Lottery`.

    >>> make_lottery([10, 10, 0], [0.3, 0.3, 0.4])
    Lottery({0: 0.4, 10: 0.6})
    """
    z = np.asarray(list(prizes), dtype=float).ravel()
    p = np.asarray(list(probs), dtype=float).ravel()
    if z.size != p.size:
        raise ValidationError(f"length mismatch: {z.size} prizes vs {p.size} probabilities")
    if z.size == 0:
        raise ValidationError("a lottery needs at least one prize")
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(p))):
        raise ValidationError("prizes and probabilities must be finite numbers")
    if np.any(p < 0):
        raise ValidationError(f"negative probability in {p.tolist()}")
    total = float(p.sum())
    if abs(total - 1.0) > INPUT_PROB_TOL:
        raise ValidationError(f"probabilities sum to {total!r}, expected 1")

    support, inverse = np.unique(canonical_amounts(z), return_inverse=True)
    mass = np.bincount(inverse.ravel(), weights=p, minlength=support.size)
    keep = mass > 0
    if not keep.any():
        raise ValidationError("empty support after dropping zero-probability prizes")
    support, mass = support[keep], mass[keep]
    if abs(mass.sum() - 1.0) > PROB_TOL:
        mass = mass / mass.sum()
    return Lottery(tuple(support.tolist()), tuple(mass.tolist()))


@dataclass(frozen=True)
class ActTable:
    """Common finite state space with one state-contingent payoff vector per alternative."""

    state_probs: Tuple[float, ...]
    payoffs_a: Tuple[float, ...]
    payoffs_b: Tuple[float, ...]

    def __post_init__(self) -> None:
        n = len(self.state_probs)
        if n == 0:
            raise ValidationError("an act table needs at least one state")
        if not (len(self.payoffs_a) == n == len(self.payoffs_b)):
            raise ValidationError(
                f"length mismatch: {n} states, {len(self.payoffs_a)} and "
                f"{len(self.payoffs_b)} payoffs"
            )
        p = np.asarray(self.state_probs, dtype=float)
        if np.any(p < 0):
            raise ValidationError(f"negative state probability in {self.state_probs}")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValidationError(f"state probabilities sum to {p.sum()!r}, expected 1")

    @property
    def num_states(self) -> int:
        return len(self.state_probs)

    def payoffs(self, side: int) -> np.ndarray:
        """State payoffs of alternative ``side`` (1 = first-listed, 2 = second)."""
        if side == 1:
            return np.asarray(self.payoffs_a, dtype=float)
        if side == 2:
            return np.asarray(self.payoffs_b, dtype=float)
        raise ValidationError(f"alternative must be 1 or 2, got {side!r}")

    def swapped(self) -> "ActTable":
        return ActTable(self.state_probs, self.payoffs_b, self.payoffs_a)


def make_act_table(
    state_probs: Iterable[float],
    payoffs_a: Iterable[float],
    payoffs_b: Iterable[float],
) -> ActTable:
    """Builds an act table from raw lists: zero-probability states are dropped, payoffs
    rounded to the canonical grid, and probabilities renormalised when their sum is off by
    more than ``1e-12``.

    :raises ValidationError: On length mismatch, negative probabilities or a sum off by more
        than ``1e-9``.
    """
    p = np.asarray(list(state_probs), dtype=float).ravel()
    a = canonical_amounts(list(payoffs_a))
    b = canonical_amounts(list(payoffs_b))
    if not (p.size == a.size == b.size) or p.size == 0:
        raise ValidationError(
            f"length mismatch: {p.size} states, {a.size} and {b.size} payoffs"
        )
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValidationError("state probabilities and payoffs must be finite numbers")
    if np.any(p < 0):
        raise ValidationError(f"negative state probability in {p.tolist()}")
    total = float(p.sum())
    if abs(total - 1.0) > INPUT_PROB_TOL:
        raise ValidationError(f"state probabilities sum to {total!r}, expected 1")
    keep = p > 0
    p = p[keep]
    if abs(p.sum() - 1.0) > PROB_TOL:
        p = p / p.sum()
    return ActTable(tuple(p.tolist()), tuple(a[keep].tolist()), tuple(b[keep].tolist()))
