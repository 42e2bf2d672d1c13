from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from src.lotteries import Menu
from src.rules import AttentionConstant
from src.utils.errors import ValidationError


@dataclass(frozen=True)
class Observation:
    """One binary choice: ``choice`` is 1 when the first-listed alternative was taken."""

    subject_id: str
    trial: int
    menu: Menu
    choice: int

    def __post_init__(self) -> None:
        if self.choice not in (0, 1):
            raise ValidationError(
                f"choice must be 0 or 1, got {self.choice!r} (subject {self.subject_id}, "
                f"trial {self.trial})"
            )


@dataclass(frozen=True)
class Dataset:
    """Ordered observations of one subject.

    ``attention`` defaults to ``max |payoff| + 1`` over the menus. Datasets that share their
    menus (e.g. choice permutations) also share ``cache``, which memoises recommendation
    tables per library.
    """

    subject_id: str
    observations: Tuple[Observation, ...]
    attention: Optional[AttentionConstant] = None
    cache: Dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.observations) == 0:
            raise ValidationError(f"subject {self.subject_id} has no observations")
        if self.attention is None:
            object.__setattr__(self, "attention", AttentionConstant.from_menus(self.menus))
        else:
            self.attention.check(self.menus)

    @classmethod
    def from_menus(
        cls,
        subject_id: str,
        menus: Sequence[Menu],
        choices: Sequence[int],
        attention: Optional[AttentionConstant] = None,
    ) -> "Dataset":
        if len(menus) != len(choices):
            raise ValidationError(f"{len(menus)} menus but {len(choices)} choices")
        observations = tuple(
            Observation(subject_id, t + 1, menu, int(choice))
            for t, (menu, choice) in enumerate(zip(menus, choices))
        )
        return cls(subject_id, observations, attention)

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def num_observations(self) -> int:
        return len(self.observations)

    @property
    def menus(self) -> Tuple[Menu, ...]:
        return tuple(obs.menu for obs in self.observations)

    @property
    def choices(self) -> np.ndarray:
        return np.fromiter((obs.choice for obs in self.observations), dtype=np.int8)

    @property
    def alpha(self) -> float:
        """Share of first-listed choices."""
        return float(self.choices.mean())

    @property
    def z_count(self) -> int:
        return int(self.choices.sum())

    def with_choices(self, choices: Sequence[int]) -> "Dataset":
        """Same menus (and cache), new choice indicators."""
        if len(choices) != len(self.observations):
            raise ValidationError(
                f"expected {len(self.observations)} choices, got {len(choices)}"
            )
        observations = tuple(
            Observation(obs.subject_id, obs.trial, obs.menu, int(choice))
            for obs, choice in zip(self.observations, choices)
        )
        return Dataset(self.subject_id, observations, self.attention, self.cache)

    def replicate(self, k: int) -> "Dataset":
        """Blockwise concatenation of ``k`` copies, trials renumbered."""
        if k < 1:
            raise ValidationError(f"replication factor must be >= 1, got {k}")
        observations = tuple(
            Observation(obs.subject_id, block * len(self) + obs.trial, obs.menu, obs.choice)
            for block in range(k)
            for obs in self.observations
        )
        return Dataset(self.subject_id, observations, self.attention)
