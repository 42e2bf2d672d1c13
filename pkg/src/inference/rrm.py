from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.admissibility import Dataset
from src.lotteries import Menu
from src.rules import RULE_ORDER, AttentionConstant, RuleId, recommendation_side
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger
from src.utils.rng import STREAM_RRM, SeedLike, make_rng

log = ContextLogger(__name__)

WEIGHT_TOL = 1e-9


def _simplex(weights: Sequence[float], what: str) -> Tuple[float, ...]:
    w = np.asarray(weights, dtype=float)
    if w.size == 0 or np.any(w < 0) or abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise ValidationError(f"{what} must be non-negative and sum to 1, got {w.tolist()}")
    return tuple((w / w.sum()).tolist())


@dataclass(frozen=True)
class RrmSpec:
    """Random Rule Model: i.i.d. latent rules with weights ``w`` and a fixed A1/A2 fallback."""

    rules: Tuple[RuleId, ...]
    weights: Tuple[float, ...]
    fallback: Tuple[float, float] = (0.5, 0.5)
    seed: SeedLike = 0

    def __post_init__(self) -> None:
        rules = tuple(RuleId.parse(rule) for rule in self.rules)
        if len(rules) != len(self.weights) or len(set(rules)) != len(rules):
            raise ValidationError("weights need exactly one entry per distinct rule")
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "weights", _simplex(self.weights, "rule weights"))
        object.__setattr__(self, "fallback", _simplex(self.fallback, "fallback weights"))
        if len(self.fallback) != 2:
            raise ValidationError("fallback weights are (A1, A2)")

    @classmethod
    def from_mapping(
        cls,
        weights: Mapping[Union[str, RuleId], float],
        fallback: Tuple[float, float] = (0.5, 0.5),
        seed: SeedLike = 0,
    ) -> "RrmSpec":
        parsed = {RuleId.parse(rule): float(w) for rule, w in weights.items()}
        rules = tuple(sorted(parsed, key=RULE_ORDER.__getitem__))
        return cls(rules, tuple(parsed[rule] for rule in rules), tuple(fallback), seed)

    @property
    def tau(self) -> float:
        return latent_concentration(self.weights)


def latent_concentration(weights: Union[RrmSpec, Mapping[object, float], Sequence[float]]) -> float:
    """Coincidence probability ``sum(w_f^2)`` of two independent latent draws."""
    if isinstance(weights, RrmSpec):
        weights = weights.weights
    elif isinstance(weights, Mapping):
        weights = list(weights.values())
    return float(np.sum(np.square(np.asarray(weights, dtype=float))))


def null_matched_spec(
    dataset: Dataset,
    weights: Mapping[Union[str, RuleId], float],
    seed: SeedLike = 0,
) -> RrmSpec:
    """RRM with the given weights and the fallback ``(alpha_hat, 1 - alpha_hat)`` of ``dataset``."""
    alpha = dataset.alpha
    return RrmSpec.from_mapping(weights, fallback=(alpha, 1.0 - alpha), seed=seed)


def simulate_rrm(
    menus: Sequence[Menu],
    spec: RrmSpec,
    subject_id: str = "sim",
    attention: Optional[AttentionConstant] = None,
    return_latent: bool = False,
):
    """Generates choices on fixed menus from a Random Rule Model.

    At each menu a latent rule is drawn from ``spec.weights``. If it strictly recommends a
    side, that side is chosen; otherwise the fallback attention rule decides.

    :param menus: The menus, in presentation order.
    :param spec: The model.
    :param subject_id: Identifier of the simulated subject.
    :param attention: Attention constant; derived from the menus by default.
    :param return_latent: Whether to also return the latent rule of each menu.
    :return: The simulated `Dataset`, or ``(dataset, latent_rules)``.
    """
    if not menus:
        raise ValidationError("cannot simulate choices on an empty menu list")
    attention = attention or AttentionConstant.from_menus(menus)
    rng = make_rng(spec.seed, STREAM_RRM)
    draws = rng.choice(len(spec.rules), size=len(menus), p=spec.weights)
    attend_first = rng.random(len(menus)) < spec.fallback[0]

    choices, latent = [], []
    for menu, draw, first in zip(menus, draws, attend_first):
        rule = spec.rules[int(draw)]
        side = recommendation_side(rule, menu, attention)
        if side == 0:
            side = 1 if first else 2
        choices.append(1 if side == 1 else 0)
        latent.append(rule)

    dataset = Dataset.from_menus(subject_id, menus, choices, attention)
    log.bind(subject=subject_id).debug(
        f"Simulated {len(menus)} choices, tau(w)={spec.tau:.3f}, alpha={dataset.alpha:.3f}"
    )
    if return_latent:
        return dataset, tuple(latent)
    return dataset
