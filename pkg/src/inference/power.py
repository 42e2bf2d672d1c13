from dataclasses import dataclass
from typing import List, Mapping, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import binomtest

from src.inference.menus import sample_menus
from src.inference.permutation import attention_floor, permutation_test
from src.inference.rrm import RrmSpec, simulate_rrm
from src.rules import RuleId
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger
from src.utils.rng import STREAM_SUBJECT, SeedLike, child_seed

log = ContextLogger(__name__)

EXCHANGEABLE_NULL = {RuleId.A1: 0.5, RuleId.A2: 0.5}


@dataclass(frozen=True)
class RejectionRate:
    eta: float
    rejections: int
    trials: int
    ci_low: float
    ci_high: float

    @property
    def rate(self) -> float:
        return self.rejections / self.trials


def rejection_rate(p_values: Sequence[float], eta: float = 0.05, confidence: float = 0.95) -> RejectionRate:
    """Empirical rejection rate at level ``eta`` with its Clopper-Pearson interval."""
    p_values = np.asarray(p_values, dtype=float)
    if p_values.size == 0:
        raise ValidationError("no p-values to summarise")
    rejections = int(np.sum(p_values <= eta))
    interval = binomtest(rejections, p_values.size).proportion_ci(
        confidence_level=confidence, method="exact"
    )
    return RejectionRate(eta, rejections, int(p_values.size), float(interval.low), float(interval.high))


@dataclass(frozen=True)
class StudyResult:
    """Size or power study over simulated subjects."""

    rejection: RejectionRate
    p_values: Tuple[float, ...]
    observed_mrci: Tuple[float, ...]
    alphas: Tuple[float, ...]
    tau: float

    @property
    def tau_0(self) -> float:
        return attention_floor(float(np.mean(self.alphas)))

    @property
    def gap(self) -> float:
        """``tau(w) - tau_0(mean alpha)``, a readout of how far the model sits from the null."""
        return self.tau - self.tau_0


def _study_subjects(
    indices: Sequence[int],
    weights: Mapping[RuleId, float],
    fallback: Tuple[float, float],
    num_menus: int,
    num_permutations: int,
    inner_restarts: int,
    restarts: int,
    seed: SeedLike,
) -> List[Tuple[int, float, float, float]]:
    out = []
    for i in indices:
        subject_seed = child_seed(seed, STREAM_SUBJECT, i)
        menus = sample_menus(num_menus, subject_seed)
        spec = RrmSpec.from_mapping(weights, fallback=fallback, seed=subject_seed)
        dataset = simulate_rrm(menus, spec, subject_id=f"sim{i}")
        test = permutation_test(
            dataset,
            num_permutations=num_permutations,
            inner_restarts=inner_restarts,
            restarts=restarts,
            seed=subject_seed,
        )
        out.append((i, test.p_value, test.observed_mrci, dataset.alpha))
    return out


def simulate_study(
    num_subjects: int,
    num_menus: int,
    weights: Union[Mapping[Union[str, RuleId], float], None] = None,
    fallback: Tuple[float, float] = (0.5, 0.5),
    num_permutations: int = 200,
    inner_restarts: int = 50,
    restarts: int = 50,
    eta: float = 0.05,
    seed: SeedLike = 0,
    n_jobs: int = 1,
) -> StudyResult:
    """Monte Carlo rejection rate of the permutation test on simulated RRM subjects.

    Every subject gets fresh menus, choices and permutations from stream ``(seed, i)``.
    Without ``weights`` the choices are i.i.d. fair coins, the exchangeable null.
    """
    if num_subjects < 1:
        raise ValidationError(f"num_subjects must be >= 1, got {num_subjects}")
    weights = {RuleId.parse(rule): float(w) for rule, w in (weights or EXCHANGEABLE_NULL).items()}
    tau = RrmSpec.from_mapping(weights, fallback=fallback).tau
    args = (weights, tuple(fallback), num_menus, num_permutations, inner_restarts, restarts, seed)

    if n_jobs == 1:
        rows = _study_subjects(range(num_subjects), *args)
    else:
        chunks = np.array_split(np.arange(num_subjects), min(num_subjects, 4 * abs(n_jobs)))
        parts = Parallel(n_jobs=n_jobs, backend="loky")(
            delayed(_study_subjects)(chunk.tolist(), *args) for chunk in chunks if chunk.size
        )
        rows = sorted((row for part in parts for row in part), key=lambda row: row[0])

    p_values = tuple(row[1] for row in rows)
    result = StudyResult(
        rejection=rejection_rate(p_values, eta),
        p_values=p_values,
        observed_mrci=tuple(row[2] for row in rows),
        alphas=tuple(row[3] for row in rows),
        tau=tau,
    )
    log.info(
        f"Rejection rate {result.rejection.rate:.3f} at eta={eta} over {num_subjects} subjects "
        f"(tau={result.tau:.3f}, tau_0={result.tau_0:.3f})"
    )
    return result
