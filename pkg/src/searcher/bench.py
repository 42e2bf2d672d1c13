import time
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from src.admissibility import AdmissibilityMatrix
from src.rules import BASELINE_LIBRARY, RuleId
from src.searcher.exact import BranchAndBoundSearcher
from src.searcher.heuristic import GreedySearcher
from src.utils.pylogger import ContextLogger
from src.utils.rng import STREAM_SUBJECT, SeedLike, child_seed, make_rng

log = ContextLogger(__name__)


def random_admissibility(
    num_rows: int,
    density: float,
    seed: SeedLike = 0,
    rules: Iterable[RuleId] = BASELINE_LIBRARY,
    alpha: float = 0.5,
) -> AdmissibilityMatrix:
    """Random matrix with attention parity: non-attention cells are i.i.d. Bernoulli(density),
    A1/A2 follow i.i.d. Bernoulli(alpha) choice sides."""
    rules = tuple(rules)
    rng = make_rng(seed)
    first = rng.random(num_rows) < alpha
    columns = []
    for rule in rules:
        if rule == RuleId.A1:
            columns.append(first)
        elif rule == RuleId.A2:
            columns.append(~first)
        else:
            columns.append(rng.random(num_rows) < density)
    return AdmissibilityMatrix(rules, np.column_stack(columns), subject_id=f"rand{num_rows}")


@dataclass(frozen=True)
class BenchRow:
    instance: int
    num_rows: int
    density: float
    heuristic_mrci: float
    exact_mrci: float
    gap: float
    agree: bool
    certified: bool
    heuristic_seconds: float
    exact_seconds: float


def bench_exact(
    instances: int = 200,
    min_rows: int = 10,
    max_rows: int = 60,
    min_density: float = 0.2,
    max_density: float = 0.6,
    restarts: int = 100,
    time_budget: float = 60.0,
    seed: SeedLike = 0,
) -> List[BenchRow]:
    """Heuristic against exact MRCI on seeded random instances."""
    rng = make_rng(seed)
    sizes = rng.integers(min_rows, max_rows + 1, size=instances)
    densities = rng.uniform(min_density, max_density, size=instances)
    exact = BranchAndBoundSearcher(time_budget=time_budget)
    rows = []
    for i, (num_rows, density) in enumerate(zip(sizes, densities)):
        instance_seed = child_seed(seed, STREAM_SUBJECT, i)
        matrix = random_admissibility(int(num_rows), float(density), instance_seed)
        start = time.perf_counter()
        fast = GreedySearcher(restarts=restarts, seed=instance_seed).run(matrix)
        middle = time.perf_counter()
        best = exact.run(matrix)
        end = time.perf_counter()
        rows.append(
            BenchRow(
                instance=i,
                num_rows=int(num_rows),
                density=float(density),
                heuristic_mrci=fast.value,
                exact_mrci=best.value,
                gap=best.value - fast.value,
                agree=fast.numerator == best.numerator,
                certified=best.certified,
                heuristic_seconds=middle - start,
                exact_seconds=end - middle,
            )
        )
    agree = np.mean([row.agree for row in rows])
    log.info(f"Heuristic matched exact on {agree:.2%} of {instances} instances")
    return rows


def summarize(rows: List[BenchRow]) -> Tuple[float, float, float]:
    """Agreement share, mean absolute gap and largest exact runtime."""
    return (
        float(np.mean([row.agree for row in rows])),
        float(np.mean([abs(row.gap) for row in rows])),
        float(max(row.exact_seconds for row in rows)),
    )
