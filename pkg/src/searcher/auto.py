from typing import Optional

from src.admissibility import AdmissibilityMatrix
from src.searcher.base import BaseSearcher, MrciResult
from src.searcher.exact import BranchAndBoundSearcher
from src.searcher.heuristic import GreedySearcher


class AutoSearcher(BaseSearcher):
    """Exact search for libraries of at most ``max_exact_rules`` rules, the heuristic beyond."""

    def __init__(
        self,
        exact: Optional[BranchAndBoundSearcher] = None,
        heuristic: Optional[GreedySearcher] = None,
        max_exact_rules: int = 16,
    ) -> None:
        self.exact = exact or BranchAndBoundSearcher()
        self.heuristic = heuristic or GreedySearcher()
        self.max_exact_rules = max_exact_rules

    @property
    def method(self) -> str:  # type: ignore[override]
        return "auto"

    def run(self, matrix: AdmissibilityMatrix) -> MrciResult:
        if matrix.num_rules <= self.max_exact_rules:
            return self.exact.run(matrix)
        return self.heuristic.run(matrix)
