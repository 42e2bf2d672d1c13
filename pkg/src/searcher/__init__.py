from src.searcher.auto import AutoSearcher
from src.searcher.base import (
    EXACT,
    HEURISTIC,
    Assignment,
    BaseSearcher,
    MrciResult,
    cap_bound,
    hhi,
    hhi_numerator,
)
from src.searcher.exact import BranchAndBoundSearcher, fill_bound, mrci_exact
from src.searcher.heuristic import GreedySearcher, greedy_pass, mrci_heuristic, popularity_order
from src.searcher.bench import BenchRow, bench_exact, random_admissibility, summarize
