"""Exact maximisation of rule concentration by branch-and-bound.

The rule-count vectors reachable by admissible assignments are the integer points of the
base polytope of the coverage function ``g(S) = |rows where some rule of S is
admissible|``. A convex objective such as ``sum(n_f^2)`` peaks at a vertex of that polytope,
and the vertices are exactly the greedy claim vectors of rule orders. The search therefore
branches on which rule claims its remaining admissible menus next. A node is fully
described by its set of used rules, so nodes reached again with no larger value are pruned
through a memo table. The remaining nodes are bounded by pouring the unassigned menus into
the unused rules, largest remaining capacity first.

A per-menu search that assigns one menu at a time and bounds each node with
``cap_bound`` of the largest reachable share explores the same assignments. Its bound is
looser than the capacity fill, so here ``cap_bound`` only serves as the root certificate:
when the greedy incumbent already equals ``cap_bound`` of the largest column share, no
search is needed.
"""

import time
from typing import Dict, List, Optional, Sequence, Tuple

from src.admissibility import AdmissibilityMatrix
from src.rules import RULE_ORDER
from src.searcher.base import EXACT, BaseSearcher, MrciResult
from src.searcher.heuristic import greedy_pass, popularity_order
from src.utils.errors import ValidationError
from src.utils.pylogger import ContextLogger

log = ContextLogger(__name__)


class _BudgetExhausted(Exception):
    pass


def fill_bound(capacities: Sequence[int], remaining: int) -> int:
    """Largest ``sum(x^2)`` over ``0 <= x <= capacities`` with ``sum(x) == remaining``.

    >>> fill_bound([3, 2, 2], 4)
    13
    """
    bound = 0
    for capacity in sorted(capacities, reverse=True):
        take = min(capacity, remaining)
        bound += take * take
        remaining -= take
        if remaining == 0:
            break
    return bound


class BranchAndBoundSearcher(BaseSearcher):
    """Certified global maximiser of the rule concentration within a time budget."""

    method = EXACT

    def __init__(self, time_budget: Optional[float] = 60.0, check_every: int = 1024) -> None:
        """
        :param time_budget: Wall-clock seconds before the search stops with the incumbent
            flagged non-certified. ``None`` disables the budget.
        :param check_every: Number of nodes between clock checks.
        """
        if time_budget is not None and time_budget <= 0:
            raise ValidationError(f"time budget must be positive, got {time_budget}")
        self.time_budget = time_budget
        self.check_every = check_every

    def run(self, matrix: AdmissibilityMatrix) -> MrciResult:
        start = time.perf_counter()
        deadline = None if self.time_budget is None else start + self.time_budget
        masks = matrix.bitmasks
        num_rows = matrix.num_rows
        full = (1 << num_rows) - 1
        rank = [RULE_ORDER[rule] for rule in matrix.rules]

        first = [matrix.index(rule) for rule in popularity_order(matrix)]
        claims = self.greedy_counts(masks, first)
        best_value = sum(n * n for n in claims)
        best_order: Tuple[int, ...] = tuple(first)
        memo: Dict[int, int] = {}
        nodes = 0

        def search(used: int, covered: int, value: int, prefix: Tuple[int, ...]) -> None:
            nonlocal best_value, best_order, nodes
            nodes += 1
            if deadline is not None and nodes % self.check_every == 0 and time.perf_counter() > deadline:
                raise _BudgetExhausted
            if covered == full:
                if value > best_value:
                    best_value, best_order = value, prefix
                return
            if memo.get(used, -1) >= value:
                return
            memo[used] = value

            children: List[Tuple[int, int]] = []
            for j, mask in enumerate(masks):
                if not used >> j & 1:
                    gain = (mask & ~covered).bit_count()
                    if gain:
                        children.append((gain, j))
            remaining = num_rows - covered.bit_count()
            if value + fill_bound([gain for gain, _ in children], remaining) <= best_value:
                return
            children.sort(key=lambda gj: (-gj[0], rank[gj[1]]))
            for gain, j in children:
                search(used | 1 << j, covered | masks[j], value + gain * gain, prefix + (j,))

        # an incumbent whose largest share m >= 1/2 meets m^2 + (1 - m)^2 is already optimal
        top = int(matrix.counts.max())
        certified = 2 * top >= num_rows and best_value == top * top + (num_rows - top) ** 2
        if not certified:
            try:
                search(0, 0, 0, ())
                certified = True
            except _BudgetExhausted:
                log.bind(subject=matrix.subject_id).warning(
                    f"Exact search hit its {self.time_budget}s budget after {nodes} nodes; "
                    "returning the incumbent as non-certified"
                )

        tail = [j for j in range(matrix.num_rules) if j not in best_order]
        order = [matrix.rules[j] for j in (*best_order, *tail)]
        assignment = greedy_pass(matrix, order)
        result = MrciResult(
            assignment=assignment,
            numerator=best_value,
            t_total=num_rows,
            method=self.method,
            restarts_used=1,
            seed=None,
            certified=certified,
            nodes=nodes,
            runtime=time.perf_counter() - start,
        )
        log.bind(subject=matrix.subject_id).debug(
            f"Exact MRCI {result.value:.6f} ({nodes} nodes, certified={certified})"
        )
        return result


def mrci_exact(matrix: AdmissibilityMatrix, time_budget: Optional[float] = 60.0) -> MrciResult:
    return BranchAndBoundSearcher(time_budget=time_budget).run(matrix)
