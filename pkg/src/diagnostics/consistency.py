"""Checks that a perceived dataset admits no non-trivial revealed-preference cycle.

Under an assignment, menu ``t`` becomes a perceived pair ``(x_t, y_t)`` with ``x_t`` the
perceived chosen lottery. ``x R y`` holds when ``x = x_t`` for some ``t`` and ``y`` lies in
the FSD-downward closure of ``{x_t, y_t}``. Closures are taken over the finite set of
perceived lotteries in the data.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components, shortest_path

from src.admissibility import Dataset
from src.lotteries import Lottery, fsd_strict, fsd_weak
from src.rules import perceive
from src.searcher import Assignment
from src.utils.errors import ValidationError

STRONG = "strong"
WEAK = "weak"


@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    witness: Tuple[Lottery, ...] = ()

    def __bool__(self) -> bool:
        return self.consistent


def perceived_pairs(
    dataset: Dataset, assignment: Assignment, check_admissible: bool = True
) -> List[Tuple[Lottery, Lottery]]:
    """Perceived (chosen, unchosen) lotteries of every observation under ``assignment``."""
    if len(assignment.rule_of) != len(dataset):
        raise ValidationError(
            f"assignment covers {len(assignment.rule_of)} menus, dataset has {len(dataset)}"
        )
    pairs = []
    for obs, rule in zip(dataset.observations, assignment.rule_of):
        perceived = perceive(rule, obs.menu, dataset.attention)
        if obs.choice == 1:
            chosen, other = perceived.perceived_a, perceived.perceived_b
        else:
            chosen, other = perceived.perceived_b, perceived.perceived_a
        if check_admissible and not fsd_strict(chosen, other):
            raise ValidationError(f"rule {rule} is not admissible at trial {obs.trial}")
        pairs.append((chosen, other))
    return pairs


def _intern(nodes: List[Lottery], buckets: Dict[int, List[int]], lottery: Lottery) -> int:
    bucket = buckets.setdefault(hash(lottery), [])
    for i in bucket:
        if nodes[i] == lottery:
            return i
    nodes.append(lottery)
    bucket.append(len(nodes) - 1)
    return len(nodes) - 1


def _path(graph: csr_matrix, source: int, target: int) -> List[int]:
    _, predecessors = breadth_first_order(graph, source, directed=True, return_predecessors=True)
    path = [target]
    while path[-1] != source:
        path.append(int(predecessors[path[-1]]))
    return path[::-1]


def verify_cyclical_consistency(
    dataset: Dataset,
    assignment: Assignment,
    mode: str = STRONG,
    check_admissible: bool = True,
) -> ConsistencyResult:
    """Verifies cyclical consistency of the perceived dataset.

    :param dataset: The subject's dataset.
    :param assignment: One rule per observation.
    :param mode: ``"strong"`` rejects any pair ``x != y`` with ``x R* y`` and ``y R* x``;
        ``"weak"`` rejects ``x R* y`` together with a strict direct revelation ``y P x``.
    :param check_admissible: Whether an inadmissible assignment raises.
    :return: A `ConsistencyResult`; on failure ``witness`` lists a cycle ``x0 -> ... -> x0``.
    """
    if mode not in (STRONG, WEAK):
        raise ValidationError(f"mode must be '{STRONG}' or '{WEAK}', got {mode!r}")
    pairs = perceived_pairs(dataset, assignment, check_admissible)

    nodes: List[Lottery] = []
    buckets: Dict[int, List[int]] = {}
    index = [(_intern(nodes, buckets, x), _intern(nodes, buckets, y)) for x, y in pairs]
    n = len(nodes)
    weak = np.array([[fsd_weak(a, b) for b in nodes] for a in nodes], dtype=bool)

    direct = np.zeros((n, n), dtype=bool)
    for x, y in index:
        direct[x] |= weak[x] | weak[y]
    np.fill_diagonal(direct, False)
    graph = csr_matrix(direct)

    if mode == STRONG:
        num_components, labels = connected_components(graph, directed=True, connection="strong")
        sizes = np.bincount(labels, minlength=num_components)
        cyclic = np.flatnonzero(sizes >= 2)
        if cyclic.size == 0:
            return ConsistencyResult(True)
        members = np.flatnonzero(labels == cyclic[0])
        u, v = int(members[0]), int(members[1])
        cycle = _path(graph, u, v) + _path(graph, v, u)[1:]
        return ConsistencyResult(False, tuple(nodes[i] for i in cycle))

    strict = np.array([[fsd_strict(a, b) for b in nodes] for a in nodes], dtype=bool)
    revealed_strict = np.zeros((n, n), dtype=bool)
    for x, y in index:
        revealed_strict[x] |= strict[x] | strict[y]
    reach = np.isfinite(shortest_path(graph, directed=True, unweighted=True))
    violations = np.argwhere(reach & revealed_strict.T)
    if violations.size == 0:
        return ConsistencyResult(True)
    x, y = (int(i) for i in violations[0])
    cycle = (_path(graph, x, y) if x != y else [x]) + [x]
    return ConsistencyResult(False, tuple(nodes[i] for i in cycle))
