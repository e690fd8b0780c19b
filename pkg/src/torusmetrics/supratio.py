"""Certified maximization of functionals over all rational slopes.

The engine drives every supremum over curves in this package.  It descends
the Stern-Brocot tree best-first when the caller can bound the objective
over a whole subtree, and prunes once no unexplored cell can beat the best
value by more than the tolerance; the result is then certified.  Without a
sound bound it falls back to an exhaustive breadth-first sweep down to
``max_depth`` and reports honestly that nothing was certified, along with
the depth at which the value empirically stabilized.

Results are a pure function of the query: evaluation order never changes
the reported value or argmax (ties are broken by depth, then slope), so
objective evaluations could be farmed out concurrently without changing
the contract.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional

from .farey import FareyNode, Slope, root_nodes

__all__ = ["SupQuery", "SupRatioResult", "maximize"]


@dataclass
class SupQuery:
    """A supremum problem over all slopes.

    ``subtree_bound(node)`` must upper-bound the objective over every slope
    strictly inside the node's interval whenever it is supplied; pass None
    to run in the uncertified exhaustive mode.  ``tolerance`` is absolute,
    on the supremum value.
    """

    objective: Callable[[Slope], float]
    subtree_bound: Optional[Callable[[FareyNode], float]] = None
    tolerance: float = 1e-6
    max_depth: int = 24
    max_evals: int = 200_000

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_depth < 0:
            raise ValueError("max_depth must be nonnegative")
        if self.max_evals < 4:
            raise ValueError("max_evals must allow at least the root evaluations")


@dataclass
class SupRatioResult:
    value: float
    argmax: Slope
    certified: bool
    frontier_bound: Optional[float]
    evals: int
    stabilization_depth: int

    def to_json_dict(self) -> dict:
        fb = self.frontier_bound
        if fb is not None and not math.isfinite(fb):
            fb = None
        return {
            "value": self.value,
            "argmax": str(self.argmax),
            "certified": self.certified,
            "frontier_bound": fb,
            "evals": self.evals,
            "stabilization_depth": self.stabilization_depth,
        }


class _Search:
    """Shared evaluation bookkeeping for both engine modes."""

    def __init__(self, query: SupQuery):
        self.query = query
        self.values: dict[Slope, float] = {}
        self.best_value = -math.inf
        self.best_key: tuple = ()
        self.best_slope: Optional[Slope] = None
        self.depth_max: dict[int, float] = {}

    def evaluate(self, slope: Slope, depth: int) -> None:
        if slope in self.values:
            return
        v = self.query.objective(slope)
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ValueError(f"objective returned non-finite value {v!r} at slope {slope}")
        v = float(v)
        self.values[slope] = v
        d = self.depth_max.get(depth, -math.inf)
        if v > d:
            self.depth_max[depth] = v
        # Order-independent argmax: larger value wins, ties go to the
        # shallower and lexicographically smaller slope.
        key = (-v, depth, slope.p, slope.q)
        if self.best_slope is None or key < self.best_key:
            self.best_value = v
            self.best_key = key
            self.best_slope = slope

    @property
    def evals(self) -> int:
        return len(self.values)

    def stabilization_depth(self) -> int:
        running = -math.inf
        stab = 0
        for depth in sorted(self.depth_max):
            v = self.depth_max[depth]
            if v > running + self.query.tolerance:
                stab = depth
            if v > running:
                running = v
        return stab

    def result(self, certified: bool, frontier_bound: Optional[float]) -> SupRatioResult:
        assert self.best_slope is not None
        return SupRatioResult(
            value=self.best_value,
            argmax=self.best_slope,
            certified=certified,
            frontier_bound=frontier_bound,
            evals=self.evals,
            stabilization_depth=self.stabilization_depth(),
        )


def _evaluate_roots(search: _Search) -> tuple[FareyNode, FareyNode]:
    pos_root, neg_root = root_nodes()
    search.evaluate(Slope(0, 1), 0)
    search.evaluate(Slope(1, 0), 0)
    search.evaluate(pos_root.mediant_slope(), pos_root.depth)
    search.evaluate(neg_root.mediant_slope(), neg_root.depth)
    return pos_root, neg_root


def maximize(query: SupQuery) -> SupRatioResult:
    """Maximize the query objective over all slopes; see module docstring."""
    search = _Search(query)
    if query.subtree_bound is None:
        return _maximize_exhaustive(search)
    return _maximize_certified(search)


def _maximize_exhaustive(search: _Search) -> SupRatioResult:
    query = search.query
    pos_root, neg_root = _evaluate_roots(search)
    frontier = [*pos_root.children(), neg_root]
    while frontier and search.evals < query.max_evals:
        next_frontier = []
        for node in frontier:
            if node.depth > query.max_depth:
                continue
            if search.evals >= query.max_evals:
                break
            search.evaluate(node.mediant_slope(), node.depth)
            next_frontier.extend(node.children())
        frontier = next_frontier
    return search.result(certified=False, frontier_bound=None)


def _maximize_certified(search: _Search) -> SupRatioResult:
    query = search.query
    bound_fn = query.subtree_bound
    pos_root, neg_root = _evaluate_roots(search)

    heap: list[tuple] = []
    # Upper bounds over regions that max_depth prevented us from opening.
    truncated = -math.inf
    hit_eval_cap = False
    frontier_top = -math.inf

    def push(node: FareyNode) -> None:
        b = float(bound_fn(node))
        m = node.mediant_slope()
        heapq.heappush(heap, (-b, node.depth, m.p, m.q, node))

    for root in (pos_root, neg_root):
        for child in root.children():
            if child.depth <= query.max_depth:
                push(child)
            else:
                truncated = max(truncated, float(bound_fn(child)))

    while heap:
        neg_b, _, _, _, node = heapq.heappop(heap)
        b = -neg_b
        if b <= search.best_value + query.tolerance:
            frontier_top = b
            break
        if search.evals >= query.max_evals:
            frontier_top = b
            hit_eval_cap = True
            break
        search.evaluate(node.mediant_slope(), node.depth)
        for child in node.children():
            if child.depth <= query.max_depth:
                push(child)
            else:
                truncated = max(truncated, float(bound_fn(child)))

    outstanding = max(frontier_top, truncated)
    certified = not hit_eval_cap and outstanding <= search.best_value + query.tolerance
    frontier_bound = outstanding if math.isfinite(outstanding) else search.best_value
    return search.result(certified=certified, frontier_bound=frontier_bound)
