"""Breadth-first exploration of implicit graphs with a hashed visited set.

Successors are generated on demand by an ``expand`` callable returning
``(label, child)`` pairs in a fixed order. With ``workers > 1`` each BFS layer
is expanded in a process pool; children are merged in the same order as the
sequential run, so the verdict, the explored count and the returned path are
identical whatever the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Optional, Tuple

from .errors import ResourceLimitError

DEFAULT_MAX_STATES = 10**7


@dataclass
class SearchResult:
    target: Optional[Hashable]
    parents: dict
    depth: Optional[int]

    @property
    def found(self) -> bool:
        return self.target is not None

    @property
    def explored(self) -> int:
        return len(self.parents)

    def labels(self) -> list:
        """Arc labels on the discovered path from the root to the target."""
        out = []
        node = self.target
        while self.parents[node] is not None:
            node, label = self.parents[node]
            out.append(label)
        out.reverse()
        return out


def bfs(
    root: Hashable,
    expand: Callable[[Any], Iterable[Tuple[Any, Hashable]]],
    is_target: Callable[[Any], bool],
    max_states: int = DEFAULT_MAX_STATES,
    workers: int = 1,
) -> SearchResult:
    """Search from ``root`` until a target is generated or the graph is exhausted.

    Targets are detected when first generated and never expanded. The path
    recorded for each node is the first one found, i.e. the lexicographically
    least shortest path under the ``expand`` order.
    """
    parents = {root: None}
    if is_target(root):
        return SearchResult(root, parents, 0)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        layer = [root]
        depth = 0
        while layer:
            if pool is None:
                expanded = map(expand, layer)
            else:
                chunk = max(1, len(layer) // (4 * workers))
                expanded = pool.map(_Listed(expand), layer, chunksize=chunk)
            depth += 1
            nxt = []
            for parent, children in zip(layer, expanded):
                for label, child in children:
                    if child in parents:
                        continue
                    parents[child] = (parent, label)
                    if is_target(child):
                        return SearchResult(child, parents, depth)
                    if len(parents) > max_states:
                        raise ResourceLimitError(f"visited set exceeded {max_states} states")
                    nxt.append(child)
            layer = nxt
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return SearchResult(None, parents, None)


class _Listed:
    """Picklable wrapper materializing a successor generator in a worker."""

    def __init__(self, expand):
        self.expand = expand

    def __call__(self, node):
        return list(self.expand(node))


class SavitchReach:
    """Divide-and-conquer reachability that keeps no visited set.

    ``reach(x, y, k)`` decides whether ``y`` is reachable from ``x`` in at
    most ``k`` arcs by trying every candidate midpoint and recursing on both
    halves. Memory is the recursion stack only: depth ``O(log k)``, a
    constant number of states per frame. Time is ``O((2N)^log2(k))`` for
    ``N`` candidate nodes, so this is usable only on toy instances.

    Midpoints come from ``candidates(x, h, y, h2)`` when given: it must
    yield, lazily and without storing them, every node ``z`` with ``z``
    reachable from ``x`` within ``h`` arcs and ``y`` reachable from ``z``
    within ``h2`` arcs (``y`` is ``None`` when only the first half matters).
    Otherwise every node of ``universe()`` passing ``prune`` is tried, where
    ``prune(x, z, h)`` is a necessary condition for ``reach(x, z, h)``.

    ``max_steps`` bounds the total work: calls plus midpoints examined.
    """

    def __init__(self, successors, universe=None, is_target=None, prune=None, max_steps=None, candidates=None):
        if candidates is None and universe is None:
            raise ValueError("either universe or candidates is required")
        self.successors = successors
        self.universe = universe
        self.is_target = is_target
        self.prune = prune
        self.candidates = candidates
        self.max_steps = max_steps
        self.calls = 0
        self.work = 0
        self.depth = 0
        self.max_depth = 0

    def _count(self):
        self.work += 1
        if self.max_steps is not None and self.work > self.max_steps:
            raise ResourceLimitError(f"Savitch search exceeded {self.max_steps} steps")

    def _midpoints(self, x, h, y=None, h2=0):
        if self.candidates is not None:
            source = self.candidates(x, h, y, h2)
        else:
            prune = self.prune
            source = (
                z for z in self.universe()
                if prune is None or (prune(x, z, h) and (y is None or prune(z, y, h2)))
            )
        for z in source:
            self._count()
            yield z

    def _enter(self):
        self.calls += 1
        self._count()
        self.depth += 1
        self.max_depth = max(self.max_depth, self.depth)

    def reach(self, x, y, k) -> bool:
        self._enter()
        try:
            if x == y:
                return True
            if k <= 0:
                return False
            if k == 1:
                return any(s == y for s in self.successors(x))
            h = k // 2
            for z in self._midpoints(x, h, y, k - h):
                if self.reach(x, z, h) and self.reach(z, y, k - h):
                    return True
            return False
        finally:
            self.depth -= 1

    def reach_target(self, x, k) -> bool:
        """Whether some target node is reachable from ``x`` in at most ``k`` arcs."""
        self._enter()
        try:
            if self.is_target(x):
                return True
            if k <= 0:
                return False
            if k == 1:
                return any(self.is_target(s) for s in self.successors(x))
            h = k // 2
            for z in self._midpoints(x, h):
                if self.reach(x, z, h) and self.reach_target(z, k - h):
                    return True
            return False
        finally:
            self.depth -= 1

    def has_frontier(self, x, k) -> bool:
        """Whether some node lies at distance exactly ``k`` from ``x``.

        Such a node is a successor of a node within ``k - 1`` arcs that is
        not itself within ``k - 1`` arcs, so every test runs at depth ``k - 1``.
        """
        if k <= 0:
            return True
        for z in self._midpoints(x, k - 1):
            if self.reach(x, z, k - 1):
                for s in self.successors(z):
                    self._count()
                    if not self.reach(x, s, k - 1):
                        return True
        return False

    def target_reachable(self, x, bound) -> bool:
        """Whether a target is reachable from ``x``, deepening the path bound one arc at a time.

        Round ``k`` starts knowing no target lies within ``k - 1`` arcs. If
        no node sits at distance exactly ``k`` then nothing lies farther out
        either, since every node at distance ``k + 1`` has a predecessor at
        distance ``k``, and the answer is no without the costlier target
        search. ``bound`` caps the deepening; a target reachable at all is
        reachable within the number of non-target nodes plus one.
        """
        if self.is_target(x):
            return True
        for k in range(1, bound + 1):
            if not self.has_frontier(x, k):
                return False
            if self.reach_target(x, k):
                return True
        return False
