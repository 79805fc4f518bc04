"""Online feasibility as a perfect-information safety game.

Side-1 positions are backlog configurations where the adversary releases
jobs; side-2 positions carry the configuration after the release together
with the release vector, and the scheduler picks the tasks to run. The
adversary wins by reaching a failure configuration. Its winning region is
the attractor of the failure configurations; the system is online feasible
iff the initial configuration lies outside it, and picking, in every safe
side-2 position, a move that stays outside gives a memoryless scheduler.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Tuple

from .errors import NotOnlineFeasibleError, ParseError, ResourceLimitError, StrategyIncompleteError
from .search import DEFAULT_MAX_STATES
from .task_model import (
    BacklogConfig,
    ReleaseVector,
    ScheduleStep,
    TaskSystem,
    format_config,
    is_failure,
    legal_releases,
    parse_config,
    useful_steps,
    zero_config,
)

V1, V2 = 1, 2


class GamePosition(NamedTuple):
    side: int
    config: BacklogConfig
    release: Optional[ReleaseVector] = None


def position(b: BacklogConfig) -> GamePosition:
    return GamePosition(V1, b)


def apply_release(b: BacklogConfig, k: ReleaseVector, T: TaskSystem) -> BacklogConfig:
    return tuple(
        (ki, t.D, t.P) if ki else triple for triple, ki, t in zip(b, k, T.tasks)
    )


def adversary_moves(v: GamePosition, T: TaskSystem) -> Iterator[GamePosition]:
    """One side-2 successor per legal release vector, in lexicographic order."""
    if v.side != V1:
        raise ValueError("adversary_moves expects a side-1 position")
    for k in legal_releases(v.config, T):
        yield GamePosition(V2, apply_release(v.config, k, T), k)


def scheduler_moves(v: GamePosition, T: TaskSystem) -> Iterator[Tuple[ScheduleStep, GamePosition]]:
    """Distinct side-1 successors, each paired with the least step producing it.

    Only steps made of tasks with pending work are tried; naming an idle task
    changes nothing, so no successor is lost and no chosen step has no-ops.
    """
    if v.side != V2:
        raise ValueError("scheduler_moves expects a side-2 position")
    seen = set()
    for S in useful_steps([c for c, _, _ in v.config], T.m):
        b = tuple(
            (c - 1 if (c and i in S) else c, d - 1 if d else 0, p - 1 if p else 0)
            for i, (c, d, p) in enumerate(v.config)
        )
        if b not in seen:
            seen.add(b)
            yield S, GamePosition(V1, b)


@dataclass
class Arena:
    """The fragment of the game reachable from the initial configuration."""

    T: TaskSystem
    successors: Dict[GamePosition, List[GamePosition]]
    moves: Dict[GamePosition, List[Tuple[ScheduleStep, GamePosition]]]
    failures: FrozenSet[GamePosition]

    @property
    def positions(self):
        return self.successors.keys()


def build_arena(T: TaskSystem, max_states: int = DEFAULT_MAX_STATES) -> Arena:
    """Forward exploration from the zero configuration; failures are not expanded."""
    root = position(zero_config(T))
    successors: Dict[GamePosition, List[GamePosition]] = {}
    moves = {}
    failures = set()
    queue = deque([root])
    successors[root] = None
    while queue:
        v = queue.popleft()
        if v.side == V1:
            if is_failure(v.config):
                failures.add(v)
                successors[v] = []
                continue
            succ = list(adversary_moves(v, T))
        else:
            moves[v] = list(scheduler_moves(v, T))
            succ = [w for _, w in moves[v]]
        successors[v] = succ
        for w in succ:
            if w not in successors:
                successors[w] = None
                if len(successors) > max_states:
                    raise ResourceLimitError(f"game arena exceeded {max_states} positions")
                queue.append(w)
    return Arena(T, successors, moves, frozenset(failures))


@dataclass
class WinningRegion:
    W: FrozenSet[GamePosition]
    arena: Arena
    iterations: int = 0

    def __contains__(self, v):
        return v in self.W


def attractor(T: TaskSystem, naive: bool = False, max_states: int = DEFAULT_MAX_STATES,
              arena: Optional[Arena] = None) -> WinningRegion:
    """Positions from which the adversary forces a failure.

    The default engine propagates backwards, counting for each side-2
    position its successors still outside the region. ``naive`` recomputes
    ``W_{i+1}`` from ``W_i`` until nothing changes; both give the same set.
    """
    if arena is None:
        arena = build_arena(T, max_states)
    if naive:
        return _attractor_iterated(arena)
    preds: Dict[GamePosition, List[GamePosition]] = {v: [] for v in arena.positions}
    for v, succ in arena.successors.items():
        for w in succ:
            preds[w].append(v)
    remaining = {v: len(succ) for v, succ in arena.successors.items() if v.side == V2}
    W = set(arena.failures)
    queue = deque(W)
    while queue:
        w = queue.popleft()
        for v in preds[w]:
            if v in W:
                continue
            if v.side == V1:
                W.add(v)
                queue.append(v)
            else:
                remaining[v] -= 1
                if remaining[v] == 0:
                    W.add(v)
                    queue.append(v)
    return WinningRegion(frozenset(W), arena)


def _attractor_iterated(arena: Arena) -> WinningRegion:
    W = set(arena.failures)
    iterations = 0
    while True:
        iterations += 1
        new = set()
        for v, succ in arena.successors.items():
            if v in W or not succ:
                continue
            if v.side == V1 and any(w in W for w in succ):
                new.add(v)
            elif v.side == V2 and all(w in W for w in succ):
                new.add(v)
        if not new:
            return WinningRegion(frozenset(W), arena, iterations)
        W |= new


def is_online_feasible(T: TaskSystem, max_states: int = DEFAULT_MAX_STATES) -> bool:
    return position(zero_config(T)) not in attractor(T, max_states=max_states)


# --- strategies --------------------------------------------------------------


@dataclass
class Strategy:
    """A memoryless scheduler given as a finite decision table.

    Keys are ``(config, release)`` with ``config`` the configuration before
    the release. Calling a strategy outside its table raises
    :class:`StrategyIncompleteError`.
    """

    table: Dict[Tuple[BacklogConfig, ReleaseVector], ScheduleStep] = field(default_factory=dict)
    name: str = "strategy"

    def __call__(self, b, k, T=None):
        try:
            return self.table[(tuple(b), tuple(k))]
        except KeyError:
            raise StrategyIncompleteError(b, k) from None

    def __len__(self):
        return len(self.table)

    def dumps(self) -> str:
        lines = ["strategy"]
        for (b, k), S in sorted(self.table.items()):
            chosen = " ".join(str(i + 1) for i in S) or "-"
            lines.append(f"{format_config(b)} | {' '.join(map(str, k))} -> {chosen}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, name: str = "strategy") -> "Strategy":
        lines = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines(), start=1)]
        lines = [(i, ln) for i, ln in lines if ln]
        if not lines or lines[0][1] != "strategy":
            raise ParseError("strategy file must start with a 'strategy' header", lines[0][0] if lines else 1, 1)
        table = {}
        for lineno, line in lines[1:]:
            try:
                lhs, chosen = line.split("->")
                config, release = lhs.split("|")
                b = parse_config(config)
                k = tuple(int(x) for x in release.split())
                chosen = chosen.strip()
                S = () if chosen == "-" else tuple(sorted(int(x) - 1 for x in chosen.split()))
            except ValueError as exc:
                raise ParseError(f"malformed strategy line: {exc}", lineno, 1) from None
            if len(k) != len(b) or any(len(tr) != 3 for tr in b):
                raise ParseError("config and release vector sizes disagree", lineno, 1)
            table[(b, k)] = S
        return cls(table, name)


def synthesize_strategy(T: TaskSystem, max_states: int = DEFAULT_MAX_STATES,
                        region: Optional[WinningRegion] = None) -> Strategy:
    """An optimal memoryless scheduler for an online-feasible system.

    For every reachable safe side-2 position, the lexicographically least
    step whose successor lies outside the winning region is recorded.
    """
    if region is None:
        region = attractor(T, max_states=max_states)
    arena = region.arena
    root = position(zero_config(T))
    if root in region:
        raise NotOnlineFeasibleError(f"{T} is not online feasible; no safe strategy exists")
    table = {}
    for v, succ in arena.successors.items():
        if v.side != V1 or v in region:
            continue
        for w in succ:
            if w in region:
                continue
            S = next(S for S, u in arena.moves[w] if u not in region)
            table[(v.config, w.release)] = S
    return Strategy(table, name=f"synthesized[{T.digest()}]")


__all__ = [
    "GamePosition", "Arena", "WinningRegion", "Strategy", "V1", "V2", "position", "adversary_moves",
    "scheduler_moves", "build_arena", "attractor", "is_online_feasible", "synthesize_strategy",
]
