"""Schedulability of memoryless policies.

A memoryless policy fixes the scheduler's move in every configuration, so
the knowledge sets of the blindfold construction collapse to single
configurations: the graph has the backlog configurations as nodes and one
arc per legal release. The policy schedules every legal job sequence iff no
failure configuration is reachable from the zero configuration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import partial
from typing import Iterator, Optional, Sequence

from .blindfold import Verdict
from .errors import InvariantError
from .search import DEFAULT_MAX_STATES, SavitchReach, bfs
from .task_model import (
    BacklogConfig,
    JobSequence,
    Policy,
    ReleaseVector,
    ScheduleStep,
    TaskSystem,
    deadline_counter,
    is_failure,
    legal_releases,
    separation_reachable,
    step,
    zero_config,
)


def _pending(b: BacklogConfig, k: ReleaseVector, T: TaskSystem):
    """``(c, d)`` per task once the releases ``k`` have been applied."""
    return [(ki, t.D) if ki else (c, d) for (c, d, _), ki, t in zip(b, k, T.tasks)]


def policy_edf(b: BacklogConfig, k: ReleaseVector, T: TaskSystem) -> ScheduleStep:
    """Global EDF, work conserving, ties broken by lower task index."""
    ready = sorted((d, i) for i, (c, d) in enumerate(_pending(b, k, T)) if c > 0)
    return tuple(sorted(i for _, i in ready[: T.m]))


policy_edf.name = "EDF-lowindex"


class FixedPriority:
    """Global fixed-priority scheduling; ``order`` lists task indices, highest priority first."""

    def __init__(self, order: Sequence[int]):
        order = tuple(order)
        if sorted(order) != list(range(len(order))):
            raise InvariantError(f"priority order {order} is not a permutation of 0..{len(order) - 1}")
        self.order = order
        self.name = "FP(" + ",".join(str(i + 1) for i in order) + ")"

    def __call__(self, b: BacklogConfig, k: ReleaseVector, T: TaskSystem) -> ScheduleStep:
        if len(self.order) != T.n:
            raise InvariantError(f"priority order covers {len(self.order)} tasks, system has {T.n}")
        pending = _pending(b, k, T)
        chosen = [i for i in self.order if pending[i][0] > 0][: T.m]
        return tuple(sorted(chosen))

    def __repr__(self):
        return self.name


def policy_fixed_priority(order: Sequence[int]) -> FixedPriority:
    return FixedPriority(order)


def policy_name(pol) -> str:
    return getattr(pol, "name", getattr(pol, "__name__", repr(pol)))


def policy_successors(b: BacklogConfig, T: TaskSystem, pol: Policy):
    """``(k, next config)`` for each legal release; exactly one scheduler move per release."""
    for k in legal_releases(b, T):
        S = tuple(pol(b, k, T))
        if len(S) > T.m:
            raise ValueError(f"{policy_name(pol)} chose {len(S)} tasks with m={T.m}")
        yield k, step(b, k, S, T, check=False)


def _successor_list(b, T, pol):
    return list(policy_successors(b, T, pol))


def is_schedulable(T: TaskSystem, pol: Policy, savitch: bool = False,
                   max_states: int = DEFAULT_MAX_STATES, workers: int = 1,
                   max_steps: Optional[int] = 10**7) -> Verdict:
    """Whether ``pol`` meets every deadline of every legal job sequence.

    The witness of a negative answer is the lexicographically least among the
    release sequences that drive the policy into a failure soonest.
    """
    if savitch:
        bound = sum(1 for _ in config_universe(T)) + 1
        feasible = not savitch_searcher(T, pol, max_steps).target_reachable(zero_config(T), bound)
        return Verdict(feasible, mode="savitch")
    expand = partial(_successor_list, T=T, pol=pol)
    result = bfs(zero_config(T), expand, is_failure, max_states=max_states, workers=workers)
    if not result.found:
        return Verdict(True, states_explored=result.explored, mode="bfs")
    witness = JobSequence(T.n, tuple(enumerate(result.labels())))
    return Verdict(False, witness, result.depth, result.explored, "bfs")


def config_universe(T: TaskSystem) -> Iterator[BacklogConfig]:
    """Non-failure configurations that can appear between slots, lazily.

    ``p < P``, the deadline counter follows from ``p``, and a task whose
    deadline elapsed has no work left.
    """
    per_task = []
    for t in T.tasks:
        options = []
        for p in range(t.P):
            d = deadline_counter(p, t)
            options.extend((c, d, p) for c in (range(t.C + 1) if d else (0,)))
        per_task.append(options)
    return itertools.product(*per_task)


def _may_reach(T, x, z, h):
    for t, (cx, _, px), (cz, _, pz) in zip(T.tasks, x, z):
        if not separation_reachable(px, pz, h, t.P):
            return False
        if px >= h and not 0 <= cx - cz <= h:
            return False
    return True


def savitch_searcher(T: TaskSystem, pol: Policy, max_steps: Optional[int] = None) -> SavitchReach:
    return SavitchReach(
        successors=lambda b: (w for _, w in policy_successors(b, T, pol)),
        universe=lambda: config_universe(T),
        is_target=is_failure,
        prune=lambda x, z, h: _may_reach(T, x, z, h),
        max_steps=max_steps,
    )


__all__ = [
    "policy_edf", "FixedPriority", "policy_fixed_priority", "policy_name", "policy_successors",
    "is_schedulable", "config_universe", "savitch_searcher",
]
