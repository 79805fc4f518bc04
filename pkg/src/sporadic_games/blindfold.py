"""Feasibility via the knowledge-state graph of the blindfold scheduling game.

The adversary picks releases without seeing the scheduler's choices, so a
single job sequence must defeat every schedule at once. Tracking the set
``Q`` of remaining-compute vectors that some non-failing schedule can reach
turns the game into one-player reachability: the system is infeasible iff a
state with ``Q`` empty is reachable from the initial state.

Graph nodes are :class:`KnowledgeState` values. Side 1 nodes are adversary
decision points, side 2 nodes wait for the clock tick that applies every
scheduler decision at once. The graph is explored on the fly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Iterator, List, NamedTuple, Optional, Tuple

from .errors import IllegalReleaseError, ResourceLimitError
from .flow_rounding import Job, has_feasible_schedule
from .search import DEFAULT_MAX_STATES, SavitchReach, bfs
from .task_model import (
    JobSequence,
    ReleaseVector,
    Schedule,
    TaskSystem,
    deadline_counter,
    is_legal_sequence,
    run_schedule,
    separation_reachable,
    useful_steps,
)

V1, V2 = 1, 2

ComputeVector = Tuple[int, ...]


class KnowledgeState(NamedTuple):
    side: int
    counters: Tuple[Tuple[int, int], ...]  # (d_i, p_i) per task
    Q: Tuple[ComputeVector, ...]  # sorted, duplicate-free

    @property
    def is_failure(self) -> bool:
        return self.side == V1 and not self.Q

    def __str__(self):
        side = "I" if self.side == V1 else "II"
        ctr = " ".join(f"d{i + 1}={d} p{i + 1}={p}" for i, (d, p) in enumerate(self.counters))
        q = ", ".join("(" + ",".join(map(str, c)) + ")" for c in self.Q) or "empty"
        return f"[{side}] {ctr} | Q = {{{q}}}"


@dataclass
class Verdict:
    feasible: bool
    witness: Optional[JobSequence] = None
    failure_time: Optional[int] = None
    states_explored: int = 0
    mode: str = "bfs"


def initial_state(T: TaskSystem) -> KnowledgeState:
    return KnowledgeState(V1, ((0, 0),) * T.n, ((0,) * T.n,))


def release_successor(v: KnowledgeState, k: ReleaseVector, T: TaskSystem) -> KnowledgeState:
    """Apply the adversary's release ``k`` to every plausible scheduler state."""
    if v.side != V1:
        raise ValueError("release_successor expects a side-1 state")
    if len(k) != T.n:
        raise IllegalReleaseError(f"release vector has {len(k)} entries, expected {T.n}")
    counters = []
    for i, (ki, (d, p), t) in enumerate(zip(k, v.counters, T.tasks)):
        if ki:
            if p > 0:
                raise IllegalReleaseError(f"task {i + 1}: released while {p} slot(s) of separation remain")
            if not 0 < ki <= t.C:
                raise IllegalReleaseError(f"task {i + 1}: release size {ki} outside 1..{t.C}")
            counters.append((t.D, t.P))
        elif ki < 0:
            raise IllegalReleaseError(f"task {i + 1}: negative release size")
        else:
            counters.append((d, p))
    if any(k):
        Q = tuple(sorted({tuple(ki if ki else c for ki, c in zip(k, q)) for q in v.Q}))
    else:
        Q = v.Q
    return KnowledgeState(V2, tuple(counters), Q)


def tick_successor(v: KnowledgeState, T: TaskSystem, antichain: bool = False) -> KnowledgeState:
    """Apply every scheduler decision for one slot and keep the valid outcomes.

    An outcome is valid when no task with an elapsed deadline has work left.
    With ``antichain`` only the componentwise-minimal outcomes are kept; the
    emptiness of ``Q`` is unaffected because validity is downward closed.
    """
    if v.side != V2:
        raise ValueError("tick_successor expects a side-2 state")
    counters = tuple((d - 1 if d else 0, p - 1 if p else 0) for d, p in v.counters)
    expired = [i for i, (d, _) in enumerate(counters) if d == 0]
    out = set()
    m = T.m
    for q in v.Q:
        for S in useful_steps(q, m):
            c = list(q)
            for i in S:
                c[i] -= 1
            if any(c[i] for i in expired):
                continue
            out.add(tuple(c))
    Q = minimal_elements(out) if antichain else tuple(sorted(out))
    return KnowledgeState(V1, counters, Q)


def minimal_elements(vectors) -> Tuple[ComputeVector, ...]:
    """Componentwise-minimal members, sorted."""
    ordered = sorted(vectors, key=lambda c: (sum(c), c))
    kept: List[ComputeVector] = []
    for c in ordered:
        if not any(all(a <= b for a, b in zip(low, c)) for low in kept):
            kept.append(c)
    return tuple(sorted(kept))


def releases_from(v: KnowledgeState, T: TaskSystem) -> Iterator[ReleaseVector]:
    ranges = [range(t.C + 1) if p == 0 else (0,) for t, (_, p) in zip(T.tasks, v.counters)]
    return itertools.product(*ranges)


def successors(v: KnowledgeState, T: TaskSystem, antichain: bool = False):
    """Side-1 successors of a side-1 state, one per legal release, as ``(k, state)`` pairs."""
    for k in releases_from(v, T):
        yield k, tick_successor(release_successor(v, k, T), T, antichain)


def _successor_list(v, T, antichain):
    return list(successors(v, T, antichain))


def knowledge_walk(T: TaskSystem, sigma: JobSequence, steps: Optional[int] = None,
                   antichain: bool = False) -> List[KnowledgeState]:
    """Side-1 states ``v_0, v_1, ...`` visited by the walk that ``sigma`` induces."""
    if not is_legal_sequence(sigma, T):
        raise IllegalReleaseError("job sequence is not legal for this task system")
    if steps is None:
        steps = sigma.length + T.max_deadline
    v = initial_state(T)
    walk = [v]
    for k in sigma.dense(steps):
        v = tick_successor(release_successor(v, k, T), T, antichain)
        walk.append(v)
    return walk


def _witness(labels, n) -> JobSequence:
    return JobSequence(n, tuple(enumerate(labels)))


def is_feasible(T: TaskSystem, antichain: bool = False, max_states: int = DEFAULT_MAX_STATES,
                workers: int = 1) -> Verdict:
    """Decide feasibility by breadth-first search for a failure state.

    On infeasible systems the witness is the lexicographically least job
    sequence among those whose walk reaches an empty ``Q`` soonest.
    """
    expand = partial(_successor_list, T=T, antichain=antichain)
    result = bfs(initial_state(T), expand, lambda v: not v.Q, max_states=max_states, workers=workers)
    mode = "bfs-antichain" if antichain else "bfs"
    if not result.found:
        return Verdict(True, states_explored=result.explored, mode=mode)
    return Verdict(False, _witness(result.labels(), T.n), result.depth, result.explored, mode)


# --- schedule reconstruction -------------------------------------------------


@dataclass
class Reconstruction:
    schedule: Optional[Schedule]
    failure_time: Optional[int] = None

    @property
    def feasible(self) -> bool:
        return self.schedule is not None


def reconstruct_schedule(T: TaskSystem, sigma: JobSequence, horizon: Optional[int] = None) -> Reconstruction:
    """Build a feasible schedule for a finite legal ``sigma``, if one exists.

    Runs the knowledge walk while recording, for each member of each ``Q^t``,
    one predecessor member and the step that produced it. Any member at the
    horizon then leads back to ``Q^0`` along predecessor links, which spells
    out a schedule (a finite prefix of the ray that the infinite version of
    this argument needs).
    """
    if not is_legal_sequence(sigma, T):
        raise IllegalReleaseError("job sequence is not legal for this task system")
    if horizon is None:
        horizon = sigma.length + T.max_deadline
    releases = sigma.dense(horizon)
    layer = {(0,) * T.n: None}
    links = []
    d = [0] * T.n
    for t in range(horizon):
        k = releases[t]
        for i, ki in enumerate(k):
            d[i] = T.tasks[i].D if ki else d[i]
        d = [x - 1 if x else 0 for x in d]
        nxt = {}
        for q in sorted(layer):
            released = tuple(ki if ki else c for ki, c in zip(k, q))
            for S in useful_steps(released, T.m):
                c = list(released)
                for i in S:
                    c[i] -= 1
                c = tuple(c)
                if c in nxt or any(ci and di == 0 for ci, di in zip(c, d)):
                    continue
                nxt[c] = (q, S)
        if not nxt:
            return Reconstruction(None, failure_time=t + 1)
        links.append(nxt)
        layer = nxt
    steps = []
    q = min(layer) if links else (0,) * T.n
    for nxt in reversed(links):
        q, S = nxt[q]
        steps.append(S)
    steps.reverse()
    while steps and not steps[-1]:
        steps.pop()
    schedule = tuple(steps)
    check = run_schedule(sigma, schedule, T, horizon)
    if not check.met:  # pragma: no cover - would mean the walk is wrong
        raise AssertionError(f"reconstructed schedule fails at t={check.failure_time}")
    return Reconstruction(schedule)


# --- low-memory mode ---------------------------------------------------------


@lru_cache(maxsize=None)
def _meets_deadlines(c: ComputeVector, deadlines: Tuple[int, ...], m: int) -> bool:
    """Whether work ``c`` fits before ``deadlines`` with no further releases."""
    return has_feasible_schedule([Job(0, ci, d) for ci, d in zip(c, deadlines) if ci], m)


def drop_doomed(v: KnowledgeState, T: TaskSystem) -> KnowledgeState:
    """Remove members of ``Q`` that miss a deadline whatever happens next.

    Descendants of such a member are doomed too, so a failure state is
    reachable after the removal iff it was before; only the time at which
    ``Q`` runs empty can move earlier.
    """
    deadlines = tuple(d for d, _ in v.counters)
    Q = tuple(c for c in v.Q if _meets_deadlines(c, deadlines, T.m))
    return v if len(Q) == len(v.Q) else v._replace(Q=Q)


def _antichains(vectors, start=0, chosen=()):
    """Nonempty antichains of ``vectors`` (sorted by sum), generated lazily."""
    for j in range(start, len(vectors)):
        c = vectors[j]
        if any(all(a <= b for a, b in zip(low, c)) for low in chosen):
            continue
        picked = chosen + (c,)
        yield picked
        yield from _antichains(vectors, j + 1, picked)


def _consistent(T: TaskSystem, counters, Q) -> bool:
    """Necessary conditions for ``Q`` to be reachable with these counters.

    All members share the release sizes of the current jobs, which are at
    least the largest ``c_i`` seen. A job released ``e`` slots ago received at
    most ``e`` units, and the jobs released within the last ``L`` slots
    received at most ``m * L`` units together.
    """
    elapsed = [t.P - p if d else None for t, (d, p) in zip(T.tasks, counters)]
    top = [max(c[i] for c in Q) for i in range(T.n)]
    windows = sorted({e for e in elapsed if e is not None})
    for c in Q:
        done = [top[i] - c[i] for i in range(T.n)]
        for L in windows:
            if any(done[i] > elapsed[i] for i in range(T.n) if elapsed[i] == L):
                return False
            if sum(done[i] for i in range(T.n) if elapsed[i] is not None and elapsed[i] <= L) > T.m * L:
                return False
    return True


@lru_cache(maxsize=None)
def _live_vectors(T: TaskSystem, ps: Tuple[int, ...]):
    """Counters for separation counters ``ps`` and the vectors that may sit in ``Q`` there."""
    counters = tuple((deadline_counter(p, t), p) for p, t in zip(ps, T.tasks))
    deadlines = tuple(d for d, _ in counters)
    ranges = [range(t.C + 1) if d else (0,) for t, d in zip(T.tasks, deadlines)]
    vectors = sorted(
        (c for c in itertools.product(*ranges) if _meets_deadlines(c, deadlines, T.m)),
        key=lambda c: (sum(c), c),
    )
    return counters, tuple(vectors)


def _states_with(T: TaskSystem, ps: Tuple[int, ...]) -> Iterator[KnowledgeState]:
    counters, vectors = _live_vectors(T, ps)
    for chain in _antichains(vectors):
        if _consistent(T, counters, chain):
            yield KnowledgeState(V1, counters, tuple(sorted(chain)))


def knowledge_universe(T: TaskSystem) -> Iterator[KnowledgeState]:
    """Lazily enumerate the side-1 states that low-memory search may meet.

    States are non-failure, in minimal-``Q`` form with doomed members
    removed. Between slots a task's counter pair is fixed by its separation
    counter (``d`` follows from ``p``) and ``p < P``; members of ``Q`` are
    zero on tasks whose deadline elapsed and satisfy :func:`_consistent`.
    """
    for ps in itertools.product(*(range(t.P) for t in T.tasks)):
        yield from _states_with(T, ps)


def _midpoint_candidates(T: TaskSystem, x, h, y=None, h2=0) -> Iterator[KnowledgeState]:
    """States of :func:`knowledge_universe` that pass :func:`_may_reach` on both sides.

    Separation counters are filtered first, so whole blocks of states are
    skipped without being generated.
    """
    per_task = []
    for i, t in enumerate(T.tasks):
        px = x.counters[i][1]
        py = None if y is None else y.counters[i][1]
        per_task.append([
            p for p in range(t.P)
            if separation_reachable(px, p, h, t.P) and (py is None or separation_reachable(p, py, h2, t.P))
        ])
    for ps in itertools.product(*per_task):
        for z in _states_with(T, ps):
            if _may_reach(T, x, z, h) and (y is None or _may_reach(T, z, y, h2)):
                yield z


def _may_reach(T, x, z, h):
    """Cheap necessary condition for reaching ``z`` from ``x`` within ``h`` steps.

    Counters must be reachable task by task. A task whose separation counter
    exceeds ``h - 1`` cannot release on the way, so its remaining work only
    drops; every minimal member of ``z.Q`` descends from some minimal member
    of ``x.Q`` by at most ``h`` units per such task and ``m * h`` in total.
    """
    if not all(
        separation_reachable(px, pz, h, t.P)
        for t, (_, px), (_, pz) in zip(T.tasks, x.counters, z.counters)
    ):
        return False
    frozen = [i for i, (_, p) in enumerate(x.counters) if p >= h]
    if not frozen:
        return True
    budget = T.m * h
    for c in z.Q:
        for c0 in x.Q:
            used = 0
            for i in frozen:
                drop = c0[i] - c[i]
                if drop < 0 or drop > h:
                    break
                used += drop
            else:
                if used <= budget:
                    break
        else:
            return False
    return True


def savitch_searcher(T: TaskSystem, max_steps: Optional[int] = None) -> SavitchReach:
    """A :class:`SavitchReach` over the states of :func:`knowledge_universe`."""
    return SavitchReach(
        successors=lambda v: (drop_doomed(w, T) for _, w in successors(v, T, antichain=True)),
        universe=lambda: knowledge_universe(T),
        is_target=lambda v: not v.Q,
        candidates=lambda x, h, y, h2: _midpoint_candidates(T, x, h, y, h2),
        max_steps=max_steps,
    )


def savitch_feasible(T: TaskSystem, max_steps: Optional[int] = 10**7) -> bool:
    """Decide feasibility without a visited set.

    Side-2 states have a unique successor, so paths are taken between side-1
    states only. A path to the first failure passes through distinct
    non-failure states, so one more than the universe size bounds its
    length; the search usually stops much earlier, at the radius of the
    reachable part.
    """
    bound = sum(1 for _ in knowledge_universe(T)) + 1
    searcher = savitch_searcher(T, max_steps)
    return not searcher.target_reachable(initial_state(T), bound)


__all__ = [
    "KnowledgeState", "Verdict", "Reconstruction", "V1", "V2", "initial_state", "release_successor",
    "tick_successor", "minimal_elements", "successors", "knowledge_walk", "is_feasible",
    "reconstruct_schedule", "drop_doomed", "knowledge_universe", "savitch_searcher", "savitch_feasible",
    "ResourceLimitError",
]
