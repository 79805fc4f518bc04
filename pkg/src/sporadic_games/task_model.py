"""Sporadic task systems and their exact discrete-time semantics.

Tasks are indexed from 0 inside the library. The text formats read and
written here use 1-based task indices, which is what people type.

A backlog configuration is a tuple of ``(c, d, p)`` triples, one per task:
remaining compute of the pending job, remaining slots to its deadline, and
remaining slots until the task may release again. One slot is processed per
call to :func:`step`, which applies the releases of that slot and then a
clock tick. A job of task ``i`` released at time ``t`` must therefore be
finished by the slots ``t, ..., t + D_i - 1``.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Tuple

from .errors import IllegalReleaseError, InvariantError, ParseError

Triple = Tuple[int, int, int]
BacklogConfig = Tuple[Triple, ...]
ReleaseVector = Tuple[int, ...]
ScheduleStep = Tuple[int, ...]
Schedule = Tuple[ScheduleStep, ...]

#: A memoryless scheduling algorithm: ``(config, release, system) -> step``.
Policy = Callable[[BacklogConfig, ReleaseVector, "TaskSystem"], Iterable[int]]


class Task(NamedTuple):
    C: int
    D: int
    P: int


@dataclass(frozen=True)
class TaskSystem:
    """``n`` sporadic constrained-deadline tasks on ``m`` identical processors."""

    tasks: Tuple[Task, ...]
    m: int

    def __post_init__(self):
        tasks = tuple(Task(*t) for t in self.tasks)
        object.__setattr__(self, "tasks", tasks)
        if not tasks:
            raise InvariantError("a task system needs at least one task")
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 1:
            raise InvariantError(f"processor count must be a positive integer, got {self.m!r}")
        if self.m > len(tasks):
            raise InvariantError(f"processor count m={self.m} exceeds task count n={len(tasks)}")
        for i, t in enumerate(tasks, start=1):
            for name, v in zip("CDP", t):
                if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                    raise InvariantError(f"task {i}: {name} must be a positive integer, got {v!r}", task=i)
            if t.C > t.D:
                raise InvariantError(f"task {i}: C={t.C} exceeds D={t.D}", task=i)
            if t.D > t.P:
                raise InvariantError(f"task {i}: D={t.D} exceeds P={t.P} (deadlines must be constrained)", task=i)

    @property
    def n(self) -> int:
        return len(self.tasks)

    @property
    def max_deadline(self) -> int:
        return max(t.D for t in self.tasks)

    def digest(self) -> str:
        return hashlib.sha256(format_task_system(self).encode()).hexdigest()[:16]

    def __str__(self):
        body = ",".join(f"({t.C},{t.D},{t.P})" for t in self.tasks)
        return f"T=({body}) m={self.m}"


def zero_config(T: TaskSystem) -> BacklogConfig:
    return ((0, 0, 0),) * T.n


def zero_release(T: TaskSystem) -> ReleaseVector:
    return (0,) * T.n


def state_space_size(T: TaskSystem) -> int:
    """Number of backlog configurations, ``prod_i (C_i+1)(D_i+1)(P_i+1)``.

    Python integers do not overflow, so the count is always exact.
    """
    return math.prod((t.C + 1) * (t.D + 1) * (t.P + 1) for t in T.tasks)


def enumerate_configs(T: TaskSystem) -> Iterator[BacklogConfig]:
    """Every element of the configuration space, lexicographically."""
    per_task = [list(itertools.product(range(t.C + 1), range(t.D + 1), range(t.P + 1))) for t in T.tasks]
    return itertools.product(*per_task)


def legal_releases(b: BacklogConfig, T: TaskSystem) -> Iterator[ReleaseVector]:
    """Release vectors the adversary may play in ``b``, lexicographically.

    Task ``i`` may release a job of any size ``1..C_i`` only when ``p_i == 0``.
    """
    ranges = [range(t.C + 1) if p == 0 else (0,) for t, (_, _, p) in zip(T.tasks, b)]
    return itertools.product(*ranges)


def check_release(b: BacklogConfig, k: ReleaseVector, T: TaskSystem) -> None:
    if len(k) != T.n:
        raise IllegalReleaseError(f"release vector has {len(k)} entries, expected {T.n}")
    for i, (ki, t, (_, _, p)) in enumerate(zip(k, T.tasks, b)):
        if not 0 <= ki <= t.C:
            raise IllegalReleaseError(f"task {i + 1}: release size {ki} outside 0..{t.C}")
        if ki > 0 and p > 0:
            raise IllegalReleaseError(f"task {i + 1}: released while {p} slot(s) of separation remain")


def step(b: BacklogConfig, k: ReleaseVector, S: Iterable[int], T: TaskSystem, check: bool = True) -> BacklogConfig:
    """Successor configuration after releasing ``k`` and processing ``S`` for one slot."""
    if check:
        check_release(b, k, T)
        S = frozenset(S)
        if len(S) > T.m:
            raise ValueError(f"schedule step {sorted(S)} uses more than m={T.m} processors")
    out = []
    for i, ((c, d, p), ki, t) in enumerate(zip(b, k, T.tasks)):
        x = 1 if i in S else 0
        if ki > 0:
            out.append((ki - x, t.D - 1, t.P - 1))
        else:
            out.append((c - x if c > x else 0, d - 1 if d else 0, p - 1 if p else 0))
    return tuple(out)


def is_failure(b: BacklogConfig) -> bool:
    """True iff some pending job has work left but no time left."""
    for c, d, _ in b:
        if c > 0 and d == 0:
            return True
    return False


@lru_cache(maxsize=None)
def schedule_steps(n: int, m: int) -> Tuple[ScheduleStep, ...]:
    """All subsets of ``range(n)`` of size at most ``m``, in lexicographic tuple order."""
    subsets = [c for r in range(min(n, m) + 1) for c in itertools.combinations(range(n), r)]
    return tuple(sorted(subsets))


@lru_cache(maxsize=None)
def _subsets_of(pending: Tuple[int, ...], m: int) -> Tuple[ScheduleStep, ...]:
    subsets = [c for r in range(min(len(pending), m) + 1) for c in itertools.combinations(pending, r)]
    return tuple(sorted(subsets))


def useful_steps(c: Sequence[int], m: int) -> Tuple[ScheduleStep, ...]:
    """Subsets of size at most ``m`` of the tasks with pending work.

    Naming a task without a pending job has no effect, so these steps reach
    every successor that :func:`schedule_steps` reaches.
    """
    return _subsets_of(tuple(i for i, ci in enumerate(c) if ci > 0), m)


def separation_reachable(p_from: int, p_to: int, steps: int, P: int) -> bool:
    """Whether a task's separation counter can go from ``p_from`` to ``p_to`` in at most ``steps`` slots.

    Counters seen between slots only take values ``0..P-1``: a positive
    counter decrements, a zero counter stays or (on release) becomes ``P-1``.
    """
    if p_to == p_from:
        return True
    if p_to < p_from and p_from - p_to <= steps:
        return True
    rest = steps - p_from
    if rest <= 0:
        return False
    return P - 1 - p_to <= rest - 1 and p_to <= P - 1


def deadline_counter(p: int, t: Task) -> int:
    """Remaining deadline implied by the separation counter of a configuration between slots."""
    return max(p - (t.P - t.D), 0)


# --- job sequences -----------------------------------------------------------


@dataclass(frozen=True)
class JobSequence:
    """A finite job sequence: release vectors at selected times, zero elsewhere."""

    n: int
    releases: Tuple[Tuple[int, ReleaseVector], ...] = ()

    def __post_init__(self):
        cleaned = {}
        for t, k in self.releases:
            k = tuple(k)
            if len(k) != self.n:
                raise ValueError(f"release at t={t} has {len(k)} entries, expected {self.n}")
            if t < 0:
                raise ValueError(f"negative release time {t}")
            if t in cleaned:
                raise ValueError(f"duplicate release time {t}")
            if any(k):
                cleaned[t] = k
        object.__setattr__(self, "releases", tuple(sorted(cleaned.items())))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, Sequence[int]], n: int) -> "JobSequence":
        return cls(n, tuple((t, tuple(k)) for t, k in mapping.items()))

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[int]]) -> "JobSequence":
        """Build from a dense list ``[sigma(0), sigma(1), ...]``."""
        if not vectors:
            raise ValueError("cannot infer n from an empty vector list")
        return cls(len(vectors[0]), tuple(enumerate(tuple(v) for v in vectors)))

    @property
    def length(self) -> int:
        """Smallest ``L`` with ``sigma(t) = 0`` for every ``t >= L``."""
        return self.releases[-1][0] + 1 if self.releases else 0

    def at(self, t: int) -> ReleaseVector:
        for s, k in self.releases:
            if s == t:
                return k
            if s > t:
                break
        return (0,) * self.n

    def dense(self, horizon: Optional[int] = None) -> list:
        horizon = self.length if horizon is None else horizon
        out = [(0,) * self.n for _ in range(horizon)]
        for t, k in self.releases:
            if t < horizon:
                out[t] = k
        return out

    def as_dict(self) -> dict:
        return dict(self.releases)

    def __len__(self):
        return self.length


def is_legal_sequence(sigma: JobSequence, T: TaskSystem) -> bool:
    """Sizes within ``1..C_i`` and same-task releases at least ``P_i`` apart."""
    if sigma.n != T.n:
        return False
    last = [None] * T.n
    for t, k in sigma.releases:
        for i, ki in enumerate(k):
            if ki == 0:
                continue
            if not 0 < ki <= T.tasks[i].C:
                return False
            if last[i] is not None and t - last[i] < T.tasks[i].P:
                return False
            last[i] = t
    return True


# --- simulation --------------------------------------------------------------


@dataclass
class SimulationResult:
    trace: list
    schedule: list
    failure_time: Optional[int] = None

    @property
    def met(self) -> bool:
        return self.failure_time is None

    @property
    def verdict(self) -> str:
        return "met" if self.met else f"failure at time {self.failure_time}"


def default_horizon(sigma: JobSequence, T: TaskSystem) -> int:
    return sigma.length + T.max_deadline


def _run(sigma, T, horizon, decide) -> SimulationResult:
    if not is_legal_sequence(sigma, T):
        raise IllegalReleaseError("job sequence is not legal for this task system")
    if horizon is None:
        horizon = default_horizon(sigma, T)
    releases = sigma.dense(horizon)
    b = zero_config(T)
    trace, schedule = [b], []
    for t in range(horizon):
        S = decide(t, b, releases[t])
        schedule.append(S)
        b = step(b, releases[t], S, T)
        trace.append(b)
        if is_failure(b):
            return SimulationResult(trace, schedule, failure_time=t + 1)
    return SimulationResult(trace, schedule)


def simulate(sigma: JobSequence, alg: Policy, T: TaskSystem, horizon: Optional[int] = None) -> SimulationResult:
    """Run a memoryless policy on ``sigma`` and stop at the first failure.

    ``trace[t]`` is the configuration at time ``t``; a failure reported at
    time ``t`` means ``trace[t]`` is the first failure configuration.
    """

    def decide(t, b, k):
        S = tuple(sorted(alg(b, k, T)))
        if len(S) > T.m:
            raise ValueError(f"policy chose {len(S)} tasks at t={t}, only m={T.m} processors")
        return S

    return _run(sigma, T, horizon, decide)


def run_schedule(sigma: JobSequence, schedule: Sequence[Iterable[int]], T: TaskSystem,
                 horizon: Optional[int] = None) -> SimulationResult:
    """Evaluate a fixed (possibly clairvoyant) schedule; slots past its end are idle."""

    def decide(t, b, k):
        return tuple(sorted(schedule[t])) if t < len(schedule) else ()

    return _run(sigma, T, horizon, decide)


# --- text formats ------------------------------------------------------------


def _ints(tokens, lineno, line):
    out = []
    for tok in tokens:
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"expected an integer, got {tok!r}", lineno, line.index(tok) + 1) from None
    return out


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            yield lineno, line


def parse_task_system(text: str) -> TaskSystem:
    """Parse ``processors <m>`` plus one ``task <C> <D> <P>`` line per task."""
    m = None
    tasks = []
    for lineno, line in _lines(text):
        words = line.split()
        key = words[0]
        if key == "processors":
            if m is not None:
                raise ParseError("'processors' given twice", lineno, line.index(key) + 1)
            if len(words) != 2:
                raise ParseError("expected 'processors <m>'", lineno, line.index(key) + 1)
            (m,) = _ints(words[1:], lineno, line)
        elif key == "task":
            if len(words) != 4:
                raise ParseError("expected 'task <C> <D> <P>'", lineno, line.index(key) + 1)
            tasks.append(Task(*_ints(words[1:], lineno, line)))
        else:
            raise ParseError(f"unknown keyword {key!r}", lineno, line.index(key) + 1)
    if m is None:
        raise ParseError("missing 'processors <m>' line")
    if not tasks:
        raise ParseError("no 'task' lines")
    return TaskSystem(tuple(tasks), m)


def format_task_system(T: TaskSystem) -> str:
    lines = [f"processors {T.m}"] + [f"task {t.C} {t.D} {t.P}" for t in T.tasks]
    return "\n".join(lines) + "\n"


def parse_job_sequence(text: str, n: int) -> JobSequence:
    """Parse ``<t> <task> <compute>`` lines (1-based task, nondecreasing ``t``)."""
    releases = {}
    prev_t = -1
    for lineno, line in _lines(text):
        words = line.split()
        if len(words) != 3:
            raise ParseError("expected '<t> <task> <compute>'", lineno, 1)
        t, task, c = _ints(words, lineno, line)
        if t < prev_t:
            raise ParseError(f"time {t} decreases (previous {prev_t})", lineno, 1)
        if not 1 <= task <= n:
            raise ParseError(f"task index {task} outside 1..{n}", lineno, line.index(words[1]) + 1)
        if c < 0:
            raise ParseError(f"negative compute time {c}", lineno, line.index(words[2]) + 1)
        vec = releases.setdefault(t, [0] * n)
        if vec[task - 1]:
            raise ParseError(f"task {task} released twice at time {t}", lineno, 1)
        vec[task - 1] = c
        prev_t = t
    return JobSequence.from_mapping(releases, n)


def format_job_sequence(sigma: JobSequence) -> str:
    lines = [f"{t} {i + 1} {ki}" for t, k in sigma.releases for i, ki in enumerate(k) if ki]
    return "".join(line + "\n" for line in lines)


def parse_schedule(text: str, n: int) -> Schedule:
    """Parse ``<t> <task ...>`` lines; missing slots are idle."""
    steps = {}
    for lineno, line in _lines(text):
        words = line.split()
        t, *tasks = _ints(words, lineno, line)
        if t in steps:
            raise ParseError(f"slot {t} listed twice", lineno, 1)
        for task in tasks:
            if not 1 <= task <= n:
                raise ParseError(f"task index {task} outside 1..{n}", lineno, 1)
        steps[t] = tuple(sorted(task - 1 for task in tasks))
    horizon = max(steps) + 1 if steps else 0
    return tuple(steps.get(t, ()) for t in range(horizon))


def format_schedule(schedule: Sequence[Iterable[int]]) -> str:
    return "".join(
        " ".join([str(t)] + [str(i + 1) for i in sorted(S)]) + "\n" for t, S in enumerate(schedule)
    )


def format_config(b: BacklogConfig) -> str:
    return " ".join(f"{c},{d},{p}" for c, d, p in b)


def parse_config(text: str) -> BacklogConfig:
    return tuple(tuple(int(x) for x in item.split(",")) for item in text.split())


__all__ = [
    "Task", "TaskSystem", "JobSequence", "SimulationResult", "BacklogConfig", "ReleaseVector",
    "ScheduleStep", "Schedule", "Policy", "zero_config", "zero_release", "state_space_size",
    "enumerate_configs", "legal_releases", "check_release", "step", "is_failure", "schedule_steps",
    "useful_steps", "is_legal_sequence", "simulate", "run_schedule", "default_horizon",
    "parse_task_system", "format_task_system", "parse_job_sequence", "format_job_sequence",
    "parse_schedule", "format_schedule", "format_config", "parse_config",
]
