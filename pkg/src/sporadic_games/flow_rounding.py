"""Finite job sets, continuous schedules and their rounding to discrete ones.

A job set is feasible on ``m`` processors iff the network

    source -> slot t            capacity m
    slot t -> job j             capacity 1, for r_j <= t < d_j
    job j  -> sink              capacity c_j

carries a flow equal to the total demand ``K = sum_j c_j``. A feasible
continuous schedule induces such a flow (after trimming over-service), and
since capacities are integral there is an integral maximum flow of the same
value: a discrete schedule.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .errors import InvalidScheduleError, InvariantError, ParseError
from .task_model import JobSequence, TaskSystem


class Job(NamedTuple):
    r: int  # release slot
    c: int  # compute time
    d: int  # absolute deadline; slots r .. d-1 are usable


def check_job(job: Job, index: Optional[int] = None) -> None:
    where = f"job {index + 1}: " if index is not None else ""
    if job.r < 0 or job.c < 1 or job.d < job.r + 1:
        raise InvariantError(f"{where}need r >= 0, c >= 1, d > r; got {tuple(job)}")


def jobs_from_sequence(sigma: JobSequence, T: TaskSystem) -> List[Job]:
    """One job per nonzero release; the deadline is ``t + D_i``."""
    return [
        Job(t, ki, t + T.tasks[i].D)
        for t, k in sigma.releases
        for i, ki in enumerate(k)
        if ki
    ]


@dataclass
class FlowNetwork:
    """Source ``0``, slot nodes ``1..H``, job nodes ``H+1..H+J``, sink last."""

    num_nodes: int
    source: int
    sink: int
    horizon: int
    jobs: Tuple[Job, ...]
    arcs: List[Tuple[int, int, int]]  # (tail, head, capacity)
    K: int

    def slot_node(self, t: int) -> int:
        return 1 + t

    def job_node(self, j: int) -> int:
        return 1 + self.horizon + j


def build_network(jobs: Sequence[Job], m: int) -> FlowNetwork:
    jobs = tuple(Job(*j) for j in jobs)
    for idx, job in enumerate(jobs):
        check_job(job, idx)
    horizon = max((j.d for j in jobs), default=0)
    source = 0
    sink = 1 + horizon + len(jobs)
    arcs = [(source, 1 + t, m) for t in range(horizon)]
    for t in range(horizon):
        for j, job in enumerate(jobs):
            if job.r <= t < job.d:
                arcs.append((1 + t, 1 + horizon + j, 1))
    arcs.extend((1 + horizon + j, sink, job.c) for j, job in enumerate(jobs))
    return FlowNetwork(sink + 1, source, sink, horizon, jobs, arcs, sum(j.c for j in jobs))


@dataclass
class FlowResult:
    value: int
    flow: List[int]  # aligned with ``network.arcs``
    network: FlowNetwork

    @property
    def saturates(self) -> bool:
        return self.value == self.network.K


def max_flow(net: FlowNetwork) -> FlowResult:
    """Dinic's blocking-flow algorithm on integer capacities."""
    n = net.num_nodes
    head: List[int] = []
    cap: List[int] = []
    adj: List[List[int]] = [[] for _ in range(n)]
    for u, v, c in net.arcs:
        adj[u].append(len(head))
        head.append(v)
        cap.append(c)
        adj[v].append(len(head))
        head.append(u)
        cap.append(0)
    s, z = net.source, net.sink
    value = 0
    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                if cap[e] > 0 and level[head[e]] < 0:
                    level[head[e]] = level[u] + 1
                    queue.append(head[e])
        if level[z] < 0:
            break
        it = [0] * n

        def push(u, limit):
            if u == z:
                return limit
            while it[u] < len(adj[u]):
                e = adj[u][it[u]]
                v = head[e]
                if cap[e] > 0 and level[v] == level[u] + 1:
                    got = push(v, min(limit, cap[e]))
                    if got:
                        cap[e] -= got
                        cap[e ^ 1] += got
                        return got
                it[u] += 1
            return 0

        while True:
            got = push(s, float("inf"))
            if not got:
                break
            value += got
    flow = [cap[2 * i + 1] for i in range(len(net.arcs))]
    return FlowResult(int(value), flow, net)


def has_feasible_schedule(jobs: Sequence[Job], m: int) -> bool:
    return max_flow(build_network(jobs, m)).saturates


def discrete_schedule(result: FlowResult) -> List[Tuple[int, ...]]:
    """Per slot, the jobs that receive a unit of processing under an integral flow."""
    net = result.network
    slots: List[List[int]] = [[] for _ in range(net.horizon)]
    first_job = 1 + net.horizon
    for (u, v, _), f in zip(net.arcs, result.flow):
        if f and 1 <= u <= net.horizon and first_job <= v < net.sink:
            slots[u - 1].append(v - first_job)
    return [tuple(sorted(s)) for s in slots]


# --- continuous schedules ------------------------------------------------------

ContinuousSchedule = Dict[Tuple[int, int], Fraction]  # (job index, slot) -> amount


@dataclass
class ValidationReport:
    ok: bool
    condition: Optional[str] = None
    location: Optional[tuple] = None
    message: str = "valid"

    def __bool__(self):
        return self.ok


def validate_continuous(w: Mapping[Tuple[int, int], Fraction], jobs: Sequence[Job], m: int) -> ValidationReport:
    """Check a continuous schedule and report the first violated condition.

    Conditions, in the order checked: ``"1"`` (entries in ``[0, 1]`` for a
    known job), ``"window"`` (no processing outside ``[r_j, d_j)``), ``"2"``
    (at most ``m`` per slot) and ``"3"`` (each job gets at least ``c_j``
    inside its window).
    """
    for (j, t), x in sorted(w.items()):
        x = Fraction(x)
        if not 0 <= j < len(jobs):
            return ValidationReport(False, "1", (j, t), f"unknown job index {j}")
        if x < 0 or x > 1:
            return ValidationReport(False, "1", (j, t), f"w(job {j + 1}, t={t}) = {x} is outside [0, 1]")
    for (j, t), x in sorted(w.items()):
        if x and not jobs[j].r <= t < jobs[j].d:
            return ValidationReport(False, "window", (j, t), f"job {j + 1} processed at t={t} outside its window")
    per_slot: Dict[int, Fraction] = {}
    for (j, t), x in w.items():
        per_slot[t] = per_slot.get(t, Fraction(0)) + Fraction(x)
    for t in sorted(per_slot):
        if per_slot[t] > m:
            return ValidationReport(False, "2", (t,), f"slot {t} carries {per_slot[t]} > m={m}")
    served = [Fraction(0)] * len(jobs)
    for (j, t), x in w.items():
        served[j] += Fraction(x)
    for j, job in enumerate(jobs):
        if served[j] < job.c:
            return ValidationReport(False, "3", (j,), f"job {j + 1} receives {served[j]} < c={job.c}")
    return ValidationReport(True)


def trim_excess(w: Mapping[Tuple[int, int], Fraction], jobs: Sequence[Job]) -> ContinuousSchedule:
    """Remove over-service so that every job receives exactly ``c_j``.

    Excess is taken from a job's latest slots first. Amounts only decrease,
    so a schedule meeting the range and capacity conditions still does.
    """
    out: ContinuousSchedule = {key: Fraction(x) for key, x in w.items() if x}
    for j, job in enumerate(jobs):
        slots = sorted((t for (i, t) in out if i == j), reverse=True)
        excess = sum(out[(j, t)] for t in slots) - job.c
        for t in slots:
            if excess <= 0:
                break
            cut = min(excess, out[(j, t)])
            out[(j, t)] -= cut
            excess -= cut
            if not out[(j, t)]:
                del out[(j, t)]
    return out


def continuous_to_discrete(jobs: Sequence[Job], m: int, w: Mapping[Tuple[int, int], Fraction]) -> List[Tuple[int, ...]]:
    """Round a feasible continuous schedule to a discrete one.

    Returns, per slot ``t < max d_j``, the jobs processed in that slot. An
    input that is already 0/1-valued is kept as is once over-service is
    trimmed; otherwise an integral maximum flow supplies the assignment.
    """
    jobs = [Job(*j) for j in jobs]
    report = validate_continuous(w, jobs, m)
    if not report:
        raise InvalidScheduleError(report)
    trimmed = trim_excess(w, jobs)
    horizon = max((j.d for j in jobs), default=0)
    if all(x == 1 for x in trimmed.values()):
        slots: List[List[int]] = [[] for _ in range(horizon)]
        for j, t in sorted(trimmed):
            slots[t].append(j)
        return [tuple(s) for s in slots]
    result = max_flow(build_network(jobs, m))
    if not result.saturates:  # pragma: no cover - excluded by the validation above
        raise AssertionError("flow value below total demand despite a valid continuous schedule")
    return discrete_schedule(result)


def check_discrete(schedule: Sequence[Sequence[int]], jobs: Sequence[Job], m: int) -> ValidationReport:
    """Validate a discrete job schedule: capacity, windows, exact completion."""
    served = [0] * len(jobs)
    for t, S in enumerate(schedule):
        if len(S) > m:
            return ValidationReport(False, "2", (t,), f"slot {t} runs {len(S)} jobs > m={m}")
        if len(set(S)) != len(S):
            return ValidationReport(False, "1", (t,), f"slot {t} runs a job twice")
        for j in S:
            if not jobs[j].r <= t < jobs[j].d:
                return ValidationReport(False, "window", (j, t), f"job {j + 1} runs at t={t} outside its window")
            served[j] += 1
    for j, job in enumerate(jobs):
        if served[j] != job.c:
            return ValidationReport(False, "3", (j,), f"job {j + 1} receives {served[j]} != c={job.c}")
    return ValidationReport(True)


# --- text formats --------------------------------------------------------------


def parse_jobs(text: str) -> List[Job]:
    jobs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected '<r> <c> <d>'", lineno, 1)
        try:
            job = Job(*(int(x) for x in parts))
        except ValueError:
            raise ParseError("expected integers", lineno, 1) from None
        try:
            check_job(job, len(jobs))
        except InvariantError as exc:
            raise ParseError(str(exc), lineno, 1) from None
        jobs.append(job)
    return jobs


def format_jobs(jobs: Sequence[Job]) -> str:
    return "".join(f"{j.r} {j.c} {j.d}\n" for j in jobs)


def parse_continuous(text: str) -> ContinuousSchedule:
    """Lines ``<job-index> <t> <num>/<den>`` with 1-based job indices."""
    w: ContinuousSchedule = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected '<job> <t> <amount>'", lineno, 1)
        try:
            j, t, x = int(parts[0]) - 1, int(parts[1]), Fraction(parts[2])
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad entry {line!r}", lineno, 1) from None
        if j < 0 or t < 0:
            raise ParseError("job indices start at 1 and slots at 0", lineno, 1)
        if (j, t) in w:
            raise ParseError(f"entry for job {j + 1}, slot {t} repeated", lineno, 1)
        w[(j, t)] = x
    return w


def format_discrete(schedule: Sequence[Sequence[int]]) -> str:
    return "".join(" ".join([str(t)] + [str(j + 1) for j in S]) + "\n" for t, S in enumerate(schedule))


__all__ = [
    "Job", "FlowNetwork", "FlowResult", "ValidationReport", "ContinuousSchedule", "jobs_from_sequence",
    "build_network", "max_flow", "has_feasible_schedule", "discrete_schedule", "validate_continuous",
    "trim_excess", "continuous_to_discrete", "check_discrete", "parse_jobs", "format_jobs",
    "parse_continuous", "format_discrete",
]
