"""Instance generators and exhaustive searches over small task systems."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .blindfold import is_feasible
from .flow_rounding import Job
from .online_game import is_online_feasible
from .oracle import brute_force_max_served
from .schedulability import is_schedulable, policy_edf
from .task_model import Task, TaskSystem


def random_system(rng: random.Random, max_tasks: int = 3, max_param: int = 4, max_m: int = 2) -> TaskSystem:
    """Constrained-deadline system with ``C <= D <= P <= max_param`` and ``m <= min(max_m, n)``."""
    n = rng.randint(1, max_tasks)
    m = rng.randint(1, min(max_m, n))
    tasks = []
    for _ in range(n):
        P = rng.randint(1, max_param)
        D = rng.randint(1, P)
        C = rng.randint(1, D)
        tasks.append(Task(C, D, P))
    return TaskSystem(tuple(tasks), m)


def random_suite(count: int = 200, seed: int = 2026, **kwargs) -> List[TaskSystem]:
    rng = random.Random(seed)
    return [random_system(rng, **kwargs) for _ in range(count)]


def all_systems(n: int, max_param: int, m: int, ordered: bool = False) -> Iterator[TaskSystem]:
    """Every system of ``n`` tasks with parameters up to ``max_param``.

    Tasks come in sorted order unless ``ordered``, which also yields every
    permutation of the same tasks as a separate system.
    """
    tasks = [Task(C, D, P) for P in range(1, max_param + 1) for D in range(1, P + 1) for C in range(1, D + 1)]
    combos = itertools.product(tasks, repeat=n) if ordered else itertools.combinations_with_replacement(tasks, n)
    for combo in combos:
        yield TaskSystem(combo, m)


def find_edf_failures(systems, limit: Optional[int] = None) -> List[TaskSystem]:
    """Feasible systems on which EDF-lowindex misses a deadline."""
    found = []
    for T in systems:
        if is_feasible(T).feasible and not is_schedulable(T, policy_edf).feasible:
            found.append(T)
            if limit is not None and len(found) >= limit:
                break
    return found


def find_feasible_not_online(systems, limit: Optional[int] = None) -> List[TaskSystem]:
    """Feasible systems that admit no online scheduler."""
    found = []
    for T in systems:
        if is_feasible(T).feasible and not is_online_feasible(T):
            found.append(T)
            if limit is not None and len(found) >= limit:
                break
    return found


def random_jobs(rng: random.Random, max_jobs: int = 4, horizon: int = 5) -> List[Job]:
    jobs = []
    for _ in range(rng.randint(1, max_jobs)):
        r = rng.randrange(horizon)
        d = rng.randint(r + 1, horizon)
        jobs.append(Job(r, rng.randint(1, d - r), d))
    return jobs


def random_fractional(rng: random.Random, max_jobs: int = 4, horizon: int = 5, max_m: int = 2,
                      max_den: int = 6) -> Tuple[List[Job], int, Dict[Tuple[int, int], Fraction]]:
    """Job set, processor count and a valid fractional schedule for it.

    Amounts are drawn per (job, slot) and scaled down where a slot is
    overloaded; each job then asks for the whole units it received, so every
    condition holds by construction and some jobs get more than they need.
    """
    while True:
        m = rng.randint(1, max_m)
        windows = random_jobs(rng, max_jobs, horizon)
        w: Dict[Tuple[int, int], Fraction] = {}
        for t in range(horizon):
            here = [j for j, job in enumerate(windows) if job.r <= t < job.d]
            amounts = {j: Fraction(rng.randint(0, max_den), rng.randint(1, max_den)) for j in here}
            amounts = {j: min(a, Fraction(1)) for j, a in amounts.items()}
            total = sum(amounts.values())
            scale = Fraction(m) / total if total > m else Fraction(1)
            for j, a in amounts.items():
                if a:
                    w[(j, t)] = a * scale
        received = [sum(a for (j, _), a in w.items() if j == i) for i in range(len(windows))]
        keep = [i for i, got in enumerate(received) if got >= 1]
        if not keep:
            continue
        jobs = [Job(windows[i].r, int(received[i]), windows[i].d) for i in keep]
        renumber = {i: k for k, i in enumerate(keep)}
        return jobs, m, {(renumber[j], t): a for (j, t), a in w.items() if j in renumber}


def random_infeasible_jobs(rng: random.Random, max_jobs: int = 5, horizon: int = 4,
                           max_m: int = 2) -> Tuple[List[Job], int]:
    """Job set with no schedule; rejection sampling against the brute-force oracle."""
    while True:
        m = rng.randint(1, max_m)
        jobs = random_jobs(rng, max_jobs, horizon)
        if brute_force_max_served(jobs, m) < sum(job.c for job in jobs):
            return jobs, m


__all__ = [
    "random_system", "random_suite", "all_systems", "find_edf_failures", "find_feasible_not_online",
    "random_jobs", "random_fractional", "random_infeasible_jobs",
]
