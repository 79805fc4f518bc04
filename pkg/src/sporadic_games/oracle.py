"""Brute-force reference implementations, used to cross-check the solvers.

Nothing here calls into the graph or game modules, nor into
:func:`~sporadic_games.task_model.step`: the job-level and configuration
bookkeeping is written out again so that agreement carries information.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Sequence, Set, Tuple

from .errors import ResourceLimitError
from .task_model import JobSequence, TaskSystem


def _steps(n: int, m: int):
    return [S for r in range(min(n, m) + 1) for S in itertools.combinations(range(n), r)]


def brute_force_valid_states(sigma: JobSequence, t: int, T: TaskSystem,
                             max_prefixes: int = 10**6) -> Set[Tuple[int, ...]]:
    """Remaining-work vectors at time ``t`` over all schedule prefixes that meet every deadline so far.

    Jobs are tracked individually: a job released at ``r`` with work ``c``
    must receive ``c`` units in slots ``r .. r + D - 1``. Every sequence of
    ``t`` steps (subsets of at most ``m`` tasks) is tried.
    """
    n = T.n
    jobs = [(i, r, c, r + T.tasks[i].D) for r, k in sigma.releases for i, c in enumerate(k) if c]
    steps = _steps(n, T.m)
    out: Set[Tuple[int, ...]] = set()
    count = 0

    def current(i, now):
        # index of the latest job of task i released strictly before ``now``
        best = None
        for j, (task, r, _, _) in enumerate(jobs):
            if task == i and r < now:
                best = j
        return best

    def dfs(slot, remaining):
        nonlocal count
        count += 1
        if count > max_prefixes:
            raise ResourceLimitError(f"more than {max_prefixes} schedule prefixes")
        if slot == t:
            vec = []
            for i in range(n):
                j = current(i, t)
                vec.append(0 if j is None else remaining[j])
            out.add(tuple(vec))
            return
        for S in steps:
            nxt = list(remaining)
            for i in S:
                j = current(i, slot + 1)
                if j is not None and nxt[j] > 0:
                    nxt[j] -= 1
            if any(nxt[j] > 0 and dl <= slot + 1 for j, (_, _, _, dl) in enumerate(jobs)):
                continue
            dfs(slot + 1, nxt)

    dfs(0, [c for _, _, c, _ in jobs])
    return out


# --- online game by depth-bounded search -------------------------------------


def _releases(b, T):
    options = [range(t.C + 1) if p == 0 else (0,) for (_, _, p), t in zip(b, T.tasks)]
    return itertools.product(*options)


def _advance(b, k, S, T):
    out = []
    for i, ((c, d, p), ki, t) in enumerate(zip(b, k, T.tasks)):
        if ki:
            c, d, p = ki, t.D, t.P
        if i in S and c > 0:
            c -= 1
        out.append((c, max(d - 1, 0), max(p - 1, 0)))
    return tuple(out)


def _failed(b):
    return any(c > 0 and d == 0 for c, d, _ in b)


def brute_force_online(T: TaskSystem, depth: int, max_entries: int = 10**6) -> bool:
    """Whether the scheduler survives ``depth`` rounds against every adversary.

    Rounds alternate a release by the adversary and a step by the scheduler.
    The adversary wins when a deadline is missed within ``depth`` rounds.
    Results are memoized on ``(configuration, rounds left)``, which is sound
    because the outcome depends on nothing else. With ``depth`` at least the
    number of configurations this coincides with online feasibility.
    """
    steps = _steps(T.n, T.m)
    memo: Dict[Tuple[tuple, int], bool] = {}

    def adversary_wins(b, left):
        if _failed(b):
            return True
        if left == 0:
            return False
        key = (b, left)
        if key in memo:
            return memo[key]
        if len(memo) >= max_entries:
            raise ResourceLimitError(f"more than {max_entries} memo entries")
        won = any(
            all(adversary_wins(_advance(b, k, S, T), left - 1) for S in steps)
            for k in _releases(b, T)
        )
        memo[key] = won
        return won

    zero = tuple((0, 0, 0) for _ in T.tasks)
    return not adversary_wins(zero, depth)


def enumerate_legal_sequences(T: TaskSystem, horizon: int) -> Iterator[JobSequence]:
    """Every legal job sequence with releases only at times ``< horizon``.

    Each slot offers, per task, either no release or a release of ``1..C_i``
    units when at least ``P_i`` slots have passed since the previous one.
    Order: depth first, release vectors lexicographic per slot.
    """
    n = T.n

    def rec(t, last, prefix):
        if t == horizon:
            yield JobSequence(n, tuple(prefix))
            return
        options = [
            range(task.C + 1) if last[i] is None or t - last[i] >= task.P else (0,)
            for i, task in enumerate(T.tasks)
        ]
        for k in itertools.product(*options):
            nxt = tuple(t if ki else li for ki, li in zip(k, last))
            yield from rec(t + 1, nxt, prefix + [(t, k)] if any(k) else prefix)

    yield from rec(0, (None,) * n, [])


def count_legal_sequences(T: TaskSystem, horizon: int) -> int:
    """Closed form for systems whose tasks all have ``P = 1``."""
    if any(t.P != 1 for t in T.tasks):
        raise ValueError("closed form only holds when every P_i = 1")
    per_slot = 1
    for t in T.tasks:
        per_slot *= t.C + 1
    return per_slot**horizon


# --- finite job sets --------------------------------------------------------


def brute_force_max_served(jobs: Sequence[Tuple[int, int, int]], m: int) -> int:
    """Most units of work any discrete schedule delivers within the windows."""
    horizon = max((d for _, _, d in jobs), default=0)
    best: Dict[Tuple[int, Tuple[int, ...]], int] = {}

    def rec(t, left):
        if t == horizon:
            return 0
        key = (t, left)
        if key in best:
            return best[key]
        active = [j for j, (r, _, d) in enumerate(jobs) if r <= t < d and left[j] > 0]
        value = 0
        for size in range(min(m, len(active)) + 1):
            for S in itertools.combinations(active, size):
                nxt = tuple(x - 1 if j in S else x for j, x in enumerate(left))
                value = max(value, size + rec(t + 1, nxt))
        best[key] = value
        return value

    return rec(0, tuple(c for _, c, _ in jobs))


def simplex_max(c: Sequence[Fraction], A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Fraction:
    """Maximize ``c x`` subject to ``A x <= b``, ``x >= 0``, with ``b >= 0``.

    Dense tableau, exact rationals, Bland's rule (no cycling). The origin is
    feasible because ``b >= 0``, so no first phase is needed.
    """
    rows, cols = len(A), len(c)
    if any(x < 0 for x in b):
        raise ValueError("right-hand side must be nonnegative")
    tab = [[Fraction(x) for x in A[i]] + [Fraction(int(i == j)) for j in range(rows)] + [Fraction(b[i])]
           for i in range(rows)]
    obj = [-Fraction(x) for x in c] + [Fraction(0)] * rows + [Fraction(0)]
    basis = [cols + i for i in range(rows)]
    while True:
        enter = next((j for j in range(cols + rows) if obj[j] < 0), None)
        if enter is None:
            return obj[-1]
        ratios = [(tab[i][-1] / tab[i][enter], basis[i], i) for i in range(rows) if tab[i][enter] > 0]
        if not ratios:
            raise ValueError("linear program is unbounded")
        _, _, leave = min(ratios)
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(rows):
            if i != leave and tab[i][enter]:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, tab[leave])]
        basis[leave] = enter


def lp_max_served(jobs: Sequence[Tuple[int, int, int]], m: int) -> Fraction:
    """Optimum of the fractional relaxation: variables ``f(t, j)`` in ``[0, 1]`` inside windows.

    Constraints: per slot ``sum_j f <= m``, per job ``sum_t f <= c_j``.
    """
    pairs = [(t, j) for j, (r, _, d) in enumerate(jobs) for t in range(r, d)]
    if not pairs:
        return Fraction(0)
    horizon = max(d for _, _, d in jobs)
    A: List[List[Fraction]] = []
    b: List[Fraction] = []
    for t in range(horizon):
        A.append([Fraction(int(pt == t)) for pt, _ in pairs])
        b.append(Fraction(m))
    for j, (_, c, _) in enumerate(jobs):
        A.append([Fraction(int(pj == j)) for _, pj in pairs])
        b.append(Fraction(c))
    for idx in range(len(pairs)):
        A.append([Fraction(int(i == idx)) for i in range(len(pairs))])
        b.append(Fraction(1))
    return simplex_max([Fraction(1)] * len(pairs), A, b)


__all__ = [
    "brute_force_valid_states", "brute_force_online", "enumerate_legal_sequences", "count_legal_sequences",
    "brute_force_max_served", "simplex_max", "lp_max_served",
]
