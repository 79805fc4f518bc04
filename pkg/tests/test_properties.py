import random

from hypothesis import given, settings, strategies as st

from sporadic_games.blindfold import is_feasible, knowledge_walk, reconstruct_schedule
from sporadic_games.flow_rounding import (
    build_network,
    check_discrete,
    continuous_to_discrete,
    discrete_schedule,
    format_jobs,
    has_feasible_schedule,
    jobs_from_sequence,
    max_flow,
    parse_jobs,
    validate_continuous,
)
from sporadic_games.harness import random_fractional, random_jobs
from sporadic_games.online_game import is_online_feasible
from sporadic_games.oracle import brute_force_max_served, brute_force_valid_states, lp_max_served
from sporadic_games.schedulability import is_schedulable, policy_edf
from sporadic_games.task_model import (
    JobSequence,
    Task,
    TaskSystem,
    format_job_sequence,
    format_task_system,
    is_legal_sequence,
    parse_job_sequence,
    parse_task_system,
    run_schedule,
)


@st.composite
def task_systems(draw, max_tasks=2, max_param=3):
    tasks = []
    for _ in range(draw(st.integers(1, max_tasks))):
        P = draw(st.integers(1, max_param))
        D = draw(st.integers(1, P))
        tasks.append(Task(draw(st.integers(1, D)), D, P))
    return TaskSystem(tuple(tasks), draw(st.integers(1, len(tasks))))


@st.composite
def legal_sequences(draw, T, horizon=4):
    # greedy: each task releases when the draw asks and separation allows
    last = [None] * T.n
    mapping = {}
    for t in range(horizon):
        k = []
        for i, task in enumerate(T.tasks):
            ok = last[i] is None or t - last[i] >= task.P
            c = draw(st.integers(0, task.C)) if ok else 0
            if c:
                last[i] = t
            k.append(c)
        if any(k):
            mapping[t] = tuple(k)
    return JobSequence.from_mapping(mapping, T.n)


@st.composite
def system_and_sequence(draw):
    T = draw(task_systems())
    return T, draw(legal_sequences(T))


class TestRoundTrips:
    @given(task_systems(max_tasks=4, max_param=6))
    def test_task_file(self, T):
        assert parse_task_system(format_task_system(T)) == T

    @given(system_and_sequence())
    def test_sequence_file(self, pair):
        T, sigma = pair
        assert is_legal_sequence(sigma, T)
        assert parse_job_sequence(format_job_sequence(sigma), T.n) == sigma

    @given(st.integers(0, 10**6))
    def test_jobs_file(self, seed):
        jobs = random_jobs(random.Random(seed))
        assert parse_jobs(format_jobs(jobs)) == jobs


class TestKnowledgeWalk:
    @settings(max_examples=60, deadline=None)
    @given(system_and_sequence())
    def test_matches_oracle(self, pair):
        T, sigma = pair
        walk = knowledge_walk(T, sigma, 4)
        for t, v in enumerate(walk):
            assert set(v.Q) == brute_force_valid_states(sigma, t, T)

    @settings(max_examples=60, deadline=None)
    @given(system_and_sequence())
    def test_reconstruction_agrees_with_flow(self, pair):
        T, sigma = pair
        r = reconstruct_schedule(T, sigma)
        assert r.feasible == has_feasible_schedule(jobs_from_sequence(sigma, T), T.m)
        if r.feasible:
            assert run_schedule(sigma, r.schedule, T).met


class TestVerdictChain:
    @settings(max_examples=40, deadline=None)
    @given(task_systems(max_tasks=3))
    def test_schedulable_online_feasible(self, T):
        edf = is_schedulable(T, policy_edf).feasible
        online = is_online_feasible(T)
        feasible = is_feasible(T).feasible
        assert not edf or online
        assert not online or feasible
        assert is_feasible(T, antichain=True).feasible == feasible


class TestFlow:
    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 2))
    def test_three_way_agreement(self, seed, m):
        jobs = random_jobs(random.Random(seed))
        value = max_flow(build_network(jobs, m)).value
        assert value == brute_force_max_served(jobs, m) == lp_max_served(jobs, m)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 2))
    def test_saturating_flow_is_a_schedule(self, seed, m):
        jobs = random_jobs(random.Random(seed))
        res = max_flow(build_network(jobs, m))
        if res.saturates:
            assert check_discrete(discrete_schedule(res), jobs, m)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**6))
    def test_rounding(self, seed):
        jobs, m, w = random_fractional(random.Random(seed))
        assert validate_continuous(w, jobs, m)
        assert check_discrete(continuous_to_discrete(jobs, m, w), jobs, m)
