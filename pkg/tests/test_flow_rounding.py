from fractions import Fraction as F

import pytest

from sporadic_games.errors import InvalidScheduleError, InvariantError, ParseError
from sporadic_games.flow_rounding import (
    Job,
    build_network,
    check_discrete,
    continuous_to_discrete,
    format_discrete,
    has_feasible_schedule,
    jobs_from_sequence,
    max_flow,
    parse_continuous,
    parse_jobs,
    trim_excess,
    validate_continuous,
)
from sporadic_games.oracle import brute_force_max_served, lp_max_served
from sporadic_games.task_model import JobSequence

PAIR = [Job(0, 1, 2), Job(0, 2, 2)]
TRIPLE = [Job(0, 1, 2), Job(0, 1, 2), Job(0, 2, 2)]


class TestNetwork:
    def test_pair_arcs(self):
        net = build_network(PAIR, 1)
        a, x0, x1, q1, q2, z = range(6)
        assert net.arcs == [
            (a, x0, 1), (a, x1, 1),
            (x0, q1, 1), (x0, q2, 1), (x1, q1, 1), (x1, q2, 1),
            (q1, z, 1), (q2, z, 2),
        ]
        assert net.K == 3

    def test_empty(self):
        net = build_network([], 2)
        assert net.K == 0
        assert max_flow(net).value == 0

    def test_window(self):
        net = build_network([Job(1, 1, 2)], 1)
        assert [arc for arc in net.arcs if arc[0] == net.slot_node(0) or arc[0] == net.slot_node(1)] == [
            (net.slot_node(1), net.job_node(0), 1)
        ]
        assert net.K == 1

    def test_bad_job(self):
        with pytest.raises(InvariantError):
            build_network([Job(2, 1, 2)], 1)


class TestMaxFlow:
    def test_pair_short(self):
        assert max_flow(build_network(PAIR, 1)).value == 2
        assert brute_force_max_served(PAIR, 1) == 2

    def test_disjoint_processors(self):
        assert max_flow(build_network([Job(0, 2, 2), Job(0, 2, 2)], 2)).value == 4

    def test_conservation_and_capacity(self):
        res = max_flow(build_network(TRIPLE, 2))
        net = res.network
        balance = [0] * net.num_nodes
        for (u, v, cap), f in zip(net.arcs, res.flow):
            assert 0 <= f <= cap
            balance[u] -= f
            balance[v] += f
        assert all(b == 0 for i, b in enumerate(balance) if i not in (net.source, net.sink))
        assert balance[net.sink] == res.value

    def test_matches_lp(self):
        assert lp_max_served(PAIR, 1) == 2


class TestFeasibility:
    def test_cases(self):
        assert not has_feasible_schedule(PAIR, 1)
        assert has_feasible_schedule(TRIPLE, 2)
        assert has_feasible_schedule([], 1)

    def test_jobs_from_sequence(self, tight):
        jobs = jobs_from_sequence(JobSequence.from_mapping({0: (1, 2), 2: (1, 0)}, 2), tight)
        assert jobs == [Job(0, 1, 2), Job(0, 2, 2), Job(2, 1, 4)]


class TestValidate:
    def test_entry_above_one(self):
        r = validate_continuous({(0, 0): F(3, 2)}, TRIPLE, 2)
        assert (r.ok, r.condition, r.location) == (False, "1", (0, 0))

    def test_slot_overload(self):
        w = {(0, 0): 1, (1, 0): 1, (2, 0): F(1, 2)}
        r = validate_continuous(w, TRIPLE, 2)
        assert (r.condition, r.location) == ("2", (0,))

    def test_short_job(self):
        w = {(0, 0): F(1, 2), (1, 1): 1, (2, 0): 1, (2, 1): 1}
        r = validate_continuous(w, TRIPLE, 2)
        assert (r.condition, r.location) == ("3", (0,))

    def test_outside_window(self):
        r = validate_continuous({(0, 0): 1}, [Job(1, 1, 2)], 1)
        assert r.condition == "window"

    def test_negative(self):
        assert validate_continuous({(0, 0): F(-1, 2)}, PAIR, 1).condition == "1"


class TestRounding:
    def test_half_half(self):
        w = {(0, 0): F(1, 2), (0, 1): F(1, 2), (1, 0): F(1, 2), (1, 1): F(1, 2), (2, 0): 1, (2, 1): 1}
        out = continuous_to_discrete(TRIPLE, 2, w)
        assert out in ([(0, 2), (1, 2)], [(1, 2), (0, 2)])
        assert check_discrete(out, TRIPLE, 2)

    def test_integral_identity(self):
        w = {(0, 0): 1, (1, 1): 1, (2, 0): 1, (2, 1): 1}
        assert continuous_to_discrete(TRIPLE, 2, w) == [(0, 2), (1, 2)]

    def test_single_job(self):
        assert continuous_to_discrete([Job(0, 2, 2)], 1, {(0, 0): 1, (0, 1): 1}) == [(0,), (0,)]

    def test_invalid_rejected_with_condition(self):
        with pytest.raises(InvalidScheduleError) as exc:
            continuous_to_discrete(PAIR, 1, {(0, 0): 1, (1, 1): 1})
        assert exc.value.report.condition == "3"

    def test_trim_excess(self):
        w = {(0, 0): 1, (0, 1): F(1, 3)}
        assert trim_excess(w, [Job(0, 1, 2)]) == {(0, 0): 1}


class TestFormats:
    def test_jobs(self):
        assert parse_jobs("# r c d\n0 1 2\n0 2 2\n") == PAIR

    def test_jobs_bad(self):
        with pytest.raises(ParseError):
            parse_jobs("0 1\n")

    def test_continuous(self):
        assert parse_continuous("1 0 1/2\n2 1 1\n") == {(0, 0): F(1, 2), (1, 1): F(1)}

    def test_continuous_zero_denominator(self):
        with pytest.raises(ParseError):
            parse_continuous("1 0 1/0\n")

    def test_discrete(self):
        assert format_discrete([(0, 2), (1,)]) == "0 1 3\n1 2\n"
