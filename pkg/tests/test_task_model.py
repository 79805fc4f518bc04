import pytest

from sporadic_games.errors import IllegalReleaseError, InvariantError, ParseError
from sporadic_games.schedulability import policy_edf
from sporadic_games.task_model import (
    JobSequence,
    Task,
    TaskSystem,
    enumerate_configs,
    format_job_sequence,
    format_schedule,
    format_task_system,
    is_failure,
    is_legal_sequence,
    legal_releases,
    parse_job_sequence,
    parse_schedule,
    parse_task_system,
    run_schedule,
    schedule_steps,
    simulate,
    state_space_size,
    step,
    zero_config,
)

from conftest import seq


class TestTaskSystem:
    def test_parse_tight(self):
        T = parse_task_system("processors 1\ntask 1 2 2\ntask 2 2 2\n")
        assert T == TaskSystem(((1, 2, 2), (2, 2, 2)), 1)
        assert T.tasks[1] == Task(2, 2, 2)

    def test_parse_minimal(self):
        assert parse_task_system("processors 1\ntask 1 1 1") == TaskSystem(((1, 1, 1),), 1)

    def test_parse_comments_and_blank_lines(self):
        text = "# demo\n\nprocessors 2  # two cpus\ntask 1 1 1\ntask 1 1 1\n"
        assert parse_task_system(text).m == 2

    def test_c_above_d_reports_task(self):
        with pytest.raises(InvariantError) as exc:
            parse_task_system("processors 1\ntask 2 1 3")
        assert exc.value.task == 1

    def test_d_above_p_rejected(self):
        with pytest.raises(InvariantError) as exc:
            TaskSystem(((1, 1, 1), (1, 3, 2)), 1)
        assert exc.value.task == 2

    def test_syntax_error_location(self):
        with pytest.raises(ParseError) as exc:
            parse_task_system("processors 1\ntask 1 x 1\n")
        assert exc.value.line == 2

    @pytest.mark.parametrize("m", [0, 3])
    def test_processor_bounds(self, m):
        with pytest.raises(InvariantError):
            TaskSystem(((1, 1, 1), (1, 1, 1)), m)

    def test_roundtrip(self, tight):
        assert parse_task_system(format_task_system(tight)) == tight

    def test_str(self, tight):
        assert str(tight) == "T=((1,2,2),(2,2,2)) m=1"


class TestStateSpace:
    @pytest.mark.parametrize(
        "tasks,m,size",
        [(((1, 2, 2), (2, 2, 2)), 1, 486), (((1, 1, 1),), 1, 8), (((1, 1, 1), (1, 1, 1)), 2, 64)],
    )
    def test_product_formula(self, tasks, m, size):
        T = TaskSystem(tasks, m)
        assert state_space_size(T) == size
        assert sum(1 for _ in enumerate_configs(T)) == size


class TestLegalReleases:
    def test_zero_config(self, tight):
        ks = list(legal_releases(zero_config(tight), tight))
        assert ks == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]

    def test_all_blocked(self, tight):
        assert list(legal_releases(((0, 1, 1), (0, 1, 1)), tight)) == [(0, 0)]

    def test_one_eligible(self, tight):
        assert list(legal_releases(((0, 0, 0), (0, 1, 1)), tight)) == [(0, 0), (1, 0)]


class TestStep:
    def test_tight_run_second(self, tight):
        assert step(zero_config(tight), (1, 2), (1,), tight) == ((1, 1, 1), (1, 1, 1))

    def test_tight_run_first(self, tight):
        assert step(zero_config(tight), (1, 2), (0,), tight) == ((0, 1, 1), (2, 1, 1))

    def test_zero_fixed_point(self, tight):
        assert step(zero_config(tight), (0, 0), (), tight) == zero_config(tight)

    def test_two_unit_jobs_one_slot(self):
        T = TaskSystem(((1, 1, 1), (1, 1, 1)), 1)
        b = step(zero_config(T), (1, 1), (0,), T)
        assert b == ((0, 0, 0), (1, 0, 0))
        assert is_failure(b)

    def test_absent_job_is_noop(self, tight):
        assert step(zero_config(tight), (0, 0), (0,), tight) == zero_config(tight)

    def test_release_during_separation_rejected(self, tight):
        with pytest.raises(IllegalReleaseError):
            step(((0, 1, 1), (0, 0, 0)), (1, 0), (), tight)

    def test_too_many_tasks(self, tight):
        with pytest.raises(ValueError):
            step(zero_config(tight), (1, 1), (0, 1), tight)


class TestFailure:
    def test_cases(self):
        assert not is_failure(((0, 0, 0), (0, 0, 0)))
        assert is_failure(((0, 0, 0), (1, 0, 0)))
        assert not is_failure(((1, 1, 1),))


def test_schedule_steps_lexicographic():
    assert schedule_steps(2, 1) == ((), (0,), (1,))
    assert len(schedule_steps(3, 3)) == 8


class TestLegality:
    def test_single_release(self, tight, tight_witness):
        assert is_legal_sequence(tight_witness, tight)

    def test_separation_too_short(self, tight):
        assert not is_legal_sequence(seq({0: (1, 0), 1: (1, 0)}, 2), tight)

    def test_separation_exact(self, tight):
        assert is_legal_sequence(seq({0: (1, 0), 2: (1, 0)}, 2), tight)

    def test_oversized_release(self, tight):
        assert not is_legal_sequence(seq({0: (2, 0)}, 2), tight)

    def test_zero_vectors_dropped(self):
        s = seq({0: (0, 0), 3: (1, 0)}, 2)
        assert s.releases == ((3, (1, 0)),)
        assert s.length == 4


class TestSimulate:
    def test_tight_edf_fails_at_2(self, tight, tight_witness):
        res = simulate(tight_witness, policy_edf, tight)
        assert res.failure_time == 2
        assert is_failure(res.trace[-1])
        assert not any(is_failure(b) for b in res.trace[:-1])

    def test_single_unit_job(self):
        T = TaskSystem(((1, 1, 1),), 1)
        assert simulate(seq({0: (1,)}, 1), policy_edf, T).met

    def test_two_processors(self):
        T = TaskSystem(((1, 1, 1), (1, 1, 1)), 2)
        res = simulate(seq({0: (1, 1)}, 2), policy_edf, T)
        assert res.verdict == "met"
        # default horizon is length + max D
        assert len(res.trace) == 1 + 1 + 1

    def test_illegal_sequence(self, tight):
        with pytest.raises(IllegalReleaseError):
            simulate(seq({0: (1, 0), 1: (1, 0)}, 2), policy_edf, tight)

    def test_run_schedule(self, tight):
        res = run_schedule(seq({0: (0, 2)}, 2), [(1,), (1,)], tight)
        assert res.met


class TestFormats:
    def test_job_sequence_roundtrip(self, tight_witness):
        text = format_job_sequence(tight_witness)
        assert text == "0 1 1\n0 2 2\n"
        assert parse_job_sequence(text, 2) == tight_witness

    def test_job_sequence_decreasing_time(self):
        with pytest.raises(ParseError, match="decreases"):
            parse_job_sequence("2 1 1\n0 1 1\n", 1)

    def test_job_sequence_bad_task(self):
        with pytest.raises(ParseError):
            parse_job_sequence("0 3 1\n", 2)

    def test_schedule_roundtrip(self):
        sched = ((1,), (), (0, 1))
        assert parse_schedule(format_schedule(sched), 2) == sched

    def test_from_vectors(self):
        assert JobSequence.from_vectors([(1, 0), (0, 0), (0, 1)]).as_dict() == {0: (1, 0), 2: (0, 1)}
