from fractions import Fraction as F

import pytest

from sporadic_games.errors import ResourceLimitError
from sporadic_games.oracle import (
    brute_force_online,
    brute_force_valid_states,
    count_legal_sequences,
    enumerate_legal_sequences,
    lp_max_served,
    simplex_max,
)
from sporadic_games.task_model import JobSequence, TaskSystem, is_legal_sequence


class TestValidStates:
    def test_tight_after_one_slot(self, tight, tight_witness):
        assert brute_force_valid_states(tight_witness, 1, tight) == {(0, 2), (1, 1), (1, 2)}

    def test_tight_after_two_slots(self, tight, tight_witness):
        assert brute_force_valid_states(tight_witness, 2, tight) == set()

    @pytest.mark.parametrize("t", [0, 1, 3])
    def test_empty_sequence(self, tight, t):
        assert brute_force_valid_states(JobSequence(2), t, tight) == {(0, 0)}

    def test_size_limit(self, tight, tight_witness):
        with pytest.raises(ResourceLimitError):
            brute_force_valid_states(tight_witness, 3, tight, max_prefixes=2)


class TestOnline:
    def test_single_task(self):
        assert brute_force_online(TaskSystem(((1, 1, 1),), 1), 8)

    def test_forced_loss(self):
        assert not brute_force_online(TaskSystem(((1, 1, 1), (1, 1, 1)), 1), 4)

    def test_depth_zero_survives(self, tight):
        assert brute_force_online(tight, 0)
        assert not brute_force_online(tight, 2)


class TestSequences:
    def test_single_slot(self):
        seqs = list(enumerate_legal_sequences(TaskSystem(((1, 1, 1),), 1), 1))
        assert [s.as_dict() for s in seqs] == [{}, {0: (1,)}]

    def test_separation(self):
        seqs = list(enumerate_legal_sequences(TaskSystem(((1, 2, 2),), 1), 2))
        assert sorted(tuple(s.as_dict()) for s in seqs) == [(), (0,), (1,)]

    @pytest.mark.parametrize("tasks,h", [(((1, 1, 1),), 4), (((1, 1, 1), (1, 1, 1)), 3)])
    def test_closed_form_count(self, tasks, h):
        T = TaskSystem(tasks, 1)
        assert sum(1 for _ in enumerate_legal_sequences(T, h)) == count_legal_sequences(T, h)

    def test_all_legal_and_distinct(self, tight):
        seqs = list(enumerate_legal_sequences(tight, 4))
        assert all(is_legal_sequence(s, tight) for s in seqs)
        assert len(set(seqs)) == len(seqs)


class TestSimplex:
    def test_textbook(self):
        # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        assert simplex_max([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18]) == 36

    def test_fractional_optimum(self):
        assert simplex_max([1, 1], [[2, 1], [1, 2]], [1, 1]) == F(2, 3)

    def test_unbounded(self):
        with pytest.raises(ValueError):
            simplex_max([1], [[-1]], [1])

    def test_lp_served(self):
        assert lp_max_served([(0, 1, 2), (0, 2, 2)], 1) == 2
        assert lp_max_served([], 1) == 0
