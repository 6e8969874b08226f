from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from feasible_edf import (Distribution, JobMap, Share, TaskSet, build_job_map, is_complementary,
                          is_pfair, job_processor, lag, lemma1_bound, subtask_deadline,
                          subtask_release)
from feasible_edf.job_distribution import complementary_schedule, window

weights = st.integers(1, 40).flatmap(lambda b: st.builds(F, st.integers(1, b), st.just(b)))


def _release_by_search(w, i):
    # last slot t whose start still has fluid allocation <= i-1
    t = 0
    while (t + 1) * w <= i - 1:
        t += 1
    return t


def _deadline_by_search(w, i):
    t = 0
    while t * w < i:
        t += 1
    return t


def test_window_examples():
    assert subtask_release(F(3, 7), 1) == 0
    assert subtask_deadline(F(3, 7), 1) == 3
    assert window(F(3, 7), 1).first_slot == 0 and window(F(3, 7), 1).last_slot == 2
    assert subtask_release(F(7, 8), 7) == 6
    assert subtask_deadline(F(7, 8), 1) == 2
    for k in range(1, 6):
        assert subtask_release(1, k) == k - 1 and subtask_deadline(1, k) == k


@given(weights, st.integers(1, 200))
def test_windows_match_search(w, i):
    assert subtask_release(w, i) == _release_by_search(w, i)
    assert subtask_deadline(w, i) == _deadline_by_search(w, i)
    assert subtask_release(w, i) < subtask_deadline(w, i)
    assert subtask_release(w, i + 1) >= subtask_release(w, i)


def test_bad_weight():
    for w in (0, F(3, 2), -1):
        with pytest.raises(ValueError):
            subtask_release(w, 1)


def test_lag_examples():
    assert lag(F(3, 7), [], 0) == 0
    assert lag(F(3, 7), [False, False, True], 3) == F(2, 7)
    assert lag(F(1, 2), [True, False] * 5, 10) == 0


def test_is_pfair_examples():
    assert not is_pfair(F(3, 7), [False] * 3, 3)
    assert is_pfair(1, [True] * 9, 9)


@pytest.mark.parametrize("b", range(1, 9))
def test_any_slot_in_window_is_pfair(b):
    # one subtask per window, always at the window's last slot: the laziest choice
    for a in range(1, b + 1):
        w = F(a, b)
        sched = [False] * b
        for i in range(1, a + 1):
            sched[subtask_deadline(w, i) - 1] = True
        assert is_pfair(w, sched, b)


def test_is_complementary():
    assert is_complementary(F(1, 8), F(7, 8))
    assert is_complementary(F(1, 2), F(1, 2))
    assert not is_complementary(F(1, 3), F(1, 3))


def test_complementary_schedule_partitions_slots():
    v, u = complementary_schedule(F(3, 7), 7)
    assert [a != b for a, b in zip(v, u)] == [True] * 7
    assert sum(v) == 3


def _map(f1):
    d = Distribution.from_shares([Share(0, 1, f1 * F(2, 5)), Share(0, 2, (1 - f1) * F(2, 5))], 3)
    return build_job_map(d, TaskSet.from_pairs([(2, 5)], 3), 0)


def test_t7_pattern():
    jm = _map(F(1, 8))
    assert jm.cycle_length == 8
    assert [job_processor(jm, k) for k in range(1, 17)] == [1] + [2] * 7 + [1] + [2] * 7
    assert job_processor(jm, 5) == 2
    assert jm.jobs_on(1, 1, 24) == [1, 9, 17]


def test_half_alternates():
    jm = _map(F(1, 2))
    assert [jm.processor(k) for k in range(1, 7)] == [1, 2, 1, 2, 1, 2]


def test_build_rejects_fixed_task():
    d = Distribution.from_shares([Share(0, 0, F(1, 2))], 1)
    with pytest.raises(ValueError):
        build_job_map(d, TaskSet.from_pairs([(1, 2)]), 0)
    with pytest.raises(ValueError):
        job_processor(_map(F(1, 2)), 0)
    with pytest.raises(ValueError):
        JobMap(0, 0, 1, F(1, 3), F(1, 3), 3)


@given(st.integers(1, 30).flatmap(lambda b: st.builds(F, st.integers(1, max(1, b - 1)), st.just(b))
                                   ).filter(lambda f: f < 1), st.integers(1, 200))
def test_map_is_periodic_and_exclusive(f, k):
    jm = _map(f)
    assert jm.on_first(k) != jm.on_second(k)
    assert jm.processor(k) == jm.processor(k + jm.cycle_length)


def test_lemma1_bound_examples():
    assert lemma1_bound(8, F(1, 8)) == 1
    assert lemma1_bound(0, F(3, 7)) == 0
    assert lemma1_bound(4, F(7, 8)) == 4
    with pytest.raises(ValueError):
        lemma1_bound(-1, F(1, 2))
