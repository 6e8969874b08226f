from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from feasible_edf import (Task, TaskSet, as_rat, dump_taskset, is_light, job_tardiness,
                          parse_taskset, total_utilization, utilization)
from feasible_edf.task_model import ReleaseModel, format_rat


@pytest.mark.parametrize("e,p,u", [(2, 5, F(2, 5)), (1, 1, F(1)), (3, 7, F(3, 7))])
def test_utilization(e, p, u):
    assert utilization(Task(0, e, p)) == u


def test_total_utilization():
    assert total_utilization(TaskSet.from_pairs([(1, 2), (1, 3)])) == F(5, 6)
    assert total_utilization(TaskSet.from_pairs([(1, 1)])) == 1


@pytest.mark.parametrize("e,p,light", [(2, 5, True), (1, 2, True), (3, 5, False)])
def test_is_light(e, p, light):
    assert is_light(Task(0, e, p)) is light


@pytest.mark.parametrize("c,d,t", [(14, 12, 2), (12, 12, 0), (10, 12, 0)])
def test_job_tardiness(c, d, t):
    assert job_tardiness(c, d) == t


def test_as_rat_rejects_floats():
    with pytest.raises(TypeError):
        as_rat(0.5)
    assert as_rat("7/20") == F(7, 20)
    assert as_rat("0.25") == F(1, 4)


def test_task_validation():
    with pytest.raises(ValueError):
        Task(0, 0, 5)
    with pytest.raises(ValueError):
        Task(0, 6, 5)
    with pytest.raises(ValueError):
        Task(0, 1, 5, rel_deadline=4)
    with pytest.raises(ValueError):
        TaskSet((Task(1, 1, 2),))


def test_jobs_and_releases():
    t = Task(3, 2, 5, first_release=1)
    jobs = list(t.jobs(12))
    assert [j.release for j in jobs] == [1, 6, 11]
    assert jobs[0].abs_deadline == 6 and jobs[0].task == 3 and jobs[0].index == 1
    assert t.release_of(4) == 16


def test_taskset_file_round_trip(tmp_path):
    text = "M=4\n# comment\n0 2 5\n1 7/20 1 sporadic\n"
    ts = parse_taskset(text)
    assert ts.processors == 4 and ts[1].release_model is ReleaseModel.SPORADIC
    assert parse_taskset(dump_taskset(ts)) == ts


@pytest.mark.parametrize("bad", ["0 1 2\n", "M=2\n0 1\n", "M=2\n0 1 2 weird\n", "M=1\nM=2\n0 1 2\n"])
def test_taskset_file_errors(bad):
    with pytest.raises(ValueError):
        parse_taskset(bad)


@given(st.fractions(min_value=F(-10**6), max_value=F(10**6), max_denominator=10**6))
def test_format_rat_round_trip(x):
    assert as_rat(format_rat(x)) == x
