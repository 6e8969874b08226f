import math
from fractions import Fraction as F

import pytest

from feasible_edf import (TaskSet, edf_uniprocessor_test, feasible_edf_admissible,
                          rm_sufficient_test, rm_utilization_bound)


def test_edf_test():
    assert edf_uniprocessor_test(TaskSet.from_pairs([(1, 2), (1, 3)])).schedulable
    v = edf_uniprocessor_test(TaskSet.from_pairs([(1, 2), (2, 3)]))
    assert not v.schedulable and v.total_utilization == F(7, 6)
    assert edf_uniprocessor_test(TaskSet.from_pairs([(1, 1)])).schedulable


def test_uniprocessor_tests_reject_multiprocessor_sets():
    ts = TaskSet.from_pairs([(1, 2)], 2)
    with pytest.raises(ValueError):
        edf_uniprocessor_test(ts)
    with pytest.raises(ValueError):
        rm_sufficient_test(ts)


def test_rm_bound_values():
    assert rm_utilization_bound(1) == 1.0
    assert rm_utilization_bound(2) == pytest.approx(2 * (math.sqrt(2) - 1), abs=1e-15)
    assert abs(rm_utilization_bound(10**6) - math.log(2)) < 1e-6
    with pytest.raises(ValueError):
        rm_utilization_bound(0)


def test_rm_bound_decreases():
    vals = [rm_utilization_bound(n) for n in range(1, 50)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_rm_sufficient_test():
    assert not rm_sufficient_test(TaskSet.from_pairs([(1, 2), (1, 3)])).schedulable
    assert rm_sufficient_test(TaskSet.from_pairs([(1, 4), (1, 4)])).schedulable
    assert rm_sufficient_test(TaskSet.from_pairs([(1, 1)])).schedulable


def test_admissible():
    assert feasible_edf_admissible(TaskSet.from_pairs([(1, 2)] * 3, 2))
    assert not feasible_edf_admissible(TaskSet.from_pairs([(3, 5)], 4))
    assert not feasible_edf_admissible(TaskSet.from_pairs([(1, 2)] * 5, 2))
