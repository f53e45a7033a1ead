"""Constrained-reachability combinatorics under a vacancy budget.

The frozen tables below were cross-checked against an independent
breadth-first enumeration written before this module existed; they are
regression anchors, not tautologies.
"""

from __future__ import annotations

import pytest

from eastmodel import Certification, certify_energy_barrier, enumerate_reachable

# n -> (range ell, visited states, BFS depth)
FROZEN = {
    1: (1, 2, 1),
    2: (3, 5, 4),
    3: (7, 26, 13),
    4: (15, 373, 38),
    5: (31, 15193, 109),
}

# n = 5: states by vacancy count and deepest zero by vacancy count
FROZEN_COUNTS_5 = (1, 16, 156, 988, 4021, 10011)
FROZEN_ELL_TILDE_5 = (16, 24, 28, 30, 31)


@pytest.fixture(scope="module")
def results():
    return {n: enumerate_reachable(n) for n in FROZEN}


def test_range_is_two_power_minus_one(results):
    for n, (ell, _, _) in FROZEN.items():
        assert results[n].ell == ell == 2 ** n - 1


def test_visited_state_counts(results):
    for n, (_, total, _) in FROZEN.items():
        r = results[n]
        assert r.total == total
        assert r.states_visited == total
        assert sum(r.counts) == total


def test_bfs_depths(results):
    for n, (_, _, depth) in FROZEN.items():
        assert results[n].bfs_depth == depth


def test_budget_five_breakdown(results):
    r = results[5]
    assert r.counts == FROZEN_COUNTS_5
    assert r.ell_tilde == FROZEN_ELL_TILDE_5


def test_single_zero_recursion(results):
    # deepest lone zero at budget n = deepest full-budget zero at n-1, plus one
    for n in range(2, 6):
        assert results[n].ell_tilde[0] == results[n - 1].ell_tilde[n - 2] + 1


def test_full_budget_depth_equals_range(results):
    for n in FROZEN:
        assert results[n].ell_tilde[n - 1] == results[n].ell


def test_budgets_nest(results):
    # every state reachable with budget n-1 is reachable with budget n,
    # so the per-count tallies can only grow
    for n in range(2, 6):
        smaller, larger = results[n - 1], results[n]
        for k in range(n):
            assert smaller.counts[k] <= larger.counts[k]


def test_counting_bound(results):
    # 2^(n(n-1)/2) n! 0.7^n exceeds the visited count only once n = 5
    assert [results[n].bound_holds for n in range(1, 6)] == [
        False,
        False,
        False,
        False,
        True,
    ]
    assert results[5].bound_value == pytest.approx(2 ** 10 * 120 * 0.7 ** 5)


def test_certification_matches_range():
    for n in (2, 3, 4):
        ell = 2 ** n - 1
        assert certify_energy_barrier(ell, n) is Certification.REACHABLE
        assert certify_energy_barrier(ell + 1, n) is Certification.UNREACHABLE
    with pytest.raises(ValueError):
        certify_energy_barrier(0, 3)


def test_budget_limits():
    with pytest.raises(ValueError):
        enumerate_reachable(0)
    with pytest.raises(ValueError):
        enumerate_reachable(6)
