# Copyright © 2025 The bermuda authors
# SPDX-License-Identifier: MIT
# See LICENSE file for details

"""Tests for backward induction on the coerced chain."""

import itertools
from dataclasses import replace
from unittest import mock

import numpy as np
import pytest

from bermuda import debug_log
from bermuda.chain_dp import solve_chain, stop_at, value_at
from bermuda.coercion import Coercion
from bermuda.process_model import TimeGrid

from tests.helpers import random_coercion


def _rule_values(c: Coercion, rule: np.ndarray) -> np.ndarray:
    """Chain value of a fixed stopping rule (rule[t, k] says stop)."""
    n_t = c.n_times
    w = np.empty((n_t, c.n_bins))
    w[-1] = c.values[-1]
    for t in range(n_t - 2, -1, -1):
        w[t] = np.where(rule[t], c.values[t], c.trans[t] @ w[t + 1])
    return w


def _brute_force(c: Coercion) -> np.ndarray:
    """Best value over every stopping rule allowed by the exercise mask."""
    n_t, n_b = c.n_times, c.n_bins
    free = [(t, k) for t in range(n_t - 1) if c.grid.exercise_mask[t] for k in range(n_b)]
    best = np.full((n_t, n_b), -np.inf)
    for bits in itertools.product((False, True), repeat=len(free)):
        rule = np.zeros((n_t, n_b), dtype=bool)
        for (t, k), stop in zip(free, bits):
            rule[t, k] = stop
        best = np.maximum(best, _rule_values(c, rule))
    return best


class TestSolveChain:
    """Values and stopping decisions."""

    def test_one_step_bellman(self, make_chain) -> None:
        """Two-time chain: stop where the reward beats continuation."""
        c = make_chain(n_times=2, n_bins=3)
        table = solve_chain(c)
        cont = c.trans[0] @ c.values[1]
        np.testing.assert_allclose(table.value[0], np.maximum(c.values[0], cont))
        np.testing.assert_array_equal(table.stop[0], c.values[0] >= cont)
        np.testing.assert_array_equal(table.value[1], c.values[1])
        assert table.stop[1].all()

    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("n_times,n_bins,lockout", [
        (2, 2, 0.0), (2, 3, 0.0), (3, 2, 0.0), (3, 3, 0.0), (3, 3, 0.5),
    ])
    def test_matches_brute_force(self, n_times, n_bins, lockout, seed) -> None:
        """Backward induction equals the best of every allowed stopping rule."""
        c = random_coercion(np.random.default_rng(seed), n_times, n_bins, lockout)
        table = solve_chain(c)
        np.testing.assert_allclose(table.value, _brute_force(c), rtol=0, atol=1e-12)

    def test_constant_reward(self, make_chain) -> None:
        """A flat reward is its own value and every bin stops."""
        c = make_chain(n_times=4, n_bins=4)
        flat = replace(c, values=np.full_like(c.values, 2.5), trans=np.full_like(c.trans, 0.25))
        table = solve_chain(flat)
        np.testing.assert_allclose(table.value, 2.5)
        # Ties stop
        assert table.stop.all()

    def test_supermartingale_and_dominance(self, make_chain) -> None:
        """V is a supermartingale that dominates the reward."""
        c = make_chain(n_times=6, n_bins=5)
        table = solve_chain(c)
        for t in range(5):
            assert np.all(table.value[t] >= c.trans[t] @ table.value[t + 1] - 1e-12)
            assert np.all(table.value[t] >= c.values[t] - 1e-12)

    def test_monotone_in_reward(self, make_chain, rng) -> None:
        """Raising rewards never lowers the value."""
        c = make_chain(n_times=5, n_bins=4)
        raised = replace(c, values=c.values + rng.uniform(0.0, 0.5, size=c.values.shape))
        assert np.all(solve_chain(raised).value >= solve_chain(c).value - 1e-12)

    def test_lockout_continues(self, make_chain) -> None:
        """Locked times always continue."""
        c = make_chain(n_times=5, n_bins=3, lockout=0.5)
        table = solve_chain(c)
        for t in (0, 1):
            assert not table.stop[t].any()
            np.testing.assert_allclose(table.value[t], c.trans[t] @ table.value[t + 1])

    def test_grid_mismatch(self, make_chain) -> None:
        """Solving against another grid is an error."""
        c = make_chain(n_times=4, n_bins=3)
        with pytest.raises(ValueError):
            solve_chain(c, TimeGrid.uniform(1.0, 5))

    def test_stopping_regions_logged_when_enabled(self, make_chain) -> None:
        """One stopping region is logged per time."""
        c = make_chain(n_times=4, n_bins=3)
        debug_log.enable()
        with mock.patch.object(debug_log, "log_stopping_region") as mock_log:
            solve_chain(c)
        assert mock_log.call_count == 4


class TestLookups:
    """value_at, stop_at and stopping intervals."""

    def _chain(self) -> Coercion:
        grid = TimeGrid.uniform(1.0, 2)
        values = np.array([[1.0, 2.0, 3.0, 4.0], [0.0, 1.0, 5.0, 6.0]])
        edges = np.array([[1.5, 2.5, 3.5], [0.5, 3.0, 5.5]])
        trans = np.full((1, 4, 4), 0.25)
        return Coercion(edges=edges, values=values, trans=trans, grid=grid, n_bins=4, n_block=1)

    def test_value_and_stop_lookup(self) -> None:
        """Lookups go through the bin containing the reward."""
        c = self._chain()
        table = solve_chain(c)
        # Continuation is the mean of the final values, 3.0
        np.testing.assert_allclose(table.value[0], [3.0, 3.0, 3.0, 4.0])
        assert table.stop[0].tolist() == [False, False, True, True]
        assert value_at(table, c, 0, 3.9) == pytest.approx(4.0)
        assert stop_at(table, c, 0, 2.6) is True
        assert stop_at(table, c, 0, 2.5) is False
        np.testing.assert_array_equal(stop_at(table, c, 0, np.array([0.0, 10.0])), [False, True])

    def test_stopping_intervals(self) -> None:
        """Adjacent stopping bins merge into one interval."""
        c = self._chain()
        table = solve_chain(c)
        assert table.stopping_intervals(c, 0) == [(2.5, np.inf)]
        assert table.stopping_intervals(c, 1) == [(-np.inf, np.inf)]

    def test_disjoint_intervals(self) -> None:
        """Separated stopping bins give separate intervals."""
        c = self._chain()
        table = solve_chain(c)
        table.stop[0] = [True, False, True, False]
        assert table.stopping_intervals(c, 0) == [(-np.inf, 1.5), (2.5, 3.5)]
        table.stop[0] = False
        assert table.stopping_intervals(c, 0) == []
