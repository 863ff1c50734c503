import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mecsim.costs import (CostBreakdown, local_power, migration_cost,
                          migration_costs, offload_power, service_cost)


class TestLocalPower:
    def test_zero(self):
        assert local_power(0.0, 1e-28) == 0.0

    def test_max_frequency(self):
        assert local_power(2.15e9, 1e-28) == pytest.approx(0.9938, rel=1e-3)

    def test_gigahertz(self):
        assert local_power(1e9, 1e-28) == pytest.approx(0.1)


class TestOffloadPower:
    def test_zero(self):
        assert offload_power(0.0, 1.0, 0.0) == 0.0

    def test_unit_amplifier(self):
        assert offload_power(1.0, 1.0, 0.0) == pytest.approx(1.0)

    def test_affine(self):
        assert offload_power(0.3, 2.0, 0.05) == pytest.approx(0.65)


def one_hot(m, idx):
    row = np.zeros(m)
    row[idx] = 1.0
    return row


class TestMigrationCost:
    def test_unchanged_is_free(self):
        assert migration_cost(one_hot(3, 0), one_hot(3, 0), 0.1) == 0.0

    def test_switch_costs_unit(self):
        assert migration_cost(one_hot(3, 0), one_hot(3, 1), 0.1) == pytest.approx(0.1)

    def test_switch_any_pair(self):
        assert migration_cost(one_hot(3, 2), one_hot(3, 1), 0.4) == pytest.approx(0.4)

    def test_cold_start_free(self):
        assert migration_cost(np.zeros(3), one_hot(3, 1), 0.7) == 0.0

    def test_non_one_hot_rejected(self):
        with pytest.raises(ValueError):
            migration_cost(np.array([1.0, 1.0, 0.0]), one_hot(3, 0), 0.1)
        with pytest.raises(ValueError):
            migration_cost(one_hot(3, 0), np.zeros(3), 0.1)

    @pytest.mark.parametrize("m", [1, 2, 3, 5])
    def test_identity_over_all_pairs(self, m):
        # the half-sum formula equals unit * [changed] for every one-hot pair
        for i, j in itertools.product(range(m), repeat=2):
            expected = 0.0 if i == j else 0.5
            assert migration_cost(one_hot(m, i), one_hot(m, j), 0.5) \
                == pytest.approx(expected)

    @pytest.mark.parametrize("m", [2, 4])
    def test_symmetric(self, m):
        for i, j in itertools.product(range(m), repeat=2):
            a = migration_cost(one_hot(m, i), one_hot(m, j), 0.3)
            b = migration_cost(one_hot(m, j), one_hot(m, i), 0.3)
            assert a == b

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(0)
        prev = np.zeros((6, 4))
        cur = np.zeros((6, 4))
        prev[np.arange(1, 6), rng.integers(0, 4, 5)] = 1  # row 0 stays cold
        cur[np.arange(6), rng.integers(0, 4, 6)] = 1
        vec = migration_costs(prev, cur, 0.25)
        for u in range(6):
            assert vec[u] == pytest.approx(migration_cost(prev[u], cur[u], 0.25))


def test_cost_breakdown_identities():
    cb = CostBreakdown(local_power=np.array([0.4, 0.0]),
                       offload_power=np.array([0.1, 0.6]),
                       migration=np.array([0.0, 0.1]),
                       phi=0.1)
    assert np.allclose(cb.power, [0.5, 0.6])
    assert np.allclose(cb.service, cb.power + 0.1 * cb.migration)
    assert np.all(cb.service >= 0)


class TestServiceCost:
    def test_power_only(self):
        assert service_cost(0.5, 0.0, 0.123) == pytest.approx(0.5)

    def test_weighted_sum(self):
        assert service_cost(0.5, 0.1, 0.1) == pytest.approx(0.51)

    def test_weight_off(self):
        assert service_cost(0.7, 5.0, 0.0) == pytest.approx(0.7)

    @given(st.floats(0, 1e3), st.floats(0, 1e3), st.floats(0, 10),
           st.floats(0, 1e3), st.floats(0, 1e3))
    def test_linear_in_each_argument(self, p1, p2, phi, c1, c2):
        lhs = service_cost(p1 + p2, c1 + c2, phi)
        rhs = service_cost(p1, c1, phi) + service_cost(p2, c2, phi)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)
