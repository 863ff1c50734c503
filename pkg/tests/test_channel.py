import math

import numpy as np
import pytest

from mecsim.channel import (_reflect, channel_gain, draw_fading, gain_matrix,
                            initial_positions, local_rate, offload_rate,
                            pair_distances, server_grid, step_mobility)
from mecsim.config import NetworkConfig
from mecsim.rng import rng_stream

CFG = NetworkConfig()


class TestMobility:
    def test_zero_step_leaves_positions(self):
        pos = np.array([[10.0, 20.0], [50.0, 50.0]])
        out = step_mobility(pos, 0.0, (100.0, 100.0), rng_stream(1, "mobility"))
        assert np.allclose(out, pos)

    def test_reflection_maps_back_inside(self):
        assert _reflect(np.array([-3.0]), 0.0, 100.0)[0] == pytest.approx(3.0)
        assert _reflect(np.array([103.0]), 0.0, 100.0)[0] == pytest.approx(97.0)
        assert _reflect(np.array([42.0]), 0.0, 100.0)[0] == pytest.approx(42.0)

    def test_boundary_walker_stays_inside(self):
        pos = np.zeros((200, 2)) + 0.01
        stream = rng_stream(3, "mobility")
        for _ in range(50):
            pos = step_mobility(pos, 5.0, (100.0, 100.0), stream)
            assert np.all(pos >= 0) and np.all(pos[:, 0] <= 100) \
                and np.all(pos[:, 1] <= 100)

    def test_diffusion_scaling(self):
        # unbounded walk: mean squared displacement after t unit steps is t
        n, t = 300, 10_000
        area = (1e9, 1e9)
        start = np.full((n, 2), 5e8)
        pos = start.copy()
        stream = rng_stream(7, "mobility")
        for _ in range(t):
            pos = step_mobility(pos, 1.0, area, stream)
        msd = np.mean(np.sum((pos - start) ** 2, axis=1))
        assert msd == pytest.approx(t, rel=0.15)

    def test_servers_static_and_inside(self):
        grid = server_grid(CFG)
        assert grid.shape == (3, 2)
        assert np.all(grid >= 0) and np.all(grid <= 100)
        assert np.allclose(server_grid(CFG), grid)

    def test_initial_positions_uniform_in_area(self):
        pts = initial_positions(CFG.replace(num_mids=5000), rng_stream(1, "placement"))
        assert pts.shape == (5000, 2)
        assert np.all(pts >= 0) and np.all(pts[:, 0] <= 100) and np.all(pts[:, 1] <= 100)
        assert np.mean(pts[:, 0]) == pytest.approx(50, abs=2)


class TestFading:
    def test_unit_mean(self):
        h = draw_fading(1000, 1000, rng_stream(5, "fading"))
        assert h.mean() == pytest.approx(1.0, abs=0.01)

    def test_nonnegative_support(self):
        h = draw_fading(100, 100, rng_stream(6, "fading"))
        assert np.all(h >= 0)

    def test_tail_probability(self):
        h = draw_fading(1000, 1000, rng_stream(8, "fading"))
        assert np.mean(h > 1.0) == pytest.approx(math.exp(-1), abs=0.01)

    def test_reproducible_per_seed(self):
        a = draw_fading(4, 3, rng_stream(9, "fading"))
        b = draw_fading(4, 3, rng_stream(9, "fading"))
        assert np.array_equal(a, b)


class TestChannelGain:
    def test_reference_distance(self):
        assert channel_gain(1.0, 1.0, CFG) == pytest.approx(1e-4)

    def test_decade_scaling(self):
        assert channel_gain(1.0, 10.0, CFG) == pytest.approx(1e-8)

    def test_direct_evaluation(self):
        assert channel_gain(2.5, 50.0, CFG) == pytest.approx(4e-11)

    def test_distance_clamped_at_reference(self):
        assert channel_gain(1.0, 0.0, CFG) == pytest.approx(1e-4)
        assert channel_gain(1.0, 0.5, CFG) == pytest.approx(1e-4)

    def test_strictly_decreasing_in_distance(self):
        d = np.linspace(1.0, 200.0, 500)
        g = channel_gain(1.0, d, CFG)
        assert np.all(np.diff(g) < 0)

    def test_gain_matrix_shape(self):
        pos = initial_positions(CFG, rng_stream(2, "placement"))
        h = draw_fading(CFG.num_mids, CFG.num_servers, rng_stream(2, "fading"))
        g = gain_matrix(pos, server_grid(CFG), h, CFG)
        assert g.shape == (10, 3)
        assert np.all(g > 0)
        d = pair_distances(pos, server_grid(CFG))
        assert np.allclose(g, channel_gain(h, d, CFG))


class TestRates:
    def test_zero_power_zero_rate(self):
        assert offload_rate(1e-8, 0.0, CFG) == 0.0

    def test_unit_snr(self):
        s = CFG.interference_w + CFG.noise_w
        assert offload_rate(s, 1.0, CFG) == pytest.approx(1e6)

    def test_direct_evaluation(self):
        snr = 1.6e-11 * 1.0 / (1e-10 + 1e-13)
        expected = 1e6 * math.log2(1.0 + snr)
        assert offload_rate(1.6e-11, 1.0, CFG) == pytest.approx(expected)
        assert expected == pytest.approx(2.14e5, rel=0.005)

    def test_increasing_and_concave_in_power(self):
        p = np.linspace(0, 1, 2001)
        r = offload_rate(1.6e-11, p, CFG)
        diffs = np.diff(r)
        assert np.all(diffs > 0)
        assert np.all(np.diff(diffs) < 1e-12)

    def test_local_rate(self):
        assert local_rate(0.0, 737.5) == 0.0
        assert local_rate(2.15e9, 737.5) == pytest.approx(2.915e6, rel=1e-3)
        assert local_rate(737.5, 737.5) == pytest.approx(1.0)
