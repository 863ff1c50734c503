import numpy as np
import pytest

from mecsim.config import NetworkConfig
from mecsim.controller import Policy
from mecsim.harness import (SUMMARY_COLUMNS, TRACE_COLUMNS, compare, run,
                            summary_csv, summary_row, sweep, trace_csv)

FAST = NetworkConfig(horizon=40, warmup=10)


@pytest.fixture(scope="module")
def base_run():
    return run(FAST, Policy.OMORA_SDP, seed=1)


def test_empty_horizon():
    cfg = NetworkConfig(horizon=0, warmup=0)
    s = run(cfg, Policy.OMORA_SDP, seed=1)
    assert s.avg_service_cost == 0.0
    assert s.avg_queue_bits == 0.0
    assert s.final_queue_mean == 0.0


def test_zero_arrivals_idle_network():
    cfg = FAST.replace(arrival_low_bits=0.0, arrival_high_bits=0.0,
                       rate_min_bps=0.0)
    s = run(cfg, Policy.OMORA_SDP, seed=2)
    tr = s.trace
    assert np.all(tr.queue_bits == 0)
    assert np.all(tr.cpu_freq == 0)
    assert np.all(tr.tx_power == 0)
    assert np.all(tr.migration == 0)
    assert s.avg_service_cost == 0.0


def test_queue_dynamics_consistent(base_run):
    tr = base_run.trace
    for i in range(tr.queue_bits.shape[0] - 1):
        expected = np.maximum(tr.queue_bits[i] - tr.executed_local[i]
                              - tr.executed_offload[i], 0.0) + tr.arrivals[i]
        assert np.allclose(tr.queue_bits[i + 1], expected)


def test_drift_bound_holds_every_slot(base_run):
    tr = base_run.trace
    assert base_run.drift_bound_violations == 0
    assert np.all(tr.drift_lhs <= tr.drift_rhs + 1e-9 * (1 + np.abs(tr.drift_rhs)))


def test_cost_identity_per_slot(base_run):
    tr = base_run.trace
    power = tr.power_local + tr.power_offload
    assert np.allclose(tr.service_cost,
                       power + FAST.migration_weight * tr.migration)


def test_summary_averages_match_trace(base_run):
    tr = base_run.trace
    w = base_run.warmup
    assert base_run.avg_service_cost \
        == pytest.approx(tr.service_cost[w:].sum(axis=1).mean())
    assert base_run.avg_queue_bits \
        == pytest.approx(tr.queue_bits[w:].sum(axis=1).mean())
    assert base_run.avg_power \
        == pytest.approx((tr.power_local[w:] + tr.power_offload[w:])
                         .sum(axis=1).mean())


def test_slot_metrics_view(base_run):
    m = base_run.slot_metrics(5)
    tr = base_run.trace
    assert m.t == 5
    assert np.array_equal(m.queue_bits, tr.queue_bits[4])
    assert np.allclose(m.executed, tr.executed_local[4] + tr.executed_offload[4])
    m.check(FAST)


def test_shared_randomness_across_policies():
    runs = {p: run(FAST, p, seed=3) for p in (Policy.OMORA_SDP, Policy.NL,
                                              Policy.NM)}
    base = runs[Policy.OMORA_SDP].trace
    for other in (runs[Policy.NL].trace, runs[Policy.NM].trace):
        assert np.array_equal(base.arrivals, other.arrivals)


def test_determinism_identical_csv_bytes():
    a = run(FAST, Policy.OMORA_SDP, seed=4)
    b = run(FAST, Policy.OMORA_SDP, seed=4)
    assert trace_csv(a) == trace_csv(b)
    ra = summary_csv([summary_row(a, axis_value=None)])
    rb = summary_csv([summary_row(b, axis_value=None)])
    assert ra == rb


def test_nm_never_migrates_after_first_slot():
    s = run(FAST, Policy.NM, seed=5)
    assert np.all(s.trace.migration == 0)


def test_nl_never_computes_locally():
    s = run(FAST, Policy.NL, seed=5)
    assert np.all(s.trace.cpu_freq == 0)
    assert np.all(s.trace.power_local == 0)


class TestSweep:
    def test_single_value_single_seed(self):
        rows = sweep(FAST, "V", [1e10], [Policy.NM], [1])
        assert len(rows) == 2  # data row + seed mean
        assert rows[0]["axis_value"] == "1e+10" or float(rows[0]["axis_value"]) == 1e10
        assert rows[1]["seed"] == "mean"

    def test_row_cardinality(self):
        rows = sweep(FAST, "eps", [0.1, 1.0], [Policy.NM], [1, 2])
        data = [r for r in rows if r["seed"] != "mean"]
        means = [r for r in rows if r["seed"] == "mean"]
        assert len(data) == 4 and len(means) == 2

    def test_nm_constant_in_migration_unit(self):
        rows = sweep(FAST, "eps", [0.01, 10.0], [Policy.NM], [1])
        data = [r for r in rows if r["seed"] != "mean"]
        assert data[0]["avg_service_cost"] == data[1]["avg_service_cost"]

    def test_unknown_axis_rejected(self):
        with pytest.raises(ValueError, match="axis"):
            sweep(FAST, "tau", [1.0], [Policy.NM], [1])

    def test_empty_values_rejected(self):
        with pytest.raises(ValueError, match="value"):
            sweep(FAST, "V", [], [Policy.NM], [1])


def test_compare_rows():
    rows = compare(FAST.replace(horizon=10, warmup=2),
                   [Policy.NM, Policy.NL], [1, 2, 3])
    assert len(rows) == 6
    assert [r["policy"] for r in rows] == ["nm"] * 3 + ["nl"] * 3
    assert all(r["axis_value"] == "" for r in rows)


def test_csv_schemas():
    s = run(FAST.replace(horizon=3, warmup=0), Policy.NM, seed=1)
    text = summary_csv([summary_row(s, axis_value=2.0)])
    header = text.splitlines()[0].split(",")
    assert header == SUMMARY_COLUMNS
    ttext = trace_csv(s)
    lines = ttext.splitlines()
    assert lines[0].split(",") == TRACE_COLUMNS
    assert len(lines) == 1 + 3 * FAST.num_mids
    # nine significant digits
    row = lines[1].split(",")
    q_col = row[TRACE_COLUMNS.index("Q")]
    assert q_col == format(float(q_col), ".9g")
