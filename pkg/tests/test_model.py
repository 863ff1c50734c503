import numpy as np
import pytest

from mecsim.config import NetworkConfig
from mecsim.model import SlotState, StateError

CFG = NetworkConfig(num_mids=3, num_servers=2, cap_max=3)


def make_state(prev, queues=None):
    return SlotState(
        t=2,
        positions=np.zeros((3, 2)) + 10.0,
        server_positions=np.zeros((2, 2)) + 50.0,
        fading=np.ones((3, 2)),
        queues=np.zeros(3) if queues is None else np.asarray(queues, dtype=float),
        arrivals=np.ones(3),
        prev_assoc=np.asarray(prev, dtype=float),
    )


def test_cold_start_all_zero_rows_allowed():
    state = make_state(np.zeros((3, 2)))
    assert state.is_cold_start()


def test_one_hot_rows_allowed():
    state = make_state([[1, 0], [0, 1], [1, 0]])
    assert not state.is_cold_start()


def test_mixed_zero_and_one_hot_rows_rejected():
    with pytest.raises(StateError, match="row"):
        make_state([[1, 0], [0, 0], [1, 0]])


def test_multi_hot_rows_rejected():
    with pytest.raises(StateError, match="row"):
        make_state([[1, 1], [0, 1], [1, 0]])


def test_negative_queue_rejected():
    with pytest.raises(StateError, match="queues"):
        make_state(np.zeros((3, 2)), queues=[-1.0, 0.0, 0.0])


def test_state_arrays_frozen():
    state = make_state(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        state.queues[0] = 5.0
