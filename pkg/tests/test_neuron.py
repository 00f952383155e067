import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from delaylearn.errors import ConfigError, SimulationFault
from delaylearn.neuron import RS, IzhikevichParams, NeuronState, rest_state, simulate, step, step_arrays
from oracles import izhikevich_run


def test_rest_state_rs():
    assert rest_state(RS) == NeuronState(-65.0, -13.0)


def test_rest_state_other_reset():
    s = rest_state(IzhikevichParams(c=-70.0, b=0.2))
    assert s.v == -70.0 and s.u == pytest.approx(-14.0)


def test_zero_current_from_rest_is_silent_and_settles():
    # (c, b*c) is not the fixed point for RS; v relaxes to the stable rest at -70 mV
    trace, spikes = simulate(RS, np.zeros(400))
    assert spikes == []
    assert trace.min() > -71.5 and trace.max() < -65.0
    assert trace[-1] == pytest.approx(-70.0, abs=0.05)


def test_reset_on_threshold_crossing():
    state, fired = step(NeuronState(29.0, -10.0), RS, 0.0)
    assert fired
    assert state.v == RS.c
    # u integrates with the pre-reset v, then jumps by d
    v_new = 29.0 + 0.5 * (0.04 * 29.0 ** 2 + 5 * 29.0 + 140.0 + 10.0)
    u_new = -10.0 + 0.5 * 0.02 * (0.2 * v_new + 10.0)
    assert state.u == pytest.approx(u_new + RS.d, rel=1e-15)


def test_subthreshold_step_does_not_fire():
    state, fired = step(rest_state(RS), RS, 0.0)
    assert not fired and state.v < 30.0


def test_step_matches_reference_integration():
    rng = np.random.default_rng(3)
    currents = rng.uniform(0, 20, 2000)
    trace, spikes = simulate(RS, currents)
    ref_trace, ref_spikes = izhikevich_run(currents.tolist())
    assert spikes == ref_spikes
    np.testing.assert_array_equal(trace, ref_trace)


def test_regular_spiking_under_dc_drive():
    _, spikes = simulate(RS, np.full(2000, 10.0))  # 1000 ms
    isi = np.diff(spikes)[1:]  # drop the first (adapting) interval
    assert len(isi) > 5
    assert isi.var() < 0.05 * isi.mean()


def test_non_finite_input_is_a_fault():
    with pytest.raises(SimulationFault):
        step(rest_state(RS), RS, math.nan)
    with pytest.raises(SimulationFault):
        step(NeuronState(math.inf, 0.0), RS, 0.0)


def test_divergence_is_a_fault():
    with pytest.raises(SimulationFault):
        step(NeuronState(1e200, 0.0), RS, 0.0)


def test_params_validation():
    with pytest.raises(ConfigError):
        IzhikevichParams(a=0.0)
    with pytest.raises(ConfigError):
        IzhikevichParams(d=-1.0)


def test_step_arrays_matches_scalar():
    rng = np.random.default_rng(0)
    v = rng.uniform(-80, 29, 50)
    u = rng.uniform(-20, 0, 50)
    current = rng.uniform(0, 40, 50)
    expected = [step(NeuronState(a, b), RS, c) for a, b, c in zip(v, u, current)]
    vv, uu = v.copy(), u.copy()
    fired = step_arrays(vv, uu, current, RS)
    assert fired.tolist() == [f for _, f in expected]
    np.testing.assert_array_equal(vv, [s.v for s, _ in expected])
    np.testing.assert_array_equal(uu, [s.u for s, _ in expected])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 30.0), st.integers(50, 400))
def test_spike_count_monotone_in_steps(current, n):
    _, short = simulate(RS, np.full(n, current))
    _, long = simulate(RS, np.full(2 * n, current))
    assert len(long) >= len(short)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5.0, 40.0), min_size=1, max_size=200))
def test_reset_follows_every_spike_and_v_bounded(currents):
    state = rest_state(RS)
    for c in currents:
        state, fired = step(state, RS, c)
        assert state.v < 30.0
        if fired:
            assert state.v == RS.c


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-5.0, 40.0), min_size=1, max_size=100))
def test_deterministic(currents):
    a = simulate(RS, currents)
    b = simulate(RS, currents)
    assert a[1] == b[1] and a[0].tobytes() == b[0].tobytes()
