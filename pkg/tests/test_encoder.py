import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from delaylearn.dataio import Instance
from delaylearn.encoder import encode

grids = arrays(np.float64, 100, elements=st.floats(0.0, 1.0))


def test_extremes_and_midpoint():
    p = np.full(100, 0.3)
    p[0], p[1], p[2] = 0.0, 1.0, 0.5
    t = encode(p).times
    assert (t[0], t[1], t[2]) == (0.0, 40.0, 20.0)


def test_all_equal_fires_at_zero():
    assert not encode(np.full(100, 0.7)).times.any()
    assert len(encode(np.zeros((10, 10)))) == 100


def test_instance_input():
    px = np.linspace(0, 1, 100).reshape(10, 10)
    assert np.array_equal(encode(Instance(px, 3)).times, encode(px).times)


def test_grid_quantisation():
    t = encode(np.linspace(0.0, 1.0, 100)).times
    assert np.all(t * 2 == np.round(t * 2))


@given(grids)
def test_monotone_and_in_range(p):
    t = encode(p).times
    order = np.argsort(p, kind="stable")
    assert np.all(np.diff(t[order]) >= 0)
    assert t.min() >= 0 and t.max() <= 40


@given(grids, st.floats(0.05, 0.5), st.floats(0.0, 0.4))
def test_affine_invariance(p, scale, shift):
    a = encode(p, quantize=False).times
    b = encode(p * scale + shift, quantize=False).times
    if np.ptp(p) > 1e-6:
        np.testing.assert_allclose(a, b, atol=1e-6)


def test_invert_swaps_order():
    p = np.linspace(0.0, 1.0, 100)
    t = encode(p, invert=True).times
    assert t[0] == 40.0 and t[-1] == 0.0


@pytest.mark.parametrize("bad", [1.5, -0.1, np.nan])
def test_out_of_range_pixels(bad):
    p = np.zeros(100)
    p[4] = bad
    with pytest.raises(ValueError):
        encode(p)


def test_real_digit_spans_window(dataset):
    from delaylearn.dataio import downscale
    t = encode(downscale(dataset.images[123])).times
    assert t.min() == 0.0 and t.max() == 40.0
