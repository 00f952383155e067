import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from delaylearn.errors import ConfigError, FormatError
from delaylearn.topology import (NetworkTopology, format_topology, generate_feedforward,
                                 load_topology, parse_topology, save_topology, validate)


def table1(seed):
    return generate_feedforward((100, 100, 100), 0.1, 6.0, (1, 39), seed)


@pytest.mark.parametrize("seed", [0, 1, 2, 17, 12345])
def test_table1_counts_and_delays(seed):
    t = table1(seed)
    # Binomial(20000, 0.1): mean 2000, sd ~42.4
    assert 1700 <= t.n_synapses <= 2300
    assert np.all(t.delay == np.round(t.delay))
    assert t.delay.min() >= 1 and t.delay.max() <= 39
    assert np.all(t.weight == 6.0)
    assert validate(t) is None


def test_probability_zero_gives_empty_graph():
    t = generate_feedforward((5, 5, 5), 0.0, 6.0, (1, 39), 0)
    assert t.n_synapses == 0
    assert validate(t) is None


def test_probability_one_is_complete_bipartite():
    t = generate_feedforward((2, 2, 2), 1.0, 6.0, (1, 39), 0)
    assert t.n_synapses == 8
    assert len(set(zip(t.pre.tolist(), t.post.tolist()))) == 8


def test_layers_are_adjacent_and_forward():
    t = table1(3)
    assert np.all(t.layer_of(t.post) == t.layer_of(t.pre) + 1)


def test_too_few_layers():
    with pytest.raises(ConfigError):
        generate_feedforward((100,), 0.1, 6.0, (1, 39), 0)


def test_bad_probability_and_range():
    with pytest.raises(ConfigError):
        generate_feedforward((3, 3), 1.5, 6.0, (1, 39), 0)
    with pytest.raises(ConfigError):
        generate_feedforward((3, 3), 0.5, 6.0, (10, 5), 0)


def test_seed_reproducible_bit_identical():
    assert table1(9).identical_to(table1(9))
    assert not table1(9).identical_to(table1(10))


def test_delay_histogram_uniform():
    delays = np.concatenate([table1(s).delay for s in range(6)])
    assert len(delays) >= 10_000
    counts = np.bincount(delays.astype(int), minlength=40)[1:40]
    assert counts.sum() == len(delays)
    assert stats.chisquare(counts).pvalue > 0.001


def test_validate_skipping_layer():
    t = NetworkTopology((2, 2, 2), [0], [4], [6.0], [5.0])
    assert "non-adjacent layers" in validate(t)


def test_validate_backward_edge():
    t = NetworkTopology((2, 2, 2), [2], [0], [6.0], [5.0])
    assert "non-adjacent layers" in validate(t)


def test_validate_delay_below_minimum():
    t = NetworkTopology((2, 2), [0], [2], [6.0], [0.2])
    assert "delay below minimum" in validate(t)


def test_validate_delay_above_maximum_and_duplicates():
    assert "delay above maximum" in validate(NetworkTopology((2, 2), [0], [2], [6.0], [61.0]))
    dup = NetworkTopology((2, 2), [0, 0], [2, 2], [6.0, 6.0], [3.0, 4.0])
    assert "duplicate" in validate(dup)


def test_validate_heterogeneous_weight():
    t = NetworkTopology((2, 2), [0, 1], [2, 3], [6.0, 5.0], [3.0, 4.0])
    assert "heterogeneous weight" in validate(t)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=2, max_size=4),
       st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_generated_topologies_validate(sizes, p, seed):
    t = generate_feedforward(sizes, p, 6.0, (1, 39), seed)
    assert validate(t) is None
    assert t.identical_to(generate_feedforward(sizes, p, 6.0, (1, 39), seed))


def test_text_format_round_trip(tmp_path):
    t = table1(4)
    t = t.with_delays(t.delay + np.linspace(0, 0.5, t.n_synapses))
    text = format_topology(t)
    first, second = text.splitlines()[:2]
    assert first == "layers: 100 100 100"
    pre, post, w, d = second.split()
    assert w == "6" and len(d.split(".")[1]) == 6
    assert text.rstrip().endswith("schema: delaylearn-topology 1")
    path = tmp_path / "net.txt"
    save_topology(t, path)
    back = load_topology(path)
    assert back.layer_sizes == t.layer_sizes
    np.testing.assert_array_equal(back.pre, t.pre)
    np.testing.assert_allclose(back.delay, t.delay, atol=5e-7)
    assert format_topology(back) == text


def test_parse_rejects_garbage():
    with pytest.raises(FormatError):
        parse_topology("0 1 6 3.0\n")
    with pytest.raises(FormatError):
        parse_topology("layers: 2 2\n0 2 6\n")
