import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ostbc_relay.errors import DimensionMismatch
from ostbc_relay.linalg import herm
from ostbc_relay.ostbc import alamouti, constellation, demap_symbol, encode, map_bits

NAMES = ["bpsk", "qpsk", "8psk", "16psk", "4qam", "16qam", "64qam"]
_sym = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


def test_alamouti_layout():
    c = encode(alamouti(), [1 + 2j, 3 - 1j])
    np.testing.assert_allclose(c, [[1 + 2j, -(3 + 1j)], [3 - 1j, 1 - 2j]])


@given(_sym, _sym, st.floats(0.1, 10))
def test_alamouti_orthogonal(c1, c2, es):
    c = encode(alamouti(), [c1, c2], es)
    expected = es * (abs(c1) ** 2 + abs(c2) ** 2) * np.eye(2)
    np.testing.assert_allclose(c @ herm(c), expected, atol=1e-9 * (1 + np.abs(expected).max()))


def test_encode_rejects_wrong_length():
    with pytest.raises(DimensionMismatch):
        encode(alamouti(), [1, 2, 3])


def test_rate():
    assert alamouti().rate == 1.0


@pytest.mark.parametrize("name", NAMES)
def test_unit_energy_and_labels(name):
    c = constellation(name)
    assert np.isclose(np.mean(np.abs(c.points) ** 2), 1.0)
    assert sorted(c.labels) == list(range(c.order))


@pytest.mark.parametrize("name", ["qpsk", "8psk", "16psk", "16qam", "64qam"])
def test_gray_neighbours_differ_in_one_bit(name):
    c = constellation(name)
    d = np.abs(c.points[:, None] - c.points[None, :])
    dmin = np.min(d[d > 1e-9])
    for i, j in zip(*np.nonzero(np.isclose(d, dmin))):
        assert bin(int(c.labels[i]) ^ int(c.labels[j])).count("1") == 1


def test_bpsk_mapping():
    c = constellation("bpsk")
    np.testing.assert_array_equal(c.points[map_bits(c, [0, 1])], [1, -1])


@pytest.mark.parametrize("name", NAMES)
def test_map_demap_roundtrip(name):
    c = constellation(name)
    rng = np.random.default_rng(1)
    bits = rng.integers(0, 2, size=(50, 3 * c.bits_per_symbol))
    idx = map_bits(c, bits)
    np.testing.assert_array_equal(demap_symbol(c, c.points[idx]), idx)
    np.testing.assert_array_equal(c.label_bits()[idx].reshape(50, -1), bits)


def test_demap_tie_lowest_index():
    c = constellation("bpsk")
    assert demap_symbol(c, 0.0) == 0


def test_unknown_constellations():
    for bad in ["32psk", "8qam", "foo", "qam"]:
        with pytest.raises(ValueError):
            constellation(bad)
    with pytest.raises(DimensionMismatch):
        map_bits(constellation("qpsk"), [0, 1, 1])
