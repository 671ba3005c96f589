import numpy as np
import pytest

from gearr_profiler import flip_bits, flip_bits_array


def bit_fraction_changed(a: bytes, b: bytes) -> float:
    xa = np.frombuffer(a, dtype=np.uint8)
    xb = np.frombuffer(b, dtype=np.uint8)
    return np.unpackbits(xa ^ xb).mean()


def test_zero_ber_identity():
    rng = np.random.default_rng(0)
    payload = bytes(rng.integers(0, 256, 1000, dtype=np.uint8))
    assert flip_bits(payload, 0.0, rng) == payload


def test_output_length_preserved():
    rng = np.random.default_rng(1)
    for n in (0, 1, 7, 1024):
        payload = bytes(rng.integers(0, 256, n, dtype=np.uint8))
        assert len(flip_bits(payload, 0.25, rng)) == n


def test_half_ber_concentration():
    # 10^6 bits at ber = 0.5: flipped fraction concentrates tightly
    rng = np.random.default_rng(2)
    payload = bytes(rng.integers(0, 256, 125_000, dtype=np.uint8))
    out = flip_bits(payload, 0.5, rng)
    assert 0.499 <= bit_fraction_changed(payload, out) <= 0.501


def test_small_ber_rate():
    rng = np.random.default_rng(3)
    payload = bytes(rng.integers(0, 256, 125_000, dtype=np.uint8))
    out = flip_bits(payload, 0.01, rng)
    frac = bit_fraction_changed(payload, out)
    assert abs(frac - 0.01) < 0.001


def test_deterministic_given_seed():
    payload = bytes(range(256)) * 4
    a = flip_bits(payload, 0.1, np.random.default_rng(42))
    b = flip_bits(payload, 0.1, np.random.default_rng(42))
    c = flip_bits(payload, 0.1, np.random.default_rng(43))
    assert a == b
    assert a != c


def test_rejects_out_of_range_ber():
    rng = np.random.default_rng(4)
    for ber in (-0.01, 0.51, 1.0):
        with pytest.raises(ValueError):
            flip_bits(b"abc", ber, rng)


def test_array_wrapper_shape_and_dtype():
    rng = np.random.default_rng(5)
    images = rng.integers(0, 256, (10, 8, 8), dtype=np.uint8)
    out = flip_bits_array(images, 0.2, rng)
    assert out.shape == images.shape and out.dtype == np.uint8
    with pytest.raises(ValueError):
        flip_bits_array(images.astype(np.float32), 0.2, rng)
