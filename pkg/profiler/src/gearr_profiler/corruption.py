"""Bit-level corruption of encoded classifier inputs.

Payload bits map one-to-one onto the 8-bit-per-channel pixel representation
(uncoded-transmission semantics), so a channel bit error rate translates
directly into independent bit flips of the raw pixel bytes.
"""

from __future__ import annotations

import numpy as np


def flip_bits(encoded_input: bytes, ber: float, rng: np.random.Generator) -> bytes:
    """Flip each bit of the byte sequence independently with probability
    ber. Returns a sequence of the same length; ber = 0 is the identity."""
    if not 0.0 <= ber <= 0.5:
        raise ValueError(f"ber {ber} outside [0, 0.5]")
    data = np.frombuffer(encoded_input, dtype=np.uint8)
    if ber == 0.0 or data.size == 0:
        return bytes(data)
    flips = rng.random((data.size, 8)) < ber
    mask = np.packbits(flips, axis=1, bitorder="little").ravel()
    return (data ^ mask).tobytes()


def flip_bits_array(images: np.ndarray, ber: float, rng: np.random.Generator) -> np.ndarray:
    """flip_bits over a whole uint8 batch at once (bit flips are i.i.d., so
    corrupting the concatenated byte stream is equivalent per sample)."""
    if images.dtype != np.uint8:
        raise ValueError("expected a uint8 pixel array")
    flat = flip_bits(images.tobytes(), ber, rng)
    return np.frombuffer(flat, dtype=np.uint8).reshape(images.shape)
