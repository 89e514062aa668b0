"""Deterministic random streams on a counter-based generator.

Every random draw in the package comes through here. Streams are keyed by a
64-bit user seed plus a purpose tag in the high word of the 128-bit Philox
key, so the same master seed can feed the phantom, both Rademacher blocks,
the noise, and the basis sampler without any stream colliding.
"""

import numpy as np

_MASK64 = (1 << 64) - 1

# purpose tags (high word of the Philox key)
PHANTOM = 0
SPECTRAL_RADEMACHER = 1
SPATIAL_RADEMACHER = 2
NOISE = 3
BASIS_SAMPLE = 4
SPECTRAL_NORM = 5
SPATIAL_NORM = 6
COMBINED_NORM = 7


def stream(seed, purpose=0):
    """Independent Generator for (seed, purpose)."""
    key = (int(seed) & _MASK64) | (int(purpose) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def rademacher(gen, shape):
    """+/-1 array. One uniform draw per entry, so generating a matrix in
    row chunks consumes the stream exactly like generating it whole."""
    return np.where(gen.random(shape) < 0.5, -1.0, 1.0)


def gaussian(gen, shape, sigma=1.0):
    """Zero-mean normals of std sigma via Box-Muller on the uniform stream."""
    count = int(np.prod(shape, dtype=np.int64)) if shape else 1
    pairs = (count + 1) // 2
    u1 = 1.0 - gen.random(pairs)  # (0, 1], keeps the log finite
    u2 = gen.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([radius * np.cos(2.0 * np.pi * u2),
                        radius * np.sin(2.0 * np.pi * u2)])
    return sigma * z[:count].reshape(shape)
