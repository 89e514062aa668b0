"""Hyperspectral datacube container and its band-by-pixel matrix view.

A cube holds n_v x n_h spatial frames over n_s spectral bands. The solvers
work on the band-by-pixel matrix whose row k is frame k flattened
column-major (vertical index fastest), so pixel (i, j) sits at column
i + j * n_v.
"""

from dataclasses import dataclass

import numpy as np


def pixel_linear_index(i, j, n_v):
    """Column index of pixel (i, j) in the band-by-pixel matrix."""
    if n_v < 1:
        raise ValueError(f"n_v must be positive, got {n_v}")
    if not 0 <= i < n_v:
        raise IndexError(f"row index {i} outside [0, {n_v})")
    if j < 0:
        raise IndexError(f"column index {j} is negative")
    return i + j * n_v


@dataclass(frozen=True, eq=False)
class Datacube:
    """Immutable-shape cube; data indexed [row, column, band], float64."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"cube data must be 3-d, got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError(f"cube dimensions must be >= 1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("cube data must be finite")
        object.__setattr__(self, "data", arr)

    @property
    def n_v(self):
        return self.data.shape[0]

    @property
    def n_h(self):
        return self.data.shape[1]

    @property
    def n_s(self):
        return self.data.shape[2]

    @property
    def n_p(self):
        return self.data.shape[0] * self.data.shape[1]

    def frame(self, k):
        """Writable view of spectral band k."""
        if not 0 <= k < self.n_s:
            raise IndexError(f"band index {k} outside [0, {self.n_s})")
        return self.data[:, :, k]


def frame(cube, k):
    """Writable view of band k of the cube."""
    return cube.frame(k)


def as_band_pixel_matrix(cube):
    """n_s x n_p matrix; row k is frame k flattened column-major."""
    return np.transpose(cube.data, (2, 1, 0)).reshape(cube.n_s, cube.n_p)


def cube_from_matrix(x, n_v, n_h):
    """Inverse of as_band_pixel_matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"band-by-pixel matrix must be 2-d, got shape {x.shape}")
    if x.shape[1] != n_v * n_h:
        raise ValueError(
            f"matrix has {x.shape[1]} pixels, grid {n_v}x{n_h} needs {n_v * n_h}")
    n_s = x.shape[0]
    return Datacube(np.transpose(x.reshape(n_s, n_h, n_v), (2, 1, 0)))
