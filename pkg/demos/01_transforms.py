"""
Orthonormal transforms used throughout the library
===================================================

Walsh-Hadamard in sequency order, the zig-zag scan that picks low-frequency
2-D coefficients, the frame-wise Haar wavelet, and a spectral basis learned
from sample spectra.
"""

import numpy as np

from hsrec.transforms import (fwht_sequency, haar2d, learn_spectral_basis,
                              sequency_row_order, wht2d, zigzag_indices)

# A constant vector has all its energy in the zero-sequency coefficient.
v = np.ones(8)
print("fwht of a constant vector:", fwht_sequency(v))

# Sequency ordering sorts rows by their number of sign changes, so row k
# oscillates exactly k times. Natural Hadamard order is scrambled.
print("natural->sequency permutation for n=8:", sequency_row_order(8))

impulse = np.zeros(8)
impulse[0] = 1.0
coeffs = fwht_sequency(impulse)
print("fwht of an impulse is flat:", coeffs)
print("transform is its own inverse:",
      np.allclose(fwht_sequency(coeffs), impulse))

# The 2-D version transforms rows and columns independently.
frame = np.add.outer(np.arange(4.0), np.arange(4.0))
cf = wht2d(frame)
print("\n2-D coefficients of a smooth ramp (energy in the corner):")
print(np.round(cf, 3))

# The zig-zag scan walks anti-diagonals from that corner outward; the first
# few entries are the lowest-sequency pairs in both axes.
print("first 6 zig-zag positions on a 4x4 grid:",
      [(int(i), int(j)) for i, j in zigzag_indices(4, 4, 6)])

# Haar analysis concentrates piecewise-constant frames on few coefficients.
steps = np.kron(np.array([[1.0, 3.0], [2.0, 5.0]]), np.ones((4, 4)))
hc = haar2d(steps)
print("\nHaar coefficients of a 2x2 block image: %d of %d are nonzero"
      % (np.count_nonzero(np.abs(hc) > 1e-12), hc.size))
print("round trip error:",
      np.abs(haar2d(hc, direction="synthesis") - steps).max())

# A spectral basis learned from sample spectra diagonalizes their second
# moments; for spectra drawn from two atoms only two directions matter.
gen = np.random.default_rng(0)
atoms = np.array([np.cos(np.linspace(0, np.pi, 16)),
                  np.sin(np.linspace(0, 2 * np.pi, 16))])
samples = (0.5 + gen.random((200, 2))) @ atoms
basis = learn_spectral_basis(samples.T)
energy = np.linalg.norm(basis.matrix.T @ samples.T, axis=1)
print("\nlearned-basis energy per direction (two dominate):")
print(np.round(energy / energy.max(), 4))
