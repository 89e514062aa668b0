"""Binary file formats for datacubes and measurement sets.

Cube files ("HSC1"): magic, then n_v, n_h, n_s as little-endian uint32,
then the band-by-pixel matrix as little-endian float32 in row-major order
(band-major, column-major pixels within each band).

Measurement files ("HSM1"): magic, the projector shape counts and grid
dimensions, the three generator seeds, and the noise level, followed by
the measurement matrix as little-endian float32 in row-major order. The
projectors themselves are not stored; they are rebuilt from the seeds on
read, which keeps files small and guarantees the reader reconstructs the
exact operators used at acquisition time.
"""

import struct

import numpy as np

from .datacube import as_band_pixel_matrix, cube_from_matrix
from .sensing import Measurements, build_spatial_projector, build_spectral_projector

_CUBE_MAGIC = b"HSC1"
_CUBE_HEADER = struct.Struct("<4s3I")
_MEAS_MAGIC = b"HSM1"
_MEAS_HEADER = struct.Struct("<4s7I3Qd")


def write_cube(path, cube):
    x = as_band_pixel_matrix(cube)
    with open(path, "wb") as fh:
        fh.write(_CUBE_HEADER.pack(_CUBE_MAGIC, cube.n_v, cube.n_h, cube.n_s))
        fh.write(np.ascontiguousarray(x, dtype="<f4").tobytes())


def read_cube(path):
    with open(path, "rb") as fh:
        header = fh.read(_CUBE_HEADER.size)
        if len(header) < _CUBE_HEADER.size:
            raise ValueError(f"{path}: truncated cube header")
        magic, n_v, n_h, n_s = _CUBE_HEADER.unpack(header)
        if magic != _CUBE_MAGIC:
            raise ValueError(f"{path}: not a cube file (bad magic {magic!r})")
        payload = fh.read()
    expected = n_v * n_h * n_s
    x = np.frombuffer(payload, dtype="<f4")
    if x.size != expected:
        raise ValueError(f"{path}: expected {expected} samples, found {x.size}")
    return cube_from_matrix(x.astype(np.float64).reshape(n_s, n_v * n_h), n_v, n_h)


def write_measurements(path, meas):
    sp, pp = meas.spectral, meas.spatial
    with open(path, "wb") as fh:
        fh.write(_MEAS_HEADER.pack(
            _MEAS_MAGIC, sp.m_s, pp.m_p, sp.q_s, pp.q_p,
            pp.n_v, pp.n_h, sp.n_s,
            sp.seed, pp.seed, meas.noise_seed, meas.sigma))
        fh.write(np.ascontiguousarray(meas.y, dtype="<f4").tobytes())


def read_measurements(path):
    with open(path, "rb") as fh:
        header = fh.read(_MEAS_HEADER.size)
        if len(header) < _MEAS_HEADER.size:
            raise ValueError(f"{path}: truncated measurement header")
        (magic, m_s, m_p, q_s, q_p, n_v, n_h, n_s,
         spectral_seed, spatial_seed, noise_seed, sigma) = _MEAS_HEADER.unpack(header)
        if magic != _MEAS_MAGIC:
            raise ValueError(f"{path}: not a measurement file (bad magic {magic!r})")
        payload = fh.read()
    y = np.frombuffer(payload, dtype="<f4")
    if y.size != m_s * m_p:
        raise ValueError(f"{path}: expected {m_s * m_p} samples, found {y.size}")
    sp = build_spectral_projector(n_s, m_s, q_s, spectral_seed)
    pp = build_spatial_projector(n_v, n_h, m_p, q_p, spatial_seed)
    return Measurements(y=y.astype(np.float64).reshape(m_s, m_p),
                        spectral=sp, spatial=pp,
                        sigma=sigma, noise_seed=noise_seed)
