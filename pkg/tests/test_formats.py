import struct

import numpy as np
import pytest

from hsrec.datacube import Datacube, as_band_pixel_matrix
from hsrec.formats import (read_cube, read_measurements, write_cube,
                           write_measurements)
from hsrec.harness import PhantomSpec, generate_phantom
from hsrec.sensing import (acquire, adjoint, build_spatial_projector,
                           build_spectral_projector, project)


def _cube():
    return generate_phantom(PhantomSpec(8, 4, 2, seed=6))


# ---------------------------------------------------------------- cubes

def test_cube_round_trip_bytes(tmp_path):
    path = tmp_path / "cube.hsc"
    write_cube(path, _cube())
    first = path.read_bytes()
    cube = read_cube(path)
    write_cube(path, cube)
    assert path.read_bytes() == first
    assert cube.data.shape == (8, 4, 2)


def test_cube_header_layout(tmp_path):
    path = tmp_path / "cube.hsc"
    write_cube(path, _cube())
    raw = path.read_bytes()
    magic, n_v, n_h, n_s = struct.unpack_from("<4s3I", raw)
    assert magic == b"HSC1"
    assert (n_v, n_h, n_s) == (8, 4, 2)
    payload = raw[struct.calcsize("<4s3I"):]
    assert len(payload) == 4 * n_v * n_h * n_s  # float32 samples
    # payload is the band-by-pixel matrix in row-major order
    x32 = np.frombuffer(payload, dtype="<f4").reshape(n_s, n_v * n_h)
    assert np.allclose(x32, as_band_pixel_matrix(_cube()), atol=1e-6)


def test_cube_values_quantized_to_float32(tmp_path):
    data = np.random.default_rng(7).normal(size=(4, 4, 2))
    path = tmp_path / "cube.hsc"
    write_cube(path, Datacube(data))
    got = read_cube(path)
    assert np.array_equal(got.data, data.astype(np.float32).astype(np.float64))


def test_cube_read_rejects_corrupt_files(tmp_path):
    path = tmp_path / "cube.hsc"
    write_cube(path, _cube())
    raw = bytearray(path.read_bytes())

    bad_magic = tmp_path / "m.hsc"
    bad_magic.write_bytes(b"XXX1" + bytes(raw[4:]))
    with pytest.raises(ValueError, match="magic"):
        read_cube(bad_magic)

    truncated = tmp_path / "t.hsc"
    truncated.write_bytes(bytes(raw[:-5]))
    with pytest.raises(ValueError):
        read_cube(truncated)

    stub = tmp_path / "s.hsc"
    stub.write_bytes(b"HS")
    with pytest.raises(ValueError):
        read_cube(stub)

    padded = tmp_path / "p.hsc"
    padded.write_bytes(bytes(raw) + b"\x00\x00\x00\x00")
    with pytest.raises(ValueError):
        read_cube(padded)


def test_cube_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        read_cube(tmp_path / "absent.hsc")


# ---------------------------------------------------------------- measurements

def _measurements(sigma=0.01):
    cube = generate_phantom(PhantomSpec(4, 8, 4, seed=8))
    x = as_band_pixel_matrix(cube)
    pp = build_spatial_projector(4, 8, 12, 3, seed=21)
    sp = build_spectral_projector(4, 2, 1, seed=22)
    return acquire(x, sp, pp, sigma=sigma, noise_seed=17)


def test_measurements_round_trip(tmp_path):
    meas = _measurements()
    path = tmp_path / "meas.hsm"
    write_measurements(path, meas)
    got = read_measurements(path)
    assert np.allclose(got.y, meas.y, atol=1e-6)  # float32 payload
    assert got.sigma == meas.sigma
    assert got.noise_seed == meas.noise_seed
    # rebuilt projectors are operationally identical to the originals
    x = np.random.default_rng(9).normal(size=(4, 32))
    assert np.array_equal(project(x, got.spectral, got.spatial),
                          project(x, meas.spectral, meas.spatial))
    y = np.random.default_rng(10).normal(size=(2, 12))
    assert np.array_equal(adjoint(y, got.spectral, got.spatial),
                          adjoint(y, meas.spectral, meas.spatial))


def test_measurements_write_is_stable(tmp_path):
    meas = _measurements()
    path = tmp_path / "meas.hsm"
    write_measurements(path, meas)
    first = path.read_bytes()
    write_measurements(path, read_measurements(path))
    assert path.read_bytes() == first


def test_measurements_header_layout(tmp_path):
    meas = _measurements()
    path = tmp_path / "meas.hsm"
    write_measurements(path, meas)
    raw = path.read_bytes()
    fields = struct.unpack_from("<4s7I3Qd", raw)
    assert fields[0] == b"HSM1"
    assert fields[1:8] == (2, 12, 1, 3, 4, 8, 4)  # m_s m_p q_s q_p n_v n_h n_s
    assert fields[8:11] == (22, 21, 17)  # spectral, spatial, noise seeds
    assert fields[11] == 0.01
    payload = raw[struct.calcsize("<4s7I3Qd"):]
    assert len(payload) == 4 * 2 * 12


def test_measurements_read_rejects_corrupt_files(tmp_path):
    meas = _measurements()
    path = tmp_path / "meas.hsm"
    write_measurements(path, meas)
    raw = path.read_bytes()
    bad = tmp_path / "bad.hsm"
    bad.write_bytes(b"ZZZ9" + raw[4:])
    with pytest.raises(ValueError, match="magic"):
        read_measurements(bad)
    short = tmp_path / "short.hsm"
    short.write_bytes(raw[:-3])
    with pytest.raises(ValueError):
        read_measurements(short)
