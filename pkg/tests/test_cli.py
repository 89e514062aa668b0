import csv

import numpy as np
import pytest

from hsrec.cli import main
from hsrec.datacube import as_band_pixel_matrix
from hsrec.formats import read_cube, read_measurements


def _make_phantom(tmp_path, name="cube.hsc", nv=16, nh=16, ns=8, seed=1,
                  regions=None):
    path = tmp_path / name
    argv = ["phantom", "--out", str(path), "--nv", str(nv), "--nh", str(nh),
            "--ns", str(ns), "--seed", str(seed)]
    if regions is not None:
        argv += ["--regions", str(regions)]
    assert main(argv) == 0
    return path


def _acquire(tmp_path, cube, name="meas.hsm", rp=0.3, rs=0.25, sigma=0.01,
             seed=4):
    path = tmp_path / name
    assert main(["acquire", "--cube", str(cube), "--rp", str(rp),
                 "--rs", str(rs), "--sigma", str(sigma), "--seed", str(seed),
                 "--out", str(path)]) == 0
    return path


def _read_trace(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------- phantom

def test_phantom_deterministic_bytes(tmp_path):
    a = _make_phantom(tmp_path, "a.hsc")
    b = _make_phantom(tmp_path, "b.hsc")
    assert a.read_bytes() == b.read_bytes()


def test_phantom_single_region_constant_frames(tmp_path):
    path = _make_phantom(tmp_path, regions=1, nv=8, nh=8, ns=4)
    x = as_band_pixel_matrix(read_cube(path))
    assert np.all(x.max(axis=1) == x.min(axis=1))


def test_phantom_rejects_non_power_of_two(tmp_path, capsys):
    rc = main(["phantom", "--out", str(tmp_path / "bad.hsc"), "--nv", "3",
               "--nh", "4", "--ns", "4"])
    assert rc == 2
    assert "power of two" in capsys.readouterr().err


# ---------------------------------------------------------------- acquire

def test_acquire_full_sampling_preserves_norm(tmp_path):
    cube = _make_phantom(tmp_path)
    meas = _acquire(tmp_path, cube, rp=1.0, rs=1.0, sigma=0.0)
    y = read_measurements(meas).y
    x = as_band_pixel_matrix(read_cube(cube))
    assert np.linalg.norm(y) == pytest.approx(np.linalg.norm(x), abs=1e-6)


def test_acquire_five_percent_spectral_rate(tmp_path):
    cube = _make_phantom(tmp_path, nv=4, nh=4, ns=128)
    meas = _acquire(tmp_path, cube, rp=0.5, rs=0.05)
    got = read_measurements(meas)
    assert got.spectral.m_s == 6
    assert got.spectral.q_s == 6  # five-percent rule caps the low-pass block


def test_acquire_rejects_negative_sigma(tmp_path, capsys):
    cube = _make_phantom(tmp_path)
    rc = main(["acquire", "--cube", str(cube), "--rp", "0.5", "--rs", "0.5",
               "--sigma", "-1", "--out", str(tmp_path / "m.hsm")])
    assert rc == 2
    assert capsys.readouterr().err


def test_acquire_lowpass_overrides(tmp_path):
    cube = _make_phantom(tmp_path)
    path = tmp_path / "m.hsm"
    assert main(["acquire", "--cube", str(cube), "--rp", "0.5", "--rs", "0.5",
                 "--qp", "10", "--qs", "0", "--out", str(path)]) == 0
    got = read_measurements(path)
    assert got.spatial.q_p == 10
    assert got.spectral.q_s == 0


def test_acquire_missing_cube_file(tmp_path):
    rc = main(["acquire", "--cube", str(tmp_path / "nope.hsc"), "--rp", "0.5",
               "--rs", "0.5", "--out", str(tmp_path / "m.hsm")])
    assert rc == 2


# ---------------------------------------------------------------- recover

def test_recover_hybrid_end_to_end(tmp_path):
    cube = _make_phantom(tmp_path)
    meas = _acquire(tmp_path, cube)
    out = tmp_path / "rec.hsc"
    trace = tmp_path / "trace.csv"
    rc = main(["recover", "--meas", str(meas), "--method", "hybrid",
               "--out", str(out), "--trace", str(trace)])
    assert rc == 0
    rows = _read_trace(trace)
    assert rows
    assert list(rows[0]) == ["iter", "rel_change", "cost"]
    assert [int(r["iter"]) for r in rows] == list(range(1, len(rows) + 1))
    assert read_cube(out).data.shape == (16, 16, 8)


def test_recover_hybrid_beats_bpdn_with_truth(tmp_path):
    cube = _make_phantom(tmp_path, nv=32, nh=32, ns=16, seed=0)
    meas = _acquire(tmp_path, cube, seed=0)
    finals = {}
    for method in ("bpdn", "hybrid"):
        out = tmp_path / f"{method}.hsc"
        trace = tmp_path / f"{method}.csv"
        rc = main(["recover", "--meas", str(meas), "--method", method,
                   "--truth", str(cube), "--out", str(out),
                   "--trace", str(trace)])
        assert rc == 0
        rows = _read_trace(trace)
        assert list(rows[0]) == ["iter", "rel_change", "cost", "rel_error"]
        finals[method] = float(rows[-1]["rel_error"])
    assert finals["hybrid"] < finals["bpdn"]


def test_recover_dictionary_method(tmp_path):
    cube = _make_phantom(tmp_path, nv=8, nh=8, ns=4)
    meas = _acquire(tmp_path, cube, rp=0.5, rs=0.5)
    out = tmp_path / "rec.hsc"
    rc = main(["recover", "--meas", str(meas), "--method", "hybrid-dict",
               "--truth", str(cube), "--max-iters", "40", "--out", str(out)])
    assert rc == 0
    assert read_cube(out).data.shape == (8, 8, 4)


def test_recover_divergence_exit_code(tmp_path, capsys):
    cube = _make_phantom(tmp_path)
    meas = _acquire(tmp_path, cube)
    rc = main(["recover", "--meas", str(meas), "--method", "hybrid",
               "--lambda", "100", "--out", str(tmp_path / "r.hsc")])
    assert rc == 3
    assert "diverged" in capsys.readouterr().err


# ---------------------------------------------------------------- eval

def test_eval_identical_and_zero(tmp_path, capsys):
    cube = _make_phantom(tmp_path)
    capsys.readouterr()  # drop the phantom command's status line
    assert main(["eval", "--truth", str(cube), "--recovered",
                 str(cube)]) == 0
    assert float(capsys.readouterr().out.strip()) == 0.0

    zero = tmp_path / "zero.hsc"
    data = read_cube(cube)
    from hsrec.datacube import Datacube
    from hsrec.formats import write_cube
    write_cube(zero, Datacube(np.zeros_like(data.data)))
    assert main(["eval", "--truth", str(cube), "--recovered", str(zero)]) == 0
    assert float(capsys.readouterr().out.strip()) == pytest.approx(1.0)


def test_eval_dimension_mismatch(tmp_path, capsys):
    big = _make_phantom(tmp_path, "big.hsc")
    small = _make_phantom(tmp_path, "small.hsc", nv=8, nh=8, ns=4)
    rc = main(["eval", "--truth", str(big), "--recovered", str(small)])
    assert rc == 2
    assert capsys.readouterr().err


# ---------------------------------------------------------------- render

def test_render_constant_cube_uniform_gray(tmp_path):
    from hsrec.datacube import Datacube
    from hsrec.formats import write_cube
    cube = tmp_path / "flat.hsc"
    write_cube(cube, Datacube(np.full((4, 6, 3), 0.7)))
    out = tmp_path / "img.ppm"
    assert main(["render", "--cube", str(cube), "--bands", "0,1,2",
                 "--out", str(out)]) == 0
    raw = out.read_bytes()
    assert raw.startswith(b"P6\n6 4\n255\n")
    body = raw[len(b"P6\n6 4\n255\n"):]
    assert body == bytes([128]) * (4 * 6 * 3)


def test_render_band_out_of_range(tmp_path, capsys):
    cube = _make_phantom(tmp_path, nv=4, nh=4, ns=4)
    rc = main(["render", "--cube", str(cube), "--bands", "0,1,9",
               "--out", str(tmp_path / "img.ppm")])
    assert rc == 2
    assert capsys.readouterr().err


def test_render_deterministic_bytes(tmp_path):
    cube = _make_phantom(tmp_path)
    a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
    for out in (a, b):
        assert main(["render", "--cube", str(cube), "--bands", "0,3,7",
                     "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


# ---------------------------------------------------------------- sweep

def _run_sweep(tmp_path, rates, seeds):
    out = tmp_path / "sweep.csv"
    rc = main(["sweep", "--nv", "8", "--nh", "8", "--ns", "4",
               "--rates", rates, "--seeds", seeds, "--out", str(out)])
    assert rc == 0
    with open(out, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_single_pair_two_rows(tmp_path):
    rows = _run_sweep(tmp_path, "0.5:0.5", "0")
    assert len(rows) == 2
    assert {r["method"] for r in rows} == {"bpdn", "hybrid"}


def test_sweep_grid_cardinality(tmp_path):
    rows = _run_sweep(tmp_path, "0.3:0.25,0.5:0.5,0.75:0.75", "0,1")
    assert len(rows) == 12


def test_sweep_repeated_seeds_identical_errors(tmp_path):
    rows = _run_sweep(tmp_path, "0.5:0.5", "3,3")
    errs = {}
    for row in rows:
        errs.setdefault(row["method"], []).append(row["relative_error"])
    for values in errs.values():
        assert values[0] == values[1]
