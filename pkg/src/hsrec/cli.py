"""Command-line surface: phantom generation, acquisition simulation,
recovery, evaluation, rendering, and rate sweeps.

Exit codes are a stable scripting contract: 0 success, 2 usage or
validation failure, 3 numerical failure (divergence, singular dictionary).
Every command is deterministic given its flags, wall-clock timings aside.
"""

import argparse
import csv
import sys

import numpy as np

from . import formats, harness
from .datacube import as_band_pixel_matrix, cube_from_matrix
from .sensing import (acquire, build_spatial_projector, build_spectral_projector,
                      default_lowpass_counts, rates_to_counts)
from .solvers import (DivergenceError, SolverConfig, apg_bpdn, recover_hybrid,
                      recover_hybrid_nonortho)
from .transforms import HaarBasis, SpectralBasis, fwht_sequency, learn_spectral_basis


def _require_pow2(flag, value):
    if value < 1 or value & (value - 1):
        raise ValueError(f"{flag} must be a power of two, got {value}")


def _cmd_phantom(args):
    for flag in ("nv", "nh", "ns"):
        _require_pow2("--" + flag, getattr(args, flag))
    spec = harness.PhantomSpec(args.nv, args.nh, args.ns, n_regions=args.regions,
                               n_atoms=args.atoms, seed=args.seed)
    formats.write_cube(args.out, harness.generate_phantom(spec))
    print(f"wrote {args.out}: {args.nv}x{args.nh}x{args.ns} cube, "
          f"{args.regions} regions")
    return 0


def _cmd_acquire(args):
    cube = formats.read_cube(args.cube)
    x = as_band_pixel_matrix(cube)
    m_p, m_s = rates_to_counts(args.rp, args.rs, cube.n_p, cube.n_s)
    q_p, q_s = default_lowpass_counts(cube.n_p, cube.n_s, m_p, m_s)
    if args.qp is not None:
        q_p = args.qp
    if args.qs is not None:
        q_s = args.qs
    pp = build_spatial_projector(cube.n_v, cube.n_h, m_p, q_p, args.seed)
    sp = build_spectral_projector(cube.n_s, m_s, q_s, args.seed)
    meas = acquire(x, sp, pp, args.sigma, noise_seed=args.seed)
    formats.write_measurements(args.out, meas)
    print(f"wrote {args.out}: {m_s}x{m_p} measurements "
          f"(q_s={q_s}, q_p={q_p}, sigma={args.sigma})")
    return 0


def _walsh_fallback_basis(n_s):
    # self-inverse sequency Walsh matrix; column k is the transform of e_k
    return SpectralBasis(np.column_stack(
        [fwht_sequency(col) for col in np.eye(n_s)]))


def _write_trace(path, trace):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["iter", "rel_change", "cost"]
        if trace.truth_error is not None:
            header.append("rel_error")
        writer.writerow(header)
        for i in range(trace.iterations):
            row = [i + 1, f"{trace.rel_change[i]:.12e}", f"{trace.cost[i]:.12e}"]
            if trace.truth_error is not None:
                row.append(f"{trace.truth_error[i]:.12e}")
            writer.writerow(row)


def _cmd_recover(args):
    meas = formats.read_measurements(args.meas)
    pp, sp = meas.spatial, meas.spectral
    n_v, n_h, n_s = pp.n_v, pp.n_h, sp.n_s
    x_truth = None
    if args.truth:
        truth_cube = formats.read_cube(args.truth)
        if (truth_cube.n_v, truth_cube.n_h, truth_cube.n_s) != (n_v, n_h, n_s):
            raise ValueError(
                f"truth cube is {truth_cube.n_v}x{truth_cube.n_h}x"
                f"{truth_cube.n_s}, measurements describe {n_v}x{n_h}x{n_s}")
        x_truth = as_band_pixel_matrix(truth_cube)
        basis = learn_spectral_basis(
            harness.sample_training_columns(x_truth, args.basis_sample_seed))
    else:
        basis = _walsh_fallback_basis(n_s)
    bpdn_defaults = harness.default_bpdn_config()
    hybrid_defaults = harness.default_hybrid_config()
    config = SolverConfig(
        step_size=args.step_size,
        gamma=args.gamma if args.gamma is not None else bpdn_defaults.gamma,
        gamma1=args.gamma1 if args.gamma1 is not None else hybrid_defaults.gamma1,
        gamma2=args.gamma2 if args.gamma2 is not None else hybrid_defaults.gamma2,
        tau=args.tau,
        max_iters=args.max_iters)
    if args.method == "bpdn":
        x_hat, trace = apg_bpdn(meas, HaarBasis(n_v, n_h), basis, config,
                                x_truth=x_truth)
    elif args.method == "hybrid":
        x_hat, trace = recover_hybrid(meas, basis, config, x_truth=x_truth)
    else:
        x_hat, trace = recover_hybrid_nonortho(meas, basis, config,
                                                 x_truth=x_truth)
    formats.write_cube(args.out, cube_from_matrix(x_hat, n_v, n_h))
    if args.trace:
        _write_trace(args.trace, trace)
    line = (f"{args.method}: {trace.iterations} iterations ({trace.reason}), "
            f"final cost {trace.cost[-1]:.6e}")
    if trace.truth_error is not None:
        line += f", relative error {trace.truth_error[-1]:.6e}"
    print(line)
    return 0


def _cmd_eval(args):
    truth = formats.read_cube(args.truth)
    recovered = formats.read_cube(args.recovered)
    if (truth.n_v, truth.n_h, truth.n_s) != (recovered.n_v, recovered.n_h,
                                             recovered.n_s):
        raise ValueError("cube dimensions do not match")
    err = harness.relative_error(as_band_pixel_matrix(truth),
                                 as_band_pixel_matrix(recovered))
    print(f"{err:.6e}")
    return 0


def _cmd_render(args):
    cube = formats.read_cube(args.cube)
    try:
        bands = [int(tok) for tok in args.bands.split(",")]
    except ValueError:
        raise ValueError(f"--bands expects integers, got {args.bands!r}")
    if len(bands) != 3:
        raise ValueError("--bands expects exactly three comma-separated indices")
    channels = []
    for k in bands:
        if not 0 <= k < cube.n_s:
            raise ValueError(f"band index {k} out of range [0, {cube.n_s})")
        frm = cube.frame(k)
        lo, hi = float(frm.min()), float(frm.max())
        if hi > lo:
            channels.append(np.rint((frm - lo) / (hi - lo) * 255).astype(np.uint8))
        else:
            channels.append(np.full((cube.n_v, cube.n_h), 128, dtype=np.uint8))
    image = np.stack(channels, axis=-1)
    with open(args.out, "wb") as fh:
        fh.write(f"P6\n{cube.n_h} {cube.n_v}\n255\n".encode("ascii"))
        fh.write(image.tobytes())
    print(f"wrote {args.out}: {cube.n_h}x{cube.n_v} pixmap from bands {bands}")
    return 0


def _parse_rates(text):
    pairs = []
    for tok in text.split(","):
        rp, sep, rs = tok.partition(":")
        if not sep:
            raise ValueError(f"bad rate pair {tok!r}; expected rp:rs")
        pairs.append((float(rp), float(rs)))
    return tuple(pairs)


def _cmd_sweep(args):
    if args.cube:
        cube = formats.read_cube(args.cube)
        phantom = harness.PhantomSpec(cube.n_v, cube.n_h, cube.n_s)
    else:
        for flag in ("nv", "nh", "ns"):
            _require_pow2("--" + flag, getattr(args, flag))
        cube = None
        phantom = harness.PhantomSpec(args.nv, args.nh, args.ns,
                                      n_regions=args.regions,
                                      n_atoms=args.atoms,
                                      seed=args.phantom_seed)
    spec = harness.ExperimentSpec(
        phantom=phantom,
        rates=_parse_rates(args.rates),
        sigma=args.sigma,
        seeds=tuple(int(tok) for tok in args.seeds.split(",")))
    rows = harness.run_experiment(spec, cube=cube)
    fields = ["method", "r_p", "r_s", "seed", "relative_error", "iterations",
              "wall_time_s"]
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({**row,
                             "relative_error": f"{row['relative_error']:.12e}",
                             "wall_time_s": f"{row['wall_time_s']:.3f}"})
    print(f"wrote {args.out}: {len(rows)} rows")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hsrec",
        description="hyperspectral datacube recovery from separable "
                    "compressive measurements")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate a synthetic datacube file")
    p.add_argument("--out", required=True)
    p.add_argument("--nv", type=int, default=32)
    p.add_argument("--nh", type=int, default=32)
    p.add_argument("--ns", type=int, default=16)
    p.add_argument("--regions", type=int, default=4)
    p.add_argument("--atoms", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_phantom)

    p = sub.add_parser("acquire", help="simulate compressive acquisition")
    p.add_argument("--cube", required=True)
    p.add_argument("--rp", type=float, required=True,
                   help="spatial measurement rate in (0, 1]")
    p.add_argument("--rs", type=float, required=True,
                   help="spectral measurement rate in (0, 1]")
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qp", type=int, default=None,
                   help="override the structured spatial row count")
    p.add_argument("--qs", type=int, default=None,
                   help="override the structured spectral row count")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_acquire)

    p = sub.add_parser("recover", help="recover a datacube from measurements")
    p.add_argument("--meas", required=True)
    p.add_argument("--method", choices=("bpdn", "hybrid", "hybrid-dict"),
                   default="hybrid")
    p.add_argument("--gamma", type=float, default=None,
                   help="bpdn l1 weight")
    p.add_argument("--gamma1", type=float, default=None,
                   help="hybrid TV weight")
    p.add_argument("--gamma2", type=float, default=None,
                   help="hybrid spectral l1 weight")
    p.add_argument("--lambda", dest="step_size", type=float, default=0.25)
    p.add_argument("--tau", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--basis-sample-seed", type=int, default=0)
    p.add_argument("--truth", default=None,
                   help="ground-truth cube: trains the spectral basis and "
                        "adds a rel_error trace column")
    p.add_argument("--out", required=True)
    p.add_argument("--trace", default=None, help="per-iteration CSV path")
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("eval", help="print the relative recovery error")
    p.add_argument("--truth", required=True)
    p.add_argument("--recovered", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("render", help="render three bands to a P6 pixmap")
    p.add_argument("--cube", required=True)
    p.add_argument("--bands", required=True,
                   help="comma-separated band indices k_r,k_g,k_b")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("sweep", help="run the two-method rate sweep")
    p.add_argument("--cube", default=None,
                   help="input cube; omit to generate a phantom")
    p.add_argument("--nv", type=int, default=32)
    p.add_argument("--nh", type=int, default=32)
    p.add_argument("--ns", type=int, default=16)
    p.add_argument("--regions", type=int, default=4)
    p.add_argument("--atoms", type=int, default=2)
    p.add_argument("--phantom-seed", type=int, default=0)
    p.add_argument("--rates", default="0.3:0.25,0.5:0.5",
                   help='comma-separated pairs "rp:rs,..."')
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DivergenceError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_entry():
    sys.exit(main())
