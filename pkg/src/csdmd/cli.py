"""Command-line front end.

Subcommands generate snapshot data, run the decomposition pathways,
compare results, and verify invariance properties.  Artifacts are binary
matrix files with JSON sidecars; reports are JSON; mode images are
binary PGM.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure (stage named on stderr).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import io as io_mod
from .dmd import SnapshotPair, compressed_dmd, exact_dmd, mode_alignment, pair_eigenvalues
from .errors import (
    BadDimensions,
    BadWavenumber,
    ConvergenceError,
    CsdmdError,
    DimensionError,
    NoProgress,
    RankCollapse,
    RankZero,
    ZeroInput,
    ZeroMatrix,
)
from .linalg import DEFAULT_TRUNCATION_TOL
from .pipelines import verify_invariance_suite
from .recovery import RecoveryConfig, RecoveredMode, recover_modes
from .sensing import SparseBasis, apply_measurement, make_measurement, mutual_coherence
from .systems import (
    DoubleGyreParams,
    add_fourier_noise,
    generate_fourier_lti,
    generate_gyre_snapshots,
    make_fourier_lti,
)

CONFIG_ERRORS = (
    BadDimensions,
    BadWavenumber,
    DimensionError,
    FileNotFoundError,
    json.JSONDecodeError,
    KeyError,
)
NUMERICAL_ERRORS = (
    RankCollapse,
    RankZero,
    ZeroMatrix,
    ZeroInput,
    NoProgress,
    ConvergenceError,
)


def _write_pair(out_dir, pair: SnapshotPair):
    io_mod.write_matrix(out_dir, "X", pair.X, grid=pair.grid, dt=pair.dt)
    io_mod.write_matrix(out_dir, "Xp", pair.Xp, grid=pair.grid, dt=pair.dt)


def _read_pair(directory, names=("X", "Xp")):
    X, side = io_mod.read_matrix(directory, names[0])
    Xp, _ = io_mod.read_matrix(directory, names[1])
    grid = tuple(side["grid"]) if side.get("grid") else None
    dt = side.get("dt", 1.0)
    return SnapshotPair(X=X, Xp=Xp, dt=dt, grid=grid)


def _write_result(out_dir, result, extra=None):
    os.makedirs(out_dir, exist_ok=True)
    io_mod.write_matrix(out_dir, "lambdas", result.lambdas)
    io_mod.write_matrix(out_dir, "omegas", result.omegas)
    io_mod.write_matrix(out_dir, "amplitudes", result.amplitudes)
    io_mod.write_matrix(out_dir, "modes", result.Phi)
    io_mod.write_matrix(out_dir, "atilde", result.Atilde)
    summary = {
        "rank": result.rank,
        "dt": result.dt,
        "truncation_tol": result.svd_used.truncation_tol,
    }
    if extra:
        summary.update(extra)
    io_mod.atomic_write_text(
        os.path.join(out_dir, "result.json"), io_mod.dumps_report(summary)
    )


def _write_images(out_dir, result, grid, count, with_imag):
    if grid is None:
        raise DimensionError("mode images need grid metadata on the snapshots")
    order = np.argsort(-np.abs(result.amplitudes))
    for rank_pos, j in enumerate(order[:count]):
        base = os.path.join(out_dir, f"mode{rank_pos:02d}")
        io_mod.write_mode_image(base + ".pgm", result.Phi[:, j], grid, "real")
        if with_imag:
            io_mod.write_mode_image(base + "_imag.pgm", result.Phi[:, j], grid, "imag")


def _cmd_gen(args):
    if args.what == "example1":
        m = int(round(args.t1 / args.dt))
        sys_cfg = make_fourier_lti(
            nx=args.nx, ny=args.ny, K=args.k, dt=args.dt, m=m, seed=args.seed
        )
        pair, truth = generate_fourier_lti(sys_cfg)
        if args.noise > 0:
            pair = add_fourier_noise(pair, args.noise, args.noise_seed)
        _write_pair(args.out, pair)
        io_mod.write_matrix(args.out, "truth_lambdas", truth.lambdas)
        io_mod.write_matrix(args.out, "truth_atoms", truth.atoms, grid=sys_cfg.grid)
        meta = {
            "system": "fourier_lti",
            "nx": args.nx,
            "ny": args.ny,
            "K": args.k,
            "dt": args.dt,
            "m": m,
            "seed": args.seed,
            "noise_rms": args.noise,
            "wavenumbers": [list(w) for w in sys_cfg.wavenumbers],
            "mu": [complex(z) for z in sys_cfg.mu],
        }
        io_mod.atomic_write_text(
            os.path.join(args.out, "system.json"), io_mod.dumps_report(meta)
        )
    else:
        params = DoubleGyreParams(
            A=args.amp,
            omega=args.omega,
            eps=args.eps,
            grid=(args.nx, args.ny),
            t0=args.t0,
            t1=args.t1,
            dt=args.dt,
        )
        pair = generate_gyre_snapshots(params, args.observable)
        _write_pair(args.out, pair)
        meta = {
            "system": "double_gyre",
            "nx": args.nx,
            "ny": args.ny,
            "A": args.amp,
            "omega": args.omega,
            "eps": args.eps,
            "t0": args.t0,
            "t1": args.t1,
            "dt": args.dt,
            "observable": args.observable,
        }
        io_mod.atomic_write_text(
            os.path.join(args.out, "system.json"), io_mod.dumps_report(meta)
        )
    return 0


def _cmd_dmd(args):
    pair = _read_pair(args.snapshots)
    result = exact_dmd(pair, args.tol)
    _write_result(args.out, result, extra={"path": "1A"})
    if args.images:
        _write_images(args.out, result, pair.grid, args.images, args.imag)
    return 0


def _cmd_cdmd(args):
    pair = _read_pair(args.snapshots)
    C = make_measurement(args.measure, args.p, pair.n, args.seed)
    if args.l1_modes:
        from .pipelines import _l1_modes

        result = compressed_dmd(pair, C, args.tol)
        measured = SnapshotPair(
            X=apply_measurement(C, pair.X),
            Xp=apply_measurement(C, pair.Xp),
            dt=pair.dt,
        )
        projected = exact_dmd(measured, args.tol)
        psi = SparseBasis(pair.grid)
        from dataclasses import replace

        result = replace(result, Phi=_l1_modes(projected, C, psi))
    else:
        result = compressed_dmd(pair, C, args.tol)
    _write_result(args.out, result, extra={"path": "1B", "measure": args.measure, "p": args.p})
    # persist the measured pair and the measurement description for the
    # sampling-only pipeline
    io_mod.write_matrix(args.out, "Y", apply_measurement(C, pair.X), dt=pair.dt)
    io_mod.write_matrix(args.out, "Yp", apply_measurement(C, pair.Xp), dt=pair.dt)
    measure_meta = {
        "kind": C.kind,
        "p": C.p,
        "n": C.n,
        "seed": C.seed,
        "grid": list(pair.grid) if pair.grid else None,
        "dt": pair.dt,
    }
    if C.kind == "pixel":
        measure_meta["indices"] = [int(i) for i in C.indices]
    io_mod.atomic_write_text(
        os.path.join(args.out, "measure.json"), io_mod.dumps_report(measure_meta)
    )
    if args.images:
        _write_images(args.out, result, pair.grid, args.images, args.imag)
    return 0


def _load_measurement(path):
    with open(path, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    kind, p, n = meta["kind"], meta["p"], meta["n"]
    if kind == "pixel" and "indices" in meta:
        from .sensing import MeasurementMatrix

        C = MeasurementMatrix(
            kind, p, n, meta.get("seed"), indices=np.asarray(meta["indices"])
        )
    else:
        C = make_measurement(kind, p, n, meta.get("seed"))
    grid = tuple(meta["grid"]) if meta.get("grid") else None
    return C, grid, meta.get("dt", 1.0)


def _cmd_csdmd(args):
    C, grid, dt = _load_measurement(args.measure_file)
    if grid is None:
        raise DimensionError("measurement file lacks grid metadata")
    if args.basis != "dft":
        raise BadDimensions(f"unsupported basis {args.basis!r}")
    psi = SparseBasis(grid)
    Y, side = io_mod.read_matrix(args.measured, "Y")
    Yp, _ = io_mod.read_matrix(args.measured, "Yp")
    measured = SnapshotPair(X=Y, Xp=Yp, dt=side.get("dt", dt))
    rcfg = RecoveryConfig(sparsity_K=args.sparsity)

    if args.reconstruct_snapshots:
        from .pipelines import PATH_2A_MAX_M, PATH_2A_MAX_N, _reconstruct_snapshots

        if C.n > PATH_2A_MAX_N or measured.m > PATH_2A_MAX_M:
            raise BadDimensions(
                "snapshot reconstruction limited to "
                f"n<={PATH_2A_MAX_N}, m<={PATH_2A_MAX_M}"
            )
        recon = _reconstruct_snapshots(measured, C, psi, rcfg)
        result = exact_dmd(recon, args.tol)
        _write_result(args.out, result, extra={"path": "2A"})
        return 0

    projected = exact_dmd(measured, args.tol)
    recovered, diags = recover_modes(projected, C, psi, rcfg)
    from dataclasses import replace

    result = replace(projected, Phi=recovered)
    residuals = []
    for j, diag in enumerate(diags):
        if isinstance(diag, RecoveredMode):
            residuals.append({"mode": j, "residual": diag.residual, "iters": diag.iters})
        else:
            residuals.append({"mode": j, "error": str(diag)})
    _write_result(
        args.out,
        result,
        extra={
            "path": "2B",
            "sparsity_K": args.sparsity,
            "coherence": mutual_coherence(C, psi),
            "recovery": residuals,
        },
    )
    if args.images:
        _write_images(args.out, result, grid, args.images, args.imag)
    return 0


def _cmd_compare(args):
    la, _ = io_mod.read_matrix(args.a, "lambdas")
    lb, _ = io_mod.read_matrix(args.b, "lambdas")
    amps_a, _ = io_mod.read_matrix(args.a, "amplitudes")
    Ma, _ = io_mod.read_matrix(args.a, "modes")
    Mb, _ = io_mod.read_matrix(args.b, "modes")
    pairs, un_a, un_b = pair_eigenvalues(la[:, 0], lb[:, 0], amps_a[:, 0])
    rows = []
    aligns = []
    for i, j, dist in pairs:
        rows.append(
            {
                "lambda_a": complex(la[i, 0]),
                "lambda_b": complex(lb[j, 0]),
                "abs_delta": dist,
            }
        )
        aligns.append(mode_alignment(Ma[:, i], Mb[:, j]))
    report = {
        "schema": io_mod.REPORT_SCHEMA,
        "eigen_table": rows,
        "mode_alignments": aligns,
        "unmatched_a": [complex(la[i, 0]) for i in un_a],
        "unmatched_b": [complex(lb[j, 0]) for j in un_b],
        "max_abs_delta": max((r["abs_delta"] for r in rows), default=0.0),
    }
    io_mod.atomic_write_text(args.out, io_mod.dumps_report(report))
    return 0


def _cmd_verify(args):
    pair = _read_pair(args.snapshots)
    checks = verify_invariance_suite(pair, seed=args.seed, truncation_tol=args.tol)
    all_ok = True
    for chk in checks:
        status = "pass" if chk["passed"] else "FAIL"
        print(
            f"{status}  {chk['name']:22s} eig_dev={chk['eig_dev']:.3e} "
            f"mode_dev={chk['mode_dev']:.3e}"
        )
        all_ok = all_ok and chk["passed"]
    if not all_ok:
        raise ConvergenceError("one or more invariance checks failed")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="csdmd",
        description="modal decomposition from full, compressed, or subsampled snapshots",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate snapshot datasets")
    gen_sub = p_gen.add_subparsers(dest="what", required=True)

    g1 = gen_sub.add_parser("example1", help="planted sparse-spectrum linear system")
    g1.add_argument("--nx", type=int, default=128)
    g1.add_argument("--ny", type=int, default=128)
    g1.add_argument("--k", type=int, default=5)
    g1.add_argument("--dt", type=float, default=0.01)
    g1.add_argument("--t1", type=float, default=2.0)
    g1.add_argument("--seed", type=int, default=0)
    g1.add_argument("--noise", type=float, default=0.0)
    g1.add_argument("--noise-seed", type=int, default=None)
    g1.add_argument("--out", required=True)

    g2 = gen_sub.add_parser("gyre", help="double gyre flow snapshots")
    g2.add_argument("--nx", type=int, default=512)
    g2.add_argument("--ny", type=int, default=256)
    g2.add_argument("--amp", type=float, default=0.1)
    g2.add_argument("--omega", type=float, default=0.6283185307)
    g2.add_argument("--eps", type=float, default=0.25)
    g2.add_argument("--dt", type=float, default=0.1)
    g2.add_argument("--t0", type=float, default=0.0)
    g2.add_argument("--t1", type=float, default=15.0)
    g2.add_argument("--observable", choices=("vorticity", "velocity"), default="vorticity")
    g2.add_argument("--out", required=True)

    p_dmd = sub.add_parser("dmd", help="full-state decomposition")
    p_dmd.add_argument("--snapshots", required=True)
    p_dmd.add_argument("--tol", type=float, default=DEFAULT_TRUNCATION_TOL)
    p_dmd.add_argument("--out", required=True)
    p_dmd.add_argument("--images", type=int, default=0)
    p_dmd.add_argument("--imag", action="store_true")

    p_cdmd = sub.add_parser("cdmd", help="compress, decompose, lift modes")
    p_cdmd.add_argument("--snapshots", required=True)
    p_cdmd.add_argument("--measure", choices=("gaussian", "bernoulli", "pixel"), required=True)
    p_cdmd.add_argument("-p", type=int, required=True)
    p_cdmd.add_argument("--seed", type=int, default=0)
    p_cdmd.add_argument("--tol", type=float, default=DEFAULT_TRUNCATION_TOL)
    p_cdmd.add_argument("--l1-modes", action="store_true")
    p_cdmd.add_argument("--out", required=True)
    p_cdmd.add_argument("--images", type=int, default=0)
    p_cdmd.add_argument("--imag", action="store_true")

    p_cs = sub.add_parser("csdmd", help="decompose measurements, recover sparse modes")
    p_cs.add_argument("--measured", required=True)
    p_cs.add_argument("--measure-file", required=True)
    p_cs.add_argument("--basis", default="dft")
    p_cs.add_argument("--sparsity", type=int, required=True)
    p_cs.add_argument("--tol", type=float, default=DEFAULT_TRUNCATION_TOL)
    p_cs.add_argument("--reconstruct-snapshots", action="store_true")
    p_cs.add_argument("--out", required=True)
    p_cs.add_argument("--images", type=int, default=0)
    p_cs.add_argument("--imag", action="store_true")

    p_cmp = sub.add_parser("compare", help="match eigenvalues and modes of two results")
    p_cmp.add_argument("--a", required=True)
    p_cmp.add_argument("--b", required=True)
    p_cmp.add_argument("--out", required=True)

    p_ver = sub.add_parser("verify", help="run the invariance checks on snapshots")
    p_ver.add_argument("--snapshots", required=True)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--tol", type=float, default=1e-6)

    return parser


HANDLERS = {
    "gen": _cmd_gen,
    "dmd": _cmd_dmd,
    "cdmd": _cmd_cdmd,
    "csdmd": _cmd_csdmd,
    "compare": _cmd_compare,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    stage = args.command
    try:
        return HANDLERS[stage](args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure in {stage}: {exc}", file=sys.stderr)
        return 3
    except CONFIG_ERRORS as exc:
        print(f"configuration error in {stage}: {exc}", file=sys.stderr)
        return 2
    except CsdmdError as exc:
        print(f"error in {stage}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
