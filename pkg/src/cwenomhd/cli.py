"""Command-line interface: run, converge, info, report.

Exit codes: 0 success, 2 configuration error, 3 unphysical-state abort.
"""

import argparse
import logging
import os
import sys

from .errors import ConfigError, SnapshotError


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="cwenomhd",
        description="Fourth-order CWENO finite-volume ideal-MHD solver "
                    "with constrained transport")
    parser.add_argument("--workers", type=int, default=None,
                        help="compute threads (results are identical "
                             "for any count)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="advance a configured problem")
    p_run.add_argument("config")
    p_run.add_argument("--resume", action="store_true",
                       help="continue from the latest snapshot in the "
                            "output directory")
    p_run.add_argument("--output-dir", default=None)

    p_conv = sub.add_parser("converge", help="resolution sweep with EOC table")
    p_conv.add_argument("config")
    p_conv.add_argument("--resolutions", type=int, nargs="+", required=True)
    p_conv.add_argument("--t-compare", type=float, nargs="*", default=None)
    p_conv.add_argument("--reference-snapshot", nargs="*", default=None,
                        help="snapshot file(s) of the designated reference "
                             "run, one per comparison time (reference "
                             "problems only)")
    p_conv.add_argument("--output-dir", default=None)

    p_info = sub.add_parser("info", help="print a snapshot header")
    p_info.add_argument("snapshot")

    p_rep = sub.add_parser("report", help="render figures from run output")
    p_rep.add_argument("target", help="snapshot file or run directory")
    p_rep.add_argument("--output-dir", default=None)

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    if args.workers:
        import numba
        numba.set_num_threads(max(1, args.workers))

    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SnapshotError as exc:
        print(f"snapshot error: {exc}", file=sys.stderr)
        return 2


def _load(args):
    from .config import load_config
    cfg = load_config(args.config)
    if getattr(args, "output_dir", None):
        from dataclasses import replace
        cfg = replace(cfg, output_dir=args.output_dir)
    return cfg


def _dispatch(args):
    if args.command == "run":
        from .driver import run
        return run(_load(args), resume=args.resume)

    if args.command == "converge":
        from .driver import convergence_suite, write_convergence_outputs
        from .snapshots import read_snapshot
        cfg = _load(args)
        times = args.t_compare or [cfg.end_time()]
        refs = None
        if cfg.problem().compare == "reference":
            if not args.reference_snapshot:
                raise ConfigError(
                    "this problem compares against a designated reference "
                    "run; pass --reference-snapshot (one file per "
                    "comparison time)")
            if len(args.reference_snapshot) != len(times):
                raise ConfigError("need one reference snapshot per "
                                  "comparison time")
            refs = {}
            for t, path in zip(times, args.reference_snapshot):
                state, _ = read_snapshot(path)
                refs[t] = state
        tables = convergence_suite(cfg, args.resolutions, times, refs)
        paths = write_convergence_outputs(tables, cfg.output_dir,
                                          cfg.problem_name, cfg.scheme)
        for t, rows in tables.items():
            print(f"# t = {t:g}")
            print(f"{'n':>6s} {'dW_mean':>14s} {'EOC':>8s}")
            for row in rows:
                import math
                eoc_s = "-" if math.isnan(row["eoc"]) else f"{row['eoc']:.2f}"
                print(f"{row['n']:>6d} {row['dw_mean']:>14.6e} {eoc_s:>8s}")
        print("wrote:", ", ".join(paths))
        return 0

    if args.command == "info":
        from .snapshots import read_snapshot
        state, meta = read_snapshot(args.snapshot)
        spec = state.spec
        print(f"problem:    {meta['problem'] or '(unknown)'}")
        print(f"scheme:     {meta['scheme']}")
        eos = meta["eos"]
        desc = f"isothermal cs={eos.cs}" if eos.isothermal \
            else f"adiabatic gamma={eos.gamma}"
        print(f"eos:        {desc}")
        print(f"resolution: {spec.nx} x {spec.ny} x {spec.nz}")
        print(f"spacing:    {spec.dx:g} {spec.dy:g} {spec.dz:g}")
        print(f"origin:     {spec.x0:g} {spec.y0:g} {spec.z0:g}")
        print(f"boundary:   {' '.join(spec.boundary)}")
        print(f"time:       {meta['time']!r}")
        print(f"step:       {meta['step']}")
        return 0

    if args.command == "report":
        return _report(args)
    raise ConfigError(f"unknown command {args.command!r}")


def _report(args):
    from .plotting import render_ledger, render_snapshot
    from .snapshots import read_snapshot
    target = args.target
    outdir = args.output_dir or (target if os.path.isdir(target)
                                 else os.path.dirname(target) or ".")
    os.makedirs(outdir, exist_ok=True)
    made = []
    if os.path.isdir(target):
        ledger = os.path.join(target, "ledger.csv")
        if os.path.exists(ledger):
            made.append(render_ledger(ledger,
                                      os.path.join(outdir, "ledger.png")))
        final = os.path.join(target, "final.dat")
        snaps = [final] if os.path.exists(final) else []
    else:
        snaps = [target]
    for snap in snaps:
        state, meta = read_snapshot(snap)
        prefix = os.path.join(
            outdir, os.path.splitext(os.path.basename(snap))[0])
        made.extend(render_snapshot(state, meta["eos"], prefix))
    print("wrote:", ", ".join(made) if made else "(nothing to render)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
