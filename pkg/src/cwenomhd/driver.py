"""Run orchestration: the time loop with ledger/snapshot output, and the
convergence-suite driver producing the L1-error / EOC tables."""

import csv
import glob
import logging
import math
import os

import numpy as np

from . import diagnostics as diag
from .config import RunConfig
from .errors import UnphysicalStateError
from .grid import State
from .snapshots import read_snapshot, write_snapshot
from .timestep import TimeControl, mhd_step

log = logging.getLogger(__name__)

LEDGER_COLUMNS = [
    "step", "t", "dt", "mass", "mom_x", "mom_y", "mom_z", "energy",
    "e_kin", "e_mag", "e_int", "e_fluct", "e_loss", "max_div_b", "max_mach",
    "rho_min", "rho_max", "flattener_activity", "n_fallback_tvd",
    "n_fallback_godunov", "n_transform_off",
]


class LedgerWriter:
    """CSV time series with a fixed, versioned column order."""

    def __init__(self, path):
        self.path = path
        self._f = open(path, "w", newline="")
        self._w = csv.DictWriter(self._f, fieldnames=LEDGER_COLUMNS)
        self._w.writeheader()

    def row(self, **kwargs):
        self._w.writerow(kwargs)
        self._f.flush()

    def close(self):
        self._f.close()


def ledger_row(state, eos, tc, stats, e_fluct0):
    totals = diag.conserved_totals(state, eos)
    e_kin, e_mag, e_int = diag.energy_split(state, eos)
    e_fluct = diag.fluctuation_energy(state, eos)
    u = state.interior_u()
    return dict(
        step=tc.step_count, t=repr(tc.t), dt=repr(tc.dt),
        mass=repr(totals["mass"]), mom_x=repr(totals["mom_x"]),
        mom_y=repr(totals["mom_y"]), mom_z=repr(totals["mom_z"]),
        energy=repr(totals["energy"]),
        e_kin=repr(e_kin), e_mag=repr(e_mag), e_int=repr(e_int),
        e_fluct=repr(e_fluct),
        e_loss=repr(diag.e_loss(e_fluct0, e_fluct) if e_fluct0 else 0.0),
        max_div_b=repr(diag.max_divergence(state)),
        max_mach=repr(diag.max_mach(state, eos)),
        rho_min=repr(float(u[0].min())), rho_max=repr(float(u[0].max())),
        flattener_activity=repr(stats.flattener_activity if stats else 0.0),
        n_fallback_tvd=stats.n_fallback_tvd if stats else 0,
        n_fallback_godunov=stats.n_fallback_godunov if stats else 0,
        n_transform_off=stats.n_transform_off if stats else 0,
    )


def _snap_name(step):
    return f"snap_{step:07d}.dat"


def latest_snapshot(outdir):
    paths = sorted(glob.glob(os.path.join(outdir, "snap_*.dat")))
    return paths[-1] if paths else None


def run(config: RunConfig, resume=False) -> int:
    """Advance a configured problem to t_end, writing ledger and snapshots.

    Returns the process exit code: 0 on success, 3 when an unphysical state
    survives the enabled fallbacks (a failure snapshot is still written).
    """
    outdir = config.output_dir
    os.makedirs(outdir, exist_ok=True)
    prob = config.problem()
    eos = config.eos()
    cfg = config.scheme_config()
    t_end = config.end_time()

    start_step = 0
    if resume and latest_snapshot(outdir):
        path = latest_snapshot(outdir)
        state, meta = read_snapshot(path)
        start_step = meta["step"]
        log.info("resuming from %s at t=%g step=%d", path, state.t, start_step)
    else:
        spec = config.grid_spec()
        state = prob.initialize(spec, eos)

    tc = TimeControl(c_cfl=cfg.c_cfl, t_end=t_end, t=state.t,
                     step_count=start_step)
    ledger = LedgerWriter(os.path.join(outdir, "ledger.csv"))
    e_fluct0 = diag.fluctuation_energy(state, eos)
    ledger.row(**ledger_row(state, eos, tc, None, e_fluct0))
    next_snap = (math.floor(state.t / config.snapshot_every) + 1) \
        * config.snapshot_every if config.snapshot_every > 0 else math.inf

    try:
        while tc.t < t_end - 1e-14 * max(1.0, t_end):
            state, stats = mhd_step(state, cfg, tc)
            if tc.step_count % config.ledger_every == 0:
                ledger.row(**ledger_row(state, eos, tc, stats, e_fluct0))
            if tc.t >= next_snap - 1e-12:
                write_snapshot(os.path.join(outdir, _snap_name(tc.step_count)),
                               state, eos, scheme=config.scheme,
                               step=tc.step_count, problem=config.problem_name)
                next_snap += config.snapshot_every
    except UnphysicalStateError as exc:
        log.error("run aborted: %s", exc)
        write_snapshot(os.path.join(outdir, "failure.dat"), state, eos,
                       scheme=config.scheme, step=tc.step_count,
                       problem=config.problem_name)
        ledger.close()
        return 3
    write_snapshot(os.path.join(outdir, "final.dat"), state, eos,
                   scheme=config.scheme, step=tc.step_count,
                   problem=config.problem_name)
    ledger.close()
    return 0


def evolve(config: RunConfig, resolution=None, t_end=None, snapshots_at=(),
           state=None):
    """In-memory run helper: returns (initial state, {t: state}, final state).

    snapshots_at are times at which intermediate copies are captured (the
    step is clipped to land on each of them exactly).
    """
    prob = config.problem()
    eos = config.eos()
    cfg = config.scheme_config()
    t_end = t_end if t_end is not None else config.end_time()
    if state is None:
        spec = config.grid_spec(resolution)
        state = prob.initialize(spec, eos)
    state0 = state.copy()
    captures = {}
    marks = sorted([t for t in snapshots_at if state.t < t <= t_end])
    for t_stop in marks + [t_end]:
        tc = TimeControl(c_cfl=cfg.c_cfl, t_end=t_stop, t=state.t)
        while tc.t < t_stop - 1e-14 * max(1.0, t_stop):
            state, _ = mhd_step(state, cfg, tc)
        if t_stop != t_end:
            captures[t_stop] = state.copy()
    return state0, captures, state


def convergence_suite(config: RunConfig, resolutions, t_compare=None,
                      reference_states=None):
    """L1 errors and EOC over a resolution sweep.

    Periodic-return problems (alfven, vortex3d) compare the evolved state
    to the initial condition after one period; reference problems compare
    point values at the coarse centers against `reference_states`
    (a {t: state} mapping of the designated high-resolution run).
    Returns rows of dicts; one table per compare time.
    """
    prob = config.problem()
    eos = config.eos()
    mode = prob.compare
    times = list(t_compare) if t_compare else [config.end_time()]
    tables = {t: [] for t in times}
    for res in resolutions:
        if isinstance(res, int):
            nx, ny, nz = res, \
                (res if config.resolution[1] > 1 else 1), \
                (res if config.resolution[2] > 1 else 1)
        else:
            nx, ny, nz = res
        t_max = max(times)
        state0, captures, final = evolve(config, resolution=(nx, ny, nz),
                                         t_end=t_max,
                                         snapshots_at=[t for t in times
                                                       if t < t_max])
        captures[t_max] = final
        for t in times:
            st = captures[t]
            if mode == "initial":
                rep = diag.l1_error(st, state0, eos)
                err = rep.mean
            else:
                ref = reference_states[t]
                pts = diag.restrict_to_coarse_points(ref, st.spec, eos)
                own = diag.coarse_state_points(st, eos)
                per_var = [float(np.mean(np.abs(own[k] - pts[k])))
                           for k in own]
                err = float(np.mean(per_var))
            tables[t].append({"n": nx, "dw_mean": err})
    for t, rows in tables.items():
        for i, row in enumerate(rows):
            row["eoc"] = (diag.eoc(rows[i - 1]["dw_mean"], row["dw_mean"],
                                   rows[i - 1]["n"], row["n"])
                          if i > 0 else float("nan"))
    return tables


def write_convergence_outputs(tables, outdir, problem, scheme,
                              render_figure=True):
    """CSV, aligned text, and (report path) a matplotlib figure per table."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for t, rows in tables.items():
        tag = f"{problem}_{scheme}_t{t:g}".replace(".", "p")
        csv_path = os.path.join(outdir, f"convergence_{tag}.csv")
        with open(csv_path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["n", "dw_mean", "eoc"])
            for row in rows:
                w.writerow([row["n"], repr(row["dw_mean"]), repr(row["eoc"])])
        txt_path = os.path.join(outdir, f"convergence_{tag}.txt")
        with open(txt_path, "w") as f:
            f.write(f"{'n':>6s} {'dW_mean':>14s} {'EOC':>8s}\n")
            for row in rows:
                eoc_s = "-" if math.isnan(row["eoc"]) else f"{row['eoc']:.2f}"
                f.write(f"{row['n']:>6d} {row['dw_mean']:>14.6e} {eoc_s:>8s}\n")
        paths.append(csv_path)
        if render_figure:
            from .plotting import render_convergence
            render_convergence(rows, os.path.join(
                outdir, f"convergence_{tag}.png"),
                title=f"{problem} / {scheme} at t={t:g}")
    return paths
