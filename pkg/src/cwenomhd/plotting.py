"""Figure rendering for the report path: convergence, snapshots, ledgers."""

import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .rhs import cell_averaged_b  # noqa: E402


def render_convergence(rows, path, title=""):
    ns = [r["n"] for r in rows]
    errs = [r["dw_mean"] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(ns, errs, "o-", label="measured")
    for order, style in ((2, ":"), (4, "--")):
        guide = [errs[0] * (ns[0] / n) ** order for n in ns]
        ax.loglog(ns, guide, style, color="gray", lw=1,
                  label=f"order {order}")
    ax.set_xlabel("resolution N")
    ax.set_ylabel("mean L1 error")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_snapshot(state, eos, path_prefix):
    """Density and magnetic-pressure views; line plots for 1D runs."""
    spec = state.spec
    u = state.interior_u()
    iv = tuple(slice(*spec.interior(ax)) for ax in range(3))
    bc = cell_averaged_b(state)
    pmag = 0.5 * (bc[0][iv] ** 2 + bc[1][iv] ** 2 + bc[2][iv] ** 2)
    paths = []
    if spec.ny == 1 and spec.nz == 1:
        x = spec.cell_centers(0)
        fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
        rho = u[0][:, 0, 0]
        vx = u[1][:, 0, 0] / rho
        by = bc[1][iv][:, 0, 0]
        if eos.isothermal:
            p = rho * eos.cs**2
        else:
            v2 = (u[1] ** 2 + u[2] ** 2 + u[3] ** 2)[:, 0, 0] / rho**2
            b2 = 2.0 * pmag[:, 0, 0]
            p = (eos.gamma - 1.0) * (u[4][:, 0, 0] - 0.5 * rho * v2 - 0.5 * b2)
        for ax, (label, val) in zip(
                axes.ravel(),
                [("density", rho), ("v_x", vx), ("pressure", p),
                 ("B_y", by)]):
            ax.plot(x, val, lw=1)
            ax.set_title(label, fontsize=9)
        fig.tight_layout()
        out = f"{path_prefix}_profiles.png"
        fig.savefig(out, dpi=130)
        plt.close(fig)
        paths.append(out)
        return paths
    kmid = spec.nz // 2
    for label, field in (("density", u[0][:, :, kmid]),
                         ("magnetic_pressure", pmag[:, :, kmid])):
        fig, ax = plt.subplots(figsize=(5.5, 5))
        im = ax.pcolormesh(spec.face_positions(0), spec.face_positions(1),
                           field.T, shading="flat", cmap="viridis")
        fig.colorbar(im, ax=ax, shrink=0.85)
        ax.set_aspect("equal")
        ax.set_title(label)
        fig.tight_layout()
        out = f"{path_prefix}_{label}.png"
        fig.savefig(out, dpi=130)
        plt.close(fig)
        paths.append(out)
    return paths


def render_ledger(ledger_csv, path):
    with open(ledger_csv) as f:
        rows = list(csv.DictReader(f))
    t = np.array([float(r["t"]) for r in rows])
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    panels = [
        ("energies", [("e_kin", "kinetic"), ("e_mag", "magnetic"),
                      ("e_int", "internal")]),
        ("conservation drift", [("mass", "mass"), ("energy", "energy")]),
        ("max |div B|", [("max_div_b", "max |div B|")]),
        ("shock guard", [("max_mach", "max Mach"),
                         ("flattener_activity", "flattener activity")]),
    ]
    for ax, (title, series) in zip(axes.ravel(), panels):
        for key, label in series:
            vals = np.array([float(r[key]) for r in rows])
            if title == "conservation drift":
                vals = np.abs(vals - vals[0]) / max(abs(vals[0]), 1e-300)
            ax.plot(t, vals, lw=1, label=label)
        if title in ("max |div B|", "conservation drift"):
            ax.set_yscale("log")
        ax.set_title(title, fontsize=9)
        ax.legend(fontsize=7)
    axes[1, 0].set_xlabel("t")
    axes[1, 1].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_spectrum(k, ek, path, compensate=None):
    fig, ax = plt.subplots(figsize=(5, 4))
    mask = (k > 0) & (ek > 0)
    if compensate:
        ax.loglog(k[mask], ek[mask] * k[mask] ** compensate, "o-", ms=3)
        ax.set_ylabel(f"k^{compensate:g} E(k)")
    else:
        ax.loglog(k[mask], ek[mask], "o-", ms=3)
        ax.set_ylabel("E(k)")
        kk = k[mask].astype(float)
        ax.loglog(kk, ek[mask][0] * (kk / kk[0]) ** (-5.0 / 3.0), "--",
                  color="gray", lw=1, label="k^-5/3")
        ax.legend(fontsize=8)
    ax.set_xlabel("k")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
