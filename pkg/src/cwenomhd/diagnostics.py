"""Error norms, convergence orders, conserved-quantity ledger, and spectra."""

import math
from dataclasses import dataclass

import numpy as np

from .eos import Eos
from .grid import State
from .rhs import cell_averaged_b, divergence_b


@dataclass
class ErrorReport:
    per_variable: dict   # name -> L1 error
    mean: float
    resolution: tuple

    @property
    def values(self):
        return np.array(list(self.per_variable.values()))


_HYDRO_NAMES = ("rho", "mvx", "mvy", "mvz", "e")
_B_NAMES = ("bx", "by", "bz")


def variable_names(eos: Eos):
    return _HYDRO_NAMES[:eos.nvar] + _B_NAMES


def l1_error(a: State, b: State, eos: Eos) -> ErrorReport:
    """Per-variable mean absolute difference over interior cells/faces."""
    names = variable_names(eos)
    ua = a.interior_u()
    ub = b.interior_u()
    errs = {}
    for i in range(a.nvar):
        errs[names[i]] = float(np.mean(np.abs(ua[i] - ub[i])))
    for axis, name in enumerate(_B_NAMES):
        fa = a.interior_faces(axis)
        fb = b.interior_faces(axis)
        errs[name] = float(np.mean(np.abs(fa - fb)))
    mean = float(np.mean(list(errs.values())))
    return ErrorReport(errs, mean, a.spec.n_cells)


def eoc(err_coarse, err_fine, res_coarse, res_fine):
    """Experimental order of convergence between two resolutions."""
    return (abs(math.log(err_fine) - math.log(err_coarse))
            / abs(math.log(res_fine) - math.log(res_coarse)))


def conserved_totals(state: State, eos: Eos):
    """Volume-integrated mass, momentum and (adiabatic) total energy."""
    spec = state.spec
    vol = spec.dx * spec.dy * spec.dz
    u = state.interior_u()
    totals = {"mass": float(u[0].sum() * vol),
              "mom_x": float(u[1].sum() * vol),
              "mom_y": float(u[2].sum() * vol),
              "mom_z": float(u[3].sum() * vol)}
    totals["energy"] = float(u[4].sum() * vol) if not eos.isothermal else 0.0
    return totals


def energy_split(state: State, eos: Eos):
    """(kinetic, magnetic, internal) volume-integrated energies.

    Cell averages are treated as point values; B is the fourth-order
    face-to-cell interpolation.  Internal energy is the remainder of the
    conserved total for the adiabatic EOS, 0 for isothermal.
    """
    spec = state.spec
    vol = spec.dx * spec.dy * spec.dz
    iv = tuple(slice(*spec.interior(ax)) for ax in range(3))
    u = state.interior_u()
    bc = cell_averaged_b(state)
    e_kin = 0.5 * float(((u[1] ** 2 + u[2] ** 2 + u[3] ** 2) / u[0]).sum()) * vol
    e_mag = 0.5 * float((bc[0][iv] ** 2 + bc[1][iv] ** 2 + bc[2][iv] ** 2).sum()) * vol
    if eos.isothermal:
        e_int = 0.0
    else:
        e_int = float(u[4].sum()) * vol - e_kin - e_mag
    return e_kin, e_mag, e_int


def fluctuation_energy(state: State, eos: Eos):
    """Kinetic plus magnetic energy with the box-mean fields removed."""
    spec = state.spec
    vol = spec.dx * spec.dy * spec.dz
    iv = tuple(slice(*spec.interior(ax)) for ax in range(3))
    u = state.interior_u()
    rho = u[0]
    v = u[1:4] / rho
    vbar = np.array([(rho * v[c]).mean() / rho.mean() for c in range(3)])
    bc = cell_averaged_b(state)
    b = np.stack([bc[c][iv] for c in range(3)])
    bbar = b.mean(axis=(1, 2, 3))
    e_kin = 0.5 * float((rho * ((v[0] - vbar[0]) ** 2 + (v[1] - vbar[1]) ** 2
                                + (v[2] - vbar[2]) ** 2)).sum()) * vol
    e_mag = 0.5 * float(((b[0] - bbar[0]) ** 2 + (b[1] - bbar[1]) ** 2
                         + (b[2] - bbar[2]) ** 2).sum()) * vol
    return e_kin + e_mag


def e_loss(e_fluct_initial, e_fluct_now):
    """Relative loss of fluctuation energy since the initial state."""
    return (e_fluct_initial - e_fluct_now) / e_fluct_initial


def max_mach(state: State, eos: Eos):
    u = state.interior_u()
    rho = u[0]
    v2 = (u[1] ** 2 + u[2] ** 2 + u[3] ** 2) / rho**2
    if eos.isothermal:
        cs2 = np.full_like(rho, eos.cs**2)
    else:
        spec = state.spec
        iv = tuple(slice(*spec.interior(ax)) for ax in range(3))
        bc = cell_averaged_b(state)
        b2 = bc[0][iv] ** 2 + bc[1][iv] ** 2 + bc[2][iv] ** 2
        p = (eos.gamma - 1.0) * (u[4] - 0.5 * rho * v2 - 0.5 * b2)
        cs2 = eos.gamma * np.maximum(p, 1e-300) / rho
    return float(np.sqrt(v2 / cs2).max())


def max_divergence(state: State):
    return float(np.abs(divergence_b(state)).max())


def total_variation(field_1d):
    """Sum of absolute jumps; the oscillation measure for shock profiles."""
    return float(np.abs(np.diff(np.asarray(field_1d, dtype=float))).sum())


def energy_spectrum(state: State, eos: Eos):
    """Shell-averaged specific kinetic plus magnetic energy spectrum.

    Fourier transforms of sqrt(rho) v (the "specific" weighting) and of the
    cell-averaged B, binned over integer-|k| shells; the k = 0 mode is
    excluded, so the sum over shells equals the mean fluctuation energy
    density (Parseval).  Requires a periodic cubic grid.
    """
    spec = state.spec
    u = state.interior_u()
    rho = u[0]
    w = u[1:4] / np.sqrt(rho)
    iv = tuple(slice(*spec.interior(ax)) for ax in range(3))
    bc = cell_averaged_b(state)
    b = np.stack([bc[c][iv] for c in range(3)])

    n = spec.nx
    npts = rho.size
    k1 = np.fft.fftfreq(n, d=1.0 / n)
    ky_n = np.fft.fftfreq(spec.ny, d=1.0 / spec.ny)
    kz_n = np.fft.fftfreq(spec.nz, d=1.0 / spec.nz)
    kmag = np.sqrt(k1.reshape(-1, 1, 1) ** 2 + ky_n.reshape(1, -1, 1) ** 2
                   + kz_n.reshape(1, 1, -1) ** 2)
    shells = np.rint(kmag).astype(int)
    kmax = shells.max()
    power = np.zeros(kmag.shape)
    for fld in (w, b):
        for c in range(3):
            fhat = np.fft.fftn(fld[c]) / npts
            power += 0.5 * np.abs(fhat) ** 2
    ek = np.zeros(kmax + 1)
    np.add.at(ek, shells.ravel(), power.ravel())
    ek[0] = 0.0
    return np.arange(kmax + 1), ek


# --- reference-run restriction ------------------------------------------------

def _face_interp_1d(q, axis):
    """Fourth-order interpolation of cell data to the interior faces along axis.

    q has n slots along axis; the result has n-3 face values (faces between
    cells 1..n-2), each from its four surrounding cells.
    """
    qv = np.moveaxis(q, axis, 0)
    n = qv.shape[0]
    out = (-qv[0:n - 3] + 7.0 * qv[1:n - 2] + 7.0 * qv[2:n - 1] - qv[3:n]) / 12.0
    return np.moveaxis(out, 0, axis)


def restrict_to_coarse_points(fine: State, coarse_spec, eos: Eos):
    """Point values of the fine solution at the coarse cell centers.

    The refinement ratio must be even, putting every coarse center on a
    fine face/corner; values come from tensor-product fourth-order face
    interpolation of fine cell averages (B components are interpolated
    only along their transverse axes).  Returns a dict name -> array.
    """
    fspec = fine.spec
    ratios = []
    for ax in range(3):
        if coarse_spec.n_cells[ax] == 1:
            ratios.append(1)
            continue
        r = fspec.n_cells[ax] // coarse_spec.n_cells[ax]
        if (r * coarse_spec.n_cells[ax] != fspec.n_cells[ax]
                or (r != 1 and (r % 2 != 0 or r < 4))):
            raise ValueError("restriction needs an even refinement ratio >= 4")
        ratios.append(r)

    names = variable_names(eos)
    out = {}
    u = fine.interior_u()
    for i in range(fine.nvar):
        out[names[i]] = _corner_points(u[i], ratios, fspec, coarse_spec)
    for axis in range(3):
        b = fine.interior_faces(axis)
        out[_B_NAMES[axis]] = _face_points(b, axis, ratios, fspec, coarse_spec)
    return out


def _corner_points(q, ratios, fspec, cspec):
    for ax in range(3):
        if ratios[ax] == 1:
            continue
        q = _face_interp_1d(q, ax)
        # face j of the interp output sits between cells j+1 and j+2;
        # coarse center I lies on fine face r*I + r/2
        idx = (np.arange(cspec.n_cells[ax]) * ratios[ax]
               + ratios[ax] // 2 - 2)
        q = np.take(q, idx, axis=ax)
    return q


def _face_points(b, axis, ratios, fspec, cspec):
    """Fine face-averaged B -> point values at coarse face centers."""
    from .grid import PERIODIC
    for ax in range(3):
        if ratios[ax] == 1:
            continue
        if ax == axis:
            # coarse faces coincide with fine faces r*I
            extra = 0 if cspec.boundary[ax] == PERIODIC else 1
            idx = np.arange(cspec.n_cells[ax] + extra) * ratios[ax]
            b = np.take(b, idx, axis=ax)
        else:
            b = _face_interp_1d(b, ax)
            idx = (np.arange(cspec.n_cells[ax]) * ratios[ax]
                   + ratios[ax] // 2 - 2)
            b = np.take(b, idx, axis=ax)
    return b


def coarse_state_points(state: State, eos: Eos):
    """Point values of a run's own fields at its cell/face centers (4th order).

    Assumes periodic axes (the reference-comparison problems are periodic).
    """
    spec = state.spec
    names = variable_names(eos)
    out = {}
    u = state.interior_u()
    for i in range(state.nvar):
        out[names[i]] = _avg_to_point(u[i], [spec.active(ax) for ax in range(3)])
    for axis in range(3):
        b = state.interior_faces(axis)
        act = [spec.active(ax) and ax != axis for ax in range(3)]
        out[_B_NAMES[axis]] = _avg_to_point(b, act)
    return out


def _avg_to_point(q, active):
    """Average -> center point value via the transverse Laplacian correction."""
    out = q.astype(float, copy=True)
    for ax in range(3):
        if not active[ax]:
            continue
        qp = np.roll(q, -1, axis=ax)
        qm = np.roll(q, +1, axis=ax)
        out -= (qp - 2.0 * q + qm) / 24.0
    return out
