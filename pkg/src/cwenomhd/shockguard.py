"""A-priori flattening near shocks and a-posteriori fallback on bad states.

The flattener uses a pressure-gradient shock indicator computed per axis
from cell averages treated as point values:

    s^n_i = |p~_{i+1} - p~_{i-1}| / p~_i

mapped through a linear ramp between the thresholds tau_ho < tau_lo onto a
weight w^f in [0,1] (1 = pure high order, 0 = pure low order).  A value of
s = 4 marks the heuristic boundary where a naive linear reconstruction
would already produce a zero interface pressure.

The face flattener combining the transforms takes the minimum of the
transverse-axis cell flatteners of the two cells sharing the face.

The a-posteriori ladder retries a reconstruction locally per source cell:
CWENO -> TVD2 -> Godunov (face value = cell average); transform failures
switch the face's average<->point transforms off instead.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import UnphysicalStateError
from .eos import pressure_pt
from .reconstruct import tvd2_pair


@dataclass(frozen=True)
class FlattenerParams:
    enabled: bool = False
    tau_ho: float = 1.0
    tau_lo: float = 2.0

    def __post_init__(self):
        if self.enabled and not 0.0 < self.tau_ho < self.tau_lo:
            raise ValueError("flattener thresholds require 0 < tau_ho < tau_lo")


def shock_indicator(p_tilde, axis=0):
    """s along one axis; end slots (no neighbor pair) are zero."""
    pv = np.moveaxis(np.asarray(p_tilde, dtype=float), axis, 0)
    s = np.zeros_like(pv)
    n = pv.shape[0]
    if n > 2:
        s[1:n - 1] = np.abs(pv[2:] - pv[:n - 2]) / pv[1:n - 1]
    return np.moveaxis(s, 0, axis)


def flattener(s, params: FlattenerParams):
    """Ramp the indicator onto [0,1]: 1 below tau_ho, 0 above tau_lo."""
    s = np.asarray(s, dtype=float)
    w = 1.0 - (s - params.tau_ho) / (params.tau_lo - params.tau_ho)
    return np.clip(w, 0.0, 1.0)


def face_flattener(wf_cell, face_axis, spec, out=None):
    """Per-face transform flattener: min of the transverse-axis cell
    flatteners of the two cells adjacent to each face.

    wf_cell is the (3, ...) stack of per-axis cell flatteners.
    """
    shape = spec.face_shape(face_axis)
    if out is None:
        out = np.ones(shape)
    else:
        out.fill(1.0)
    n = spec.shape[face_axis]
    for t in range(3):
        if t == face_axis or not spec.active(t):
            continue
        wv = np.moveaxis(wf_cell[t], face_axis, 0)
        ov = np.moveaxis(out, face_axis, 0)
        if n == 1:
            ov[0] = np.minimum(ov[0], wv[0])
            ov[1] = np.minimum(ov[1], wv[0])
        else:
            pair = np.minimum(wv[:n - 1], wv[1:])
            ov[1:n] = np.minimum(ov[1:n], pair)
    return out


def compute_flattener(p_tilde, params: FlattenerParams, spec):
    """Per-axis cell flatteners from the pressure estimate.

    Returns (wf_cell (3, ...), activity) where activity is the fraction of
    interior cell/axis reconstructions flattened below 1.
    """
    wf_cell = np.ones((3,) + spec.shape)
    flattened = 0
    total = 0
    interior = tuple(slice(*spec.interior(ax)) for ax in range(3))
    for axis in range(3):
        if not spec.active(axis):
            continue
        s = shock_indicator(p_tilde, axis)
        wf_cell[axis] = flattener(s, params)
        flattened += int(np.count_nonzero(wf_cell[axis][interior] < 1.0))
        total += wf_cell[axis][interior].size
    activity = flattened / total if total else 0.0
    return wf_cell, activity


def pressure_estimate(u, bc, eos, spec):
    """p~ from cell averages treated as point values; validates interior cells.

    bc is the (3, ...) stack of cell-averaged magnetic components.  Raises
    UnphysicalStateError when an interior cell average is unphysical.
    """
    rho = u[0]
    if eos.isothermal:
        p = rho * eos.cs**2
    else:
        m2 = u[1] ** 2 + u[2] ** 2 + u[3] ** 2
        b2 = bc[0] ** 2 + bc[1] ** 2 + bc[2] ** 2
        p = (eos.gamma - 1.0) * (u[4] - 0.5 * m2 / rho - 0.5 * b2)
    interior = tuple(slice(*spec.interior(ax)) for ax in range(3))
    if np.any(rho[interior] <= 0.0) or not np.all(np.isfinite(rho[interior])):
        loc = _first_bad(rho, interior, spec)
        raise UnphysicalStateError("density", "cell_average", loc)
    if np.any(p[interior] <= 0.0) or not np.all(np.isfinite(p[interior])):
        loc = _first_bad(p, interior, spec)
        raise UnphysicalStateError("pressure", "cell_average", loc)
    return p


def _first_bad(field, interior, spec):
    bad = ~((field[interior] > 0.0) & np.isfinite(field[interior]))
    idx = np.argwhere(bad)
    if idx.size == 0:
        return None
    off = np.array([spec.interior(ax)[0] for ax in range(3)])
    return tuple((idx[0] + off).tolist())


@njit(cache=True)
def fallback_line(q, bline, west, east, lo, hi, gamma, cs, iso, aposteriori):
    """Local retry ladder along one reconstructed line, in place.

    q: (nv+2, n) stacked line (hydro rows then the two transverse B rows);
    bline: (n+1,) longitudinal area-averaged B at the faces (zeros for a
    hydro-only check); west/east: (nv+2, n+1) reconstructed face stacks.

    Cell c owns west[:, c+1] and east[:, c].  A cell whose either output is
    unphysical is redone with TVD2, then with the cell average itself.
    Returns (n_tvd, n_godunov, bad_cell) with bad_cell = -1 when every
    state ended physical, else the cell whose average is itself unphysical.
    """
    nv = q.shape[0] - 2
    n_tvd = 0
    n_god = 0
    for c in range(lo, hi):
        if _faces_ok(west, east, bline, c, nv, gamma, cs, iso):
            continue
        if not aposteriori:
            return n_tvd, n_god, c
        for v in range(q.shape[0]):
            wv, ev = tvd2_pair(q[v, c - 1], q[v, c], q[v, c + 1])
            west[v, c + 1] = wv
            east[v, c] = ev
        n_tvd += 1
        if _faces_ok(west, east, bline, c, nv, gamma, cs, iso):
            continue
        for v in range(q.shape[0]):
            west[v, c + 1] = q[v, c]
            east[v, c] = q[v, c]
        n_god += 1
        if not _faces_ok(west, east, bline, c, nv, gamma, cs, iso):
            return n_tvd, n_god, c
    return n_tvd, n_god, -1


@njit(cache=True, inline="always")
def _state_ok(rho, mx, my, mz, e, bx, by, bz, gamma, cs, iso):
    if not rho > 0.0:
        return False
    if iso:
        return True
    return pressure_pt(rho, mx, my, mz, e, bx, by, bz, gamma, cs, iso) > 0.0


@njit(cache=True, inline="always")
def _faces_ok(west, east, bline, c, nv, gamma, cs, iso):
    # rows: 0..nv-1 hydro, nv and nv+1 the transverse B components
    e_idx = nv - 1
    ok_w = _state_ok(west[0, c + 1], west[1, c + 1], west[2, c + 1],
                     west[3, c + 1], west[e_idx, c + 1],
                     bline[c + 1], west[nv, c + 1], west[nv + 1, c + 1],
                     gamma, cs, iso)
    ok_e = _state_ok(east[0, c], east[1, c], east[2, c], east[3, c],
                     east[e_idx, c], bline[c], east[nv, c], east[nv + 1, c],
                     gamma, cs, iso)
    return ok_w and ok_e
