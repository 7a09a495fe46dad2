"""Rusanov/LLF interface flux and the multidimensional LLF edge electric field.

The 1D flux acts on pointwise West/East states at a face:

    f = (f(uW) + f(uE))/2 - (a/2) (uE - uW)

with a the larger of |v_n| + c_f over the two states; a is returned as well,
both for the CFL step control and for the edge solver speed estimate.

At a cell edge the four surrounding line-averaged electric-field candidates
are averaged and two LLF dissipation terms act on the jumps of the two
magnetic line averages across the edge.  For a z-edge:

    Ez = (E_SW + E_SE + E_NW + E_NE)/4 + (Sa/2)(ByE - ByW) - (Sa/2)(BxN - BxS)

with E/W the x-sides and N/S the y-sides; x- and y-edges follow by cyclic
permutation of (x, y, z).
"""

import numpy as np
from numba import njit

from .eos import fast_speed_pt, pressure_pt


@njit(cache=True)
def llf_flux_pt(uW, uE, bW, bE, axis, gamma, cs, iso, fout):
    """Pointwise LLF flux into fout (len 4 or 5); returns the signal speed.

    uW/uE stack (rho, mx, my, mz[, e]); bW/bE the three pointwise B
    components (the normal one is shared face data and must coincide).
    """
    nv = fout.shape[0]
    rhoW = uW[0]
    rhoE = uE[0]
    pW = pressure_pt(rhoW, uW[1], uW[2], uW[3], uW[nv - 1], bW[0], bW[1], bW[2],
                     gamma, cs, iso)
    pE = pressure_pt(rhoE, uE[1], uE[2], uE[3], uE[nv - 1], bE[0], bE[1], bE[2],
                     gamma, cs, iso)
    vnW = uW[1 + axis] / rhoW
    vnE = uE[1 + axis] / rhoE
    cfW = fast_speed_pt(rhoW, pW, bW[0], bW[1], bW[2], bW[axis], gamma, cs, iso)
    cfE = fast_speed_pt(rhoE, pE, bE[0], bE[1], bE[2], bE[axis], gamma, cs, iso)
    a = max(abs(vnW) + cfW, abs(vnE) + cfE)

    b2W = bW[0] ** 2 + bW[1] ** 2 + bW[2] ** 2
    b2E = bE[0] ** 2 + bE[1] ** 2 + bE[2] ** 2
    ptW = pW + 0.5 * b2W
    ptE = pE + 0.5 * b2E
    bnW = bW[axis]
    bnE = bE[axis]

    # mass
    fout[0] = 0.5 * (uW[1 + axis] + uE[1 + axis]) - 0.5 * a * (uE[0] - uW[0])
    # momentum
    for c in range(3):
        fW = uW[1 + axis] * uW[1 + c] / rhoW - bnW * bW[c]
        fE = uE[1 + axis] * uE[1 + c] / rhoE - bnE * bE[c]
        if c == axis:
            fW += ptW
            fE += ptE
        fout[1 + c] = 0.5 * (fW + fE) - 0.5 * a * (uE[1 + c] - uW[1 + c])
    # energy
    if not iso:
        vdbW = (uW[1] * bW[0] + uW[2] * bW[1] + uW[3] * bW[2]) / rhoW
        vdbE = (uE[1] * bE[0] + uE[2] * bE[1] + uE[3] * bE[2]) / rhoE
        fW = (uW[4] + ptW) * vnW - bnW * vdbW
        fE = (uE[4] + ptE) * vnE - bnE * vdbE
        fout[4] = 0.5 * (fW + fE) - 0.5 * a * (uE[4] - uW[4])
    return a


def llf_flux(uW, uE, bW, bE, axis, eos):
    """Array-friendly wrapper; returns (flux stack, signal speed)."""
    uW = np.asarray(uW, dtype=float)
    uE = np.asarray(uE, dtype=float)
    bW = np.asarray(bW, dtype=float)
    bE = np.asarray(bE, dtype=float)
    fout = np.empty(uW.shape[0])
    a = llf_flux_pt(uW, uE, bW, bE, axis, eos.gamma, eos.cs, eos.isothermal, fout)
    return fout, a


@njit(cache=True, inline="always")
def edge_electric_pt(e_sw, e_se, e_nw, e_ne, bt2_e, bt2_w, bt1_n, bt1_s, sa):
    """Combine the four E candidates and the two B jumps at one edge.

    bt2 is the component living on second-transverse-axis faces (jump across
    the first transverse axis, sides W/E); bt1 the converse (sides S/N).
    """
    return (0.25 * (e_sw + e_se + e_nw + e_ne)
            + 0.5 * sa * (bt2_e - bt2_w)
            - 0.5 * sa * (bt1_n - bt1_s))


@njit(cache=True, inline="always")
def edge_signal_speed(a1, a2, a3, a4):
    """Largest of the four face signal speeds stored around the edge."""
    return max(max(a1, a2), max(a3, a4))
