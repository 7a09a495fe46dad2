"""One-dimensional CWENO4 and TVD2 reconstructions with smoothness indicators.

A 5-cell stencil {i-2 .. i+2} is split into the three parabola sub-stencils
L = {i-2,i-1,i}, C = {i-1,i,i+1}, R = {i,i+1,i+2}.  Data-adaptive weights
combine their face values; with the optimal weights (1/6, 2/3, 1/6) the
combination reproduces the unique degree-4 polynomial fitted to all five
cell averages.

Weight selection modes:

  INDIVIDUAL    per-variable indicators (each variable limited on its own)
  GSI_DENSITY   common weights from the density indicators alone
  GSI_MHD       common weights from a normalized average of the density and
                the three magnetic-field component indicators
  OPTIMAL       forced optimal weights (oscillatory; diagnostics only)
  TVD2          3-point van Leer limiter, bypassing CWENO entirely

Line functions fill faces produced by cells lo..hi-1: cell c writes its
"West" value at face c+1 and its "East" value at face c.  A cell-indexed
flattener wf in [0,1] blends each cell's CWENO output with its TVD2 output.
"""

import numpy as np
from numba import njit

INDIVIDUAL = 0
GSI_DENSITY = 1
GSI_MHD = 2
OPTIMAL = 3
TVD2 = 4

WEIGHTS_GIVEN = -1

EPS_DEFAULT = 1e-6
POWER_DEFAULT = 2.0
C_L, C_C, C_R = 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0


@njit(cache=True, inline="always")
def smoothness_indicators(q0, q1, q2, q3, q4):
    """The three closed-form indicators of the sub-stencil parabolas."""
    isl = (13.0 / 12.0) * (q0 - 2.0 * q1 + q2) ** 2 \
        + 0.25 * (q0 - 4.0 * q1 + 3.0 * q2) ** 2
    isc = (13.0 / 12.0) * (q1 - 2.0 * q2 + q3) ** 2 \
        + 0.25 * (q1 - q3) ** 2
    isr = (13.0 / 12.0) * (q2 - 2.0 * q3 + q4) ** 2 \
        + 0.25 * (3.0 * q2 - 4.0 * q3 + q4) ** 2
    return isl, isc, isr


@njit(cache=True, inline="always")
def weights_from_indicators(isl, isc, isr, eps, power):
    al = C_L / (eps + isl) ** power
    ac = C_C / (eps + isc) ** power
    ar = C_R / (eps + isr) ** power
    s = al + ac + ar
    return al / s, ac / s, ar / s


@njit(cache=True, inline="always")
def cweno_pair(q0, q1, q2, q3, q4, wl, wc, wr):
    """West value at face i+1/2 and East value at face i-1/2 for cell i."""
    west = (wl * (2.0 * q0 - 7.0 * q1 + 11.0 * q2)
            + wc * (-q1 + 5.0 * q2 + 2.0 * q3)
            + wr * (2.0 * q2 + 5.0 * q3 - q4)) / 6.0
    east = (wl * (-q0 + 5.0 * q1 + 2.0 * q2)
            + wc * (2.0 * q1 + 5.0 * q2 - q3)
            + wr * (11.0 * q2 - 7.0 * q3 + 2.0 * q4)) / 6.0
    return west, east


@njit(cache=True, inline="always")
def tvd2_pair(qm, q0, qp):
    """Van Leer limited pair; the correction vanishes at local extrema."""
    num = (qp - q0) * (q0 - qm)
    if num > 0.0:
        corr = num / (qp - qm)
    else:
        corr = 0.0
    return q0 + corr, q0 - corr


@njit(cache=True)
def global_smoothness(indicators, scales, mode):
    """Combine per-variable indicator triples into one common triple.

    indicators: one row per participating variable, density first, then the
    magnetic-field components; scales: the local data magnitude per row.
    GSI_DENSITY returns the density triple unchanged.  GSI_MHD averages the
    density triple divided by the squared density scale with the field
    triples divided by the squared joint field scale (the components share
    units).  Dividing by the squared scale rather than by the triple sum
    keeps two essential properties: the result is exactly scale-free, and
    it still collapses toward zero wherever the data is locally smooth or
    constant, so the regularizer in the weight formula recovers the optimal
    weights there (a unit-sum normalization would lock the triple at O(1)
    and amplify round-off or critical-point noise into O(1) weight bias).
    """
    if mode == GSI_DENSITY:
        return indicators[0, 0], indicators[0, 1], indicators[0, 2]
    gl = 0.0
    gc = 0.0
    gr = 0.0
    if scales[0] > 0.0:
        s2 = scales[0] * scales[0]
        gl += indicators[0, 0] / s2
        gc += indicators[0, 1] / s2
        gr += indicators[0, 2] / s2
    nv = indicators.shape[0]
    scale_b = 0.0
    for v in range(1, nv):
        scale_b = max(scale_b, scales[v])
    if scale_b > 0.0:
        b2 = scale_b * scale_b
        for v in range(1, nv):
            gl += indicators[v, 0] / b2
            gc += indicators[v, 1] / b2
            gr += indicators[v, 2] / b2
    return gl / nv, gc / nv, gr / nv


@njit(cache=True)
def reconstruct_line(q, gq, wf, lo, hi, eps, power, mode):
    """Reconstruct every variable of one grid line.

    Args:
        q: (nv, n) cell averages of the variables to reconstruct.
        gq: (ng, n) cell averages feeding the global indicators
            (density first, then magnetic-field components); ignored for
            INDIVIDUAL / OPTIMAL / TVD2 modes.
        wf: (n,) per-cell flattener; blends CWENO with TVD2 per cell.
        lo, hi: cell range whose faces are produced (needs lo >= 2,
            hi <= n-2 for the 5-point stencil).
        mode: weight selection mode (see module docstring).

    Returns:
        west, east: (nv, n+1) face values; gsi: (n, 3) common indicator
        triples (GSI modes only).  Slots outside the filled cell range are
        unspecified.
    """
    nv, n = q.shape
    ng = gq.shape[0]
    west = np.empty((nv, n + 1))
    east = np.empty((nv, n + 1))
    gsi = np.zeros((n, 3))
    ind = np.empty((ng, 3))
    scales = np.empty(ng)
    for c in range(lo, hi):
        w = wf[c]
        if mode == TVD2:
            for v in range(nv):
                wv, ev = tvd2_pair(q[v, c - 1], q[v, c], q[v, c + 1])
                west[v, c + 1] = wv
                east[v, c] = ev
            continue
        wl, wc, wr = C_L, C_C, C_R
        if mode == GSI_DENSITY or mode == GSI_MHD:
            for v in range(ng):
                il, ic, ir = smoothness_indicators(
                    gq[v, c - 2], gq[v, c - 1], gq[v, c], gq[v, c + 1], gq[v, c + 2])
                ind[v, 0] = il
                ind[v, 1] = ic
                ind[v, 2] = ir
                s = abs(gq[v, c - 2])
                for m in range(-1, 3):
                    s = max(s, abs(gq[v, c + m]))
                scales[v] = s
            gl, gc, gr = global_smoothness(ind, scales, mode)
            gsi[c, 0] = gl
            gsi[c, 1] = gc
            gsi[c, 2] = gr
            wl, wc, wr = weights_from_indicators(gl, gc, gr, eps, power)
        for v in range(nv):
            if mode == INDIVIDUAL:
                il, ic, ir = smoothness_indicators(
                    q[v, c - 2], q[v, c - 1], q[v, c], q[v, c + 1], q[v, c + 2])
                wl, wc, wr = weights_from_indicators(il, ic, ir, eps, power)
            wv, ev = cweno_pair(
                q[v, c - 2], q[v, c - 1], q[v, c], q[v, c + 1], q[v, c + 2],
                wl, wc, wr)
            if w < 1.0:
                wt, et = tvd2_pair(q[v, c - 1], q[v, c], q[v, c + 1])
                wv = w * wv + (1.0 - w) * wt
                ev = w * ev + (1.0 - w) * et
            west[v, c + 1] = wv
            east[v, c] = ev
    return west, east, gsi


@njit(cache=True)
def reconstruct_line_given_weights(q, wts, wf, lo, hi, mode):
    """Like reconstruct_line but with precomputed per-cell weight triples.

    Used for the face-to-edge reconstructions, whose weights come from the
    mean of the global indicators of the two cells sharing each face.
    mode WEIGHTS_GIVEN consumes wts; OPTIMAL and TVD2 behave as above.
    """
    nv, n = q.shape
    west = np.empty((nv, n + 1))
    east = np.empty((nv, n + 1))
    for c in range(lo, hi):
        w = wf[c]
        if mode == TVD2:
            for v in range(nv):
                wv, ev = tvd2_pair(q[v, c - 1], q[v, c], q[v, c + 1])
                west[v, c + 1] = wv
                east[v, c] = ev
            continue
        if mode == OPTIMAL:
            wl, wc, wr = C_L, C_C, C_R
        else:
            wl, wc, wr = wts[c, 0], wts[c, 1], wts[c, 2]
        for v in range(nv):
            wv, ev = cweno_pair(
                q[v, c - 2], q[v, c - 1], q[v, c], q[v, c + 1], q[v, c + 2],
                wl, wc, wr)
            if w < 1.0:
                wt, et = tvd2_pair(q[v, c - 1], q[v, c], q[v, c + 1])
                wv = w * wv + (1.0 - w) * wt
                ev = w * ev + (1.0 - w) * et
            west[v, c + 1] = wv
            east[v, c] = ev
    return west, east
