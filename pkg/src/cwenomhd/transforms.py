"""Fourth-order average <-> point conversions on faces, and face-B to cell-B.

The area-to-point correction subtracts the transverse second differences of
the area averages divided by 24; point-to-area adds them back.  The signs
being mirror images of each other is special to fourth order.  Cross
derivatives are not needed at this order.  Degenerate transverse axes
(single-cell extent) contribute no correction term.

face_b_to_cell interpolates the staggered area-averaged magnetic component
to the cell volume average along its own axis:

    (1/24) [ -B(f-1) - B(f+2) + 13 (B(f) + B(f+1)) ]

valid because each component is continuous along its own direction.
"""

import numpy as np
from numba import njit


def area_to_point_stencil(center, tm1, tp1, sm1, sp1, wf=1.0):
    """Scalar form: center face average with its four transverse neighbors."""
    return center - wf * ((tp1 - 2.0 * center + tm1)
                          + (sp1 - 2.0 * center + sm1)) / 24.0


def point_to_area_stencil(center, tm1, tp1, sm1, sp1, wf=1.0):
    return center + wf * ((tp1 - 2.0 * center + tm1)
                          + (sp1 - 2.0 * center + sm1)) / 24.0


@njit(cache=True, fastmath=True)
def _transform_kernel(q, wf, use_wf, fac, x_on, sy, sz, out):
    """Fused transform over (m, n0, flat) views of a C-contiguous stack.

    Corrections run along the leading grid axis when x_on, and along the
    flattened trailing axes via the strides sy/sz (0 disables); the long
    unit-stride inner loop vectorizes.  Margin slots keep the input value.
    """
    m, n0, nf = q.shape
    mi = 1 if x_on else 0
    mf = sy if sy > sz else sz
    for v in range(m):
        for i in range(n0):
            if i < mi or i >= n0 - mi:
                for f in range(nf):
                    out[v, i, f] = q[v, i, f]
                continue
            for f in range(mf):
                out[v, i, f] = q[v, i, f]
            for f in range(nf - mf, nf):
                out[v, i, f] = q[v, i, f]
            if use_wf:
                for f in range(mf, nf - mf):
                    c = q[v, i, f]
                    corr = 0.0
                    if x_on:
                        corr += q[v, i + 1, f] - 2.0 * c + q[v, i - 1, f]
                    if sy > 0:
                        corr += q[v, i, f + sy] - 2.0 * c + q[v, i, f - sy]
                    if sz > 0:
                        corr += q[v, i, f + sz] - 2.0 * c + q[v, i, f - sz]
                    out[v, i, f] = c + fac * wf[i, f] * corr
            else:
                for f in range(mf, nf - mf):
                    c = q[v, i, f]
                    corr = 0.0
                    if x_on:
                        corr += q[v, i + 1, f] - 2.0 * c + q[v, i - 1, f]
                    if sy > 0:
                        corr += q[v, i, f + sy] - 2.0 * c + q[v, i, f - sy]
                    if sz > 0:
                        corr += q[v, i, f + sz] - 2.0 * c + q[v, i, f - sz]
                    out[v, i, f] = c + fac * corr
    return out


_DUMMY_WF = np.ones((1, 1))


def _transform(q, wf, transverse_axes, sign, out):
    if out is q:
        raise ValueError("transform cannot run in place")
    q = np.ascontiguousarray(q)
    stacked = q.ndim == 4
    n0, n1, n2 = q.shape[1:] if stacked else q.shape
    q3 = q.reshape(-1, n0, n1 * n2)
    o3 = out.reshape(-1, n0, n1 * n2)
    axes = [ax - 1 if stacked else ax for ax in transverse_axes]
    x_on = 0 in axes
    sy = n2 if 1 in axes else 0
    sz = 1 if 2 in axes else 0
    if wf is None:
        _transform_kernel(q3, _DUMMY_WF, False, sign / 24.0, x_on, sy, sz, o3)
    else:
        wf2 = np.ascontiguousarray(wf).reshape(n0, n1 * n2)
        _transform_kernel(q3, wf2, True, sign / 24.0, x_on, sy, sz, o3)
    return out


def area_to_point(q, wf, transverse_axes, out=None):
    """Point values at face centers from area averages.

    q is a 3D field or a (m, ...) stack of them; transverse_axes lists the
    array axes of the in-face directions (only the active ones); wf is a
    flattener field over the trailing 3 dims (None means 1).  The outermost
    slice along each transverse axis is left equal to the input; callers
    must not consume it.
    """
    if out is None:
        out = np.empty_like(q)
    return _transform(q, wf, transverse_axes, -1.0, out)


def point_to_area(q, wf, transverse_axes, out=None):
    if out is None:
        out = np.empty_like(q)
    return _transform(q, wf, transverse_axes, +1.0, out)


def face_b_to_cell_stencil(bm1, b0, bp1, bp2):
    """Cell average of a B component from the four nearest faces along its axis."""
    return (-bm1 - bp2 + 13.0 * (b0 + bp1)) / 24.0


def face_b_to_cell(b, axis, out=None):
    """Cell-averaged component from the staggered face array along `axis`.

    The face array has N+1 slots along `axis`; the result has N cells, valid
    on cells 1 .. N-2 (the outermost cell on each side lacks a face neighbor
    and is left zero; re-ghost-fill the output before stencil use).
    Degenerate axes (N == 1) reduce to the identity.
    """
    n_faces = b.shape[axis]
    n = n_faces - 1
    if out is None:
        out = np.zeros(b.shape[:axis] + (n,) + b.shape[axis + 1:])
    if n == 1:
        np.copyto(out, np.take(b, [0], axis=axis))
        return out
    bv = np.moveaxis(b, axis, 0)
    ov = np.moveaxis(out, axis, 0)
    ov[1:n - 1] = (-bv[0:n - 2] - bv[3:n + 1]
                   + 13.0 * (bv[1:n - 1] + bv[2:n])) / 24.0
    ov[0] = 0.0
    ov[n - 1] = 0.0
    return out
