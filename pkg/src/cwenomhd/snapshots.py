"""Snapshot files: a UTF-8 header block, then raw little-endian arrays.

Layout: the header is `key=value` lines introduced by a magic line and
terminated by one blank line; the payload holds float64 arrays in x-fastest
order, interior cells before faces, with the conserved components in the
order rho, mvx, mvy, mvz, e (energy absent for isothermal runs) followed by
Bx, By, Bz on the full staggered face sets (n+1 faces per axis).
Write -> read round-trips are bit-exact.
"""

import numpy as np

from .eos import ADIABATIC, ISOTHERMAL, Eos
from .errors import SnapshotError
from .grid import GridSpec, State, fill_ghosts, make_state

MAGIC = "cwenomhd-snapshot 1"


def _x_fastest(a):
    return np.ascontiguousarray(a.transpose(2, 1, 0), dtype="<f8")


def write_snapshot(path, state: State, eos: Eos, scheme="cweno4", step=0,
                   problem=""):
    spec = state.spec
    lines = [MAGIC]
    lines.append(f"nx={spec.nx} ny={spec.ny} nz={spec.nz}")
    lines.append(f"dx={spec.dx!r} dy={spec.dy!r} dz={spec.dz!r}")
    lines.append(f"x0={spec.x0!r} y0={spec.y0!r} z0={spec.z0!r}")
    lines.append(f"ghost={spec.ghost}")
    lines.append("boundary=" + " ".join(spec.boundary))
    if eos.isothermal:
        lines.append(f"eos=isothermal cs={eos.cs!r}")
    else:
        lines.append(f"eos=adiabatic gamma={eos.gamma!r}")
    lines.append(f"scheme={scheme}")
    if problem:
        lines.append(f"problem={problem}")
    lines.append(f"time={state.t!r}")
    lines.append(f"step={step}")
    header = "\n".join(lines) + "\n\n"
    with open(path, "wb") as f:
        f.write(header.encode("utf-8"))
        for v in range(state.nvar):
            f.write(_x_fastest(state.interior_u()[v]).tobytes())
        for axis in range(3):
            f.write(_x_fastest(_full_faces(state, axis)).tobytes())


def _full_faces(state, axis):
    """All n+1 faces per axis (wraparound face included for periodic)."""
    spec = state.spec
    b = (state.bx, state.by, state.bz)[axis]
    sl = [slice(*spec.interior(ax)) for ax in range(3)]
    lo, hi = spec.interior(axis)
    sl[axis] = slice(lo, hi + 1)
    return b[tuple(sl)]


def read_snapshot(path):
    """Load a snapshot; returns (state, meta) with ghosts filled.

    meta carries eos, scheme, step, problem and the raw header pairs.
    """
    with open(path, "rb") as f:
        data = f.read()
    try:
        head_end = data.index(b"\n\n")
    except ValueError:
        raise SnapshotError(f"{path}: missing header terminator")
    header = data[:head_end].decode("utf-8").splitlines()
    if not header or header[0] != MAGIC:
        raise SnapshotError(f"{path}: bad magic line")
    kv = {}
    boundary = None
    for line in header[1:]:
        if line.startswith("boundary="):
            boundary = tuple(line.split("=", 1)[1].split())
            continue
        for tok in line.split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                kv[k] = v
    try:
        spec = GridSpec(int(kv["nx"]), int(kv["ny"]), int(kv["nz"]),
                        float(kv["dx"]), float(kv["dy"]), float(kv["dz"]),
                        float(kv["x0"]), float(kv["y0"]), float(kv["z0"]),
                        ghost=int(kv["ghost"]), boundary=boundary)
    except (KeyError, ValueError, TypeError) as exc:
        raise SnapshotError(f"{path}: malformed header ({exc})")
    if kv.get("eos") == "isothermal":
        eos = Eos(ISOTHERMAL, cs=float(kv["cs"]))
    else:
        eos = Eos(ADIABATIC, gamma=float(kv["gamma"]))
    state = make_state(spec, eos.nvar)
    state.t = float(kv.get("time", 0.0))

    payload = data[head_end + 2:]
    offset = 0

    def take(shape):
        nonlocal offset
        count = int(np.prod(shape))
        end = offset + count * 8
        if end > len(payload):
            raise SnapshotError(f"{path}: truncated payload")
        arr = np.frombuffer(payload[offset:end], dtype="<f8")
        offset = end
        return arr.reshape(shape[::-1]).transpose(2, 1, 0)

    iv = tuple(slice(*spec.interior(ax)) for ax in range(3))
    for v in range(eos.nvar):
        state.u[(v,) + iv] = take(spec.n_cells)
    for axis in range(3):
        shape = list(spec.n_cells)
        shape[axis] += 1
        vals = take(tuple(shape))
        b = (state.bx, state.by, state.bz)[axis]
        sl = list(iv)
        lo, hi = spec.interior(axis)
        sl[axis] = slice(lo, hi + 1)
        b[tuple(sl)] = vals
    if offset != len(payload):
        raise SnapshotError(f"{path}: trailing bytes in payload")
    fill_ghosts(state)
    meta = {"eos": eos, "scheme": kv.get("scheme", ""), "time": state.t,
            "step": int(kv.get("step", 0)), "problem": kv.get("problem", ""),
            "raw": kv}
    return state, meta
