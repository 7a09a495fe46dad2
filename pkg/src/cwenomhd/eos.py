"""Equation of state, conserved/primitive conversions, speeds, physical flux.

Two EOS variants are supported:

  - adiabatic ideal gas: p = (gamma-1) (e - rho|v|^2/2 - |B|^2/2); the state
    vector carries 5 hydro components (rho, m, e).
  - isothermal: p = rho*cs^2 with constant cs; no energy variable is evolved,
    the state vector carries 4 hydro components.

All functions accept either scalars or numpy arrays for the field arguments.
Scalar njit helpers used inside the stencil kernels live at the bottom.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import UnphysicalStateError

ADIABATIC = "adiabatic"
ISOTHERMAL = "isothermal"


@dataclass(frozen=True)
class Eos:
    mode: str = ADIABATIC
    gamma: float = 5.0 / 3.0
    cs: float = 1.0

    def __post_init__(self):
        if self.mode == ADIABATIC:
            if not self.gamma > 1.0:
                raise ValueError("adiabatic EOS requires gamma > 1")
        elif self.mode == ISOTHERMAL:
            if not self.cs > 0.0:
                raise ValueError("isothermal EOS requires cs > 0")
        else:
            raise ValueError(f"unknown EOS mode {self.mode!r}")

    @property
    def isothermal(self):
        return self.mode == ISOTHERMAL

    @property
    def nvar(self):
        """Number of evolved hydro components (energy dropped when isothermal)."""
        return 4 if self.isothermal else 5


def pressure_from_conserved(u, b, eos: Eos, check=True):
    """Thermal pressure from conserved hydro components and pointwise B.

    u is an array (or tuple) stacked as (rho, mx, my, mz[, e]); b as
    (bx, by, bz).  With check=True a non-positive density or pressure
    raises UnphysicalStateError (shockguard owns any recovery policy).
    """
    rho = u[0]
    if check and np.any(rho <= 0.0):
        raise UnphysicalStateError("density", "pressure_from_conserved")
    if eos.isothermal:
        return rho * eos.cs**2
    m2 = u[1] ** 2 + u[2] ** 2 + u[3] ** 2
    b2 = b[0] ** 2 + b[1] ** 2 + b[2] ** 2
    p = (eos.gamma - 1.0) * (u[4] - 0.5 * m2 / rho - 0.5 * b2)
    if check and np.any(p <= 0.0):
        raise UnphysicalStateError("pressure", "pressure_from_conserved")
    return p


def primitive_from_conserved(u, b, eos: Eos):
    """(rho, vx, vy, vz, p) from conserved components; inverse of the pair below."""
    rho = u[0]
    p = pressure_from_conserved(u, b, eos)
    return rho, u[1] / rho, u[2] / rho, u[3] / rho, p


def conserved_from_primitive(w, b, eos: Eos):
    """Hydro conserved stack from primitives (rho, vx, vy, vz, p) and B."""
    rho, vx, vy, vz, p = w
    m = (rho * vx, rho * vy, rho * vz)
    if eos.isothermal:
        return np.array([rho * np.ones_like(vx), *m])
    v2 = vx**2 + vy**2 + vz**2
    b2 = b[0] ** 2 + b[1] ** 2 + b[2] ** 2
    e = p / (eos.gamma - 1.0) + 0.5 * rho * v2 + 0.5 * b2
    return np.array([rho * np.ones_like(vx), *m, e])


def sound_speed(rho, p, eos: Eos):
    if eos.isothermal:
        return eos.cs * np.ones_like(np.asarray(rho, dtype=float))
    return np.sqrt(eos.gamma * p / rho)


def fast_speed(w, b, axis, eos: Eos):
    """Fast magnetosonic speed along `axis` from primitives and pointwise B.

    The inner radicand is clamped at zero where round-off drives it
    (slightly) negative, keeping the result real.
    """
    rho, p = w[0], w[4]
    cs2 = eos.cs**2 * np.ones_like(np.asarray(rho, dtype=float)) \
        if eos.isothermal else eos.gamma * p / rho
    ca2 = (b[0] ** 2 + b[1] ** 2 + b[2] ** 2) / rho
    s = cs2 + ca2
    rad = s * s - 4.0 * cs2 * b[axis] ** 2 / rho
    return np.sqrt(0.5 * (s + np.sqrt(np.maximum(rad, 0.0))))


def signal_speed(wW, bW, wE, bE, axis, eos: Eos):
    """Maximum local propagation speed a^n = max over the two states of |v_n| + c_f."""
    aW = np.abs(wW[1 + axis]) + fast_speed(wW, bW, axis, eos)
    aE = np.abs(wE[1 + axis]) + fast_speed(wE, bE, axis, eos)
    return np.maximum(aW, aE)


def physical_flux(w, b, axis, eos: Eos):
    """Pointwise flux of the hydro conserved variables along `axis`.

    Returns a stack of 5 components (4 isothermal: the energy row is absent).
    """
    rho, vx, vy, vz, p = w
    bx, by, bz = b
    v = (vx, vy, vz)
    vn, bn = v[axis], b[axis]
    ptot = p + 0.5 * (bx**2 + by**2 + bz**2)
    fm = [rho * vn * vv - bn * bb for vv, bb in zip(v, b)]
    fm[axis] = fm[axis] + ptot
    if eos.isothermal:
        return np.array([rho * vn, *fm])
    e = p / (eos.gamma - 1.0) + 0.5 * rho * (vx**2 + vy**2 + vz**2) \
        + 0.5 * (bx**2 + by**2 + bz**2)
    fe = (e + ptot) * vn - bn * (vx * bx + vy * by + vz * bz)
    return np.array([rho * vn, *fm, fe])


# --- scalar njit helpers for the sweep kernels -------------------------------

@njit(cache=True, inline="always")
def pressure_pt(rho, mx, my, mz, e, bx, by, bz, gamma, cs, iso):
    if iso:
        return rho * cs * cs
    m2 = mx * mx + my * my + mz * mz
    b2 = bx * bx + by * by + bz * bz
    return (gamma - 1.0) * (e - 0.5 * m2 / rho - 0.5 * b2)


@njit(cache=True, inline="always")
def fast_speed_pt(rho, p, bx, by, bz, bn, gamma, cs, iso):
    cs2 = cs * cs if iso else gamma * p / rho
    ca2 = (bx * bx + by * by + bz * bz) / rho
    s = cs2 + ca2
    rad = s * s - 4.0 * cs2 * bn * bn / rho
    if rad < 0.0:
        rad = 0.0
    return np.sqrt(0.5 * (s + np.sqrt(rad)))
