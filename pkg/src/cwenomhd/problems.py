"""Benchmark initial conditions with exactly solenoidal staggered B.

Hydro variables are initialized as cell averages of the conserved fields
via tensor-product 3-point Gauss quadrature (well beyond the scheme order
for these smooth profiles).  Magnetic face averages come from exact line
integrals of a vector potential along the cell edges combined by Stokes'
theorem, which makes the discrete divergence vanish identically; point
sampling of B at face centers would not achieve that.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .eos import ADIABATIC, ISOTHERMAL, Eos
from .errors import ConfigError
from .grid import OPEN, PERIODIC, GridSpec, State, fill_ghosts, make_state

log = logging.getLogger(__name__)

_GAUSS3_NODES = (-math.sqrt(3.0 / 5.0), 0.0, math.sqrt(3.0 / 5.0))
_GAUSS3_WEIGHTS = (5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0)


def cell_average_quadrature(spec: GridSpec, fields_fn, nfields: int):
    """Cell averages of nfields pointwise fields over the interior cells."""
    xc = spec.cell_centers(0).reshape(-1, 1, 1)
    yc = spec.cell_centers(1).reshape(1, -1, 1)
    zc = spec.cell_centers(2).reshape(1, 1, -1)
    acc = np.zeros((nfields,) + tuple(spec.n_cells))
    for ox, wx in zip(_GAUSS3_NODES, _GAUSS3_WEIGHTS):
        for oy, wy in zip(_GAUSS3_NODES, _GAUSS3_WEIGHTS):
            for oz, wz in zip(_GAUSS3_NODES, _GAUSS3_WEIGHTS):
                vals = fields_fn(xc + 0.5 * ox * spec.dx,
                                 yc + 0.5 * oy * spec.dy,
                                 zc + 0.5 * oz * spec.dz)
                w = wx * wy * wz
                for i, v in enumerate(vals):
                    acc[i] += w * np.broadcast_to(v, acc[i].shape)
    return acc


def faces_from_potential(spec: GridSpec, lx, ly, lz):
    """Staggered face averages of curl(A) from exact edge line integrals.

    lx(x0, x1, y, z) is the exact integral of A_x along an x-edge, and
    cyclically for ly, lz; all must broadcast numpy arrays.  Face values
    are circulations around the face boundary divided by the face area.
    """
    xf = spec.face_positions(0)
    yf = spec.face_positions(1)
    zf = spec.face_positions(2)
    xc = spec.cell_centers(0)
    yc = spec.cell_centers(1)
    zc = spec.cell_centers(2)
    dx, dy, dz = spec.spacing

    def sh(a, axis):
        shape = [1, 1, 1]
        shape[axis] = -1
        return np.asarray(a, dtype=float).reshape(shape)

    bx = (ly(sh(xf, 0), sh(yf[:-1], 1), sh(yf[1:], 1), sh(zf[:-1], 2))
          + lz(sh(xf, 0), sh(yf[1:], 1), sh(zf[:-1], 2), sh(zf[1:], 2))
          - ly(sh(xf, 0), sh(yf[:-1], 1), sh(yf[1:], 1), sh(zf[1:], 2))
          - lz(sh(xf, 0), sh(yf[:-1], 1), sh(zf[:-1], 2), sh(zf[1:], 2))) / (dy * dz)
    by = (lz(sh(xf[:-1], 0), sh(yf, 1), sh(zf[:-1], 2), sh(zf[1:], 2))
          + lx(sh(xf[:-1], 0), sh(xf[1:], 0), sh(yf, 1), sh(zf[1:], 2))
          - lz(sh(xf[1:], 0), sh(yf, 1), sh(zf[:-1], 2), sh(zf[1:], 2))
          - lx(sh(xf[:-1], 0), sh(xf[1:], 0), sh(yf, 1), sh(zf[:-1], 2))) / (dz * dx)
    bz = (lx(sh(xf[:-1], 0), sh(xf[1:], 0), sh(yf[:-1], 1), sh(zf, 2))
          + ly(sh(xf[1:], 0), sh(yf[:-1], 1), sh(yf[1:], 1), sh(zf, 2))
          - lx(sh(xf[:-1], 0), sh(xf[1:], 0), sh(yf[1:], 1), sh(zf, 2))
          - ly(sh(xf[:-1], 0), sh(yf[:-1], 1), sh(yf[1:], 1), sh(zf, 2))) / (dx * dy)
    bx = np.broadcast_to(bx, (spec.nx + 1, spec.ny, spec.nz))
    by = np.broadcast_to(by, (spec.nx, spec.ny + 1, spec.nz))
    bz = np.broadcast_to(bz, (spec.nx, spec.ny, spec.nz + 1))
    return bx, by, bz


def _install(state: State, u_int, bx_int, by_int, bz_int):
    """Write interior values into the ghosted arrays and fill ghosts."""
    spec = state.spec
    iv = tuple(slice(*spec.interior(ax)) for ax in range(3))
    state.u[(slice(None),) + iv] = u_int
    for axis, (arr, vals) in enumerate(((state.bx, bx_int), (state.by, by_int),
                                        (state.bz, bz_int))):
        sl = list(iv)
        g, gn = spec.interior(axis)
        sl[axis] = slice(g, gn + 1)
        arr[tuple(sl)] = vals
    fill_ghosts(state)
    return state


def _thin_spec(nx, ny, nz, lengths, origin, boundary, ghost):
    """GridSpec whose degenerate axes inherit the x spacing."""
    dx = lengths[0] / nx
    dy = lengths[1] / ny if ny > 1 else dx
    dz = lengths[2] / nz if nz > 1 else dx
    return GridSpec(nx, ny, nz, dx, dy, dz, *origin, ghost=ghost,
                    boundary=boundary)


@dataclass(frozen=True)
class AlfvenWave:
    """Circularly polarized Alfven wave on [0,1]^2, period t = 0.5."""

    amplitude: float = 0.1
    b0: float = math.sqrt(2.0)
    p0: float = 0.1

    name = "alfven"
    default_resolution = (64, 64, 1)
    default_t_end = 0.5
    default_c_cfl = 1.95
    period = 0.5
    compare = "initial"

    def make_spec(self, nx, ny, nz, ghost=5):
        return _thin_spec(nx, ny, nz, (1.0, 1.0, 1.0), (0.0, 0.0, 0.0),
                          (PERIODIC, PERIODIC, PERIODIC), ghost)

    def default_eos(self):
        return Eos(ADIABATIC, gamma=5.0 / 3.0)

    def initialize(self, spec: GridSpec, eos: Eos) -> State:
        a, b0, p0 = self.amplitude, self.b0, self.p0
        gm = eos.gamma
        r2 = math.sqrt(2.0)

        def fields(x, y, z):
            s = np.sin(2.0 * np.pi * (x + y))
            c = np.cos(2.0 * np.pi * (x + y))
            vx = -a / r2 * s
            vy = a / r2 * s
            vz = a * c
            bx = b0 / r2 + a / r2 * s
            by = b0 / r2 - a / r2 * s
            bz = -a * c
            e = p0 / (gm - 1.0) + 0.5 * (vx**2 + vy**2 + vz**2) \
                + 0.5 * (bx**2 + by**2 + bz**2)
            shape = np.broadcast_shapes(np.shape(x), np.shape(y), np.shape(z))
            return np.broadcast_to(1.0, shape), vx, vy, vz, e

        u = cell_average_quadrature(spec, fields, 5)

        twopi = 2.0 * np.pi

        def lx(x0, x1, y, z):
            return a / (8.0 * np.pi**2) * (np.cos(twopi * (x0 + y))
                                           - np.cos(twopi * (x1 + y)))

        def ly(x, y0, y1, z):
            return -a / (8.0 * np.pi**2) * (np.cos(twopi * (x + y0))
                                            - np.cos(twopi * (x + y1)))

        def lz(x, y, z0, z1):
            pz = (-a / (2.0 * r2 * np.pi) * np.cos(twopi * (x + y))
                  + b0 / r2 * (y - x))
            return pz * (z1 - z0)

        bx, by, bz = faces_from_potential(spec, lx, ly, lz)
        state = make_state(spec, eos.nvar)
        return _install(state, u, bx, by, bz)


@dataclass(frozen=True)
class MhdVortex3d:
    """Advected force-equilibrium magnetized vortex on [-5,5]^3, period 10."""

    kappa: float = 1.0 / (2.0 * np.pi)
    mu: float = 1.0 / (2.0 * np.pi)
    q: float = 1.0

    name = "vortex3d"
    default_resolution = (64, 64, 64)
    default_t_end = 10.0
    default_c_cfl = 1.55
    period = 10.0
    compare = "initial"

    def make_spec(self, nx, ny, nz, ghost=5):
        return _thin_spec(nx, ny, nz, (10.0, 10.0, 10.0), (-5.0, -5.0, -5.0),
                          (PERIODIC, PERIODIC, PERIODIC), ghost)

    def default_eos(self):
        return Eos(ADIABATIC, gamma=5.0 / 3.0)

    def initialize(self, spec: GridSpec, eos: Eos) -> State:
        kp, mu, q = self.kappa, self.mu, self.q
        gm = eos.gamma

        def fields(x, y, z):
            r2 = x**2 + y**2 + z**2
            ex = np.exp(q * (1.0 - r2))
            vx = 1.0 - y * kp * ex
            vy = 1.0 + x * kp * ex
            vz = 2.0 * np.ones_like(ex)
            bx = -y * mu * ex
            by = x * mu * ex
            p = 1.0 + 0.25 / q * (mu**2 * (1.0 - 2.0 * q * (r2 - z**2))
                                  - kp**2) * np.exp(2.0 * q * (1.0 - r2))
            e = p / (gm - 1.0) + 0.5 * (vx**2 + vy**2 + vz**2) \
                + 0.5 * (bx**2 + by**2)
            return np.ones_like(ex), vx, vy, vz, e

        u = cell_average_quadrature(spec, fields, 5)

        sq = math.sqrt(q)
        pref = mu / (2.0 * q) * math.exp(q) * 0.5 * math.sqrt(np.pi) / sq

        def lzero(x0, x1, y, z):
            return np.zeros(np.broadcast_shapes(np.shape(x0), np.shape(x1),
                                                np.shape(y), np.shape(z)))

        def lz(x, y, z0, z1):
            # A = (0, 0, psi) with psi = mu/(2q) exp(q(1 - r^2))
            return pref * np.exp(-q * (x**2 + y**2)) * (erf(sq * z1)
                                                        - erf(sq * z0))

        bx, by, bz = faces_from_potential(spec, lzero, lzero, lz)
        state = make_state(spec, eos.nvar)
        return _install(state, u, bx, by, bz)


@dataclass(frozen=True)
class BrioWu:
    """1D shock tube with open boundaries, run to t = 0.1."""

    left: tuple = (1.0, 0.0, 0.0, 0.0, 1.0, 0.75, 1.0, 0.0)
    right: tuple = (0.125, 0.0, 0.0, 0.0, 0.1, 0.75, -1.0, 0.0)
    x_jump: float = 0.5

    name = "briowu"
    default_resolution = (512, 1, 1)
    default_t_end = 0.1
    default_c_cfl = 1.95
    period = None
    compare = "reference"

    def make_spec(self, nx, ny, nz, ghost=5):
        return _thin_spec(nx, ny, nz, (1.0, 1.0, 1.0), (0.0, 0.0, 0.0),
                          (OPEN, PERIODIC, PERIODIC), ghost)

    def default_eos(self):
        return Eos(ADIABATIC, gamma=5.0 / 3.0)

    def initialize(self, spec: GridSpec, eos: Eos) -> State:
        gm = eos.gamma
        xc = spec.cell_centers(0)
        left_mask = xc < self.x_jump  # cell assignment by center position
        u = np.zeros((5, spec.nx, spec.ny, spec.nz))
        by = np.zeros((spec.nx, spec.ny + 1, spec.nz))
        for mask, st in ((left_mask, self.left), (~left_mask, self.right)):
            rho, vx, vy, vz, p, bxs, bys, bzs = st
            e = p / (gm - 1.0) + 0.5 * rho * (vx**2 + vy**2 + vz**2) \
                + 0.5 * (bxs**2 + bys**2 + bzs**2)
            u[0, mask] = rho
            u[1, mask] = rho * vx
            u[2, mask] = rho * vy
            u[3, mask] = rho * vz
            u[4, mask] = e
            by[mask] = bys
        bx = np.full((spec.nx + 1, spec.ny, spec.nz), self.left[5])
        bz = np.zeros((spec.nx, spec.ny, spec.nz + 1))
        state = make_state(spec, eos.nvar)
        return _install(state, u, bx, by, bz)


@dataclass(frozen=True)
class OrszagTang:
    """Orszag-Tang vortex on [0,1]^2: smooth start, shocks by t ~ 0.5."""

    name = "orszag_tang"
    default_resolution = (256, 256, 1)
    default_t_end = 0.5
    default_c_cfl = 1.95
    period = None
    compare = "reference"

    def make_spec(self, nx, ny, nz, ghost=5):
        return _thin_spec(nx, ny, nz, (1.0, 1.0, 1.0), (0.0, 0.0, 0.0),
                          (PERIODIC, PERIODIC, PERIODIC), ghost)

    def default_eos(self):
        return Eos(ADIABATIC, gamma=5.0 / 3.0)

    def initialize(self, spec: GridSpec, eos: Eos) -> State:
        gm = eos.gamma
        rho0 = gm**2
        p0 = gm

        def fields(x, y, z):
            vx = -np.sin(2.0 * np.pi * y)
            vy = np.sin(2.0 * np.pi * x)
            bx = -np.sin(2.0 * np.pi * y)
            by = np.sin(4.0 * np.pi * x)
            e = p0 / (gm - 1.0) + 0.5 * rho0 * (vx**2 + vy**2) \
                + 0.5 * (bx**2 + by**2)
            shape = np.broadcast_shapes(np.shape(x), np.shape(y), np.shape(z))
            return (np.broadcast_to(rho0, shape), rho0 * vx, rho0 * vy,
                    np.zeros(shape), e)

        u = cell_average_quadrature(spec, fields, 5)

        def lzero(x0, x1, y, z):
            return np.zeros(np.broadcast_shapes(np.shape(x0), np.shape(x1),
                                                np.shape(y), np.shape(z)))

        def lz(x, y, z0, z1):
            az = (np.cos(2.0 * np.pi * y) / (2.0 * np.pi)
                  + np.cos(4.0 * np.pi * x) / (4.0 * np.pi))
            return az * (z1 - z0)

        bx, by, bz = faces_from_potential(spec, lzero, lzero, lz)
        state = make_state(spec, eos.nvar)
        return _install(state, u, bx, by, bz)


@dataclass(frozen=True)
class Turbulence:
    """Random solenoidal fields with Gaussian-shell spectrum ~ exp(-k^2/2k0^2).

    Velocity and magnetic field are built from independent spectral vector
    potentials (so both are divergence-free), cross helicity is removed by
    a measured projection of the magnetic potential onto the velocity one,
    and the fields are rescaled so the grid RMS Mach number and magnetic to
    kinetic energy ratio match the requested values exactly.  Kinetic and
    magnetic helicity are reported, not controlled.
    """

    k0: float = 4.0
    mach_rms: float = 2.0
    emag_over_ekin: float = 1.0
    seed: int = 20260810
    cutoff: int = 16

    name = "turbulence"
    default_resolution = (64, 64, 64)
    default_t_end = 3.0
    default_c_cfl = 1.55
    period = None
    compare = "none"

    def make_spec(self, nx, ny, nz, ghost=5):
        return _thin_spec(nx, ny, nz, (1.0, 1.0, 1.0), (0.0, 0.0, 0.0),
                          (PERIODIC, PERIODIC, PERIODIC), ghost)

    def default_eos(self):
        return Eos(ISOTHERMAL, cs=0.1)

    def initialize(self, spec: GridSpec, eos: Eos) -> State:
        if not eos.isothermal:
            raise ConfigError("turbulence initial conditions require the "
                              "isothermal equation of state")
        if not (spec.nx == spec.ny == spec.nz):
            raise ConfigError("turbulence runs need a cubic grid")
        n = spec.nx
        rng = np.random.default_rng(self.seed)
        kcut = min(self.cutoff, n // 2 - 1)
        if kcut < 1:
            raise ConfigError(f"grid {n}^3 too coarse for the spectral cutoff")

        k1 = np.fft.fftfreq(n, d=1.0 / n)  # integer wavenumbers
        kx = k1.reshape(-1, 1, 1)
        ky = k1.reshape(1, -1, 1)
        kz = k1.reshape(1, 1, -1)
        kmag = np.sqrt(kx**2 + ky**2 + kz**2)
        mask = (kmag > 0.5) & (kmag <= kcut)
        amp = np.exp(-kmag**2 / (2.0 * self.k0**2))

        def potential_with_unit_curl():
            c = (rng.standard_normal((3, n, n, n))
                 + 1j * rng.standard_normal((3, n, n, n)))
            c = 0.5 * (c + _conj_reverse(c))
            c[:, ~mask] = 0.0
            curl = _spectral_curl(c, kx, ky, kz)
            norm = np.sqrt(np.sum(np.abs(curl) ** 2, axis=0))
            if np.any(norm[mask] == 0.0):
                raise ConfigError("degenerate random draw in the spectral "
                                  "initialization (zero-curl mode)")
            scale = np.zeros_like(norm)
            scale[mask] = amp[mask] / norm[mask]
            return c * scale, curl * scale

        xi, vhat = potential_with_unit_curl()       # velocity potential
        ahat, bhat = potential_with_unit_curl()     # magnetic potential

        # remove cross helicity: project the magnetic potential off xi
        num = float(np.sum(np.real(np.conj(vhat) * bhat)))
        den = float(np.sum(np.abs(vhat) ** 2))
        alpha = num / den
        ahat -= alpha * xi
        bhat -= alpha * vhat

        v = np.stack([_cell_averaged_field(vhat[c], n, kx, ky, kz)
                      for c in range(3)])
        bx, by, bz = _faces_from_spectral_potential(ahat, n, spec, kx, ky, kz)

        # exact normalizations on the measured grid fields
        vrms = math.sqrt(float(np.mean(v[0]**2 + v[1]**2 + v[2]**2)))
        v *= self.mach_rms * eos.cs / vrms

        state = make_state(spec, eos.nvar)
        u = np.concatenate((np.ones((1, n, n, n)), v))
        _install(state, u, bx, by, bz)

        from .rhs import cell_averaged_b  # local import to avoid a cycle
        bc = cell_averaged_b(state)
        iv = tuple(slice(*spec.interior(ax)) for ax in range(3))
        e_kin = 0.5 * float(np.mean(v[0]**2 + v[1]**2 + v[2]**2))
        e_mag = 0.5 * float(np.mean(bc[0][iv]**2 + bc[1][iv]**2 + bc[2][iv]**2))
        lam = math.sqrt(self.emag_over_ekin * e_kin / e_mag)
        state.bx *= lam
        state.by *= lam
        state.bz *= lam
        bc *= lam

        cross = float(np.mean(v[0] * bc[0][iv] + v[1] * bc[1][iv]
                              + v[2] * bc[2][iv]))
        log.info("turbulence init: seed=%d kcut=%d vrms=%.3e "
                 "residual cross helicity=%.3e", self.seed, kcut,
                 self.mach_rms * eos.cs, cross)
        return state


def _conj_reverse(c):
    """c(-k) conjugated, aligned with the +k grid (Hermitian partner)."""
    n = c.shape[-1]
    idx = (-np.arange(n)) % n
    out = np.conj(c[:, idx][:, :, idx][:, :, :, idx])
    return out


def _spectral_curl(a, kx, ky, kz):
    tp = 2.0j * np.pi
    return np.stack((tp * (ky * a[2] - kz * a[1]),
                     tp * (kz * a[0] - kx * a[2]),
                     tp * (kx * a[1] - ky * a[0])))


def _cell_averaged_field(chat, n, kx, ky, kz):
    """Exact cell averages of a truncated Fourier series on the n^3 grid."""
    fac = (np.sinc(kx / n) * np.sinc(ky / n) * np.sinc(kz / n)
           * np.exp(1j * np.pi * (kx + ky + kz) / n))
    return np.real(np.fft.ifftn(chat * fac)) * n**3


def _faces_from_spectral_potential(ahat, n, spec, kx, ky, kz):
    """Exact face averages of curl(A) for a truncated series, via Stokes."""
    dx, dy, dz = spec.spacing

    def line_avg(comp, along):
        k_along = (kx, ky, kz)[along]
        fac = np.sinc(k_along / n) * np.exp(1j * np.pi * k_along / n)
        return np.real(np.fft.ifftn(ahat[comp] * fac)) * n**3

    ix = line_avg(0, 0)  # (x cells, y faces, z faces)
    iy = line_avg(1, 1)  # (x faces, y cells, z faces)
    iz = line_avg(2, 2)  # (x faces, y faces, z cells)

    def plus(a, axis):
        return np.roll(a, -1, axis=axis)

    bx = (plus(iz, 1) - iz) / dy - (plus(iy, 2) - iy) / dz
    by = (plus(ix, 2) - ix) / dz - (plus(iz, 0) - iz) / dx
    bz = (plus(iy, 0) - iy) / dx - (plus(ix, 1) - ix) / dy

    def with_wrap(b, axis):
        return np.concatenate((b, np.take(b, [0], axis=axis)), axis=axis)

    return with_wrap(bx, 0), with_wrap(by, 1), with_wrap(bz, 2)


PROBLEMS = {
    cls.name: cls
    for cls in (AlfvenWave, MhdVortex3d, BrioWu, OrszagTang, Turbulence)
}


def build_problem(name: str, overrides: dict | None = None):
    if name not in PROBLEMS:
        raise ConfigError(f"unknown problem {name!r} "
                          f"(choose from {sorted(PROBLEMS)})")
    cls = PROBLEMS[name]
    overrides = dict(overrides or {})
    fields = {f for f in getattr(cls, "__dataclass_fields__", {})}
    unknown = set(overrides) - fields
    if unknown:
        raise ConfigError(f"unknown parameter(s) {sorted(unknown)} "
                          f"for problem {name!r}")
    return cls(**overrides)
