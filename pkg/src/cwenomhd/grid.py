"""Staggered-grid data model: cell averages, face-averaged B, ghost filling.

Layout conventions used everywhere in this package:

  - Arrays are indexed [i, j, k] (x, y, z), C-ordered, dtype float64.
  - Cell counts per axis include ghost layers: N = n + 2*g, where g is the
    ghost width for that axis (0 when the axis is degenerate, i.e. n == 1).
  - Interior cells along an axis are g .. g+n-1; ghosted cell i has its
    center at x0 + (i - g + 1/2)*dx.
  - Face arrays along their normal axis have N+1 slots; face index f sits
    between cells f-1 and f, at position x0 + (f - g)*dx.  Interior faces
    are g .. g+n; for a periodic axis face g+n is the wraparound image of
    face g.
"""

from dataclasses import dataclass, field

import numpy as np

PERIODIC = "periodic"
OPEN = "open"


@dataclass(frozen=True)
class GridSpec:
    """Uniform Cartesian box with per-axis boundary kinds."""

    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    x0: float = 0.0
    y0: float = 0.0
    z0: float = 0.0
    ghost: int = 5
    boundary: tuple = (PERIODIC, PERIODIC, PERIODIC)

    def __post_init__(self):
        for n in (self.nx, self.ny, self.nz):
            if n < 1:
                raise ValueError(f"cell counts must be >= 1, got {self.n_cells}")
        for d in (self.dx, self.dy, self.dz):
            if not d > 0.0:
                raise ValueError(f"grid spacings must be positive, got {self.spacing}")
        if self.ghost < 5:
            raise ValueError("ghost width must be >= 5 (deepest stencil chain)")
        for b in self.boundary:
            if b not in (PERIODIC, OPEN):
                raise ValueError(f"unknown boundary kind {b!r}")

    @property
    def n_cells(self):
        return (self.nx, self.ny, self.nz)

    @property
    def spacing(self):
        return (self.dx, self.dy, self.dz)

    @property
    def origin(self):
        return (self.x0, self.y0, self.z0)

    def active(self, axis):
        """Whether the axis has more than one cell (participates in stencils)."""
        return self.n_cells[axis] > 1

    def ghosts(self, axis):
        """Effective ghost width per axis; degenerate axes carry none."""
        return self.ghost if self.active(axis) else 0

    @property
    def shape(self):
        """Ghosted cell-array shape."""
        return tuple(n + 2 * self.ghosts(ax) for ax, n in enumerate(self.n_cells))

    def face_shape(self, axis):
        """Ghosted shape of the face array normal to `axis`."""
        s = list(self.shape)
        s[axis] += 1
        return tuple(s)

    def interior(self, axis):
        """(lo, hi) slice bounds of interior cells along `axis`."""
        g = self.ghosts(axis)
        return g, g + self.n_cells[axis]

    def cell_centers(self, axis, ghosted=False):
        g = self.ghosts(axis)
        n = self.n_cells[axis] + 2 * g if ghosted else self.n_cells[axis]
        i = np.arange(n) - (g if ghosted else 0)
        return self.origin[axis] + (i + 0.5) * self.spacing[axis]

    def face_positions(self, axis, ghosted=False):
        g = self.ghosts(axis)
        n = self.n_cells[axis]
        i = np.arange(n + 2 * g + 1) - g if ghosted else np.arange(n + 1)
        return self.origin[axis] + i * self.spacing[axis]


@dataclass
class State:
    """Full solver state: hydro cell averages plus staggered face-averaged B.

    u holds (rho, rho*vx, rho*vy, rho*vz[, e]) stacked in the leading axis;
    the energy row is absent for an isothermal equation of state.
    """

    spec: GridSpec
    u: np.ndarray
    bx: np.ndarray
    by: np.ndarray
    bz: np.ndarray
    t: float = 0.0

    @property
    def nvar(self):
        return self.u.shape[0]

    def arrays(self):
        return (self.u, self.bx, self.by, self.bz)

    def copy(self):
        return State(self.spec, self.u.copy(), self.bx.copy(), self.by.copy(),
                     self.bz.copy(), self.t)

    def interior_u(self):
        ix, jx, kx = (slice(*self.spec.interior(ax)) for ax in range(3))
        return self.u[:, ix, jx, kx]

    def interior_faces(self, axis):
        """Unique interior faces of the B component normal to `axis`.

        Periodic axes drop the duplicated wraparound face; open axes keep
        both boundary faces.
        """
        b = (self.bx, self.by, self.bz)[axis]
        sl = [slice(*self.spec.interior(ax)) for ax in range(3)]
        lo, hi = self.spec.interior(axis)
        if self.spec.boundary[axis] == PERIODIC:
            sl[axis] = slice(lo, hi)
        else:
            sl[axis] = slice(lo, hi + 1)
        return b[tuple(sl)]


def make_state(spec: GridSpec, nvar: int) -> State:
    """Allocate a zeroed state for `nvar` hydro variables (5, or 4 isothermal)."""
    u = np.zeros((nvar,) + spec.shape)
    bx = np.zeros(spec.face_shape(0))
    by = np.zeros(spec.face_shape(1))
    bz = np.zeros(spec.face_shape(2))
    return State(spec, u, bx, by, bz)


def _fill_cell_axis(a, spec, axis, arr_axis):
    g = spec.ghosts(axis)
    if g == 0:
        return
    n = spec.n_cells[axis]
    v = np.moveaxis(a, arr_axis, 0)
    if spec.boundary[axis] == PERIODIC:
        # modular source indices keep this correct even for n < g
        v[:g] = v[(np.arange(-g, 0) % n) + g]
        v[n + g:] = v[(np.arange(n, n + g) % n) + g]
    else:
        v[:g] = v[g]
        v[n + g:] = v[n + g - 1]


def _fill_face_normal_axis(b, spec, axis):
    g = spec.ghosts(axis)
    n = spec.n_cells[axis]
    v = np.moveaxis(b, axis, 0)
    if spec.boundary[axis] == PERIODIC:
        # unique faces are g .. g+n-1; this also pins the wraparound face g+n
        v[:g] = v[(np.arange(-g, 0) % n) + g]
        v[n + g:] = v[(np.arange(n, n + g + 1) % n) + g]
    else:
        v[:g] = v[g]
        v[n + g + 1:] = v[n + g]


def fill_cell_ghosts(a, spec: GridSpec):
    """Populate ghost layers of a cell array (or stack of them) in place.

    Corner ghosts come from sequential per-axis passes (x, then y, then z).
    """
    offset = a.ndim - 3
    for axis in range(3):
        _fill_cell_axis(a, spec, axis, axis + offset)
    return a


def fill_face_ghosts(bx, by, bz, spec: GridSpec):
    """Populate ghost layers of the three staggered B arrays in place."""
    for axis, b in enumerate((bx, by, bz)):
        for pass_axis in range(3):
            if pass_axis == axis:
                _fill_face_normal_axis(b, spec, pass_axis)
            else:
                _fill_cell_axis(b, spec, pass_axis, pass_axis)
    return bx, by, bz


def fill_ghosts(state: State):
    """Ghost-fill every field of a state in place and return it."""
    fill_cell_ghosts(state.u, state.spec)
    fill_face_ghosts(state.bx, state.by, state.bz, state.spec)
    return state
