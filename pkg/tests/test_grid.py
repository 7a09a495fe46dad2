import numpy as np
import pytest

from cwenomhd.grid import (GridSpec, OPEN, PERIODIC, fill_cell_ghosts,
                           fill_face_ghosts, fill_ghosts, make_state)


def spec_1d(nx=4, ghost=5, boundary=PERIODIC):
    return GridSpec(nx, 1, 1, 0.25, 0.25, 0.25,
                    boundary=(boundary, PERIODIC, PERIODIC), ghost=ghost)


def test_cell_centers():
    spec = spec_1d()
    assert spec.cell_centers(0)[1] == pytest.approx(0.375)


def test_face_positions():
    spec = spec_1d()
    assert spec.face_positions(0) == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])


def test_degenerate_counts_rejected():
    with pytest.raises(ValueError):
        GridSpec(0, 1, 1, 0.25, 1.0, 1.0)
    with pytest.raises(ValueError):
        GridSpec(4, 1, 1, -0.25, 1.0, 1.0)
    with pytest.raises(ValueError):
        GridSpec(4, 1, 1, 0.25, 1.0, 1.0, ghost=3)


def _interior_line(spec, values):
    arr = np.zeros(spec.shape)
    g, gn = spec.interior(0)
    arr[g:gn, 0, 0] = values
    return arr


def test_periodic_cell_fill():
    spec = spec_1d(ghost=5)
    arr = _interior_line(spec, [1.0, 2.0, 3.0, 4.0])
    fill_cell_ghosts(arr, spec)
    # left ghosts are the last interior values, right ghosts the first
    assert arr[:5, 0, 0] == pytest.approx([4, 1, 2, 3, 4])
    assert arr[9:, 0, 0] == pytest.approx([1, 2, 3, 4, 1])


def test_open_cell_fill():
    spec = spec_1d(boundary=OPEN)
    arr = _interior_line(spec, [1.0, 2.0, 3.0, 4.0])
    fill_cell_ghosts(arr, spec)
    assert arr[:5, 0, 0] == pytest.approx([1] * 5)
    assert arr[9:, 0, 0] == pytest.approx([4] * 5)


def test_periodic_face_wraparound():
    spec = spec_1d()
    state = make_state(spec, 5)
    g, gn = spec.interior(0)
    state.bx[g:gn, 0, 0] = [1.0, 2.0, 3.0, 4.0]
    state.bx[gn, 0, 0] = 99.0  # stale wrap slot, must be pinned to face g
    fill_face_ghosts(state.bx, state.by, state.bz, spec)
    assert state.bx[gn, 0, 0] == state.bx[g, 0, 0]
    assert state.bx[g - 1, 0, 0] == state.bx[g + spec.nx - 1, 0, 0]


def test_ghost_fill_idempotent():
    rng = np.random.default_rng(3)
    spec = GridSpec(6, 5, 4, 0.1, 0.1, 0.1,
                    boundary=(PERIODIC, OPEN, PERIODIC))
    state = make_state(spec, 5)
    state.u[:] = rng.normal(size=state.u.shape)
    state.bx[:] = rng.normal(size=state.bx.shape)
    state.by[:] = rng.normal(size=state.by.shape)
    state.bz[:] = rng.normal(size=state.bz.shape)
    fill_ghosts(state)
    snapshot = [a.copy() for a in state.arrays()]
    fill_ghosts(state)
    for a, b in zip(state.arrays(), snapshot):
        np.testing.assert_array_equal(a, b)


def test_periodic_shift_invariance():
    # any stencil read shifted by n along a periodic axis returns the same value
    spec = GridSpec(6, 1, 1, 0.1, 0.1, 0.1)
    state = make_state(spec, 5)
    g, gn = spec.interior(0)
    rng = np.random.default_rng(7)
    state.u[:, g:gn, 0, 0] = rng.normal(size=(5, 6))
    fill_ghosts(state)
    u = state.u[0, :, 0, 0]
    for i in range(g - 5, g + 5):
        assert u[i] == pytest.approx(u[(i - g) % 6 + g], abs=0.0)
