import numpy as np
import pytest

from cwenomhd.errors import UnphysicalStateError
from cwenomhd.eos import Eos
from cwenomhd.grid import GridSpec, PERIODIC
from cwenomhd.shockguard import (FlattenerParams, compute_flattener,
                                 face_flattener, fallback_line, flattener,
                                 pressure_estimate, shock_indicator)
from cwenomhd import reconstruct as rec


class TestShockIndicator:
    def test_constant(self):
        p = np.ones((8, 1, 1))
        np.testing.assert_allclose(shock_indicator(p, 0), 0.0)

    def test_zero_interface_pressure_boundary(self):
        # |5 - 1| / 1 = 4: the heuristic value where a naive linear
        # reconstruction already reaches zero pressure at an interface
        p = np.array([1.0, 1.0, 5.0]).reshape(-1, 1, 1)
        s = shock_indicator(p, 0)
        assert s[1, 0, 0] == pytest.approx(4.0)

    def test_symmetric(self):
        p = np.array([2.0, 4.0, 2.0]).reshape(-1, 1, 1)
        assert shock_indicator(p, 0)[1, 0, 0] == pytest.approx(0.0)


class TestFlattener:
    PARAMS = FlattenerParams(enabled=True, tau_ho=1.0, tau_lo=2.0)

    def test_smooth(self):
        assert flattener(0.5, self.PARAMS) == pytest.approx(1.0)

    def test_ramp_midpoint(self):
        assert flattener(1.5, self.PARAMS) == pytest.approx(0.5)

    def test_saturated(self):
        assert flattener(3.0, self.PARAMS) == pytest.approx(0.0)

    def test_monotone_bounded(self):
        s = np.linspace(0, 10, 101)
        w = flattener(s, self.PARAMS)
        assert np.all((w >= 0) & (w <= 1))
        assert np.all(np.diff(w) <= 1e-15)

    def test_threshold_ordering_enforced(self):
        with pytest.raises(ValueError):
            FlattenerParams(enabled=True, tau_ho=1.0, tau_lo=0.5)


class TestFaceFlattener:
    def make(self):
        spec = GridSpec(6, 6, 6, 0.1, 0.1, 0.1)
        wf = np.ones((3,) + spec.shape)
        return spec, wf

    def test_all_ones(self):
        spec, wf = self.make()
        out = face_flattener(wf, 0, spec)
        np.testing.assert_allclose(out[1:-1], 1.0)

    def test_min_of_transverse_neighbors(self):
        spec, wf = self.make()
        # x-face flattener ignores the x-direction value and takes the min
        # of the y/z flatteners of the two adjacent cells
        wf[0][7, 8, 9] = 0.0   # must not matter for x-faces
        wf[1][7, 8, 9] = 0.5
        wf[2][6, 8, 9] = 0.8
        out = face_flattener(wf, 0, spec)
        assert out[7, 8, 9] == pytest.approx(0.5)   # faces 7 and 8 touch cell 7
        assert out[8, 8, 9] == pytest.approx(0.5)
        assert out[6, 8, 9] == pytest.approx(0.8)
        assert out[9, 8, 9] == pytest.approx(1.0)

    def test_any_zero_wins(self):
        spec, wf = self.make()
        wf[2][7, 8, 9] = 0.0
        out = face_flattener(wf, 0, spec)
        assert out[7, 8, 9] == 0.0


class TestComputeFlattener:
    def test_activity_fraction(self):
        spec = GridSpec(8, 1, 1, 0.1, 0.1, 0.1)
        p = np.ones(spec.shape)
        g, gn = spec.interior(0)
        p[g + 3:, 0, 0] = 100.0    # a步 step triggers the indicator nearby
        params = FlattenerParams(enabled=True, tau_ho=1.0, tau_lo=2.0)
        wf, activity = compute_flattener(p, params, spec)
        assert 0.0 < activity <= 1.0
        assert wf.min() >= 0.0 and wf.max() <= 1.0


class TestPressureEstimate:
    def test_validates_interior(self):
        spec = GridSpec(4, 1, 1, 0.1, 0.1, 0.1)
        eos = Eos(gamma=5.0 / 3.0)
        u = np.zeros((5,) + spec.shape)
        u[0] = 1.0
        u[4] = 1.0
        bc = np.zeros((3,) + spec.shape)
        p = pressure_estimate(u, bc, eos, spec)
        g, gn = spec.interior(0)
        np.testing.assert_allclose(p[g:gn], (eos.gamma - 1.0))
        u[4, g + 1] = -1.0
        with pytest.raises(UnphysicalStateError) as ei:
            pressure_estimate(u, bc, eos, spec)
        assert ei.value.kind == "pressure"
        assert ei.value.stage == "cell_average"

    def test_isothermal_uses_density(self):
        spec = GridSpec(4, 1, 1, 0.1, 0.1, 0.1)
        eos = Eos("isothermal", cs=0.1)
        u = np.ones((4,) + spec.shape)
        bc = np.zeros((3,) + spec.shape)
        p = pressure_estimate(u, bc, eos, spec)
        np.testing.assert_allclose(p, 0.01)


def _recon_setup(rho_line, mode=rec.OPTIMAL, nv=5):
    n = len(rho_line)
    q = np.zeros((nv + 2, n))
    q[0] = rho_line
    q[nv - 1] = 10.0  # generous energy
    gq = q[:1].copy()
    wf = np.ones(n)
    west, east, _ = rec.reconstruct_line(q, gq, wf, 2, n - 2,
                                         rec.EPS_DEFAULT, rec.POWER_DEFAULT,
                                         mode)
    bline = np.zeros(n + 1)
    return q, bline, west, east


class TestFallbackLadder:
    GAMMA = 5.0 / 3.0

    def test_no_failure_identity(self):
        q, bline, west, east = _recon_setup([1.0] * 9)
        w0, e0 = west.copy(), east.copy()
        ntvd, ngod, bad = fallback_line(q, bline, west, east, 2, 7,
                                        self.GAMMA, 1.0, False, True)
        assert (ntvd, ngod, bad) == (0, 0, -1)
        np.testing.assert_array_equal(west, w0)
        np.testing.assert_array_equal(east, e0)

    def test_local_tvd_retry(self):
        # forced-optimal weights on a step undershoot the density below zero
        rho = [1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 0.01, 0.01, 0.01]
        q, bline, west, east = _recon_setup(rho)
        assert west[0].min() < 0.0 or east[0].min() < 0.0
        w0 = west.copy()
        ntvd, ngod, bad = fallback_line(q, bline, west, east, 2, 7,
                                        self.GAMMA, 1.0, False, True)
        assert bad == -1
        assert ntvd >= 1 and ngod == 0
        assert west[0].min() >= 0.0 and east[0].min() >= 0.0
        # untouched cells keep their bit-identical CWENO values
        bad_cells = [c for c in range(2, 7)
                     if not np.array_equal(west[:, c + 1], w0[:, c + 1])]
        assert 1 <= len(bad_cells) <= 2

    def test_godunov_rung(self):
        # monotone data where even the TVD2 slope makes p negative at the
        # face, while the cell average itself stays physical
        n = 9
        q = np.zeros((7, n))
        q[0] = 1.0
        q[1] = np.linspace(0.0, 8.0, n)     # steep momentum ramp
        q[4] = 0.5 * q[1] ** 2 + 0.02       # kinetic-dominated energy
        bline = np.zeros(n + 1)
        wf = np.ones(n)
        west, east, _ = rec.reconstruct_line(q, q[:1], wf, 2, n - 2,
                                             rec.EPS_DEFAULT,
                                             rec.POWER_DEFAULT, rec.OPTIMAL)
        ntvd, ngod, bad = fallback_line(q, bline, west, east, 2, 7,
                                        self.GAMMA, 1.0, False, True)
        assert bad == -1
        assert ngod >= 1
        god = [c for c in range(2, 7)
               if np.array_equal(west[:, c + 1], q[:, c])
               and np.array_equal(east[:, c], q[:, c])]
        assert len(god) == ngod

    def test_disabled_reports_first_bad_cell(self):
        rho = [1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 0.01, 0.01, 0.01]
        q, bline, west, east = _recon_setup(rho)
        ntvd, ngod, bad = fallback_line(q, bline, west, east, 2, 7,
                                        self.GAMMA, 1.0, False, False)
        assert bad >= 2
