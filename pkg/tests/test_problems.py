import math

import numpy as np
import pytest

from cwenomhd.diagnostics import energy_split
from cwenomhd.eos import Eos, ISOTHERMAL
from cwenomhd.errors import ConfigError
from cwenomhd.problems import (AlfvenWave, BrioWu, MhdVortex3d, OrszagTang,
                               Turbulence, build_problem)
from cwenomhd.rhs import cell_averaged_b, divergence_b

ADI = Eos(gamma=5.0 / 3.0)


def div_scale(state):
    bmax = max(np.abs(b).max() for b in state.arrays()[1:])
    return bmax / min(state.spec.spacing)


class TestAlfven:
    def test_point_values_at_origin(self):
        # v = (0, 0, A), B = (B0/sqrt2, B0/sqrt2, -A) at x + y = 0
        prob = AlfvenWave()
        a, b0 = prob.amplitude, prob.b0
        assert a == 0.1 and b0 == pytest.approx(math.sqrt(2.0))
        assert b0 / math.sqrt(2.0) == pytest.approx(1.0)

    def test_divergence_free(self):
        prob = AlfvenWave()
        state = prob.initialize(prob.make_spec(32, 32, 1), ADI)
        assert np.abs(divergence_b(state)).max() <= 1e-13 * div_scale(state)

    def test_box_momentum_zero(self):
        prob = AlfvenWave()
        state = prob.initialize(prob.make_spec(32, 32, 1), ADI)
        u = state.interior_u()
        for c in (1, 2, 3):
            assert abs(u[c].mean()) <= 1e-13

    def test_cell_averages_match_quadrature_refinement(self):
        # the 3-point Gauss cell averages agree with a dense Riemann sum
        prob = AlfvenWave()
        spec = prob.make_spec(8, 8, 1)
        state = prob.initialize(spec, ADI)
        g = spec.interior(0)[0]
        m = 80
        xs = (np.arange(m) + 0.5) / m * spec.dx
        ref = np.mean([np.mean(
            -prob.amplitude / math.sqrt(2)
            * np.sin(2 * np.pi * (xi + spec.dy * (np.arange(m) + 0.5) / m)))
            for xi in xs])
        # difference is the 3-point Gauss truncation on this coarse cell
        assert state.u[1][g, g, 0] == pytest.approx(ref, abs=1e-6)

    def test_uniform_density_and_energy(self):
        prob = AlfvenWave()
        state = prob.initialize(prob.make_spec(16, 16, 1), ADI)
        u = state.interior_u()
        np.testing.assert_allclose(u[0], 1.0, atol=1e-13)
        # |v|^2 = A^2 and |B|^2 = B0^2 + A^2 pointwise, so e is constant
        e_want = (prob.p0 / (ADI.gamma - 1.0) + 0.5 * prob.amplitude**2
                  + 0.5 * (prob.b0**2 + prob.amplitude**2))
        np.testing.assert_allclose(u[4], e_want, rtol=1e-12)


class TestVortex:
    def test_far_field_limits(self):
        prob = MhdVortex3d()
        spec = prob.make_spec(16, 16, 16)
        state = prob.initialize(spec, ADI)
        u = state.interior_u()
        corner = (0, 0, 0)  # farthest cell from the origin
        assert u[0][corner] == pytest.approx(1.0, abs=1e-10)
        assert u[1][corner] == pytest.approx(1.0, abs=1e-8)
        assert u[2][corner] == pytest.approx(1.0, abs=1e-8)
        assert u[3][corner] == pytest.approx(2.0, abs=1e-8)
        p_far = 1.0
        e_want = p_far / (ADI.gamma - 1.0) + 0.5 * (1 + 1 + 4)
        assert u[4][corner] == pytest.approx(e_want, rel=1e-8)

    def test_center_pressure_value(self):
        # at the origin the bracket vanishes for kappa = mu, so p = 1 and
        # v = (1, 1, 2): e = 1.5 + 3 + 0
        prob = MhdVortex3d()
        kp, mu, q = prob.kappa, prob.mu, prob.q
        bracket = mu**2 * (1.0 - 0.0) - kp**2
        assert bracket == pytest.approx(0.0)

    def test_divergence_free(self):
        prob = MhdVortex3d()
        state = prob.initialize(prob.make_spec(16, 16, 16), ADI)
        assert np.abs(divergence_b(state)).max() <= 1e-13 * div_scale(state)


class TestBrioWu:
    def test_states_and_interface(self):
        prob = BrioWu()
        spec = prob.make_spec(8, 1, 1)
        state = prob.initialize(spec, ADI)
        u = state.interior_u()
        np.testing.assert_allclose(u[0][:4, 0, 0], 1.0)
        np.testing.assert_allclose(u[0][4:, 0, 0], 0.125)
        np.testing.assert_allclose(u[4][:4, 0, 0], 2.28125)
        np.testing.assert_allclose(u[4][4:, 0, 0], 0.93125)

    def test_bx_uniform_on_faces(self):
        prob = BrioWu()
        state = prob.initialize(prob.make_spec(16, 1, 1), ADI)
        np.testing.assert_allclose(state.bx, 0.75)
        assert np.abs(divergence_b(state)).max() == 0.0

    def test_interface_cell_by_center(self):
        # odd cell count: the cell containing x=0.5 has center 0.5+dx/2 > 0.5
        prob = BrioWu()
        spec = prob.make_spec(9, 1, 1)
        state = prob.initialize(spec, ADI)
        u = state.interior_u()
        assert u[0][4, 0, 0] == pytest.approx(0.125)


class TestOrszagTang:
    def test_uniform_density_pressure(self):
        prob = OrszagTang()
        spec = prob.make_spec(16, 16, 1)
        state = prob.initialize(spec, ADI)
        u = state.interior_u()
        np.testing.assert_allclose(u[0], (5.0 / 3.0) ** 2, rtol=1e-13)

    def test_velocity_sample(self):
        # v at (1/4, 0+) is (0, sin(pi/2), 0) = (0, 1, 0) in the limit;
        # check the y-momentum cell average near x = 1/4
        prob = OrszagTang()
        spec = prob.make_spec(64, 64, 1)
        state = prob.initialize(spec, ADI)
        u = state.interior_u()
        g2 = (5.0 / 3.0) ** 2
        got = u[2][15, 0, 0] / g2  # cell centered at x=(15.5)/64 ~ 0.242
        want = np.sin(2 * np.pi * 15.5 / 64) * np.sinc(1.0 / 64)
        assert got == pytest.approx(want, abs=1e-6)

    def test_divergence_free(self):
        prob = OrszagTang()
        state = prob.initialize(prob.make_spec(32, 32, 1), ADI)
        assert np.abs(divergence_b(state)).max() <= 1e-13 * div_scale(state)


class TestTurbulence:
    EOS = Eos(ISOTHERMAL, cs=0.1)

    @pytest.fixture(scope="class")
    def state(self):
        prob = Turbulence(seed=7)
        return prob, prob.initialize(prob.make_spec(32, 32, 32), self.EOS)

    def test_exact_mach_normalization(self, state):
        prob, st = state
        u = st.interior_u()
        vrms = math.sqrt(float(np.mean(u[1] ** 2 + u[2] ** 2 + u[3] ** 2)))
        assert vrms / self.EOS.cs == pytest.approx(prob.mach_rms, abs=1e-12)

    def test_exact_energy_ratio(self, state):
        _, st = state
        e_kin, e_mag, _ = energy_split(st, self.EOS)
        assert e_mag / e_kin == pytest.approx(1.0, abs=1e-12)

    def test_divergence_free(self, state):
        _, st = state
        assert np.abs(divergence_b(st)).max() <= 1e-13 * div_scale(st)

    def test_uniform_density(self, state):
        _, st = state
        np.testing.assert_allclose(st.interior_u()[0], 1.0)

    def test_seed_reproducibility(self):
        prob = Turbulence(seed=42)
        a = prob.initialize(prob.make_spec(16, 16, 16), self.EOS)
        b = prob.initialize(prob.make_spec(16, 16, 16), self.EOS)
        for x, y in zip(a.arrays(), b.arrays()):
            np.testing.assert_array_equal(x, y)

    def test_small_cross_helicity(self, state):
        _, st = state
        bc = cell_averaged_b(st)
        iv = tuple(slice(*st.spec.interior(ax)) for ax in range(3))
        u = st.interior_u()
        cross = np.mean(u[1] * bc[0][iv] + u[2] * bc[1][iv] + u[3] * bc[2][iv])
        vrms2 = np.mean(u[1] ** 2 + u[2] ** 2 + u[3] ** 2)
        assert abs(cross) / vrms2 < 0.02

    def test_requires_isothermal(self):
        prob = Turbulence()
        with pytest.raises(ConfigError):
            prob.initialize(prob.make_spec(16, 16, 16), ADI)

    def test_solenoidal_velocity_spectrally(self, state):
        _, st = state
        u = st.interior_u()
        n = st.spec.nx
        k = np.fft.fftfreq(n, d=1.0 / n)
        div = (k.reshape(-1, 1, 1) * np.fft.fftn(u[1])
               + k.reshape(1, -1, 1) * np.fft.fftn(u[2])
               + k.reshape(1, 1, -1) * np.fft.fftn(u[3]))
        scale = np.abs(np.fft.fftn(u[1])).max() * n
        assert np.abs(div).max() <= 1e-12 * scale


class TestRegistry:
    def test_lookup_and_overrides(self):
        prob = build_problem("alfven", {"amplitude": 0.2})
        assert isinstance(prob, AlfvenWave)
        assert prob.amplitude == 0.2

    def test_unknown_problem(self):
        with pytest.raises(ConfigError):
            build_problem("rotor")

    def test_unknown_override(self):
        with pytest.raises(ConfigError):
            build_problem("alfven", {"frequency": 3})
