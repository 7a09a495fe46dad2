import numpy as np
import pytest

from cwenomhd import transforms as tf


class TestFaceBToCell:
    def test_constant(self):
        assert tf.face_b_to_cell_stencil(2.0, 2.0, 2.0, 2.0) == pytest.approx(2.0)

    def test_linear_exact(self):
        # faces of cell 0 at -3/2, -1/2, 1/2, 3/2 with B = a + b x
        a, b = 0.7, -1.3
        faces = [a + b * x for x in (-1.5, -0.5, 0.5, 1.5)]
        assert tf.face_b_to_cell_stencil(*faces) == pytest.approx(a)

    def test_cubic_exact(self):
        faces = [x**3 for x in (-1.5, -0.5, 0.5, 1.5)]
        # volume average of x^3 over [-1/2, 1/2] is 0
        assert tf.face_b_to_cell_stencil(*faces) == pytest.approx(0.0, abs=1e-15)

    def test_array_version(self):
        b = np.zeros((7, 2, 2))
        x = np.arange(7.0)
        b[:] = (0.5 * x**2)[:, None, None]
        out = tf.face_b_to_cell(b, 0)
        # quadratic faces -> exact cell average x_c^2/2 + 1/24 ... the
        # average of x^2/2 over [c, c+1] centered at c+1/2: ((c+1)^3-c^3)/6
        for c in range(1, 5):
            want = ((c + 1.0) ** 3 - c**3) / 6.0
            assert out[c, 0, 0] == pytest.approx(want, abs=1e-13)

    def test_degenerate_axis_identity(self):
        b = np.full((4, 4, 2), 3.25)
        out = tf.face_b_to_cell(b, 2)
        assert out.shape == (4, 4, 1)
        np.testing.assert_allclose(out, 3.25)


class TestAreaPoint:
    def test_constant_any_flattener(self):
        for wf in (0.0, 0.37, 1.0):
            assert tf.area_to_point_stencil(5.0, 5.0, 5.0, 5.0, 5.0, wf) == 5.0

    def test_quadratic_exact(self):
        # area averages of y^2 over unit faces: y_c^2 + 1/12
        yc = 1.7
        center = yc**2 + 1 / 12
        up = (yc + 1) ** 2 + 1 / 12
        dn = (yc - 1) ** 2 + 1 / 12
        pt = tf.area_to_point_stencil(center, dn, up, center, center, 1.0)
        assert pt == pytest.approx(yc**2)

    def test_point_to_area_inverse_sense(self):
        yc = -0.4
        pts = [(yc + d) ** 2 for d in (-1.0, 0.0, 1.0)]
        area = tf.point_to_area_stencil(pts[1], pts[0], pts[2],
                                        pts[1], pts[1], 1.0)
        assert area == pytest.approx(yc**2 + 1 / 12)

    def test_zero_flattener_is_identity(self):
        assert tf.area_to_point_stencil(3.0, 9.0, -2.0, 1.0, 0.0, 0.0) == 3.0

    def test_linearity_superposition(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(5, 6, 7))
        b = rng.normal(size=(5, 6, 7))
        one = tf.area_to_point(a + 2.5 * b, None, [1, 2])
        two = tf.area_to_point(a, None, [1, 2]) + 2.5 * tf.area_to_point(
            b, None, [1, 2])
        np.testing.assert_allclose(one, two, atol=1e-13)

    def test_array_both_axes(self):
        # bi-quadratic transverse profile is transformed exactly
        y = np.arange(8.0).reshape(1, -1, 1)
        z = np.arange(9.0).reshape(1, 1, -1)
        area = (y**2 + 1 / 12) + 2.0 * (z**2 + 1 / 12) + np.zeros((3, 8, 9))
        pt = tf.area_to_point(area, None, [1, 2])
        want = y**2 + 2.0 * z**2 + np.zeros((3, 8, 9))
        np.testing.assert_allclose(pt[:, 1:-1, 1:-1], want[:, 1:-1, 1:-1],
                                   atol=1e-12)

    def test_roundtrip_refinement_order(self):
        # composing the two discrete transforms leaves an O(h^4) residual
        def residual(n):
            h = 1.0 / n
            y = (np.arange(n) + 0.5) * h
            qtr = np.sin(2 * np.pi * y).reshape(1, -1, 1) * np.ones((1, n, 3))
            pt = tf.area_to_point(qtr, None, [1])
            back = tf.point_to_area(pt, None, [1])
            return np.abs(back - qtr)[0, 2:-2, 0].max()

        eocs = []
        for n in (16, 32, 64):
            r1, r2 = residual(n), residual(2 * n)
            eocs.append(np.log2(r1 / r2))
        assert all(abs(e - 4.0) < 0.2 for e in eocs)

    def test_1d_reduction_single_axis(self):
        rng = np.random.default_rng(12)
        q = rng.normal(size=(4, 6, 1))
        pt = tf.area_to_point(q, None, [1])
        corr = q[:, 2:, :] - 2 * q[:, 1:-1, :] + q[:, :-2, :]
        np.testing.assert_allclose(pt[:, 1:-1], q[:, 1:-1] - corr / 24.0,
                                   atol=1e-15)
        ident = tf.area_to_point(q, None, [])
        np.testing.assert_array_equal(ident, q)
