import numpy as np
import pytest

from relpower.exceptions import NonPositiveJacobian
from relpower.fields import (ObserverChange, VirtualFieldPair,
                             apply_ambient_change, apply_material_change,
                             constant_field, fd_gradient_vector, harmonic_motion,
                             homogeneous_motion, identity_motion, linear_field,
                             observer_shifted_pair, rigid_field,
                             rotation_motion, shear_motion, sinusoidal_field,
                             sinusoidal_motion)
from relpower.tensors import cross_matrix


def all_motion_presets():
    return [
        identity_motion(),
        homogeneous_motion(np.diag([1.2, 1.0, 1.0])),
        rotation_motion([0.3, -0.5, 0.8], 0.7),
        shear_motion(0.3),
        harmonic_motion(0.1),
        sinusoidal_motion(0.08, [2.0, 0.5, -0.7], [0.25, 0.85, 0.45]),
    ]


class TestDeformationGradient:
    def test_identity(self):
        m = identity_motion()
        np.testing.assert_allclose(m.deformation_gradient([0.1, 0.2, 0.3]), np.eye(3))

    def test_homogeneous_stretch(self):
        m = homogeneous_motion(np.diag([1.2, 1.0, 1.0]))
        np.testing.assert_allclose(
            m.deformation_gradient([0.4, -0.2, 0.1]), np.diag([1.2, 1.0, 1.0]))

    def test_small_sinusoidal_hand_value(self):
        # y = x + 0.01 sin(x_1) e_2, so F(0) = I + 0.01 e_2 (x) e_1
        m = sinusoidal_motion(0.01, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        expected = np.eye(3)
        expected[1, 0] = 0.01
        np.testing.assert_allclose(m.deformation_gradient(np.zeros(3)), expected,
                                   atol=1e-15)

    def test_analytic_matches_fd(self, rng):
        for motion in all_motion_presets():
            for _ in range(15):
                x = rng.uniform(-0.5, 0.5, size=3)
                analytic = motion.deformation_gradient(x)
                fd = motion.deformation_gradient(x, use_analytic=False)
                np.testing.assert_allclose(fd, analytic, rtol=1e-6, atol=1e-8)

    def test_second_gradient_matches_fd(self, rng):
        for motion in (harmonic_motion(0.1),
                       sinusoidal_motion(0.08, [2.0, 0.5, -0.7], [0.25, 0.85, 0.45])):
            for _ in range(5):
                x = rng.uniform(-0.5, 0.5, size=3)
                analytic = motion.deformation_second_gradient(x)
                fd = motion.deformation_second_gradient(x, use_analytic=False,
                                                        step=1e-5)
                np.testing.assert_allclose(fd, analytic, rtol=1e-5, atol=1e-6)

    def test_non_positive_jacobian_raises(self):
        m = homogeneous_motion(np.diag([-1.0, 1.0, 1.0]))
        with pytest.raises(NonPositiveJacobian):
            m.deformation_gradient(np.zeros(3))


class TestVirtualFieldPresets:
    def all_presets(self):
        from relpower.fields import affine_field
        return [
            constant_field([0.3, -0.2, 0.5]),
            rigid_field([0.1, 0.2, -0.3], [0.4, -0.7, 0.2], [0.1, 0.1, 0.1]),
            linear_field([[0.2, 0.1, 0.0], [0.0, -0.3, 0.1], [0.1, 0.0, 0.4]]),
            affine_field([0.3, -0.1, 0.2],
                         [[0.1, -0.2, 0.0], [0.3, 0.0, 0.1], [0.0, 0.1, -0.2]],
                         [0.05, 0.0, -0.05]),
            sinusoidal_field(0.6, [1.2, -0.7, 0.4], [0.3, 0.8, -0.5]),
        ]

    def test_analytic_gradients_match_fd(self, rng):
        for field in self.all_presets():
            for _ in range(20):
                x = rng.uniform(-0.5, 0.5, size=3)
                analytic = field.grad(x)
                fd = field.grad(x, use_analytic=False)
                np.testing.assert_allclose(fd, analytic, rtol=1e-6, atol=1e-9)


class TestObserverChanges:
    def _pair(self, v_value, w_value):
        return VirtualFieldPair(v=constant_field(v_value), w=constant_field(w_value))

    def test_identity_ambient_change(self):
        pair = self._pair([0.4, -0.1, 0.2], [0.0, 0.0, 0.0])
        change = ObserverChange()
        out = apply_ambient_change(pair, identity_motion(), change, [0.1, 0.2, 0.3])
        np.testing.assert_allclose(out, [0.4, -0.1, 0.2])

    def test_ambient_rotation_cross_product(self):
        # v = 0, q_hat = e3, y - y0 = e1 -> e2
        pair = self._pair([0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
        change = ObserverChange(ambient_rotation=[0.0, 0.0, 1.0])
        out = apply_ambient_change(pair, identity_motion(), change, [1.0, 0.0, 0.0])
        np.testing.assert_allclose(out, [0.0, 1.0, 0.0], atol=1e-15)

    def test_ambient_hand_value(self):
        # c_hat=(1,2,3), q_hat=e1, y-y0=e2, v=e3 -> (1,2,5)
        pair = self._pair([0.0, 0.0, 1.0], [0.0, 0.0, 0.0])
        change = ObserverChange(ambient_translation=[1.0, 2.0, 3.0],
                                ambient_rotation=[1.0, 0.0, 0.0])
        out = apply_ambient_change(pair, identity_motion(), change, [0.0, 1.0, 0.0])
        np.testing.assert_allclose(out, [1.0, 2.0, 5.0], atol=1e-15)

    def test_identity_material_change(self):
        pair = self._pair([0.0, 0.0, 0.0], [0.7, 0.1, -0.2])
        out = apply_material_change(pair, ObserverChange(), [0.3, 0.1, 0.0])
        np.testing.assert_allclose(out, [0.7, 0.1, -0.2])

    def test_material_rotation_cross_product(self):
        pair = self._pair([0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
        change = ObserverChange(material_rotation=[1.0, 0.0, 0.0])
        out = apply_material_change(pair, change, [0.0, 1.0, 0.0])
        np.testing.assert_allclose(out, [0.0, 0.0, 1.0], atol=1e-15)

    def test_material_hand_value(self):
        # c=e1, q=e3, x-x0=e1, w=-e2 -> e1 + e2 - e2 = e1
        pair = self._pair([0.0, 0.0, 0.0], [0.0, -1.0, 0.0])
        change = ObserverChange(material_translation=[1.0, 0.0, 0.0],
                                material_rotation=[0.0, 0.0, 1.0])
        out = apply_material_change(pair, change, [1.0, 0.0, 0.0])
        np.testing.assert_allclose(out, [1.0, 0.0, 0.0], atol=1e-15)

    def test_affine_in_generators(self, rng):
        pair = self._pair([0.2, -0.4, 0.1], [0.3, 0.0, -0.5])
        motion = shear_motion(0.3)
        x = np.array([0.2, -0.1, 0.3])
        g1 = rng.normal(size=3)
        g2 = rng.normal(size=3)
        base = apply_ambient_change(pair, motion, ObserverChange(), x)
        d1 = apply_ambient_change(
            pair, motion, ObserverChange(ambient_rotation=g1), x) - base
        d2 = apply_ambient_change(
            pair, motion, ObserverChange(ambient_rotation=g2), x) - base
        both = apply_ambient_change(
            pair, motion, ObserverChange(ambient_rotation=g1 + g2), x) - base
        np.testing.assert_allclose(both, d1 + d2, atol=1e-14)


class TestCurl:
    def test_constant_field(self):
        f = constant_field([0.3, -0.2, 0.5])
        np.testing.assert_allclose(f.curl([0.1, 0.0, -0.2]), np.zeros(3))

    def test_rigid_field_curl_is_twice_rotation(self, rng):
        q = np.array([0.4, -0.7, 0.2])
        f = rigid_field([0.0, 0.0, 0.0], q, [0.1, 0.1, 0.1])
        x = rng.uniform(-0.5, 0.5, size=3)
        np.testing.assert_allclose(f.curl(x), 2.0 * q, atol=1e-14)
        # finite-difference oracle for the same identity
        np.testing.assert_allclose(f.curl(x, use_analytic=False), 2.0 * q,
                                   rtol=1e-8, atol=1e-9)

    def test_linear_field_hand_value(self):
        # w = (x_2, 0, 0) has curl (0, 0, -1)
        a = np.zeros((3, 3))
        a[0, 1] = 1.0
        f = linear_field(a)
        np.testing.assert_allclose(f.curl([0.2, 0.4, -0.1]), [0.0, 0.0, -1.0],
                                   atol=1e-15)


class TestShiftedPair:
    def test_rigid_ambient_gradient_chain_rule(self, rng):
        # grad of x -> q_hat x (y(x) - y0) is (q_hat x) F, checked by FD
        motion = sinusoidal_motion(0.08, [2.0, 0.5, -0.7], [0.25, 0.85, 0.45])
        pair = VirtualFieldPair(v=constant_field([0.0, 0.0, 0.0]),
                                w=constant_field([0.0, 0.0, 0.0]))
        q_hat = np.array([0.3, -0.2, 0.6])
        change = ObserverChange(ambient_rotation=q_hat, ambient_pivot=[0.1, 0.0, 0.2])
        shifted = observer_shifted_pair(pair, motion, change)
        for _ in range(5):
            x = rng.uniform(-0.4, 0.4, size=3)
            expected = cross_matrix(q_hat) @ motion.deformation_gradient(x)
            np.testing.assert_allclose(shifted.v.grad(x), expected, atol=1e-14)
            fd = fd_gradient_vector(shifted.v.value, x, 1e-6)
            np.testing.assert_allclose(fd, expected, rtol=1e-6, atol=1e-8)

    def test_material_curl_shift(self, rng):
        w = sinusoidal_field(0.5, [1.0, 0.6, -0.8], [-0.4, 0.8, 0.3])
        pair = VirtualFieldPair(v=constant_field([0.0, 0.0, 0.0]), w=w)
        q = np.array([0.2, 0.5, -0.3])
        change = ObserverChange(material_rotation=q)
        shifted = observer_shifted_pair(pair, identity_motion(), change)
        x = rng.uniform(-0.4, 0.4, size=3)
        np.testing.assert_allclose(shifted.w.curl(x), w.curl(x) + 2.0 * q,
                                   atol=1e-14)
