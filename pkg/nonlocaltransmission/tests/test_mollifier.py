import numpy as np
from scipy import integrate

from ..exceptions import DomainError, ParameterError
from ..geometry import Domain, Part
from ..library import make_function
from ..mollifier import (
    Mollifier,
    conv_Kdelta,
    psi,
    psi_delta,
    psi_delta_mass_transpose,
)
from ..utils import NoSocketsSimpleTestCase, set_test_logger

MODULE_PATH = "nonlocaltransmission.mollifier"
logger = set_test_logger(MODULE_PATH, __file__)


class TestMollifier(NoSocketsSimpleTestCase):
    def test_unit_mass_in_one_dimension(self):
        mass, _ = integrate.quad(
            lambda r: float(psi(r)), -0.9, 0.9, epsabs=1e-13, epsrel=1e-12
        )
        self.assertAlmostEqual(mass, 1.0, places=9)

    def test_unit_mass_in_two_dimensions(self):
        mollifier = Mollifier(dim=2)
        mass, _ = integrate.quad(
            lambda r: 2 * np.pi * r * mollifier(r), 0.0, 0.9, epsabs=1e-13, epsrel=1e-12
        )
        self.assertAlmostEqual(mass, 1.0, places=9)

    def test_support_and_symmetry(self):
        self.assertEqual(psi(0.95), 0.0)
        self.assertEqual(psi(-1.0), 0.0)
        self.assertAlmostEqual(psi(0.3), psi(-0.3))
        self.assertGreater(psi(0.0), psi(0.5))

    def test_rejects_invalid_shape(self):
        with self.assertRaises(ParameterError):
            Mollifier(support_radius=0.4, plateau=0.45)
        with self.assertRaises(ParameterError):
            Mollifier(dim=3)

    def test_convolution_rule_sums_to_one(self):
        nodes, weights = Mollifier().convolution_rule()
        self.assertAlmostEqual(np.sum(weights), 1.0, places=14)
        self.assertAlmostEqual(np.dot(weights, nodes), 0.0, places=14)


class TestPsiDelta(NoSocketsSimpleTestCase):
    def test_value(self):
        value = psi_delta(-0.5, -0.5, 0.1, Domain())
        self.assertAlmostEqual(value, psi(0.0) / 0.05)

    def test_unit_mass_in_y(self):
        for x, delta in ((-0.5, 0.1), (-0.05, 0.3), (-0.9, 0.2)):
            with self.subTest(x=x, delta=delta):
                reach = 0.9 * delta * min(-x, 1 + x)
                mass, _ = integrate.quad(
                    lambda y: psi_delta(x, y, delta, Domain()),
                    x - reach,
                    x + reach,
                    epsabs=1e-13,
                    epsrel=1e-12,
                )
                self.assertAlmostEqual(mass, 1.0, delta=1e-8)

    def test_is_not_symmetric(self):
        # given
        x, y, delta = -0.5, -0.48, 0.1
        # when
        forward = psi_delta(x, y, delta, Domain())
        backward = psi_delta(y, x, delta, Domain())
        # then
        self.assertGreater(forward, 0.0)
        self.assertGreater(backward, 0.0)
        self.assertGreater(abs(forward - backward), 1e-3 * forward)

    def test_support_shrinks_toward_boundary(self):
        # given
        domain = Domain()
        x, delta = -0.95, 0.3
        y = np.linspace(-1.0, 0.0, 2001)
        # when
        values = psi_delta(x, y, delta, domain)
        # then
        support = y[values > 0]
        self.assertGreater(support.min(), -1.0)
        self.assertLess(support.max() - support.min(), 2 * 0.9 * delta * 0.05 + 1e-3)
        # y sees x through a smaller window than x sees y
        self.assertGreater(psi_delta(x, -0.962, delta, domain), 0.0)
        self.assertEqual(psi_delta(-0.962, x, delta, domain), 0.0)

    def test_undefined_on_boundary(self):
        with self.assertRaises(DomainError):
            psi_delta(0.0, -0.1, 0.1, Domain())

    def test_rejects_large_delta(self):
        with self.assertRaises(ParameterError):
            psi_delta(-0.5, -0.5, 0.4, Domain())

    def test_mass_transpose_is_bounded(self):
        for x in (-0.5, -0.1, -0.95):
            with self.subTest(x=x):
                value = psi_delta_mass_transpose(x, 0.2, Domain())
                self.assertGreater(value, 0.5)
                self.assertLess(value, 2.0)

    def test_mass_transpose_needs_interior_point(self):
        with self.assertRaises(DomainError):
            psi_delta_mass_transpose(-1.0, 0.1, Domain())


class TestConvKdelta(NoSocketsSimpleTestCase):
    def test_reproduces_affine_functions(self):
        u = make_function("affine:0.3,-2")
        x = np.linspace(-1.0, 0.0, 41)
        smoothed = conv_Kdelta(u, 0.2, Domain(), Part.OMEGA1)
        np.testing.assert_allclose(smoothed(x), u(x), atol=1e-12)

    def test_preserves_boundary_values(self):
        u = make_function("sine:1")
        smoothed = conv_Kdelta(u, 0.3, Domain(), Part.OMEGA2)
        self.assertAlmostEqual(smoothed(0.0), float(u(0.0)), places=14)
        self.assertAlmostEqual(smoothed(1.0), float(u(1.0)), places=14)

    def test_smooths_in_interior(self):
        u = make_function("kink:0.5")
        smoothed = conv_Kdelta(u, 0.2, Domain(), Part.OMEGA2)
        self.assertGreater(smoothed(0.5), 0.0)

    def test_approaches_function_as_delta_shrinks(self):
        u = make_function("sine:2")
        x = np.linspace(0.0, 1.0, 21)
        errors = [
            np.max(np.abs(conv_Kdelta(u, delta, Domain(), Part.OMEGA2)(x) - u(x)))
            for delta in (0.3, 0.1, 0.03)
        ]
        self.assertLess(errors[1], errors[0])
        self.assertLess(errors[2], errors[1])

    def test_scalar_input_gives_float(self):
        smoothed = conv_Kdelta(make_function("linear"), 0.1, Domain(), Part.OMEGA2)
        self.assertIsInstance(smoothed(0.5), float)

    def test_rejects_invalid_delta(self):
        with self.assertRaises(ParameterError):
            conv_Kdelta(make_function("linear"), 0.0, Domain())
