import numpy as np
from scipy.special import gamma

from ..core.fields import PiecewiseLinear
from ..exceptions import ModeError, ParameterError
from ..forms import FieldPair
from ..geometry import Domain, Part, make_mesh
from ..kernels import CoefficientField, ModelParams
from ..library import make_function
from ..spaces import (
    BoundaryData,
    extend_boundary_data,
    hardy_constant,
    hardy_lower_bound,
    lp_distance,
    lp_norm,
    mass_matrix,
    poincare_constant,
    poincare_ratio,
    trace,
    transmission_residual,
)
from ..utils import NoSocketsSimpleTestCase

DOMAIN = Domain()
PARAMS = ModelParams(s=0.75, p=2.0, delta=0.1)


def closed_form_hardy_constant(s):
    """Value of the half-line integral for p = 2."""
    sp, exponent = 2 * s, (2 * s - 1) / 2
    return 2 * (
        -1 / sp - 2 * gamma(1 + exponent) * gamma(-sp) / gamma(1 + exponent - sp)
    )


class TestBoundaryData(NoSocketsSimpleTestCase):
    def test_defaults_are_homogeneous(self):
        self.assertTrue(BoundaryData().is_homogeneous)
        self.assertFalse(BoundaryData(g0=1.0).is_homogeneous)

    def test_scaled(self):
        self.assertEqual(BoundaryData(1.0, 2.0, 3.0).scaled(2.0), BoundaryData(2.0, 4.0, 6.0))


class TestTrace(NoSocketsSimpleTestCase):
    def setUp(self):
        self.mesh = make_mesh(DOMAIN, 4)

    def test_trace_of_pair(self):
        pair = FieldPair.interpolate(self.mesh, make_function("affine:1,2"))
        self.assertEqual(trace(pair, PARAMS, Part.OMEGA1), (-1.0, 1.0))
        self.assertEqual(trace(pair, PARAMS, Part.OMEGA2), (1.0, 3.0))

    def test_trace_of_piecewise_linear_field(self):
        field = PiecewiseLinear([0.0, 0.5, 1.0], [2.0, 0.0, 5.0])
        self.assertEqual(trace(field, PARAMS), (2.0, 5.0))

    def test_trace_of_function_handle(self):
        result = trace(make_function("linear"), PARAMS, Part.OMEGA1, DOMAIN)
        self.assertEqual(result, (-1.0, 0.0))

    def test_trace_needs_sp_above_one(self):
        pair = FieldPair.zeros(self.mesh)
        with self.assertRaises(ParameterError):
            trace(pair, ModelParams(s=0.4, p=2.0, delta=0.1))


class TestTransmissionResidual(NoSocketsSimpleTestCase):
    def setUp(self):
        self.mesh = make_mesh(DOMAIN, 4)

    def test_shared_interface_has_no_residual(self):
        pair = FieldPair.interpolate(self.mesh, make_function("sine:1"))
        self.assertEqual(transmission_residual(pair), 0.0)

    def test_split_interface(self):
        # given
        pair = FieldPair.from_parts(self.mesh, [0, 0, 0, 0, 2.0], [0.5, 0, 0, 0, 0])
        # when/then
        self.assertAlmostEqual(transmission_residual(pair), 1.5)
        self.assertAlmostEqual(transmission_residual(pair, 1.5), 0.0)


class TestLpDistance(NoSocketsSimpleTestCase):
    def setUp(self):
        self.mesh = make_mesh(DOMAIN, 8)

    def test_norm_of_constant_pair(self):
        pair = FieldPair.interpolate(self.mesh, make_function("constant:1"))
        self.assertAlmostEqual(lp_norm(pair), np.sqrt(2.0), places=12)
        self.assertAlmostEqual(lp_norm(pair, 3.0), 2.0 ** (1 / 3), places=12)

    def test_distance_to_interpolated_linear_function(self):
        u = make_function("linear")
        pair = FieldPair.interpolate(self.mesh, u)
        self.assertLess(lp_distance(pair, u), 1e-14)

    def test_distance_between_pairs(self):
        first = FieldPair.interpolate(self.mesh, make_function("constant:1"))
        second = FieldPair.zeros(self.mesh)
        self.assertAlmostEqual(lp_distance(first, second), np.sqrt(2.0), places=12)


class TestExtendBoundaryData(NoSocketsSimpleTestCase):
    def setUp(self):
        self.mesh = make_mesh(DOMAIN, 8)

    def test_fixed_values(self):
        # when
        pair = extend_boundary_data(BoundaryData(g0=1.0, g1=2.0, g2=-1.0), PARAMS, self.mesh)
        # then
        self.assertAlmostEqual(pair.values[0], 2.0)
        self.assertAlmostEqual(pair.values[self.mesh.interface_index], 1.0)
        self.assertAlmostEqual(pair.values[-1], -1.0)

    def test_local_extension_is_piecewise_linear(self):
        # when
        pair = extend_boundary_data(
            BoundaryData(g0=1.0), ModelParams(s=1.0, p=2.0), self.mesh
        )
        # then
        np.testing.assert_allclose(
            pair.values, 1.0 - np.abs(self.mesh.nodes), atol=1e-12
        )

    def test_is_linear_in_the_data(self):
        # given
        g = BoundaryData(g0=1.0, g1=2.0, g2=-1.0)
        h = BoundaryData(g0=-0.5, g1=0.0, g2=3.0)
        combined = BoundaryData(g0=0.5, g1=4.0, g2=7.0)
        # when
        first, second, both = (
            extend_boundary_data(data, PARAMS, self.mesh).values for data in (g, h, combined)
        )
        # then
        np.testing.assert_allclose(both, 2.0 * first + 3.0 * second, atol=1e-12)

    def test_is_stable_as_delta_shrinks(self):
        # given
        g = BoundaryData(g0=1.0)
        local = extend_boundary_data(g, ModelParams(s=1.0, p=2.0), self.mesh)
        deltas = (0.2, 0.1, 0.05, 0.025)
        # when
        extensions = [
            extend_boundary_data(g, ModelParams(s=1.0, p=2.0, delta=delta), self.mesh)
            for delta in deltas
        ]
        # then
        norms = [lp_norm(pair) for pair in extensions]
        self.assertLessEqual(max(norms) / min(norms), 1.5)
        distances = [lp_distance(pair, local) for pair in extensions]
        self.assertLess(distances[-1], distances[0])

    def test_homogeneous_data_extends_to_zero(self):
        pair = extend_boundary_data(BoundaryData(), PARAMS, self.mesh)
        np.testing.assert_allclose(pair.values, 0.0)

    def test_needs_p2(self):
        with self.assertRaises(ModeError):
            extend_boundary_data(BoundaryData(), ModelParams(s=0.75, p=3.0), self.mesh)

    def test_needs_sp_above_one(self):
        with self.assertRaises(ParameterError):
            extend_boundary_data(BoundaryData(), ModelParams(s=0.4, p=2.0), self.mesh)


class TestPoincare(NoSocketsSimpleTestCase):
    def test_mass_matrix(self):
        mass = mass_matrix(make_mesh(DOMAIN, 8))
        np.testing.assert_allclose(mass, mass.T)
        self.assertAlmostEqual(mass.sum(), 2.0, places=12)

    def test_local_constant(self):
        # -u'' = lambda u on (-1, 1) with lambda = (pi/2)^2
        value = poincare_constant(
            ModelParams(s=1.0, p=2.0), CoefficientField(), make_mesh(DOMAIN, 32)
        )
        self.assertAlmostEqual(value / (2 / np.pi), 1.0, places=3)

    def test_nonlocal_constant_is_positive(self):
        value = poincare_constant(PARAMS, CoefficientField(), make_mesh(DOMAIN, 8))
        self.assertGreater(value, 0.0)

    def test_ratio_is_bounded_by_constant(self):
        # given
        mesh = make_mesh(DOMAIN, 8)
        constant = poincare_constant(PARAMS, CoefficientField(), mesh)
        pair = FieldPair.interpolate(mesh, make_function("bubble"))
        # when
        ratio = poincare_ratio(pair, PARAMS)
        # then
        self.assertGreater(ratio, 0.0)
        self.assertLessEqual(ratio, constant * (1 + 1e-9))

    def test_ratio_of_zero_field(self):
        pair = FieldPair.zeros(make_mesh(DOMAIN, 4))
        self.assertEqual(poincare_ratio(pair, PARAMS), 0.0)


class TestHardy(NoSocketsSimpleTestCase):
    def test_constant_matches_closed_form(self):
        for s in (0.6, 0.75, 0.9):
            with self.subTest(s=s):
                self.assertAlmostEqual(
                    hardy_constant(s, 2.0) / closed_form_hardy_constant(s), 1.0, places=8
                )

    def test_constant_exceeds_lower_bound(self):
        for s in (0.6, 0.75, 0.9):
            with self.subTest(s=s):
                self.assertGreaterEqual(hardy_constant(s, 2.0), hardy_lower_bound(s, 2.0))

    def test_lower_bound(self):
        self.assertAlmostEqual(hardy_lower_bound(0.75, 2.0), 0.25)

    def test_constant_vanishes_as_sp_approaches_one(self):
        values = [hardy_constant(s, 2.0) for s in (0.6, 0.55, 0.51)]
        self.assertGreater(values[0], values[1])
        self.assertGreater(values[1], values[2])
        self.assertGreater(values[2], 0.0)

    def test_needs_sp_above_one(self):
        with self.assertRaises(ParameterError):
            hardy_constant(0.4, 2.0)
