import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from ..exceptions import DomainError, ParameterError
from ..geometry import Domain, NodeMarker, Part, delta_threshold, eta, make_mesh, sigma
from ..utils import NoSocketsSimpleTestCase, set_test_logger

MODULE_PATH = "nonlocaltransmission.geometry"
logger = set_test_logger(MODULE_PATH, __file__)


class TestDomain(NoSocketsSimpleTestCase):
    def test_default_parts(self):
        domain = Domain()
        self.assertEqual(domain.bounds(Part.OMEGA1), (-1.0, 0.0))
        self.assertEqual(domain.bounds(2), (0.0, 1.0))
        self.assertEqual(domain.length(Part.OMEGA2), 1.0)

    def test_rejects_interface_outside(self):
        with self.assertRaises(DomainError):
            Domain(a=0.0, b=1.0, xi=1.5)

    def test_rejects_other_dimensions(self):
        with self.assertRaises(DomainError):
            Domain(dim=2)

    def test_rejects_invalid_kappas(self):
        with self.assertRaises(DomainError):
            Domain(kappa0=0.5)
        with self.assertRaises(DomainError):
            Domain(kappa1=0.0)

    def test_contains(self):
        domain = Domain()
        np.testing.assert_array_equal(
            domain.contains(Part.OMEGA1, [-1.0, -0.5, 0.0, 0.5]), [True, True, True, False]
        )
        np.testing.assert_array_equal(
            domain.contains(Part.OMEGA1, [-1.0, -0.5, 0.0], closed=False),
            [False, True, False],
        )


class TestDistances(NoSocketsSimpleTestCase):
    def test_sigma_on_both_parts(self):
        domain = Domain()
        self.assertEqual(sigma(domain, Part.OMEGA1, -0.25), 0.25)
        self.assertEqual(sigma(domain, Part.OMEGA1, -0.75), 0.25)
        np.testing.assert_allclose(sigma(domain, Part.OMEGA2, [0.0, 0.5, 1.0]), [0, 0.5, 0])

    def test_sigma_returns_float_for_scalars(self):
        self.assertIsInstance(sigma(Domain(), Part.OMEGA2, 0.3), float)

    def test_sigma_rejects_points_outside(self):
        with self.assertRaises(DomainError):
            sigma(Domain(), Part.OMEGA1, 0.5)

    @given(
        x=st.floats(min_value=-1.0, max_value=0.0),
        y=st.floats(min_value=-1.0, max_value=0.0),
    )
    def test_sigma_is_one_lipschitz(self, x, y):
        domain = Domain()
        difference = abs(sigma(domain, Part.OMEGA1, x) - sigma(domain, Part.OMEGA1, y))
        self.assertLessEqual(difference, abs(x - y) + 1e-15)

    def test_sigma_attains_lipschitz_constant(self):
        x = np.linspace(0.0, 0.4, 9)
        slopes = np.diff(sigma(Domain(), Part.OMEGA2, x)) / np.diff(x)
        np.testing.assert_allclose(slopes, 1.0)

    def test_eta_is_sigma(self):
        x = np.linspace(0.0, 1.0, 5)
        np.testing.assert_array_equal(
            eta(Domain(), Part.OMEGA2, x), sigma(Domain(), Part.OMEGA2, x)
        )

    def test_delta_threshold(self):
        self.assertAlmostEqual(delta_threshold(Domain()), 1 / 3)
        self.assertAlmostEqual(delta_threshold(Domain(kappa0=2.0)), 1 / 6)


class TestMesh(NoSocketsSimpleTestCase):
    def test_make_mesh(self):
        # when
        mesh = make_mesh(Domain(), 4)
        # then
        self.assertEqual(mesh.n_nodes, 9)
        self.assertEqual(mesh.interface_index, 4)
        self.assertEqual(mesh.nodes[4], 0.0)
        np.testing.assert_allclose(mesh.element_lengths, 0.25)
        self.assertEqual(mesh.markers[0], NodeMarker.DIRICHLET)
        self.assertEqual(mesh.markers[4], NodeMarker.INTERFACE)
        self.assertEqual(mesh.markers[5], NodeMarker.INTERIOR2)
        self.assertEqual(mesh.markers[-1], NodeMarker.DIRICHLET)

    def test_part_nodes_share_interface(self):
        mesh = make_mesh(Domain(a=0.0, xi=1.0, b=3.0), 2)
        np.testing.assert_allclose(mesh.part_nodes(Part.OMEGA1), [0.0, 0.5, 1.0])
        np.testing.assert_allclose(mesh.part_nodes(Part.OMEGA2), [1.0, 2.0, 3.0])
        self.assertEqual(mesh.part_h(Part.OMEGA2), 1.0)

    def test_nodes_are_read_only(self):
        mesh = make_mesh(Domain(), 2)
        with self.assertRaises(ValueError):
            mesh.nodes[0] = 1.0

    def test_rejects_too_few_elements(self):
        with self.assertRaises(ParameterError):
            make_mesh(Domain(), 1)
