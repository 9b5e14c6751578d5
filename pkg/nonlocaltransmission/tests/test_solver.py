from unittest.mock import Mock, patch

import numpy as np

from ..energies import LoadSpec, assemble_p2
from ..exceptions import ConvergenceError, ModeError, ParameterError, SolverError
from ..geometry import Domain, Part, make_mesh
from ..kernels import CoefficientField, ModelParams
from ..library import make_function, make_potential
from ..solver import (
    METHOD_CG,
    METHOD_CHOLESKY,
    METHOD_NEWTON,
    DofMap,
    InterfacePenalty,
    Objective,
    _solve_quadratic,
    check_optimality,
    solve_general_p,
    solve_p2,
    solve_penalty,
)
from ..spaces import BoundaryData, transmission_residual
from ..utils import NoSocketsSimpleTestCase, set_test_logger

MODULE_PATH = "nonlocaltransmission.solver"
logger = set_test_logger(MODULE_PATH, __file__)

DOMAIN = Domain()
ONE = make_function("constant:1")
UNIT_LOADS = LoadSpec(ONE, ONE)
MODES = (
    ModelParams(s=0.75, p=2.0, delta=0.1),
    ModelParams(s=0.75, p=2.0),
    ModelParams(s=1.0, p=2.0, delta=0.1),
    ModelParams(s=1.0, p=2.0),
)


class TestDofMap(NoSocketsSimpleTestCase):
    def setUp(self):
        self.mesh = make_mesh(DOMAIN, 4)

    def test_hard_homogeneous(self):
        dofmap = DofMap.hard(self.mesh)
        self.assertFalse(dofmap.layout.split)
        self.assertEqual(dofmap.n_unknowns, 7)
        u = dofmap.nodal(np.arange(1.0, 8.0))
        self.assertListEqual(list(u), [0, 1, 2, 3, 4, 5, 6, 7, 0])

    def test_hard_with_jump_ties_interface_values(self):
        # when
        dofmap = DofMap.hard(self.mesh, BoundaryData(g0=0.5, g1=1.0, g2=2.0))
        u = dofmap.nodal(np.arange(1.0, 8.0))
        # then
        layout = dofmap.layout
        self.assertTrue(layout.split)
        self.assertEqual(dofmap.n_unknowns, 7)
        self.assertEqual(u[0], 1.0)
        self.assertEqual(u[-1], 2.0)
        self.assertAlmostEqual(u[layout.first_interface] - u[layout.second_interface], 0.5)

    def test_independent(self):
        dofmap = DofMap.independent(self.mesh)
        self.assertTrue(dofmap.layout.split)
        self.assertEqual(dofmap.n_unknowns, 8)


class TestInterfacePenalty(NoSocketsSimpleTestCase):
    def test_rejects_non_positive_epsilon(self):
        with self.assertRaises(ParameterError):
            InterfacePenalty(epsilon=0.0, p=2.0)

    def test_energy_and_gradient(self):
        # given
        layout = DofMap.independent(make_mesh(DOMAIN, 2)).layout
        penalty = InterfacePenalty(epsilon=0.5, p=2.0, g0=1.0)
        u = np.zeros(layout.size)
        u[layout.first_interface] = 3.0
        # when/then
        self.assertAlmostEqual(penalty.energy(u, layout), 16.0)
        gradient = penalty.gradient(u, layout)
        self.assertAlmostEqual(gradient[layout.first_interface], 16.0)
        self.assertAlmostEqual(gradient[layout.second_interface], -16.0)


class TestSolveP2(NoSocketsSimpleTestCase):
    def test_local_solution_matches_bubble(self):
        # given
        mesh = make_mesh(DOMAIN, 32)
        bubble = make_function("bubble")
        # when
        report = solve_p2(ModelParams(s=1.0, p=2.0), CoefficientField(), UNIT_LOADS, mesh)
        # then
        self.assertEqual(report.method, METHOD_CHOLESKY)
        np.testing.assert_allclose(report.pair.values, bubble(mesh.nodes), atol=1e-10)

    def test_solution_matches_dense_oracle(self):
        mesh = make_mesh(DOMAIN, 8)
        for params in MODES:
            with self.subTest(mode=params.mode.value):
                # when
                report = solve_p2(params, CoefficientField(), UNIT_LOADS, mesh)
                # then
                system = assemble_p2(params, CoefficientField(), mesh, UNIT_LOADS)
                expected = np.linalg.solve(system.matrix, system.rhs)
                np.testing.assert_allclose(
                    report.pair.values[system.free_dofs], expected, rtol=1e-9, atol=1e-12
                )

    def test_solution_meets_transmission_and_dirichlet(self):
        mesh = make_mesh(DOMAIN, 8)
        for params in MODES:
            with self.subTest(mode=params.mode.value):
                report = solve_p2(params, CoefficientField(), UNIT_LOADS, mesh)
                self.assertEqual(transmission_residual(report.pair), 0.0)
                self.assertEqual(report.pair.values[0], 0.0)
                self.assertEqual(report.pair.values[-1], 0.0)
                self.assertGreater(report.pair.values[mesh.interface_index], 0.0)

    def test_inhomogeneous_boundary_data(self):
        # given
        mesh = make_mesh(DOMAIN, 8)
        bc = BoundaryData(g0=0.5, g1=1.0, g2=2.0)
        # when
        report = solve_p2(ModelParams(s=1.0, p=2.0), CoefficientField(), LoadSpec(), mesh, bc)
        # then
        pair = report.pair
        self.assertAlmostEqual(transmission_residual(pair, 0.5), 0.0, places=12)
        self.assertAlmostEqual(pair.nodal(Part.OMEGA1)[-1], 1.75, places=10)
        self.assertAlmostEqual(pair.nodal(Part.OMEGA2)[0], 1.25, places=10)
        self.assertEqual(pair.values[0], 1.0)
        self.assertEqual(pair.values[-1], 2.0)

    @patch(MODULE_PATH + ".NTL_DENSE_SOLVER_MAX_DOF", 0)
    def test_conjugate_gradients_for_large_systems(self):
        # given
        mesh = make_mesh(DOMAIN, 8)
        params = ModelParams(s=1.0, p=2.0)
        system = assemble_p2(params, CoefficientField(), mesh, UNIT_LOADS)
        # when
        report = solve_p2(params, CoefficientField(), UNIT_LOADS, mesh)
        # then
        self.assertEqual(report.method, METHOD_CG)
        self.assertGreater(report.iterations, 0)
        np.testing.assert_allclose(
            report.pair.values[system.free_dofs],
            np.linalg.solve(system.matrix, system.rhs),
            rtol=1e-7,
            atol=1e-9,
        )

    def test_report_to_dict_has_no_wall_time(self):
        report = solve_p2(
            ModelParams(s=1.0, p=2.0), CoefficientField(), UNIT_LOADS, make_mesh(DOMAIN, 4)
        )
        data = report.to_dict()
        self.assertNotIn("wall_time", data)
        self.assertEqual(data["n_unknowns"], 7)
        self.assertEqual(data["method"], METHOD_CHOLESKY)

    def test_rejects_other_exponents(self):
        with self.assertRaises(ModeError):
            solve_p2(
                ModelParams(s=1.0, p=3.0), CoefficientField(), UNIT_LOADS, make_mesh(DOMAIN, 4)
            )

    def test_rejects_large_horizon(self):
        with self.assertRaises(ParameterError):
            solve_p2(
                ModelParams(s=0.75, p=2.0, delta=0.4),
                CoefficientField(),
                UNIT_LOADS,
                make_mesh(DOMAIN, 4),
            )

    def test_reports_indefinite_matrix(self):
        # given
        objective = Mock(spec=Objective)
        objective.n_unknowns = 3
        objective.hessian.return_value = -np.eye(3)
        objective.gradient.return_value = np.zeros(3)
        objective.params = ModelParams(s=1.0, p=2.0)
        # when
        with self.assertRaises(SolverError) as context:
            _solve_quadratic(objective)
        # then
        self.assertEqual(context.exception.diagnostics["n_dof"], 3)
        self.assertAlmostEqual(context.exception.diagnostics["min_eigenvalue"], -1.0)


class TestSolutionStructure(NoSocketsSimpleTestCase):
    def setUp(self):
        self.mesh = make_mesh(DOMAIN, 8)

    def test_even_data_gives_even_solution(self):
        # given
        loads = LoadSpec(make_function("exponential:1"), make_function("exponential:-1"))
        # when
        report = solve_p2(ModelParams(s=1.0, p=2.0), CoefficientField(), loads, self.mesh)
        # then
        values = report.pair.values
        np.testing.assert_allclose(values, values[::-1], atol=1e-10)

    def test_swapping_sides_mirrors_solution(self):
        # given
        params = ModelParams(s=1.0, p=2.0)
        loads = LoadSpec(make_function("exponential:1"), make_function("constant:2"))
        swapped = LoadSpec(make_function("constant:2"), make_function("exponential:-1"))
        # when
        report = solve_p2(params, CoefficientField(), loads, self.mesh)
        mirrored = solve_p2(params, CoefficientField(), swapped, self.mesh)
        # then
        np.testing.assert_allclose(
            mirrored.pair.values, report.pair.values[::-1], atol=1e-10
        )

    def test_superposition_of_loads(self):
        # given
        params = ModelParams(s=0.75, p=2.0, delta=0.1)
        first = LoadSpec(make_function("polynomial:1"), make_function("polynomial:0,0,1"))
        second = LoadSpec(make_function("polynomial:0,1"), make_function("polynomial:2"))
        combined = LoadSpec(
            make_function("polynomial:2,3"), make_function("polynomial:6,0,2")
        )
        # when
        u_first, u_second, u_combined = (
            solve_p2(params, CoefficientField(), loads, self.mesh).pair.values
            for loads in (first, second, combined)
        )
        # then
        np.testing.assert_allclose(u_combined, 2 * u_first + 3 * u_second, atol=1e-10)


class TestSolveGeneralP(NoSocketsSimpleTestCase):
    def setUp(self):
        self.mesh = make_mesh(DOMAIN, 8)

    def test_agrees_with_linear_solver_for_p2(self):
        params = ModelParams(s=0.75, p=2.0, delta=0.1)
        linear = solve_p2(params, CoefficientField(), UNIT_LOADS, self.mesh)
        descent = solve_general_p(
            params, CoefficientField(), make_potential(2.0), UNIT_LOADS, self.mesh
        )
        self.assertEqual(descent.method, METHOD_NEWTON)
        np.testing.assert_allclose(descent.pair.values, linear.pair.values, atol=1e-8)

    def test_local_p3_solution(self):
        # -(|u'| u')' = 1 on (-1, 1) gives u' = -sign(x) sqrt(|x|)
        mesh = make_mesh(DOMAIN, 32)
        report = solve_general_p(
            ModelParams(s=1.0, p=3.0), CoefficientField(), None, UNIT_LOADS, mesh
        )
        expected = (2.0 / 3.0) * (1.0 - np.abs(mesh.nodes) ** 1.5)
        np.testing.assert_allclose(report.pair.values, expected, atol=1e-2)
        self.assertEqual(transmission_residual(report.pair), 0.0)

    def test_nonlocal_p3_solution_is_optimal(self):
        report = solve_general_p(
            ModelParams(s=0.75, p=3.0, delta=0.1),
            CoefficientField(),
            make_potential(3.0),
            UNIT_LOADS,
            self.mesh,
        )
        self.assertEqual(check_optimality(report)["violations"], 0)
        self.assertGreater(report.breakdown.load_term, 0.0)

    def test_saturating_potential(self):
        report = solve_general_p(
            ModelParams(s=0.75, p=2.0, delta=0.1),
            CoefficientField(),
            make_potential(2.0, "saturating", 0.3),
            UNIT_LOADS,
            self.mesh,
        )
        self.assertEqual(check_optimality(report)["violations"], 0)

    def test_rejects_mismatched_potential(self):
        with self.assertRaises(ModeError):
            solve_general_p(
                ModelParams(s=0.75, p=2.0, delta=0.1),
                CoefficientField(),
                make_potential(3.0),
                UNIT_LOADS,
                self.mesh,
            )

    def test_same_minimizer_from_perturbed_start(self):
        # given
        params = ModelParams(s=0.75, p=3.0, delta=0.1)
        potential = make_potential(3.0)
        first = solve_general_p(params, CoefficientField(), potential, UNIT_LOADS, self.mesh)
        rng = np.random.default_rng(7)
        initial = first.unknowns + rng.uniform(-0.5, 0.5, first.unknowns.size)
        # when
        second = solve_general_p(
            params, CoefficientField(), potential, UNIT_LOADS, self.mesh, initial=initial
        )
        # then
        self.assertGreater(second.iterations, 0)
        np.testing.assert_allclose(second.pair.values, first.pair.values, atol=1e-6)

    @patch(MODULE_PATH + ".NTL_DESCENT_MAX_ITER", 0)
    def test_reports_iteration_cap(self):
        with self.assertRaises(ConvergenceError) as context:
            solve_general_p(
                ModelParams(s=1.0, p=3.0), CoefficientField(), None, UNIT_LOADS, self.mesh
            )
        self.assertIn("gradient_max_norm", context.exception.diagnostics)


class TestSolvePenalty(NoSocketsSimpleTestCase):
    def setUp(self):
        self.mesh = make_mesh(DOMAIN, 8)
        self.params = ModelParams(s=0.75, p=2.0, delta=0.1)

    def test_residual_decreases_with_epsilon(self):
        residuals = []
        for epsilon in (1e-1, 1e-2, 1e-3):
            report = solve_penalty(
                self.params, CoefficientField(), UNIT_LOADS, self.mesh, g0=0.5, epsilon=epsilon
            )
            self.assertEqual(report.method, "penalty-" + METHOD_CHOLESKY)
            residuals.append(transmission_residual(report.pair, 0.5))
        self.assertGreater(residuals[0], residuals[1])
        self.assertGreater(residuals[1], residuals[2])

    def test_penalty_approaches_hard_constraint(self):
        hard = solve_p2(self.params, CoefficientField(), UNIT_LOADS, self.mesh)
        soft = solve_penalty(
            self.params, CoefficientField(), UNIT_LOADS, self.mesh, epsilon=1e-4
        )
        self.assertAlmostEqual(
            soft.pair.values[soft.pair.layout.first_interface],
            hard.pair.values[hard.pair.layout.first_interface],
            places=4,
        )

    def test_general_p_penalty(self):
        report = solve_penalty(
            ModelParams(s=1.0, p=3.0),
            CoefficientField(),
            UNIT_LOADS,
            self.mesh,
            epsilon=1e-2,
        )
        self.assertEqual(report.method, "penalty-" + METHOD_NEWTON)

    def test_rejects_non_positive_epsilon(self):
        with self.assertRaises(ParameterError):
            solve_penalty(self.params, CoefficientField(), UNIT_LOADS, self.mesh, epsilon=0)


class TestCheckOptimality(NoSocketsSimpleTestCase):
    def test_minimizer_has_no_violations(self):
        report = solve_p2(
            ModelParams(s=0.75, p=2.0, delta=0.1),
            CoefficientField(),
            UNIT_LOADS,
            make_mesh(DOMAIN, 8),
        )
        result = check_optimality(report, seed=1)
        self.assertEqual(result["samples"], 100)
        self.assertEqual(result["violations"], 0)
        self.assertGreater(result["min_increase"], 0.0)

    def test_is_deterministic_for_seed(self):
        report = solve_p2(
            ModelParams(s=1.0, p=2.0), CoefficientField(), UNIT_LOADS, make_mesh(DOMAIN, 4)
        )
        self.assertDictEqual(check_optimality(report, seed=3), check_optimality(report, seed=3))
