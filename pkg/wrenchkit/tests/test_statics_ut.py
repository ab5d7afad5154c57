"""
Methods

assertEqual(a, b)
assertTrue(x)
assertFalse(x)
assertRaises(exc)
"""
import unittest
import numpy as np
import wrenchkit
from wrenchkit.actuators import BellowsModel
from wrenchkit.arm import ActuatorSpec, ArmDesign, residual
from wrenchkit.estimators.statics import (
    EquilibriumSolver, SolveSettings, check_settings, continuation_solve, solve_equilibrium,
    )



class EquilibriumSolverTestCase(unittest.TestCase):
    def setUp(self):
        self.pair = ArmDesign(
            [ActuatorSpec(.025, .5, BellowsModel()), ActuatorSpec(-.025, .5, BellowsModel())],
            segment_count=4,
            )
        self.design = wrenchkit.load("antagonistic")
        self.solver = EquilibriumSolver(self.pair)


    def test_neutral(self):
        result = EquilibriumSolver(self.design)([0., 0., 0., 0.])
        self.assertTrue(result.converged, "Zero pressure, zero load did not converge.")
        self.assertEqual(result.iterations, 0, "Neutral shape should already be in equilibrium.")
        self.assertTrue(np.allclose(result.shape.twists, [.5, 0., 0.]), "Arm did not stay straight.")

    def test_symmetric_extension(self):
        # 20 N per bellows is balanced by k_b * eps at eps = 0.5.
        result = self.solver([20e3, 20e3])
        self.assertTrue(result.converged, "Symmetric extension did not converge.")
        self.assertTrue(np.allclose(result.shape.twists[:, 2], 0., atol=1e-8), "Arm bent.")
        self.assertTrue(np.allclose(result.shape.twists[:, 0], .75, atol=1e-6), "Extension is wrong.")

    def test_one_sided_bending(self):
        # Force balance gives l = 0.625; moment balance -0.5 - 0.1 k - 0.228 k = 0.
        result = self.solver([20e3, 0.])
        self.assertTrue(result.converged, "One-sided bending did not converge.")
        self.assertTrue(
            np.allclose(result.shape.twists[:, 2], -.5 / .328, atol=1e-4),
            "Bending curvature disagrees with the closed form."
            )
        self.assertTrue(np.allclose(result.shape.twists[:, 0], .625, atol=1e-5), "Length is wrong.")
        self.assertTrue(result.shape.tip_pose[1] < 0., "Arm bent toward the pressurized side.")

    def test_residual_recheck(self):
        q_tip = (1., -3., .05)
        result = solve_equilibrium(self.design, [10e3, 40e3, 20e3, 60e3], q_tip)
        self.assertTrue(result.converged, "Loaded solve did not converge.")
        res = residual(self.design, result.shape, result.pressures, q_tip)
        self.assertTrue(
            np.linalg.norm(res, axis=1).max() <= result.settings.tolerance,
            "Returned shape does not satisfy the residual tolerance."
            )
        self.assertTrue(
            np.isclose(result.residual_norm, np.linalg.norm(res, axis=1).max()),
            "Reported residual norm is stale."
            )

    def test_warm_start(self):
        q_tip = (0., -2., 0.)
        first = self.solver([30e3, 10e3], q_tip)
        second = self.solver([30e3, 10e3], q_tip, initial_shape=first.shape)
        self.assertTrue(second.converged, "Warm start did not converge.")
        self.assertTrue(second.iterations <= 2, "Warm start took {} iterations.".format(second.iterations))

    def test_non_convergence(self):
        result = self.solver([50e3, 0.], (0., -5., 0.), settings=SolveSettings(tolerance=1e-14, max_iterations=1))
        self.assertFalse(result.converged, "Single iteration should not reach 1e-14.")
        self.assertTrue(np.all(np.isfinite(result.shape.twists)), "Best iterate is not finite.")

    def test_pressure_bounds(self):
        with self.assertRaises(ValueError):
            self.solver([60e3, 0.])

    def test_summary(self):
        result = self.solver([20e3, 0.])
        self.assertEqual(len(result.summary), 5, "Summary should list N + 1 nodes.")
        for col in ("residual", "eps_0", "eps_1"):
            self.assertTrue(col in result.summary.columns, "Summary lacks `{}`.".format(col))
        self.assertTrue(str(result).startswith("converged=True"), "Unexpected summary header.")



class ContinuationTestCase(unittest.TestCase):
    def setUp(self):
        self.design = wrenchkit.load("antagonistic")
        self.pressures = [20e3, 5e3, 0., 30e3]
        self.q_tip = (0., -2., 0.)


    def test_single_step(self):
        direct = EquilibriumSolver(self.design)(self.pressures, self.q_tip)
        ramped = continuation_solve(self.design, self.pressures, self.q_tip, steps=1)
        self.assertTrue(
            np.array_equal(direct.shape.twists, ramped.shape.twists),
            "One continuation step should equal a direct solve."
            )

    def test_ramp(self):
        direct = EquilibriumSolver(self.design)(self.pressures, self.q_tip)
        ramped = continuation_solve(self.design, self.pressures, self.q_tip, steps=5)
        self.assertTrue(ramped.converged, "Continuation did not converge.")
        self.assertTrue(
            np.allclose(direct.shape.twists, ramped.shape.twists, atol=1e-5),
            "Continuation found a different equilibrium."
            )

    def test_failed_step(self):
        result = continuation_solve(
            self.design, self.pressures, self.q_tip, steps=3,
            settings=SolveSettings(tolerance=1e-14, max_iterations=1),
            )
        self.assertFalse(result.converged, "Expected a failed continuation.")
        self.assertEqual(result.failed_step, 1, "Failure should be reported at the first step.")

    def test_bad_steps(self):
        with self.assertRaises(ValueError):
            continuation_solve(self.design, self.pressures, self.q_tip, steps=0)



class SolveSettingsTestCase(unittest.TestCase):

    def test_defaults(self):
        settings = check_settings(None)
        self.assertEqual(settings.tolerance, 1e-6, "Default tolerance should be 1e-6.")

    def test_invalid(self):
        with self.assertRaises(ValueError):
            check_settings(SolveSettings(tolerance=0.))
        with self.assertRaises(ValueError):
            check_settings(SolveSettings(max_iterations=0))




if __name__ == "__main__":

    unittest.main()
