"""
Methods

assertEqual(a, b)
assertTrue(x)
assertRaises(exc)
assertRaisesRegex(exc, r)
"""
import unittest
import numpy as np
import wrenchkit
from wrenchkit.actuators import BellowsModel, ForceGrid, GridModel
from wrenchkit.arm import ActuatorSpec, ArmDesign, ArmShape
from wrenchkit.estimators.attainability import sample_pressure_interior_beta, totask
from wrenchkit.estimators.attainability.search import (
    SearchAttainability, SearchSettings, ShapeErrorWeights, pose_errors, search_attainability,
    shape_error,
    )
from wrenchkit.estimators.statics import EquilibriumSolver, SolveSettings
from wrenchkit.shapes import constant_curvature



def _pair(segment_count=3):
    return(ArmDesign(
        [ActuatorSpec(.025, .5, BellowsModel()), ActuatorSpec(-.025, .5, BellowsModel())],
        segment_count=segment_count, name="pair",
        ))



# Shape error -----------------------------------------------------------------

class ShapeErrorTestCase(unittest.TestCase):
    def setUp(self):
        self.straight = ArmShape(np.tile([.5, 0., 0.], (4, 1)))
        self.shifted = ArmShape(np.tile([.5, 0., 0.], (4, 1)), base_pose=(1., 0., 0.))
        self.bent = ArmShape(constant_curvature(4, length=.5, angle=1.))


    def test_identical(self):
        self.assertEqual(shape_error(self.bent, self.bent), 0., "Identical shapes have nonzero error.")

    def test_translation(self):
        errs = pose_errors(self.straight, self.shifted)
        self.assertTrue(np.allclose(errs, [1., 0., 0.]), "Every node should differ by (1, 0, 0).")
        self.assertTrue(np.isclose(shape_error(self.straight, self.shifted), 4.), "Identity error is not N.")
        self.assertTrue(
            np.isclose(shape_error(self.straight, self.shifted, ShapeErrorWeights.tip_only(4)), 1.),
            "Tip-only error is not 1."
            )

    def test_zero_weights(self):
        self.assertEqual(
            shape_error(self.straight, self.bent, ShapeErrorWeights.zeros(4)), 0.,
            "Zero weights should give zero error."
            )

    def test_position_only(self):
        rotated = ArmShape(np.tile([0., 0., .3], (4, 1)))
        origin = ArmShape(np.zeros((4, 3)))
        self.assertEqual(
            shape_error(origin, rotated, ShapeErrorWeights.position_only(4)), 0.,
            "Position-only weights should ignore orientation."
            )
        self.assertTrue(shape_error(origin, rotated) > 0., "Identity weights should see orientation.")

    def test_invalid_weights(self):
        asym = np.tile(np.eye(3), (4, 1, 1))
        asym[1, 0, 1] = 1.
        with self.assertRaises(ValueError):
            ShapeErrorWeights(asym)
        with self.assertRaises(ValueError):
            ShapeErrorWeights(np.tile(np.diag([1., -1., 1.]), (4, 1, 1)))
        with self.assertRaises(ValueError):
            ShapeErrorWeights.named("everything", 4)

    def test_node_mismatch(self):
        with self.assertRaises(ValueError):
            shape_error(self.straight, self.bent, ShapeErrorWeights.identity(3))



# Search baseline -------------------------------------------------------------

class SearchAttainabilityTestCase(unittest.TestCase):
    def setUp(self):
        self.design = _pair()
        self.target_pressures = np.asarray([30e3, 10e3])
        result = EquilibriumSolver(self.design)(self.target_pressures)
        self.task = totask(result.shape)
        self.search = SearchAttainability(self.design)


    def test_start_points(self):
        starts = self.search.start_points(SearchSettings(starts=3), random_state=1)
        self.assertEqual(starts.shape, (3, 2), "Expected 3 starts in 2 dimensions.")
        self.assertTrue(np.allclose(starts[0], .5), "First start is not the box center.")
        self.assertTrue(np.all(np.isin(starts[1:], [.1, .9])), "Corner starts are not inset.")

    def test_recovers_pressures(self):
        result = self.search(self.task, settings=SearchSettings(starts=2), random_state=2021)
        self.assertTrue(result.s < 1e-6, "Search did not reach the attainable target (s={}).".format(result.s))
        self.assertTrue(
            np.allclose(result.pressures, self.target_pressures, atol=5e3),
            "Search pressures {} are far from the target.".format(result.pressures)
            )

    def test_gradient_method(self):
        settings = SearchSettings(method="L-BFGS-B", starts=1, max_evaluations=200)
        result = self.search(self.task, settings=settings)
        self.assertTrue(result.s < 1e-3, "L-BFGS-B search stalled at s={}.".format(result.s))

    def test_zero_weights(self):
        result = self.search(self.task, weights=ShapeErrorWeights.zeros(3))
        self.assertEqual(result.s, 0., "Zero weights should give s = 0.")
        self.assertEqual(result.evaluations, 1, "Search should stop at the first evaluation.")

    def test_unreachable(self):
        task = totask(self.design.shape(constant_curvature(3, length=.5, angle=6.)))
        result = self.search(task, settings=SearchSettings(starts=1, max_evaluations=60))
        self.assertTrue(result.s > 1e-3, "Over-curled task should not be matched.")

    def test_all_failed(self):
        settings = SearchSettings(
            starts=1, max_evaluations=5, continuation_steps=1,
            solve_settings=SolveSettings(tolerance=1e-14, max_iterations=1),
            )
        with self.assertRaises(RuntimeError):
            self.search(totask(self.task.shape, (0., -3., 0.)), settings=settings)

    def test_non_monotone_model(self):
        grid = ForceGrid([-.1, 0., .1], [0., 25e3, 50e3], [[0., 30., 20.]] * 3)
        design = ArmDesign(
            [ActuatorSpec(.025, .5, BellowsModel()), ActuatorSpec(-.025, .5, GridModel(grid))],
            segment_count=3,
            )
        with self.assertRaisesRegex(ValueError, "Actuator 1"):
            SearchAttainability(design)(totask(design.neutral_shape()), settings=SearchSettings(starts=1))

    def test_bundled_equilibria(self):
        design = wrenchkit.load("bellows_only")
        search = SearchAttainability(design)
        pressures = sample_pressure_interior_beta(design.pressure_space, 3, seed=12)
        loads = [[0., 0., 0.], [.5, -1., 0.], [-1., .5, .02]]
        for kk, (p, q_tip) in enumerate(zip(pressures, loads)):
            result = EquilibriumSolver(design)(p, q_tip)
            self.assertTrue(result.converged, "Equilibrium at {} did not converge.".format(p))
            found = search(totask(result.shape, q_tip), settings=SearchSettings(starts=2), random_state=kk)
            self.assertTrue(found.s < 1e-4, "Search missed the equilibrium at {} (s={:.3e}).".format(p, found.s))

    def test_bad_method(self):
        with self.assertRaises(ValueError):
            self.search(self.task, settings=SearchSettings(method="Powell", starts=1))

    def test_functional_form(self):
        s, pressures, shape, result = search_attainability(
            self.design, self.task, settings=SearchSettings(starts=1), random_state=3,
            )
        self.assertEqual(s, result.s, "Tuple and result disagree on s.")
        self.assertEqual(shape.n, 3, "Best shape has the wrong segment count.")
        self.assertEqual(list(result.summary.index)[-1], "total", "Summary lacks a total row.")
        self.assertEqual(
            result.summary.loc["total", "evaluations"], result.evaluations,
            "Total evaluations disagree."
            )




if __name__ == "__main__":

    unittest.main()
