"""
Methods

assertEqual(a, b)
assertTrue(x)
assertFalse(x)
assertRaises(exc)
assertRaisesRegex(exc, r)
"""
import itertools
import unittest
import warnings
import numpy as np
import scipy.optimize
import wrenchkit
from wrenchkit.actuators import BellowsModel, ForceGrid, GridModel, McKibbenModel
from wrenchkit.arm import ActuatorSpec, ArmDesign
from wrenchkit.estimators.attainability import (
    PressureSpace, relative_sequence, requirement_wrench_sequence, sample_pressure_edges,
    sample_pressure_interior_beta, totask,
    )
from wrenchkit.estimators.attainability.hull import (
    WrenchHull, hull_distance, hull_projection, hulls_from_frame,
    )
from wrenchkit.estimators.attainability.wrenchhull import (
    WrenchHullAttainability, analyze, check_convexity,
    )
from wrenchkit.estimators.statics import EquilibriumSolver, continuation_solve



def _nnls_distance(vertices, point, rho=1e8):
    # Penalized convex-weight least squares as an independent reference.
    A = np.vstack([vertices.T, np.sqrt(rho) * np.ones(len(vertices))])
    b = np.append(point, np.sqrt(rho))
    lam = scipy.optimize.nnls(A, b)[0]
    return(float(np.linalg.norm(lam @ vertices - point)))



# Pressure sampling -----------------------------------------------------------

class PressureSamplingTestCase(unittest.TestCase):
    def setUp(self):
        self.space4 = PressureSpace([50e3, 50e3, 100e3, 100e3])
        self.space2 = PressureSpace([50e3, 100e3])


    def test_edge_count(self):
        self.assertEqual(len(sample_pressure_edges(self.space4, 5)), 112, "Expected 112 samples for M=4.")

    def test_corners(self):
        corners = sample_pressure_edges(self.space2, 2)
        self.assertEqual(len(corners), 4, "Expected the 4 corners of a square.")
        self.assertEqual(len(sample_pressure_edges(self.space4, 2)), 16, "Expected 16 corners for M=4.")

    def test_edge_bounds(self):
        samples = sample_pressure_edges(self.space4, 5)
        self.assertTrue(self.space4.contains(samples), "Edge samples left the box.")
        # Every sample has at least M - 1 coordinates on a bound.
        on_bound = np.isclose(samples, 0.) | np.isclose(samples, self.space4.upper)
        self.assertTrue(np.all(on_bound.sum(axis=1) >= 3), "A sample is off the box edges.")

    def test_bad_per_edge(self):
        with self.assertRaises(ValueError):
            sample_pressure_edges(self.space2, 1)

    def test_beta_determinism(self):
        a = sample_pressure_interior_beta(self.space4, 50, seed=516)
        b = sample_pressure_interior_beta(self.space4, 50, seed=516)
        self.assertTrue(np.array_equal(a, b), "Seeded Beta draws differ.")
        self.assertTrue(self.space4.contains(a), "Beta draws left the box.")

    def test_beta_mean(self):
        draws = sample_pressure_interior_beta(self.space2, 20000, seed=3) / self.space2.upper
        self.assertTrue(np.allclose(draws.mean(axis=0), .5, atol=.02), "Symmetric Beta mean is not 0.5.")

    def test_space_validation(self):
        with self.assertRaises(ValueError):
            PressureSpace([50e3, 0.])



# Hull construction and distance ----------------------------------------------

class WrenchHullTestCase(unittest.TestCase):
    def setUp(self):
        prng = np.random.RandomState(1989)
        self.cloud = prng.normal(size=(40, 3))
        self.queries = prng.uniform(-4., 4., size=(30, 3))
        self.tetra = np.asarray([[0., 0., 0.], [1., 0., 0.], [0., 1., 0.], [0., 0., 1.]])


    def test_full_rank(self):
        hull = WrenchHull.from_points(self.cloud)
        self.assertEqual(hull.degenerate_rank, 3, "Random cloud should be full rank.")
        inside = hull.equations[:, :3] @ self.cloud.T + hull.equations[:, 3:]
        self.assertTrue(np.all(inside <= 1e-9), "Input point outside its own hull.")

    def test_against_reference(self):
        hull = WrenchHull.from_points(self.cloud)
        for w in self.queries:
            self.assertTrue(
                abs(hull_distance(hull, w) - _nnls_distance(hull.vertices, w)) < 1e-4,
                "Distance disagrees with the reference for {}.".format(w)
                )

    def test_tetrahedron(self):
        hull = WrenchHull.from_points(self.tetra)
        self.assertTrue(np.isclose(hull_distance(hull, [-1., 0., 0.]), 1.), "Distance to a face is wrong.")
        self.assertTrue(
            np.isclose(hull_distance(hull, [1., 1., 1.]), np.sqrt(3) * 2 / 3),
            "Distance to the slanted face is wrong."
            )
        self.assertTrue(hull_distance(hull, [.1, .1, .1]) < 1e-10, "Interior point has positive distance.")

    def test_vertex_and_centroid(self):
        hull = WrenchHull.from_points(self.cloud)
        self.assertEqual(hull_distance(hull, hull.vertices[3]), 0., "Vertex query is not zero.")
        self.assertTrue(hull_distance(hull, hull.center) < 1e-10, "Centroid query is not zero.")

    def test_projection_weights(self):
        hull = WrenchHull.from_points(self.tetra)
        dist, lam, nearest = hull_projection(hull, [2., 0., 0.])
        self.assertTrue(np.isclose(dist, 1.), "Distance to the x vertex is wrong.")
        self.assertTrue(np.isclose(lam.sum(), 1.) and np.all(lam >= 0.), "Weights are not convex.")
        self.assertTrue(np.allclose(nearest, [1., 0., 0.]), "Nearest point is wrong.")

    def test_metric(self):
        hull = WrenchHull.from_points(self.tetra)
        self.assertTrue(
            np.isclose(hull_distance(hull, [-1., 0., 0.], weights=[4., 1., 1.]), 2.),
            "Weighted distance is not scaled."
            )
        with self.assertRaises(ValueError):
            hull_distance(hull, [0., 0., 0.], weights=[1., 0., 1.])

    def test_planar(self):
        square = np.asarray([[0., 0., 0.], [1., 0., 0.], [0., 1., 0.], [1., 1., 0.], [.5, .5, 0.]])
        hull = WrenchHull.from_points(square)
        self.assertEqual(hull.degenerate_rank, 2, "Square should be rank 2.")
        self.assertEqual(len(hull.vertices), 4, "Center point is not a vertex.")
        self.assertTrue(np.isclose(hull_distance(hull, [.5, .5, 2.]), 2.), "Off-plane distance is wrong.")
        self.assertTrue(np.isclose(hull_distance(hull, [2., .5, 0.]), 1.), "In-plane distance is wrong.")

    def test_collinear(self):
        hull = WrenchHull.from_points([[0., 0., 0.], [1., 1., 0.], [2., 2., 0.]])
        self.assertEqual(hull.degenerate_rank, 1, "Segment should be rank 1.")
        self.assertTrue(hull_distance(hull, [1.5, 1.5, 0.]) < 1e-10, "Point on the segment is outside.")
        self.assertTrue(np.isclose(hull_distance(hull, [0., 2., 0.]), np.sqrt(2)), "Perpendicular distance is wrong.")
        self.assertTrue(np.isclose(hull_distance(hull, [3., 2., 0.]), 1.), "Endpoint distance is wrong.")

    def test_single_point(self):
        hull = WrenchHull.from_points([[1., 2., 3.]] * 3)
        self.assertEqual(hull.degenerate_rank, 0, "Repeated point should be rank 0.")
        self.assertTrue(np.isclose(hull_distance(hull, [1., 2., 4.]), 1.), "Point distance is wrong.")
        with self.assertRaises(ValueError):
            WrenchHull.from_points([[1., 2., 3.]] * 3, min_distinct=2)

    def test_diameter(self):
        hull = WrenchHull.from_points(self.tetra)
        self.assertTrue(np.isclose(hull.diameter, np.sqrt(2)), "Tetrahedron diameter is wrong.")



# Wrench-hull analysis --------------------------------------------------------

class WrenchHullAttainabilityTestCase(unittest.TestCase):
    def setUp(self):
        self.design = wrenchkit.load("antagonistic")
        self.analysis = WrenchHullAttainability(self.design)


    def test_neutral_zero_load(self):
        report = self.analysis(totask(self.design.neutral_shape()))
        self.assertTrue(report.attainable, "Neutral shape without load should be attainable.")
        self.assertEqual(report.absolute_unattainability, 0., "Expected zero absolute distance.")
        self.assertEqual(report.edge_samples.shape[0], 112, "Expected 112 edge samples.")

    def test_solved_shape(self):
        # Any equilibrium reached inside the pressure box is attainable.
        q_tip = (1., -2., .05)
        pressures = [30e3, 10e3, 20e3, 70e3]
        result = EquilibriumSolver(self.design)(pressures, q_tip)
        self.assertTrue(result.converged, "Oracle equilibrium did not converge.")
        report = self.analysis(totask(result.shape, q_tip))
        self.assertTrue(report.absolute_unattainability < 1e-4, "Solved shape is absolutely unattainable.")
        self.assertTrue(report.relative_unattainability < 1e-4, "Solved shape is relatively unattainable.")
        self.assertTrue(
            self.design.pressure_space.contains(report.witness_pressures),
            "Witness pressures left the pressure box."
            )

    def test_large_load(self):
        report = self.analysis(totask(self.design.neutral_shape(), (0., -1e3, 0.)))
        self.assertFalse(report.attainable, "A 1 kN load should be unattainable.")
        self.assertTrue(report.absolute_unattainability > 1., "Expected a large absolute distance.")

    def test_requirement(self):
        task = totask(self.design.neutral_shape(), (0., -2., 0.))
        req = requirement_wrench_sequence(task)
        self.assertTrue(np.isclose(req[0, 2], 2. * .5), "Base requirement should be +F L.")
        self.assertTrue(np.allclose(relative_sequence(req)[0], 0.), "Relative node 1 is not zero.")

    def test_node_one_relative(self):
        report = self.analysis(totask(self.design.neutral_shape(), (3., -1., 0.)))
        self.assertEqual(report.per_node_relative[0], 0., "Relative distance at node 1 must vanish.")

    def test_without_shear_balance(self):
        task = totask(self.design.neutral_shape(), (0., -2., 0.))
        balanced = self.analysis(task)
        raw = self.analysis(task, balance_shear=False)
        self.assertTrue(
            raw.absolute_unattainability > balanced.absolute_unattainability,
            "Unbalanced shear should not reduce unattainability."
            )

    def test_epsilon(self):
        task = totask(self.design.neutral_shape(), (0., -1e3, 0.))
        report = self.analysis(task, epsilon=1e9)
        self.assertTrue(report.attainable, "A huge epsilon should accept every task.")

    def test_summary(self):
        report = analyze(self.design, totask(self.design.neutral_shape(), (0., -2., 0.)))
        summ = report.summary
        self.assertEqual(list(summ.index)[-1], "total", "Summary lacks a total row.")
        self.assertTrue(
            np.isclose(summ.loc["total", "absolute"], report.absolute_unattainability),
            "Total row disagrees with the absolute sum."
            )
        self.assertTrue("attainable = " in report.to_text(), "Text export lacks the verdict.")

    def test_hulls_round_trip(self):
        report = self.analysis(totask(self.design.neutral_shape(), (0., -2., 0.)))
        rebuilt = hulls_from_frame(report.hulls_frame(), "absolute")
        for hull, other in zip(report.absolute_hulls, rebuilt):
            self.assertTrue(np.allclose(hull.vertices, other.vertices), "Hull vertices changed.")

    def test_rank_one_design(self):
        # A constant-force muscle leaves only the bellows line.
        design = ArmDesign([
            ActuatorSpec(.02, .5, BellowsModel(bending_K=0.)),
            ActuatorSpec(-.02, .5, McKibbenModel(F_m=0., bending_K=0.)),
            ])
        report = WrenchHullAttainability(design)(totask(design.neutral_shape()))
        self.assertTrue(np.all(report.summary["rank_abs"].iloc[:-1]==1), "Expected rank-1 hulls.")
        self.assertTrue(report.attainable, "Zero requirement lies on the line.")
        off = WrenchHullAttainability(design)(totask(design.neutral_shape(), (0., 0., 1.)))
        self.assertFalse(off.attainable, "Pure moment is off the attainable line.")

    def test_convexity(self):
        shape = self.design.shape(np.tile([.52, 0., .8], (5, 1)))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            df = check_convexity(self.design, shape, count=60, seed=7)
        self.assertFalse(
            any("relative hulls" in str(w.message) for w in caught), "Relative hulls flagged as non-convex."
            )
        self.assertEqual(int(df["violations"].sum()), 0, "Interior wrenches escaped the hulls.")
        self.assertEqual(len(df), 10, "Expected one row per family and node.")



# Model screening -------------------------------------------------------------

class NonMonotoneModelTestCase(unittest.TestCase):
    def setUp(self):
        # Force rises to 30 N at 25 kPa then falls back to 20 N.
        grid = ForceGrid([-.1, 0., .1], [0., 25e3, 50e3], [[0., 30., 20.]] * 3)
        self.design = ArmDesign(
            [ActuatorSpec(.025, .5, GridModel(grid)), ActuatorSpec(-.025, .5, BellowsModel())],
            segment_count=3, name="fading",
            )
        self.task = totask(self.design.neutral_shape())


    def test_analysis_rejects(self):
        with self.assertRaisesRegex(ValueError, "Actuator 0 \\(grid\\)"):
            WrenchHullAttainability(self.design)(self.task)

    def test_convexity_rejects(self):
        with self.assertRaisesRegex(ValueError, "Actuator 0"):
            check_convexity(self.design, self.task.shape, count=10)

    def test_monotone_passes(self):
        design = ArmDesign(
            [ActuatorSpec(.025, .5, GridModel(wrenchkit.load("bellows_grid"))),
             ActuatorSpec(-.025, .5, BellowsModel())],
            segment_count=3,
            )
        report = WrenchHullAttainability(design)(totask(design.neutral_shape()))
        self.assertTrue(report.attainable, "Monotonic grid design was rejected.")



# Distance properties ---------------------------------------------------------

def _segment_distance(a, b, point):
    ab = b - a
    tt = np.clip((point - a) @ ab / (ab @ ab), 0., 1.)
    return(float(np.linalg.norm(a + tt * ab - point)))



def _tetrahedron_distance(tetra, point):
    # Outside the solid the nearest point lies on a facet, an edge or a vertex.
    bary = np.linalg.solve(np.vstack([tetra.T, np.ones(4)]), np.append(point, 1.))
    if np.all(bary >= 0.):
        return(0.)
    dists = [float(np.linalg.norm(v - point)) for v in tetra]
    dists += [_segment_distance(tetra[ii], tetra[jj], point) for ii, jj in itertools.combinations(range(4), 2)]
    for face in itertools.combinations(range(4), 3):
        a, b, c = tetra[list(face)]
        normal = np.cross(b - a, c - a)
        normal = normal / np.linalg.norm(normal)
        height = (point - a) @ normal
        coef = np.linalg.lstsq(np.column_stack([b - a, c - a]), point - height * normal - a, rcond=None)[0]
        if coef.min() >= 0. and coef.sum() <= 1.:
            dists.append(abs(float(height)))
    return(min(dists))



class DistancePropertiesTestCase(unittest.TestCase):
    def setUp(self):
        self.prng = np.random.RandomState(2022)
        self.cloud = self.prng.normal(size=(40, 3))


    def test_random_tetrahedra(self):
        worst, outside = 0., 0
        for _ in range(100):
            tetra = self.prng.normal(size=(4, 3))
            while abs(np.linalg.det(tetra[1:] - tetra[0])) < .3:
                tetra = self.prng.normal(size=(4, 3))
            point = self.prng.uniform(-3., 3., size=3)
            expected = _tetrahedron_distance(tetra, point)
            outside += expected > 0.
            worst = max(worst, abs(hull_distance(WrenchHull.from_points(tetra), point) - expected))
        self.assertTrue(worst < 1e-8, "Largest disagreement with facet projection is {:.3e}.".format(worst))
        self.assertTrue(outside > 50, "Too few queries fell outside their tetrahedron.")

    def test_lipschitz(self):
        hull = WrenchHull.from_points(self.cloud)
        a = self.prng.uniform(-5., 5., size=(200, 3))
        b = a + self.prng.normal(scale=.5, size=(200, 3))
        for pa, pb in zip(a, b):
            gap = abs(hull_distance(hull, pa) - hull_distance(hull, pb))
            self.assertTrue(
                gap <= np.linalg.norm(pa - pb) + 1e-9,
                "Distance changed by {} over a step of {}.".format(gap, np.linalg.norm(pa - pb))
                )

    def test_finer_edges(self):
        design = wrenchkit.load("antagonistic")
        shape = design.shape(np.tile([.5, 0., 1.], (5, 1)))
        analysis = WrenchHullAttainability(design)
        for q_tip in self.prng.uniform(-1., 1., size=(10, 3)) * [10., 10., 1.]:
            task = totask(shape, q_tip)
            coarse, fine = analysis(task, per_edge=3), analysis(task, per_edge=5)
            self.assertTrue(
                fine.absolute_unattainability <= coarse.absolute_unattainability + 1e-9,
                "Finer edges increased the absolute distance for {}.".format(q_tip)
                )
            self.assertTrue(
                fine.relative_unattainability <= coarse.relative_unattainability + 1e-9,
                "Finer edges increased the relative distance for {}.".format(q_tip)
                )



# Solved equilibria and interior sampling -------------------------------------

class BundledDesignTestCase(unittest.TestCase):
    def setUp(self):
        self.names = ["antagonistic", "bellows_only", "muscle_only"]
        self.battery = wrenchkit.load("shape_battery")


    def test_equilibria_attainable(self):
        for name in self.names:
            design = wrenchkit.load(name)
            analysis = WrenchHullAttainability(design)
            pressures = sample_pressure_interior_beta(design.pressure_space, 50, seed=7)
            loads = np.random.RandomState(8).uniform(-1., 1., size=(50, 3)) * [1., 1., .05]
            converged = 0
            for p, q_tip in zip(pressures, loads):
                result = continuation_solve(design, p, q_tip, steps=5)
                if not result.converged:
                    continue
                converged += 1
                report = analysis(totask(result.shape, q_tip))
                self.assertTrue(
                    report.absolute_unattainability < 1e-4 and report.relative_unattainability < 1e-4,
                    "{} equilibrium at {} is unattainable ({:.3e}, {:.3e}).".format(
                        name, p, report.absolute_unattainability, report.relative_unattainability
                        )
                    )
            self.assertTrue(converged >= 40, "Only {} of 50 {} solves converged.".format(converged, name))

    def test_interior_inside_hulls(self):
        for design in self.battery.designs:
            for kshape, (label, _) in enumerate(self.battery.task_shapes):
                df = check_convexity(
                    design, self.battery.shape(kshape, design), count=200, seed=kshape, warn=False,
                    )
                dfabs = df[df["family"]=="absolute"]
                dfrel = df[df["family"]=="relative"]
                self.assertEqual(
                    int(dfabs["violations"].sum()), 0,
                    "Interior wrenches escaped the absolute hulls of {} at {}.".format(design.name, label)
                    )
                self.assertTrue(
                    dfrel["violations"].sum() < .001 * dfrel["checks"].sum(),
                    "Relative hulls of {} at {} missed {} interior wrenches.".format(
                        design.name, label, int(dfrel["violations"].sum())
                        )
                    )



if __name__ == "__main__":

    unittest.main()
