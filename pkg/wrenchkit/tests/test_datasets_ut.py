"""
Methods

assertEqual(a, b)
assertTrue(x)
assertIsInstance(a, b)
"""
import os
import unittest
import numpy as np
import wrenchkit
from wrenchkit.actuators import ForceGrid, validate_model
from wrenchkit.arm import ArmDesign
from wrenchkit.harness import ExperimentSpec, ShapePlanSpec, bench, compare, hull_search_consistency



# Ensure sample datasets have been properly loaded ----------------------------

class DatasetsTestCase(unittest.TestCase):

    def setUp(self):
        self.dactuators = {"antagonistic": 4, "bellows_only": 2, "muscle_only": 2}
        self.dcells = {"antagonism_battery": 134, "shape_battery": 900, "bench_battery": 67}


    def test_names(self):
        self.assertEqual(
            sorted(wrenchkit.get_datasets()),
            sorted(list(self.dactuators) + list(self.dcells) + ["bellows_grid", "shape_plan"]),
            "Unexpected dataset names."
            )

    def test_designs(self):
        for name, count in self.dactuators.items():
            design = wrenchkit.load(name)
            self.assertIsInstance(design, ArmDesign)
            self.assertEqual(design.n_actuators, count, "Issue detected with {} design.".format(name))
            self.assertEqual(design.name, name, "Design name not read for {}.".format(name))

    def test_designs_monotone(self):
        for name in self.dactuators:
            for act in wrenchkit.load(name).actuators:
                self.assertTrue(validate_model(act.model).ok, "Non-monotonic actuator in {}.".format(name))

    def test_grid(self):
        grid = wrenchkit.load("bellows_grid")
        self.assertIsInstance(grid, ForceGrid)
        self.assertEqual(grid.values.shape, (7, 6), "Issue detected with bellows_grid.")
        self.assertTrue(np.isclose(grid.values.sum(), 438.), "bellows_grid values changed.")

    def test_experiments(self):
        for name, count in self.dcells.items():
            spec = wrenchkit.load(name)
            self.assertIsInstance(spec, ExperimentSpec)
            self.assertEqual(len(spec.cells()), count, "Issue detected with {} battery.".format(name))

    def test_shape_plan(self):
        self.assertIsInstance(wrenchkit.load("shape_plan"), ShapePlanSpec)

    def test_unknown(self):
        with self.assertRaises(ValueError):
            wrenchkit.load("raa")



# Bundled battery results -----------------------------------------------------

class BatteryResultsTestCase(unittest.TestCase):

    def test_antagonism_ranking(self):
        medians = compare(wrenchkit.load("antagonism_battery")).medians["absolute"]
        self.assertTrue(
            medians[("antagonistic", "high_reach")] < medians[("bellows_only", "high_reach")],
            "Adding muscles did not lower the median absolute unattainability."
            )

    def test_tip_curl_ranking(self):
        medians = compare(wrenchkit.load("shape_battery")).medians["absolute"]
        tip_curl = {name: medians[(name, "tip_curl")] for name in ("antagonistic", "bellows_only", "muscle_only")}
        self.assertEqual(min(tip_curl, key=tip_curl.get), "bellows_only", "Unexpected best design: {}.".format(tip_curl))
        self.assertEqual(max(tip_curl, key=tip_curl.get), "muscle_only", "Unexpected worst design: {}.".format(tip_curl))

    @unittest.skipUnless(os.environ.get("WRENCHKIT_FULL_BATTERIES"), "runs the search on every cell")
    def test_antagonism_agreement(self):
        spec = wrenchkit.load("antagonism_battery")
        spec.analysis = "both"
        consistency = hull_search_consistency(compare(spec, threads=4))
        for (design, shape), rho in consistency["rho"].items():
            self.assertTrue(rho > .5, "{} at {}: rho={:.3f}.".format(design, shape, rho))

    @unittest.skipUnless(os.environ.get("WRENCHKIT_FULL_BATTERIES"), "runs the search on every cell")
    def test_bench_speedup(self):
        report = bench(wrenchkit.load("bench_battery"))
        self.assertTrue(report.speedup >= 10., "Speedup is only {:.1f}.".format(report.speedup))




if __name__ == "__main__":

    unittest.main()
