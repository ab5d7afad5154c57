"""
Methods

assertEqual(a, b)
assertTrue(x)
assertFalse(x)
assertRaises(exc)
"""
import os.path
import tempfile
import unittest
import warnings
import numpy as np
import wrenchkit
from wrenchkit.actuators import (
    BellowsModel, ForceGrid, GridModel, McKibbenModel, bellows_force, bending_moment,
    grid_force, mckibben_force, tomodel, validate_model,
    )



# Closed-form surrogates ------------------------------------------------------

class ForceModelTestCase(unittest.TestCase):

    def test_mckibben_neutral(self):
        self.assertEqual(mckibben_force(0., 0.), 0., "Unpressurized neutral muscle produced force.")

    def test_mckibben_full_pressure(self):
        self.assertTrue(np.isclose(mckibben_force(0., 100e3), -60.), "Expected -F_m at full pressure.")

    def test_mckibben_free_contraction(self):
        for p in (0., 25e3, 100e3):
            self.assertTrue(
                np.isclose(mckibben_force(-.25, p), 80. * .25),
                "Active term did not vanish at free contraction for p={}.".format(p)
                )

    def test_mckibben_floor_below_free_contraction(self):
        # Only the passive spring remains past free contraction.
        forces = mckibben_force(-.3, np.asarray([0., 25e3, 50e3, 100e3]))
        self.assertTrue(np.allclose(forces, 80. * .3), "Pressure changed the force below free contraction.")
        self.assertTrue(validate_model(McKibbenModel()).ok, "Floor broke pressure monotonicity.")

    def test_mckibben_clamp_flags(self):
        force, flags = mckibben_force(np.asarray([-.5, 0., .2]), 50e3, return_flags=True)
        self.assertTrue(np.array_equal(flags, [True, False, True]), "Clamp flags are wrong.")
        # Passive spring continues beyond the admissible range.
        self.assertTrue(np.isclose(force[0], 80. * .5), "Passive term was clamped.")

    def test_bellows(self):
        self.assertEqual(bellows_force(0., 0.), 0., "Unpressurized neutral bellows produced force.")
        self.assertTrue(np.isclose(bellows_force(0., 50e3), 50.), "Expected 50 N at 50 kPa.")

    def test_bellows_slope(self):
        eps = np.linspace(0., .5, 6)
        diffs = np.diff(bellows_force(eps, 20e3))
        self.assertTrue(np.allclose(diffs, -40. * .1), "Bellows stiffness slope is not k_b.")

    def test_bending(self):
        self.assertEqual(bending_moment(0., 50e3), 0., "Straight actuator produced a moment.")
        self.assertTrue(np.isclose(bending_moment(1., 50e3), -.285), "Expected K at reference pressure.")
        self.assertTrue(np.isclose(bending_moment(2., 25e3), -.285), "Moment is not bilinear.")

    def test_bending_negative_pressure(self):
        with self.assertRaises(ValueError):
            bending_moment(1., -1.)

    def test_model_warning(self):
        model = McKibbenModel()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            model.force(.3, 50e3)
        self.assertTrue(len(caught)==1, "Clamped evaluation did not warn.")

    def test_tomodel(self):
        self.assertIsInstance(tomodel("bellows", A_eff=2e-3), BellowsModel)
        self.assertIsInstance(tomodel("mckibben"), McKibbenModel)
        with self.assertRaises(ValueError):
            tomodel("piston")



# Tabulated grids -------------------------------------------------------------

class ForceGridTestCase(unittest.TestCase):
    def setUp(self):
        self.grid = wrenchkit.load("bellows_grid")


    def test_node_value(self):
        self.assertTrue(np.isclose(self.grid(.1, 20000.), 16.), "Grid node value not reproduced.")

    def test_cell_center(self):
        center = self.grid(.05, 15000.)
        self.assertTrue(np.isclose(center, np.mean([10., 20., 6., 16.])), "Cell center is not the mean.")

    def test_matches_closed_form(self):
        eps, p = np.meshgrid(np.linspace(-.05, 1., 13), np.linspace(0., 50e3, 9))
        self.assertTrue(
            np.allclose(self.grid(eps, p), bellows_force(eps, p)),
            "Linear grid disagrees with the bellows surrogate."
            )

    def test_out_of_box(self):
        with self.assertRaisesRegex(ValueError, "strain"):
            grid_force(self.grid, 1.5, 1000.)
        with self.assertRaisesRegex(ValueError, "pressure"):
            grid_force(self.grid, .1, 60000.)

    def test_model_extrapolates(self):
        model = GridModel(self.grid)
        force, flags = model.force_with_flags(np.asarray([1.1]), np.asarray([0.]))
        self.assertTrue(flags[0], "Extrapolated query was not flagged.")
        self.assertTrue(np.isclose(force[0], -44.), "Extrapolation is not linear.")

    def test_csv_round_trip(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "grid.csv")
            self.grid.to_csv(path)
            other = ForceGrid.from_csv(path)
        self.assertTrue(np.array_equal(other.values, self.grid.values), "Grid values changed.")
        self.assertTrue(np.array_equal(other.pressure_axis, self.grid.pressure_axis), "Pressure axis changed.")

    def test_bad_axis(self):
        with self.assertRaises(ValueError):
            ForceGrid([0., 0., 1.], [0., 1.], np.zeros((3, 2)))



# Monotonicity validation -----------------------------------------------------

class ValidateModelTestCase(unittest.TestCase):
    def setUp(self):
        strains = np.linspace(-.1, .5, 10)
        pressures = np.linspace(0., 45e3, 10)
        values = pressures[None, :] / 1000. - 40. * strains[:, None]
        values[3, 5] = values[3, 4] - 1.
        self.strains, self.pressures = strains, pressures
        self.bad_grid = ForceGrid(strains, pressures, values)


    def test_bellows(self):
        result = validate_model(BellowsModel())
        self.assertTrue(result.ok, "Bellows model flagged as non-monotonic.")
        self.assertEqual(result.direction, "increasing", "Bellows force should increase with pressure.")

    def test_mckibben(self):
        result = validate_model(McKibbenModel())
        self.assertTrue(result.ok, "McKibben model flagged as non-monotonic.")
        self.assertEqual(result.direction, "decreasing", "Muscle force should decrease with pressure.")

    def test_inverted_cell(self):
        result = validate_model(
            GridModel(self.bad_grid), strain_samples=self.strains, pressure_samples=self.pressures,
            )
        self.assertFalse(result.ok, "Inverted grid cell not detected.")
        self.assertEqual(len(result.violations), 1, "Expected exactly one violating strain line.")
        row = result.violations.iloc[0]
        self.assertTrue(np.isclose(row["strain"], self.strains[3]), "Violation at the wrong strain.")
        self.assertTrue(
            np.isclose(row["violation_pressure"], self.pressures[5]), "Violation at the wrong pressure."
            )

    def test_non_finite_force(self):
        class _LeakyBellows(BellowsModel):
            def force_with_flags(self, eps, p):
                force, flags = super().force_with_flags(eps, p)
                return(np.where(np.asarray(p) > 40e3, np.nan, force), flags)
        result = validate_model(_LeakyBellows())
        self.assertFalse(result.ok, "Non-finite forces passed validation.")
        self.assertTrue(
            np.all(result.violations["direction"]=="non-finite"), "Non-finite lines not labelled."
            )
        self.assertTrue(
            np.all(result.violations["violation_pressure"] > 40e3), "Wrong first non-finite pressure."
            )

    def test_too_few_samples(self):
        with self.assertRaises(ValueError):
            validate_model(BellowsModel(), strain_samples=np.linspace(0., .1, 5))




if __name__ == "__main__":

    unittest.main()
