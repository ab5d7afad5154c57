"""
wrenchkit sample datasets: bundled arm designs, an actuator
characterization grid and the experiment files behind the comparison
batteries.
"""
import os.path

datasets_dir = os.path.dirname(__file__)

dataref = {
    "antagonistic": os.path.join(datasets_dir, "antagonistic.json"),
    "bellows_only": os.path.join(datasets_dir, "bellows_only.json"),
    "muscle_only": os.path.join(datasets_dir, "muscle_only.json"),
    "bellows_grid": os.path.join(datasets_dir, "bellows_grid.csv"),
    "antagonism_battery": os.path.join(datasets_dir, "antagonism_battery.json"),
    "shape_battery": os.path.join(datasets_dir, "shape_battery.json"),
    "bench_battery": os.path.join(datasets_dir, "bench_battery.json"),
    "shape_plan": os.path.join(datasets_dir, "shape_plan.json"),
    }
