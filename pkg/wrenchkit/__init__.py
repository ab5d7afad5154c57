"""
                                    _     _ _
 __      ___ __ ___ _ __   ___| |__ | | _(_) |_
 \ \ /\ / / '__/ _ \ '_ \ / __| '_ \| |/ / | __|
  \ V  V /| | |  __/ | | | (__| | | |   <| | |_
   \_/\_/ |_|  \___|_| |_|\___|_| |_|_|\_\_|\__|

Task attainability analysis for planar pneumatic soft arms
"""
from functools import partial
from .datasets import dataref
from .arm import ActuatorSpec, ArmDesign, ArmShape, todesign
from .actuators import tomodel, validate_model
from .estimators.attainability import Task, totask
from .utils import _load, _get_datasets

# Initialize dataset loading utilities.
load = partial(_load, dataref=dataref)
get_datasets = partial(_get_datasets, dataref=dataref)

__version__ = "0.1.0"
