"""
Building blocks of attainability analysis: tasks, the pressure space,
requirement and attainable wrench sequences and pressure sampling. Hull
construction lives in ``hull``, the wrench-hull estimator in
``wrenchhull`` and the optimization baseline in ``search``.
"""
import collections
import itertools
import numpy as np
from ...arm import ArmShape, load_wrench_sequence, reactions
from ...lie import Wrench
from ...utils import check_random_state


Task = collections.namedtuple("Task", ["shape", "tip_load"])
Task.__doc__ = """
A desired centerline shape (``ArmShape``) paired with a tip load
(``Wrench``, world-aligned axes).
"""



def totask(shape, tip_load=(0., 0., 0.)):
    """
    Build a ``Task`` from an ``ArmShape`` (or N x 3 twists) and a tip load.
    """
    if not isinstance(shape, ArmShape):
        shape = ArmShape(shape)
    tip_load = np.asarray(tip_load, dtype=float)
    if tip_load.shape!=(3,) or not np.all(np.isfinite(tip_load)):
        raise ValueError("`tip_load` must be 3 finite components (fx, fy, m).")
    return(Task(shape=shape, tip_load=Wrench(*(float(v) for v in tip_load))))



class PressureSpace:
    """
    Axis-aligned box of admissible pressures [0, upper_a] per actuator.
    """
    def __init__(self, upper):
        upper = np.asarray(upper, dtype=float)
        if upper.ndim!=1 or upper.size < 1:
            raise ValueError("`upper` must be a non-empty vector of bounds.")
        if np.any(~(upper > 0)):
            raise ValueError("Every pressure bound must be positive, got {}.".format(upper))
        upper.setflags(write=False)
        self.upper = upper


    @property
    def dim(self):
        return(self.upper.size)


    def contains(self, pressures, atol=1e-9):
        pressures = np.asarray(pressures, dtype=float)
        return(bool(np.all(pressures >= -atol) and np.all(pressures <= self.upper + atol)))


    def to_unit(self, pressures):
        return(np.asarray(pressures, dtype=float) / self.upper)


    def from_unit(self, u):
        return(np.clip(np.asarray(u, dtype=float), 0., 1.) * self.upper)


    def __repr__(self):
        return("PressureSpace(upper={})".format(self.upper.tolist()))



def requirement_wrench_sequence(task):
    """
    Wrenches the arm must supply at nodes 1..N to hold the task shape
    under the task load: the negated load wrench sequence.

    Parameters
    ----------
    task: Task

    Returns
    -------
    np.ndarray
        N x 3 array.
    """
    return(-load_wrench_sequence(task.shape, task.tip_load))



def attainable_wrench_sequence(design, shape, pressures):
    """
    Reaction wrenches at nodes 1..N with strains and curvatures frozen at
    ``shape``. No equilibrium is solved.

    Parameters
    ----------
    design: wrenchkit.arm.ArmDesign

    shape: wrenchkit.arm.ArmShape

    pressures: array_like
        An M-vector, or an S x M batch of pressure vectors.

    Returns
    -------
    np.ndarray
        N x 3 array (S x N x 3 for a batch).
    """
    design.check_shape(shape)
    pressures = np.asarray(pressures, dtype=float)
    if pressures.ndim==1:
        pressures = design.check_pressures(pressures)
    elif not design.pressure_space.contains(pressures):
        raise ValueError("Pressure batch leaves the design's pressure space.")
    return(reactions(design, shape.twists, pressures))



def relative_sequence(sequence):
    """
    Differences of every node's wrench from node 1's wrench. Works on a
    single N x 3 sequence or an S x N x 3 batch.
    """
    sequence = np.asarray(sequence, dtype=float)
    return(sequence - sequence[..., :1, :])



def sample_pressure_edges(space, per_edge=5):
    """
    Evenly spaced samples on every 1-dimensional edge of the pressure box.
    An M-dimensional box has M * 2^(M-1) edges; shared corners are kept
    once.

    Parameters
    ----------
    space: PressureSpace

    per_edge: int
        Points per edge including both endpoints, at least 2. Defaults
        to 5.

    Returns
    -------
    np.ndarray
        K x M array of pressure vectors.
    """
    per_edge = int(per_edge)
    if per_edge < 2:
        raise ValueError("`per_edge` must be at least 2, got {}.".format(per_edge))

    upper, dim = space.upper, space.dim
    samples = {}
    for axis in range(dim):
        others = [ii for ii in range(dim) if ii!=axis]
        for corner in itertools.product((0., 1.), repeat=dim - 1):
            for tt in np.linspace(0., 1., per_edge):
                u = np.empty(dim)
                u[others] = corner
                u[axis] = tt
                point = tuple(u * upper)
                samples.setdefault(point, None)
    return(np.asarray(list(samples), dtype=float))



def sample_pressure_interior_beta(space, count, alpha=.3, beta=.3, seed=None):
    """
    Independent Beta(alpha, beta) draws per actuator scaled to [0, upper].
    The U-shaped default concentrates samples near the boundary.

    Parameters
    ----------
    space: PressureSpace

    count: int
        Number of samples, at least 1.

    alpha, beta: float
        Beta distribution parameters. Default to 0.3.

    seed: int or np.random.RandomState
        Seed for reproducible draws.

    Returns
    -------
    np.ndarray
        count x M array.
    """
    if int(count) < 1:
        raise ValueError("`count` must be at least 1, got {}.".format(count))
    prng = check_random_state(seed)
    return(prng.beta(alpha, beta, size=(int(count), space.dim)) * space.upper)
