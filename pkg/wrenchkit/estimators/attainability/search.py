"""
This module contains the class definition of ``SearchAttainability``, the
optimization baseline for attainability: search the pressure box for the
pressures whose loaded equilibrium shape best matches the task shape. Every
objective evaluation runs a full equilibrium solve, which makes this check
far slower than the wrench-hull analysis.
"""
import collections
import concurrent.futures
import logging
import time
import numpy as np
import pandas as pd
from scipy.optimize import minimize
from ...lie import compose, inverse, wrap_angle
from ...utils import check_random_state
from ..statics import EquilibriumSolver, continuation_solve

logger = logging.getLogger(__name__)


SearchSettings = collections.namedtuple(
    "SearchSettings",
    ["method", "starts", "max_evaluations", "xatol", "fatol", "target", "inset",
     "initial_step", "fd_eps", "continuation_steps", "solve_settings", "threads"],
    defaults=["Nelder-Mead", 5, 300, 1e-5, 1e-14, 1e-12, .1, .15, 1e-4, 5, None, 1],
    )
SearchSettings.__doc__ = """
Search baseline settings.

method: "Nelder-Mead" (derivative free) or "L-BFGS-B" (finite-difference gradient).
starts: number of multi-start points; the box center plus inset corners.
max_evaluations: objective evaluation cap per start.
xatol, fatol: Nelder-Mead termination tolerances on normalized pressures and objective.
target: objective value at which the search stops early.
inset: distance of corner starts from the box faces, in normalized units.
initial_step: edge length of the initial Nelder-Mead simplex, normalized.
fd_eps: finite-difference step for "L-BFGS-B".
continuation_steps: ramp increments used when a warm-started solve fails.
solve_settings: SolveSettings for the inner equilibrium solves.
threads: worker threads for the multi-start branches.
"""

# Objective value assigned to failed solves in gradient mode.
_GRADIENT_PENALTY = 1e10



class ShapeErrorWeights:
    """
    Per-node 3 x 3 symmetric positive semidefinite weights applied to pose
    differences (x, y, theta) at nodes 2..N+1.
    """
    def __init__(self, matrices, tol=1e-12):
        """
        Parameters
        ----------
        matrices: array_like
            N x 3 x 3 weights.

        tol: float
            Tolerance on symmetry and on negative eigenvalues.
        """
        matrices = np.array(matrices, dtype=float)
        if matrices.ndim!=3 or matrices.shape[1:]!=(3, 3):
            raise ValueError("Weights must have shape (N, 3, 3), got {}.".format(matrices.shape))
        if not np.allclose(matrices, np.swapaxes(matrices, 1, 2), atol=tol, rtol=0.):
            raise ValueError("Shape error weights must be symmetric.")
        mineig = np.linalg.eigvalsh(matrices).min(axis=1)
        if np.any(mineig < -tol):
            raise ValueError(
                "Shape error weights must be positive semidefinite; node {} has eigenvalue {:.3g}.".format(
                    int(np.argmin(mineig)) + 2, mineig.min()
                    )
                )
        matrices.setflags(write=False)
        self.matrices = matrices


    @property
    def n(self):
        return(self.matrices.shape[0])


    @classmethod
    def identity(cls, n):
        return(cls(np.tile(np.eye(3), (int(n), 1, 1))))


    @classmethod
    def position_only(cls, n):
        return(cls(np.tile(np.diag([1., 1., 0.]), (int(n), 1, 1))))


    @classmethod
    def tip_only(cls, n):
        mats = np.zeros((int(n), 3, 3))
        mats[-1] = np.eye(3)
        return(cls(mats))


    @classmethod
    def zeros(cls, n):
        return(cls(np.zeros((int(n), 3, 3))))


    @classmethod
    def named(cls, name, n):
        """
        Look up a preset by name: identity, position_only, tip_only or zeros.
        """
        presets = {"identity": cls.identity, "position_only": cls.position_only,
                   "tip_only": cls.tip_only, "zeros": cls.zeros}
        if name not in presets:
            raise ValueError("`{}` is not a valid weight preset.".format(name))
        return(presets[name](n))



def pose_errors(shape_a, shape_b):
    """
    N x 3 group differences pose(a_i^-1 * b_i) at nodes 2..N+1, with the
    angle wrapped to (-pi, pi].
    """
    if shape_a.n!=shape_b.n:
        raise ValueError("Shapes have {} and {} segments.".format(shape_a.n, shape_b.n))
    errs = np.asarray([
        compose(inverse(ga), gb) for ga, gb in zip(shape_a.poses[1:], shape_b.poses[1:])
        ])
    errs[:, 2] = wrap_angle(errs[:, 2])
    return(errs)



def shape_error(shape_a, shape_b, weights=None):
    """
    Weighted pose mismatch sum_i e_i^T K_i e_i over nodes 2..N+1, where e_i
    is the group difference of ``shape_a``'s and ``shape_b``'s poses.

    Parameters
    ----------
    shape_a: ArmShape
        Typically the equilibrium shape.

    shape_b: ArmShape
        Typically the task shape.

    weights: ShapeErrorWeights
        Defaults to identity weights.

    Returns
    -------
    float
    """
    errs = pose_errors(shape_a, shape_b)
    weights = ShapeErrorWeights.identity(shape_a.n) if weights is None else weights
    if weights.n!=shape_a.n:
        raise ValueError("Weights cover {} nodes, shapes have {}.".format(weights.n, shape_a.n))
    return(float(np.einsum("ni,nij,nj->", errs, weights.matrices, errs)))



class _TargetReached(Exception):
    pass



class SearchAttainability:
    """
    Multi-start box-constrained minimization of the shape error over the
    pressure space, each evaluation solving the loaded equilibrium.
    """
    def __init__(self, design):
        """
        Parameters
        ----------
        design: wrenchkit.arm.ArmDesign
        """
        self.design = design
        self.solver = EquilibriumSolver(design)


    def start_points(self, settings, random_state=None):
        """
        Normalized start points: the box center followed by inset corners
        drawn without replacement.
        """
        dim = self.design.n_actuators
        prng = check_random_state(random_state)
        corners = np.asarray(list(np.ndindex(*(2,) * dim)), dtype=float)
        order = prng.permutation(corners.shape[0])
        ncorners = min(max(int(settings.starts) - 1, 0), corners.shape[0])
        inset = settings.inset + (1. - 2. * settings.inset) * corners[order[:ncorners]]
        return(np.vstack([np.full((1, dim), .5), inset]))


    def _branch(self, task, u0, weights, settings):
        """
        Run one start. Returns a dict describing the branch's best point.
        """
        space = self.design.pressure_space
        state = {
            "warm": None, "evals": 0, "failed": 0, "best": np.inf, "best_p": None,
            "best_result": None, "last_result": None,
            }
        penalty = np.inf if settings.method=="Nelder-Mead" else _GRADIENT_PENALTY

        def objective(u):
            pressures = space.from_unit(u)
            state["evals"] += 1
            result = self.solver(pressures, task.tip_load, initial_shape=state["warm"],
                                 settings=settings.solve_settings)
            if not result.converged:
                result = continuation_solve(
                    self.design, pressures, task.tip_load, steps=settings.continuation_steps,
                    settings=settings.solve_settings,
                    )
            state["last_result"] = result
            if not result.converged:
                state["failed"] += 1
                logger.debug("Equilibrium failed at pressures %s; objective set to inf.", pressures)
                return(penalty)
            state["warm"] = result.shape
            value = shape_error(result.shape, task.shape, weights)
            if value < state["best"]:
                state["best"], state["best_p"], state["best_result"] = value, pressures, result
            if value <= settings.target:
                raise _TargetReached
            return(value)

        u0 = np.asarray(u0, dtype=float)
        bounds = [(0., 1.)] * u0.size
        try:
            if settings.method=="Nelder-Mead":
                direction = np.where(u0 <= .5, 1., -1.)
                simplex = np.vstack([u0, u0 + settings.initial_step * np.diag(direction)])
                minimize(objective, u0, method="Nelder-Mead", bounds=bounds, options={
                    "maxfev": settings.max_evaluations, "xatol": settings.xatol,
                    "fatol": settings.fatol, "initial_simplex": simplex,
                    })
            elif settings.method=="L-BFGS-B":
                minimize(objective, u0, method="L-BFGS-B", bounds=bounds, options={
                    "maxfun": settings.max_evaluations, "eps": settings.fd_eps,
                    })
            else:
                raise ValueError("`{}` is not a valid search method.".format(settings.method))
        except _TargetReached:
            pass
        return(state)


    def __call__(self, task, weights=None, settings=None, random_state=None):
        """
        Search for the pressures that best realize ``task``.

        Parameters
        ----------
        task: Task

        weights: ShapeErrorWeights
            Defaults to identity weights.

        settings: SearchSettings
            Defaults to ``SearchSettings()``.

        random_state: int or np.random.RandomState
            Seeds the choice of corner starts.

        Returns
        -------
        SearchResult
        """
        settings = SearchSettings() if settings is None else settings
        self.design.check_shape(task.shape)
        self.design.check_models()
        weights = ShapeErrorWeights.identity(task.shape.n) if weights is None else weights
        starts = self.start_points(settings, random_state=random_state)

        t0 = time.perf_counter()
        branches = []
        if int(settings.threads) > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=int(settings.threads)) as executor:
                branches = list(executor.map(
                    lambda u0: self._branch(task, u0, weights, settings), starts
                    ))
        else:
            for u0 in starts:
                branches.append(self._branch(task, u0, weights, settings))
                if branches[-1]["best"] <= settings.target:
                    break
        wall_time = time.perf_counter() - t0

        dfstarts = pd.DataFrame.from_records([
            {"start": ii, "s": bb["best"], "evaluations": bb["evals"], "failed": bb["failed"]}
            for ii, bb in enumerate(branches)
            ]).set_index("start")

        finite = [bb for bb in branches if np.isfinite(bb["best"])]
        if not finite:
            raise RuntimeError(
                "Every equilibrium solve failed during the search ({} evaluations).".format(
                    int(dfstarts["evaluations"].sum())
                    )
                )
        best = min(finite, key=lambda bb: bb["best"])
        logger.info(
            "Search finished: s=%.3e after %d evaluations in %.2f s.", best["best"],
            int(dfstarts["evaluations"].sum()), wall_time,
            )

        return(SearchResult(
            s=float(best["best"]), pressures=best["best_p"], equilibrium=best["best_result"],
            task=task, starts=dfstarts, wall_time=wall_time, settings=settings,
            ))



class SearchResult:
    """
    Output of ``SearchAttainability``.
    """
    def __init__(self, s, pressures, equilibrium, task, starts, wall_time, settings):
        """
        Parameters
        ----------
        s: float
            Best shape error found.

        pressures: np.ndarray
            Pressures achieving ``s``.

        equilibrium: EquilibriumResult
            Equilibrium at ``pressures``; its shape is the best attempt at
            the task shape.

        task: Task

        starts: pd.DataFrame
            Per-start best objective, evaluation and failure counts.

        wall_time: float
            Seconds spent in the search.

        settings: SearchSettings
        """
        self.s = s
        self.pressures = pressures
        self.equilibrium = equilibrium
        self.task = task
        self.starts = starts
        self.wall_time = wall_time
        self.settings = settings
        self._summspecs = {"s": "{:.6e}".format}


    @property
    def shape(self):
        return(self.equilibrium.shape)


    @property
    def evaluations(self):
        return(int(self.starts["evaluations"].sum()))


    @property
    def failed_evaluations(self):
        return(int(self.starts["failed"].sum()))


    @property
    def summary(self):
        dfsumm = self.starts.copy()
        dfsumm.index = dfsumm.index.astype(object)
        dfsumm.loc["total"] = [self.s, self.evaluations, self.failed_evaluations]
        return(dfsumm)


    def __str__(self):
        header = "s={:.6e} pressures={} evaluations={} wall_time={:.2f}s\n".format(
            self.s, np.array2string(self.pressures, precision=1), self.evaluations, self.wall_time,
            )
        return(header + self.summary.to_string(formatters=self._summspecs))


    def __repr__(self):
        return(self.__str__())


    def plot(self, axes_style="darkgrid", context="notebook", exhibit_path=None):
        """
        Overlay the best-attempt equilibrium shape on the task shape.

        Parameters
        ----------
        axes_style: str
            Aesthetic style of plots. Defaults to "darkgrid".

        context: str
            Seaborn plotting context. Defaults to "notebook".

        exhibit_path: str
            Path to which exhibit should be written. If None, exhibit will
            be rendered via ``plt.show()``.
        """
        import matplotlib.pyplot as plt
        import seaborn as sns
        from ...harness import plot_arm
        sns.set_context(context)

        with sns.axes_style(axes_style):
            fig, ax = plt.subplots(1, 1, figsize=(6, 6), tight_layout=True)
            plot_arm(ax, self.equilibrium.design, self.task.shape, color="#AAAAAA",
                     linestyle="--", label="task")
            plot_arm(ax, self.equilibrium.design, self.shape, color="#334488", label="best attempt")
            ax.legend(loc="best", fontsize=8)
            ax.set_title("s = {:.3e}".format(self.s), size=9)

            if exhibit_path is not None:
                plt.savefig(exhibit_path)
                plt.close(fig)
            else:
                plt.show()



def search_attainability(design, task, weights=None, settings=None, random_state=None):
    """
    Functional form of ``SearchAttainability``.

    Returns
    -------
    tuple
        (s, pressures, best_shape, result)
    """
    result = SearchAttainability(design).__call__(
        task, weights=weights, settings=settings, random_state=random_state,
        )
    return(result.s, result.pressures, result.shape, result)
