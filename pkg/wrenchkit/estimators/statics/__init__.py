"""
This module contains the forward mechanics solver, ``EquilibriumSolver``,
which finds the centerline twists at which the arm's reaction wrenches
balance the wrenches induced by a tip load at every node.
"""
import collections
import logging
import numpy as np
import pandas as pd
import scipy.linalg
from ...arm import ArmShape, load_wrench_sequence, reactions, _strains

logger = logging.getLogger(__name__)


SolveSettings = collections.namedtuple(
    "SolveSettings", ["tolerance", "max_iterations", "damping", "fd_step"],
    defaults=[1e-6, 200, 1e-3, 1e-7],
    )
SolveSettings.__doc__ = """
Equilibrium solver settings.

tolerance: bound on the largest per-node residual norm. Defaults to 1e-6.
max_iterations: Newton iteration cap. Defaults to 200.
damping: initial Levenberg-Marquardt parameter. Defaults to 1e-3.
fd_step: relative finite-difference step for the Jacobian. Defaults to 1e-7.
"""

# Damping factor bounds; beyond the upper bound the iterate has stalled.
_MIN_DAMPING, _MAX_DAMPING = 1e-12, 1e12



def check_settings(settings):
    settings = SolveSettings() if settings is None else SolveSettings(*settings)
    if not settings.tolerance > 0:
        raise ValueError("`tolerance` must be positive, got {}.".format(settings.tolerance))
    if int(settings.max_iterations) < 1:
        raise ValueError("`max_iterations` must be at least 1, got {}.".format(settings.max_iterations))
    if not settings.damping > 0 or not settings.fd_step > 0:
        raise ValueError("`damping` and `fd_step` must be positive.")
    return(settings)



class EquilibriumSolver:
    """
    Solve a_i(twists, p) + q_i(twists, q_tip) = 0 for all nodes i = 1..N as
    one coupled system of 3N equations in the 3N twist components. The
    system is solved with a Levenberg-Marquardt damped Newton iteration on
    a forward-difference Jacobian; a trial step is accepted only if it does
    not increase the stacked residual norm.
    """
    def __init__(self, design):
        """
        Parameters
        ----------
        design: wrenchkit.arm.ArmDesign
        """
        self.design = design


    def _residual(self, x, pressures, q_tip):
        shape = ArmShape(x.reshape(-1, 3), base_pose=self.design.base_pose)
        res = reactions(self.design, shape.twists, pressures) + load_wrench_sequence(shape, q_tip)
        bad = ~np.all(np.isfinite(res), axis=1)
        if np.any(bad):
            raise FloatingPointError(
                "Non-finite equilibrium residual at node {}.".format(int(np.argmax(bad)) + 1)
                )
        return(res.ravel())


    def _jacobian(self, x, f0, pressures, q_tip, fd_step):
        jac = np.empty((f0.size, x.size))
        for kk in range(x.size):
            step = fd_step * max(1., abs(x[kk]))
            xk = x.copy()
            xk[kk] += step
            jac[:, kk] = (self._residual(xk, pressures, q_tip) - f0) / step
        return(jac)


    def __call__(self, pressures, q_tip=(0., 0., 0.), initial_shape=None, settings=None):
        """
        Solve for the loaded equilibrium shape.

        Parameters
        ----------
        pressures: array_like
            One pressure per actuator within the design's pressure space.

        q_tip: array_like
            Tip load (fx, fy, m) in world-aligned axes. Defaults to zero.

        initial_shape: ArmShape
            Initial guess. Defaults to the design's neutral straight shape.

        settings: SolveSettings
            Solver settings. Defaults to ``SolveSettings()``.

        Returns
        -------
        EquilibriumResult
            Never raises on non-convergence; the best iterate is returned
            with ``converged=False``.
        """
        settings = check_settings(settings)
        pressures = self.design.check_pressures(pressures)
        q_tip = np.asarray(q_tip, dtype=float)
        if initial_shape is None:
            initial_shape = self.design.neutral_shape()
        self.design.check_shape(initial_shape)

        x = np.array(initial_shape.twists, dtype=float).ravel()
        f = self._residual(x, pressures, q_tip)
        cost = f @ f
        lam = settings.damping
        converged, iterations = False, 0

        while True:
            node_norm = np.linalg.norm(f.reshape(-1, 3), axis=1).max()
            if node_norm <= settings.tolerance:
                converged = True
                break
            if iterations >= settings.max_iterations:
                break
            iterations += 1

            jac = self._jacobian(x, f, pressures, q_tip, settings.fd_step)
            jtj, grad = jac.T @ jac, jac.T @ f
            scale = np.maximum(np.diag(jtj), 1e-12)

            accepted = False
            while lam <= _MAX_DAMPING:
                try:
                    step = scipy.linalg.solve(jtj + lam * np.diag(scale), -grad, assume_a="sym")
                except (scipy.linalg.LinAlgError, ValueError):
                    lam *= 10.
                    continue
                x_trial = x + step
                f_trial = self._residual(x_trial, pressures, q_tip)
                cost_trial = f_trial @ f_trial
                if cost_trial <= cost:
                    x, f, cost = x_trial, f_trial, cost_trial
                    lam = max(lam / 10., _MIN_DAMPING)
                    accepted = True
                    break
                lam *= 10.

            logger.debug(
                "iteration %d: residual %.3e, damping %.1e", iterations, np.sqrt(cost), lam
                )
            if not accepted:
                logger.debug("Damping exceeded %.0e; solver stalled.", _MAX_DAMPING)
                break

        shape = ArmShape(x.reshape(-1, 3), base_pose=self.design.base_pose)
        _, nclamped = reactions(self.design, shape.twists, pressures, return_clamps=True)
        node_norms = np.linalg.norm(f.reshape(-1, 3), axis=1)
        if not converged:
            logger.info(
                "Equilibrium solve did not converge after %d iterations (residual %.3e).",
                iterations, node_norms.max(),
                )

        return(EquilibriumResult(
            design=self.design, shape=shape, pressures=pressures, q_tip=q_tip,
            residual_norm=float(node_norms.max()), node_residuals=node_norms,
            iterations=iterations, converged=converged, clamp_warnings=nclamped,
            settings=settings,
            ))



class EquilibriumResult:
    """
    Output of ``EquilibriumSolver``.
    """
    def __init__(self, design, shape, pressures, q_tip, residual_norm, node_residuals,
                 iterations, converged, clamp_warnings, settings, failed_step=None):
        """
        Parameters
        ----------
        design: wrenchkit.arm.ArmDesign

        shape: wrenchkit.arm.ArmShape
            Equilibrium (or best found) shape.

        pressures: np.ndarray

        q_tip: np.ndarray

        residual_norm: float
            Largest per-node residual norm.

        node_residuals: np.ndarray
            Residual norm at each node.

        iterations: int
            Accepted Newton iterations.

        converged: bool

        clamp_warnings: int
            Force evaluations at the returned shape whose strain fell
            outside the actuator's admissible range.

        settings: SolveSettings

        failed_step: int
            For continuation solves, the ramp step that failed.
        """
        self.design = design
        self.shape = shape
        self.pressures = pressures
        self.q_tip = q_tip
        self.residual_norm = residual_norm
        self.node_residuals = node_residuals
        self.iterations = iterations
        self.converged = converged
        self.clamp_warnings = clamp_warnings
        self.settings = settings
        self.failed_step = failed_step
        self._summary = None

        self._summspecs = {
            kk: "{:.6f}".format for kk in ("x", "y", "theta", "l", "gamma", "kappa")
            }
        self._summspecs["residual"] = "{:.3e}".format


    @property
    def strains(self):
        """
        N x M DataFrame of actuator strains indexed by node.
        """
        df = pd.DataFrame(
            _strains(self.design, self.shape.twists),
            columns=["eps_{}".format(ii) for ii in range(self.design.n_actuators)],
            )
        df.index = np.arange(1, self.shape.n + 1)
        df.index.name = "node"
        return(df)


    @property
    def summary(self):
        """
        Node poses, twists, residual norms and actuator strains.
        """
        if self._summary is None:
            df = self.shape.to_frame().set_index("node")
            df["residual"] = pd.Series(self.node_residuals, index=np.arange(1, self.shape.n + 1))
            self._summary = df.join(self.strains)
        return(self._summary)


    def __str__(self):
        header = "converged={} iterations={} residual_norm={:.3e} clamp_warnings={}\n".format(
            self.converged, self.iterations, self.residual_norm, self.clamp_warnings
            )
        return(header + self.summary.to_string(formatters=self._summspecs, na_rep=""))


    def __repr__(self):
        return(self.__str__())


    def plot(self, color="#334488", axes_style="darkgrid", context="notebook",
             exhibit_path=None, **kwargs):
        """
        Draw the centerline and actuator backbones of the equilibrium shape.

        Parameters
        ----------
        color: str
            Centerline color.

        axes_style: str
            Aesthetic style of plots. Defaults to "darkgrid".

        context: str
            Seaborn plotting context. Defaults to "notebook".

        exhibit_path: str
            Path to which exhibit should be written (use a .svg suffix for
            vector output). If None, exhibit will be rendered via
            ``plt.show()``.

        kwargs: dict
            Additional styling options accepted by ``plt.plot``.
        """
        import matplotlib.pyplot as plt
        import seaborn as sns
        from ...harness import plot_arm
        sns.set_context(context)

        with sns.axes_style(axes_style):
            fig, ax = plt.subplots(1, 1, figsize=(6, 6), tight_layout=True)
            plot_arm(ax, self.design, self.shape, color=color, **kwargs)
            ax.set_title("converged={}  |r|={:.1e}".format(self.converged, self.residual_norm), size=9)

            if exhibit_path is not None:
                plt.savefig(exhibit_path)
                plt.close(fig)
            else:
                plt.show()



def solve_equilibrium(design, pressures, q_tip=(0., 0., 0.), initial_shape=None, settings=None):
    """
    Functional form of ``EquilibriumSolver``.
    """
    return(EquilibriumSolver(design).__call__(
        pressures, q_tip, initial_shape=initial_shape, settings=settings
        ))



def continuation_solve(design, pressures, q_tip=(0., 0., 0.), steps=10, initial_shape=None,
                       settings=None):
    """
    Ramp pressures and tip load linearly from zero in ``steps`` increments,
    warm-starting each solve from the previous equilibrium.

    Parameters
    ----------
    design: wrenchkit.arm.ArmDesign

    pressures: array_like

    q_tip: array_like

    steps: int
        Number of ramp increments, at least 1. Defaults to 10.

    initial_shape: ArmShape
        Guess for the first increment. Defaults to the neutral shape.

    settings: SolveSettings

    Returns
    -------
    EquilibriumResult
        The final increment's result, or the first failing increment's
        result with ``failed_step`` set to its 1-based index.
    """
    if int(steps) < 1:
        raise ValueError("`steps` must be at least 1, got {}.".format(steps))
    pressures = design.check_pressures(pressures)
    q_tip = np.asarray(q_tip, dtype=float)
    solver = EquilibriumSolver(design)
    shape = initial_shape

    for kk in range(1, int(steps) + 1):
        frac = kk / int(steps)
        result = solver(pressures * frac, q_tip * frac, initial_shape=shape, settings=settings)
        if not result.converged:
            logger.info("Continuation failed at step %d of %d.", kk, steps)
            result.failed_step = kk
            return(result)
        shape = result.shape
    return(result)
