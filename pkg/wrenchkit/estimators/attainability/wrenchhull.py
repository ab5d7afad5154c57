"""
This module contains the class definition of ``WrenchHullAttainability``,
the fast attainability check. A task is functionally attainable when, at
every node, the requirement wrench lies in the hull of wrenches the arm can
produce at the task shape (absolute attainability) and the requirement's
differences from node 1 lie in the corresponding relative hulls (relative
attainability). The summed distances to the hulls are the absolute and
relative unattainability.

Attainable wrenches are evaluated with strains frozen at the task shape;
no equilibrium is solved.
"""
import logging
import warnings
import numpy as np
import pandas as pd
from ...arm import balance_shear as shear_balanced, reactions
from . import (
    Task, relative_sequence, requirement_wrench_sequence, sample_pressure_edges,
    sample_pressure_interior_beta,
    )
from .hull import WRENCH_COLUMNS, hull_projection, hull_distance, hulls_from_mapped, hulls_to_frame

logger = logging.getLogger(__name__)



class WrenchHullAttainability:
    """
    Wrench-hull attainability analysis for a fixed design.
    """
    def __init__(self, design):
        """
        Parameters
        ----------
        design: wrenchkit.arm.ArmDesign
        """
        self.design = design


    def __call__(self, task, per_edge=5, epsilon=None, balance_shear=True, weights=None,
                 keep_hulls=True):
        """
        Compute the absolute and relative unattainability of ``task``.

        Parameters
        ----------
        task: Task
            Task shape and tip load. The shape must have the design's N.

        per_edge: int
            Samples per pressure-box edge used to build the hulls. Defaults
            to 5 (112 samples for 4 actuators).

        epsilon: float
            Threshold below which both sums declare the task attainable.
            Defaults to 1e-6 * N.

        balance_shear: bool
            If True (default), the task twists' shear components are set to
            the values at which the shear penalty balances the load. Shear
            is not actuated, so without this step any transverse load is
            unattainable.

        weights: array_like
            Optional diagonal metric on (fx, fy, m) for the distances.

        keep_hulls: bool
            Retain the hulls on the report for plotting and export.
            Defaults to True.

        Returns
        -------
        AttainabilityReport
        """
        design = self.design
        design.check_shape(task.shape)
        design.check_models()
        nbr_nodes = design.segment_count
        epsilon = 1e-6 * nbr_nodes if epsilon is None else float(epsilon)

        if balance_shear:
            task = Task(
                shape=shear_balanced(design, task.shape, task.tip_load),
                tip_load=task.tip_load,
                )

        edge_samples = sample_pressure_edges(design.pressure_space, per_edge=per_edge)
        mapped, nclamped = reactions(design, task.shape.twists, edge_samples, return_clamps=True)
        abs_hulls = hulls_from_mapped(mapped)
        rel_hulls = hulls_from_mapped(mapped, relative=True)

        requirement = requirement_wrench_sequence(task)
        rel_requirement = relative_sequence(requirement)

        per_node_abs, per_node_rel = np.zeros(nbr_nodes), np.zeros(nbr_nodes)
        witness = np.zeros((nbr_nodes, design.n_actuators))
        rel_witness = np.zeros((nbr_nodes, design.n_actuators))
        for ii in range(nbr_nodes):
            dist, lam, _ = hull_projection(abs_hulls[ii], requirement[ii], weights=weights)
            per_node_abs[ii] = dist
            witness[ii] = lam @ edge_samples[abs_hulls[ii].source_index]
            dist, lam, _ = hull_projection(rel_hulls[ii], rel_requirement[ii], weights=weights)
            per_node_rel[ii] = dist
            rel_witness[ii] = lam @ edge_samples[rel_hulls[ii].source_index]

        logger.debug(
            "%s: absolute %.3e, relative %.3e over %d samples", design.name,
            per_node_abs.sum(), per_node_rel.sum(), edge_samples.shape[0],
            )

        return(AttainabilityReport(
            design=design, task=task, per_node_absolute=per_node_abs,
            per_node_relative=per_node_rel, requirement=requirement,
            relative_requirement=rel_requirement, witness_pressures=witness,
            relative_witness_pressures=rel_witness, epsilon=epsilon,
            edge_samples=edge_samples, clamp_warnings=nclamped,
            absolute_hulls=abs_hulls if keep_hulls else None,
            relative_hulls=rel_hulls if keep_hulls else None,
            per_edge=per_edge,
            ))



class AttainabilityReport:
    """
    Output of ``WrenchHullAttainability``.
    """
    def __init__(self, design, task, per_node_absolute, per_node_relative, requirement,
                 relative_requirement, witness_pressures, relative_witness_pressures,
                 epsilon, edge_samples, clamp_warnings, absolute_hulls=None,
                 relative_hulls=None, per_edge=None):
        """
        Parameters
        ----------
        design: wrenchkit.arm.ArmDesign

        task: Task
            The analyzed task, after shear balancing when enabled.

        per_node_absolute: np.ndarray
            Distance from each node's requirement wrench to its hull.

        per_node_relative: np.ndarray
            Distance from each node's relative requirement to its relative
            hull. Zero at node 1 by construction.

        requirement: np.ndarray
            N x 3 requirement wrench sequence.

        relative_requirement: np.ndarray
            N x 3 relative requirement sequence.

        witness_pressures: np.ndarray
            N x M pressures obtained by applying each node's optimal convex
            weights to the edge samples behind its hull vertices.

        relative_witness_pressures: np.ndarray
            Same as ``witness_pressures`` for the relative hulls.

        epsilon: float
            Attainability threshold applied to both sums.

        edge_samples: np.ndarray
            Pressure samples the hulls were built from.

        clamp_warnings: int
            Force evaluations outside an actuator's admissible strain range.

        absolute_hulls, relative_hulls: list of WrenchHull
            Retained hulls, or None.
        """
        self.design = design
        self.task = task
        self.per_node_absolute = per_node_absolute
        self.per_node_relative = per_node_relative
        self.requirement = requirement
        self.relative_requirement = relative_requirement
        self.witness_pressures = witness_pressures
        self.relative_witness_pressures = relative_witness_pressures
        self.epsilon = epsilon
        self.edge_samples = edge_samples
        self.clamp_warnings = clamp_warnings
        self.absolute_hulls = absolute_hulls
        self.relative_hulls = relative_hulls
        self.per_edge = per_edge
        self._summary = None

        self._summspecs = {
            "absolute": "{:.6e}".format, "relative": "{:.6e}".format,
            "rank_abs": "{:.0f}".format, "rank_rel": "{:.0f}".format,
            }


    @property
    def absolute_unattainability(self):
        return(float(np.sum(self.per_node_absolute)))


    @property
    def relative_unattainability(self):
        return(float(np.sum(self.per_node_relative)))


    @property
    def attainable(self):
        return(
            self.absolute_unattainability < self.epsilon
            and self.relative_unattainability < self.epsilon
            )


    @property
    def summary(self):
        """
        Per-node distances (and hull ranks when retained) with a total row.
        """
        if self._summary is None:
            nodes = np.arange(1, len(self.per_node_absolute) + 1)
            dfsumm = pd.DataFrame(
                {"absolute": self.per_node_absolute, "relative": self.per_node_relative},
                index=pd.Index(nodes, name="node").astype(object),
                )
            if self.absolute_hulls is not None:
                dfsumm["rank_abs"] = [h.degenerate_rank for h in self.absolute_hulls]
                dfsumm["rank_rel"] = [h.degenerate_rank for h in self.relative_hulls]
            dfsumm.loc["total"] = dfsumm.sum()
            if self.absolute_hulls is not None:
                dfsumm.loc["total", ["rank_abs", "rank_rel"]] = np.nan
            self._summary = dfsumm
        return(self._summary)


    def to_text(self, per_node=True):
        """
        Structured text export: one ``key = value`` line per scalar, then the
        per-node table when ``per_node`` is True.
        """
        lines = [
            "design = {}".format(self.design.name),
            "segment_count = {}".format(self.design.segment_count),
            "tip_load = {}".format(" ".join("{:.17g}".format(v) for v in self.task.tip_load)),
            "per_edge = {}".format(self.per_edge),
            "edge_samples = {}".format(self.edge_samples.shape[0]),
            "absolute_unattainability = {:.17g}".format(self.absolute_unattainability),
            "relative_unattainability = {:.17g}".format(self.relative_unattainability),
            "epsilon = {:.17g}".format(self.epsilon),
            "attainable = {}".format(str(self.attainable).lower()),
            "clamp_warnings = {}".format(self.clamp_warnings),
            ]
        if per_node:
            lines.append("")
            lines.append(self.summary.to_string(formatters=self._summspecs, na_rep=""))
        return("\n".join(lines) + "\n")


    def sequences_frame(self):
        """
        Requirement and witness sequences, one row per node.
        """
        nodes = np.arange(1, len(self.per_node_absolute) + 1)
        frames = []
        for label, seq in (("requirement", self.requirement),
                           ("relative_requirement", self.relative_requirement)):
            df = pd.DataFrame(seq, columns=WRENCH_COLUMNS)
            df.insert(0, "node", nodes)
            df.insert(0, "sequence", label)
            frames.append(df)
        dfwit = pd.DataFrame(
            self.witness_pressures,
            columns=["p_{}".format(ii) for ii in range(self.witness_pressures.shape[1])],
            )
        dfwit.insert(0, "node", nodes)
        dfwit.insert(0, "sequence", "witness_pressure")
        frames.append(dfwit)
        return(pd.concat(frames, ignore_index=True))


    def hulls_frame(self):
        """
        Vertices of every retained hull, one row per vertex.
        """
        if self.absolute_hulls is None:
            raise ValueError("Hulls were not retained; rerun with keep_hulls=True.")
        return(pd.concat(
            [hulls_to_frame(self.absolute_hulls, "absolute"),
             hulls_to_frame(self.relative_hulls, "relative")],
            ignore_index=True,
            ))


    def __str__(self):
        return(self.to_text())


    def __repr__(self):
        return(self.to_text())


    def plot(self, relative=False, axes_style="darkgrid", context="notebook", col_wrap=5,
             hull_color="#334488", requirement_color="#E02C70", exhibit_path=None, **kwargs):
        """
        Per-node projections of the hulls onto the (fx, m) plane with the
        requirement wrench marked. Forces are plotted without the
        penalty-dominated shear component.

        Parameters
        ----------
        relative: bool
            Plot relative hulls instead of absolute ones.

        axes_style: str
            Aesthetic style of plots. Defaults to "darkgrid".

        context: str
            Seaborn plotting context. Defaults to "notebook".

        col_wrap: int
            Maximum number of node facets per row. Defaults to 5.

        exhibit_path: str
            Path to which exhibit should be written. If None, exhibit will
            be rendered via ``plt.show()``.

        kwargs: dict
            Additional styling options accepted by ``plt.fill``.
        """
        import matplotlib.pyplot as plt
        import seaborn as sns
        from ...harness import projected_outline

        if self.absolute_hulls is None:
            raise ValueError("Hulls were not retained; rerun with keep_hulls=True.")
        sns.set_context(context)
        hulls = self.relative_hulls if relative else self.absolute_hulls
        targets = self.relative_requirement if relative else self.requirement

        data = pd.concat(
            [h.to_frame().assign(node=ii) for ii, h in enumerate(hulls, start=1)],
            ignore_index=True,
            )

        with sns.axes_style(axes_style):
            grid = sns.FacetGrid(
                data, col="node", col_wrap=min(col_wrap, len(hulls)), sharex=False,
                sharey=False, despine=True, height=2.5,
                )
            grid.map(plt.scatter, "fx", "m", color=hull_color, s=6)

            fillkwargs = {"alpha": .25, "color": hull_color}
            fillkwargs.update(kwargs)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                for ax_ii, hull, target in zip(grid.axes.flat, hulls, targets):
                    outline = projected_outline(hull.vertices[:, [0, 2]])
                    ax_ii.fill(outline[:, 0], outline[:, 1], **fillkwargs)
                    ax_ii.scatter([target[0]], [target[2]], color=requirement_color, marker="x", s=30)
            grid.set_axis_labels("fx (N)", "m (N m)")

            if exhibit_path is not None:
                plt.savefig(exhibit_path)
                plt.close(grid.fig)
            else:
                plt.show()



def analyze(design, task, per_edge=5, epsilon=None, balance_shear=True, weights=None):
    """
    Functional form of ``WrenchHullAttainability``.
    """
    return(WrenchHullAttainability(design).__call__(
        task, per_edge=per_edge, epsilon=epsilon, balance_shear=balance_shear, weights=weights,
        ))



def check_convexity(design, shape, count=200, per_edge=5, seed=None, warn=True):
    """
    Empirical convexity check: map Beta-distributed interior pressures to
    wrenches at ``shape`` and measure their distance to the hulls built
    from edge samples. A wrench counts as a violation when its distance
    exceeds 1e-6 * (1 + hull diameter).

    Parameters
    ----------
    design: wrenchkit.arm.ArmDesign

    shape: wrenchkit.arm.ArmShape

    count: int
        Interior samples. Defaults to 200.

    per_edge: int
        Edge samples per box edge for the hulls.

    seed: int or np.random.RandomState

    warn: bool
        Issue a warning when relative hulls are violated.

    Returns
    -------
    pd.DataFrame
        One row per (family, node) with ``checks``, ``violations`` and
        ``max_distance``.
    """
    design.check_models()
    edge_samples = sample_pressure_edges(design.pressure_space, per_edge=per_edge)
    interior = sample_pressure_interior_beta(design.pressure_space, count, seed=seed)
    mapped = reactions(design, shape.twists, edge_samples)
    inner = reactions(design, shape.twists, interior)

    records = []
    for family, relative in (("absolute", False), ("relative", True)):
        hulls = hulls_from_mapped(mapped, relative=relative)
        points = relative_sequence(inner) if relative else inner
        for ii, hull in enumerate(hulls):
            dists = np.asarray([hull_distance(hull, w) for w in points[:, ii, :]])
            bound = 1e-6 * (1. + hull.diameter)
            records.append({
                "family": family, "node": ii + 1, "checks": dists.size,
                "violations": int(np.sum(dists > bound)), "max_distance": float(dists.max()),
                })

    df = pd.DataFrame.from_records(records)
    nrel = int(df.loc[df["family"]=="relative", "violations"].sum())
    if warn and nrel > 0:
        warnings.warn("{} interior relative wrenches fall outside their relative hulls.".format(nrel))
    return(df)
