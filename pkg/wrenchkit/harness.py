"""
Experiment harness: experiment and task files, design comparison
batteries, the hull-versus-search timing benchmark and shape planning.
Every random draw in a battery flows from the experiment seed, so a rerun
reproduces every result CSV byte-for-byte.

An experiment file has the layout::

    {
      "name": "antagonism_battery",
      "designs": ["antagonistic", "bellows_only"],
      "task_shapes": [
        {"name": "high_reach", "generator": "constant_curvature",
         "params": {"length": 0.5, "angle": 1.5}},
        {"name": "hook", "twists": [[0.5, 0, 1], [0.5, 0, 1], ...]}
      ],
      "load_sampling": {"ranges": [10, 10, 1], "count": 67, "seed": 7},
      "analysis": "hull",
      "output_dir": "antagonism_battery",
      "per_edge": 5,
      "seed": 0,
      "search": {"method": "Nelder-Mead", "starts": 3, "weights": "identity"}
    }

Designs are bundled dataset names, design file paths (relative to the
experiment file) or inline design objects. ``load_sampling`` may instead
carry an explicit ``"loads"`` list.
"""
import collections
import concurrent.futures
import copy
import itertools
import logging
import os
import time
import warnings
import numpy as np
import pandas as pd
from scipy.spatial import ConvexHull, QhullError
from scipy.stats import spearmanr
from .arm import todesign
from .estimators.attainability import Task, totask
from .estimators.attainability.search import SearchAttainability, SearchSettings, ShapeErrorWeights
from .estimators.attainability.wrenchhull import WrenchHullAttainability
from .estimators.statics import SolveSettings
from .lie import Pose, exp_twist, compose, wrap_angle
from .shapes import generate, tip_equivalent_candidates
from .utils import Config, ConfigError, check_random_state, positive, vector, write_csv

logger = logging.getLogger(__name__)


ANALYSES = ("hull", "search", "both")

CELL_COLUMNS = [
    "design", "shape", "load", "fx", "fy", "m", "absolute", "relative", "attainable", "s",
    "evaluations", "failed_evaluations", "error",
    ]

# Per-cell failures recorded instead of aborting a battery.
_CELL_ERRORS = (ValueError, RuntimeError, FloatingPointError, np.linalg.LinAlgError)



def plot_arm(ax, design, shape, color="#334488", label=None, linestyle="-",
             show_actuators=True, samples=8, **kwargs):
    """
    Draw ``shape``'s centerline (each segment as its exact arc) and,
    optionally, the actuator backbones at their offsets.

    Parameters
    ----------
    ax: matplotlib.axes.Axes

    design: wrenchkit.arm.ArmDesign

    shape: wrenchkit.arm.ArmShape

    color: str
        Centerline color.

    label: str
        Legend label for the centerline.

    samples: int
        Points drawn per segment.

    kwargs: dict
        Additional styling options accepted by ``ax.plot``.
    """
    fracs = np.linspace(0., 1., int(samples))[1:]
    points = [shape.poses[0]]
    for pose, xi in zip(shape.poses[:-1], shape.twists):
        points.extend(compose(pose, exp_twist(xi, tt / shape.n)) for tt in fracs)
    points = np.asarray(points)

    ax.plot(points[:, 0], points[:, 1], color=color, linestyle=linestyle, label=label,
            linewidth=1.75, **kwargs)
    ax.scatter(np.asarray(shape.poses)[:, 0], np.asarray(shape.poses)[:, 1], color=color, s=8)
    if show_actuators:
        normals = np.column_stack([-np.sin(points[:, 2]), np.cos(points[:, 2])])
        for offset in design.offsets:
            backbone = points[:, :2] + offset * normals
            ax.plot(backbone[:, 0], backbone[:, 1], color=color, linestyle=":", linewidth=.75,
                    alpha=.7)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")



def projected_outline(points2d):
    """
    Closed outline of the convex hull of 2-D points, suitable for
    ``plt.fill``. Degenerate point sets are returned in sorted order.
    """
    points2d = np.unique(np.asarray(points2d, dtype=float), axis=0)
    if points2d.shape[0] < 3:
        return(points2d)
    try:
        qhull = ConvexHull(points2d)
    except QhullError:
        return(points2d)
    outline = points2d[qhull.vertices]
    return(np.vstack([outline, outline[:1]]))



def _resolve_design(cfg, entry, index):
    from .datasets import dataref
    if isinstance(entry, dict):
        return(todesign(Config(entry, text=cfg.text, source=cfg.source,
                               prefix="designs[{}].".format(index))))
    if not isinstance(entry, str):
        raise cfg.error("designs", "entry {} must be a dataset name, path or object.".format(index))
    if entry.lower() in dataref:
        return(todesign(dataref[entry.lower()]))
    path = cfg.resolve_path(entry)
    if not os.path.isfile(path):
        raise cfg.error("designs", "`{}` is neither a bundled design nor a file.".format(entry))
    return(todesign(path))



def _read_shape(cfg):
    """
    Parse a shape entry: explicit ``twists`` or a ``generator`` with
    ``params``. Returns a callable mapping a segment count to twists.
    """
    if "twists" in cfg:
        twists = np.asarray(cfg.get("twists"), dtype=float)
        if twists.ndim!=2 or twists.shape[1]!=3:
            raise cfg.error("twists", "expected a list of [l, gamma, kappa] triples.")
        return(lambda n: twists)
    if "generator" in cfg:
        name = cfg.get("generator", str)
        params = cfg.get("params", dict, {})
        try:
            generate(name, 1, **params)
        except (TypeError, ValueError) as exc:
            raise cfg.error("generator", str(exc)) from exc
        return(lambda n: generate(name, n, **params))
    raise ConfigError(
        "shape needs `twists` or `generator`.", field="{}twists".format(cfg.prefix),
        source=cfg.source,
        )



def _read_search_settings(cfg):
    """
    ``SearchSettings`` and the weight preset name from an optional
    ``search`` object.
    """
    if "search" not in cfg:
        return(SearchSettings(), "identity")
    scfg = cfg.child("search")
    defaults = SearchSettings()
    method = scfg.get("method", str, defaults.method)
    if method not in ("Nelder-Mead", "L-BFGS-B"):
        raise scfg.error("method", "`{}` is not a valid search method.".format(method))
    solve_settings = None
    if "solve" in scfg:
        vcfg = scfg.child("solve")
        base = SolveSettings()
        solve_settings = SolveSettings(
            tolerance=vcfg.get("tolerance", positive(), base.tolerance),
            max_iterations=vcfg.get("max_iterations", positive(int), base.max_iterations),
            damping=vcfg.get("damping", positive(), base.damping),
            fd_step=vcfg.get("fd_step", positive(), base.fd_step),
            )
    settings = defaults._replace(
        method=method,
        starts=scfg.get("starts", positive(int), defaults.starts),
        max_evaluations=scfg.get("max_evaluations", positive(int), defaults.max_evaluations),
        xatol=scfg.get("xatol", positive(), defaults.xatol),
        fatol=scfg.get("fatol", positive(), defaults.fatol),
        target=scfg.get("target", float, defaults.target),
        threads=scfg.get("threads", positive(int), defaults.threads),
        solve_settings=solve_settings,
        )
    return(settings, scfg.get("weights", str, "identity"))



class ExperimentSpec:
    """
    Parsed experiment file: designs, task shapes, loads and analysis
    options for a comparison battery.
    """
    def __init__(self, designs, task_shapes, loads, analysis="hull", output_dir=None,
                 per_edge=5, seed=0, epsilon=None, balance_shear=True, search_settings=None,
                 weights="identity", name=None):
        """
        Parameters
        ----------
        designs: list of ArmDesign

        task_shapes: list of tuple
            (label, twists or callable n -> twists) pairs.

        loads: array_like
            K x 3 tip loads.

        analysis: str
            One of "hull", "search" or "both".

        output_dir: str

        per_edge: int
            Samples per pressure-box edge for the hulls.

        seed: int
            Experiment seed; per-cell search seeds derive from it.

        search_settings: SearchSettings

        weights: str
            Shape error weight preset for the search.
        """
        if analysis not in ANALYSES:
            raise ValueError("`analysis` must be one of {}, got `{}`.".format(ANALYSES, analysis))
        loads = np.asarray(loads, dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(loads)):
            raise ValueError("Every tip load must be finite.")
        self.designs = list(designs)
        self.task_shapes = [
            (label, shape if callable(shape) else (lambda n, tw=np.asarray(shape, dtype=float): tw))
            for label, shape in task_shapes
            ]
        self.loads = loads
        self.analysis = analysis
        self.output_dir = output_dir
        self.per_edge = int(per_edge)
        self.seed = seed
        self.epsilon = epsilon
        self.balance_shear = balance_shear
        self.search_settings = SearchSettings() if search_settings is None else search_settings
        self.weights = weights
        self.name = name


    @classmethod
    def read(cls, path, seed=None):
        """
        Parse the experiment file at ``path``.

        Parameters
        ----------
        path: str

        seed: int
            Overrides both the experiment seed and the load-sampling seed.

        Returns
        -------
        ExperimentSpec
        """
        cfg = Config.read(path)
        designs = [_resolve_design(cfg, entry, ii) for ii, entry in enumerate(cfg.get("designs", list))]
        task_shapes = []
        for ii, scfg in enumerate(cfg.children("task_shapes")):
            task_shapes.append((scfg.get("name", str, "shape_{}".format(ii + 1)), _read_shape(scfg)))

        lcfg = cfg.child("load_sampling")
        if seed is None:
            seed = cfg.get("seed", int, 0)
            load_seed = lcfg.get("seed", int, seed)
        else:
            load_seed = int(seed)
        if "loads" in lcfg:
            loads = np.asarray(lcfg.get("loads", list), dtype=float).reshape(-1, 3)
        else:
            loads = sample_loads(
                lcfg.get("ranges", np.asarray), lcfg.get("count", positive(int), 67),
                seed=load_seed, cfg=lcfg,
                )

        analysis = cfg.get("analysis", str, "hull")
        if analysis not in ANALYSES:
            raise cfg.error("analysis", "must be one of {}.".format(", ".join(ANALYSES)))
        settings, weights = _read_search_settings(cfg)
        output_dir = cfg.get("output_dir", str, None)
        name = cfg.get("name", str, os.path.splitext(os.path.basename(path))[0])

        return(cls(
            designs=designs, task_shapes=task_shapes, loads=loads, analysis=analysis,
            output_dir=output_dir,
            per_edge=cfg.get("per_edge", positive(int), 5), seed=seed,
            epsilon=cfg.get("epsilon", positive(), None),
            balance_shear=cfg.get("balance_shear", bool, True), search_settings=settings,
            weights=weights, name=name,
            ))


    def shape(self, index, design):
        """
        Task shape ``index`` discretized for ``design``.
        """
        return(design.shape(self.task_shapes[index][1](design.segment_count)))


    def cells(self):
        """
        Every (design, shape, load) triple in battery order: designs
        outermost, loads innermost.
        """
        return(list(itertools.product(
            range(len(self.designs)), range(len(self.task_shapes)), range(len(self.loads))
            )))


    def __repr__(self):
        return("ExperimentSpec(name={!r}, designs={}, shapes={}, loads={}, analysis={!r})".format(
            self.name, len(self.designs), len(self.task_shapes), len(self.loads), self.analysis
            ))



def sample_loads(ranges, count, seed=None, cfg=None):
    """
    Independent uniform draws per wrench component.

    Parameters
    ----------
    ranges: array_like
        Either three half-widths (symmetric box) or 3 x 2 bounds.

    count: int

    seed: int or np.random.RandomState

    Returns
    -------
    np.ndarray
        count x 3 loads.
    """
    ranges = np.asarray(ranges, dtype=float)
    if ranges.shape==(3,):
        bounds = np.column_stack([-np.abs(ranges), np.abs(ranges)])
    elif ranges.shape==(3, 2):
        bounds = ranges
    else:
        msg = "expected three half-widths or 3 x 2 bounds, got shape {}.".format(ranges.shape)
        raise cfg.error("ranges", msg) if cfg is not None else ValueError(msg)
    if not np.all(np.isfinite(bounds)) or np.any(bounds[:, 1] < bounds[:, 0]):
        msg = "bounds must be finite and ordered."
        raise cfg.error("ranges", msg) if cfg is not None else ValueError(msg)
    prng = check_random_state(seed)
    return(prng.uniform(bounds[:, 0], bounds[:, 1], size=(int(count), 3)))



def read_task(path, design):
    """
    Parse a task file: ``twists`` or a ``shape`` generator object, plus
    ``tip_load``.

    Parameters
    ----------
    path: str

    design: ArmDesign
        Supplies the segment count and base pose.

    Returns
    -------
    Task
    """
    cfg = Config.read(path)
    make = _read_shape(cfg.child("shape")) if "shape" in cfg else _read_shape(cfg)
    twists = make(design.segment_count)
    if twists.shape[0]!=design.segment_count:
        raise cfg.error(
            "twists", "task has {} segments but the design has N={}.".format(
                twists.shape[0], design.segment_count
                ))
    tip_load = cfg.get("tip_load", vector(3), np.zeros(3))
    return(totask(design.shape(twists), tip_load))



def _run_cell(spec, cell, seed):
    kdesign, kshape, kload = cell
    design = spec.designs[kdesign]
    record = collections.OrderedDict([
        ("design", design.name or "design_{}".format(kdesign + 1)),
        ("shape", spec.task_shapes[kshape][0]),
        ("load", kload + 1),
        ("fx", spec.loads[kload, 0]), ("fy", spec.loads[kload, 1]), ("m", spec.loads[kload, 2]),
        ("absolute", np.nan), ("relative", np.nan), ("attainable", np.nan),
        ("s", np.nan), ("evaluations", np.nan), ("failed_evaluations", np.nan), ("error", ""),
        ])
    timing = {"hull_time": np.nan, "search_time": np.nan}
    report, attempt = None, None

    try:
        task = totask(spec.shape(kshape, design), spec.loads[kload])
        if spec.analysis in ("hull", "both"):
            t0 = time.perf_counter()
            report = WrenchHullAttainability(design)(
                task, per_edge=spec.per_edge, epsilon=spec.epsilon,
                balance_shear=spec.balance_shear,
                )
            timing["hull_time"] = time.perf_counter() - t0
            record["absolute"] = report.absolute_unattainability
            record["relative"] = report.relative_unattainability
            record["attainable"] = report.attainable
        if spec.analysis in ("search", "both"):
            weights = ShapeErrorWeights.named(spec.weights, design.segment_count)
            t0 = time.perf_counter()
            result = SearchAttainability(design)(
                task, weights=weights, settings=spec.search_settings, random_state=int(seed),
                )
            timing["search_time"] = time.perf_counter() - t0
            record["s"] = result.s
            record["evaluations"] = result.evaluations
            record["failed_evaluations"] = result.failed_evaluations
            attempt = result.shape
    except _CELL_ERRORS as exc:
        logger.warning("Cell %s failed: %s", cell, exc)
        record["error"] = "{}: {}".format(type(exc).__name__, exc)

    logger.debug("Cell %s: absolute=%s s=%s", cell, record["absolute"], record["s"])
    return(record, timing, report, attempt)



def _run_battery(spec, threads=1):
    cells = spec.cells()
    seeds = check_random_state(spec.seed).randint(0, 2**31 - 1, size=len(cells))
    jobs = list(zip(cells, seeds))
    if int(threads) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=int(threads)) as executor:
            outputs = list(executor.map(lambda job: _run_cell(spec, *job), jobs))
    else:
        outputs = [_run_cell(spec, *job) for job in jobs]
    return(cells, outputs)



def compare(spec, threads=1):
    """
    Run the analysis (and optionally the search) for every (design, task
    shape, load) cell of ``spec``. Cell failures are recorded in the
    ``error`` column rather than raised.

    Parameters
    ----------
    spec: ExperimentSpec

    threads: int
        Worker threads; results are ordered by cell index regardless.

    Returns
    -------
    ComparisonSummary
    """
    t0 = time.perf_counter()
    cells, outputs = _run_battery(spec, threads=threads)
    logger.info("Ran %d cells in %.2f s.", len(cells), time.perf_counter() - t0)

    records = [out[0] for out in outputs]
    dfcells = pd.DataFrame.from_records(records, columns=CELL_COLUMNS)
    dfcells.insert(0, "cell", np.arange(1, len(records) + 1))
    dftiming = dfcells[["cell", "design", "shape", "load"]].copy()
    dftiming["hull_time"] = [out[1]["hull_time"] for out in outputs]
    dftiming["search_time"] = [out[1]["search_time"] for out in outputs]

    exemplars, attempts = {}, {}
    for cell, out in zip(cells, outputs):
        key = (cell[0], cell[1])
        if out[2] is not None and key not in exemplars:
            exemplars[key] = out[2]
        if out[3] is not None:
            attempts[cell] = out[3]

    return(ComparisonSummary(spec, dfcells, dftiming, exemplars=exemplars, attempts=attempts))



class ComparisonSummary:
    """
    Per-cell metrics of a comparison battery with per-design, per-shape
    medians.
    """
    def __init__(self, spec, cells, timing, exemplars=None, attempts=None):
        """
        Parameters
        ----------
        spec: ExperimentSpec

        cells: pd.DataFrame
            One row per (design, shape, load) cell.

        timing: pd.DataFrame
            Per-cell wall-clock seconds for each method.

        exemplars: dict
            First hull report per (design index, shape index), for plots.

        attempts: dict
            Best-attempt search shapes keyed by cell triple.
        """
        self.spec = spec
        self.cells = cells
        self.timing = timing
        self.exemplars = {} if exemplars is None else exemplars
        self.attempts = {} if attempts is None else attempts
        self._medians = None

        for metric in ("absolute", "relative", "s"):
            grouped = self.cells.groupby(["design", "shape"], sort=False)[metric]
            median = grouped.transform("median") if len(self.cells) else self.cells[metric]
            self.cells["below_median_{}".format(metric)] = (
                self.cells[metric].astype(float) < median.astype(float)
                )

        self._summspecs = {
            "absolute": "{:.6e}".format, "relative": "{:.6e}".format, "s": "{:.6e}".format,
            }


    @property
    def medians(self):
        """
        Sample medians of the stored per-cell metrics by design and shape.
        """
        if self._medians is None:
            metrics = ["absolute", "relative", "s"]
            dfmed = self.cells.groupby(["design", "shape"], sort=False)[metrics].median()
            dfmed["cells"] = self.cells.groupby(["design", "shape"], sort=False).size()
            dfmed["failures"] = self.cells.groupby(["design", "shape"], sort=False)["error"].apply(
                lambda ser: int((ser!="").sum())
                )
            self._medians = dfmed
        return(self._medians)


    @property
    def totals(self):
        """
        Summed metrics by design and shape.
        """
        return(self.cells.groupby(["design", "shape"], sort=False)[["absolute", "relative", "s"]].sum())


    @property
    def per_shape(self):
        """
        Median absolute unattainability with shapes as rows and designs as
        columns.
        """
        return(self.cells.pivot_table(
            index="shape", columns="design", values="absolute", aggfunc="median", sort=False,
            ))


    @property
    def summary(self):
        dfsumm = self.medians.reset_index()
        return(dfsumm)


    def to_text(self):
        lines = [
            "experiment = {}".format(self.spec.name),
            "analysis = {}".format(self.spec.analysis),
            "cells = {}".format(len(self.cells)),
            "failed_cells = {}".format(int((self.cells["error"]!="").sum())),
            "seed = {}".format(self.spec.seed),
            "",
            self.summary.to_string(index=False, formatters=self._summspecs, na_rep=""),
            ]
        if self.spec.analysis=="both" and len(self.cells):
            lines.extend(["", hull_search_consistency(self).to_string(na_rep="")])
        return("\n".join(lines) + "\n")


    def __str__(self):
        return(self.to_text())


    def __repr__(self):
        return(self.to_text())


    def write(self, output_dir, svg=False):
        """
        Write cells.csv, medians.csv, per_shape.csv and report.txt to
        ``output_dir`` and, with ``svg``, histogram, shape and hull plots.

        Returns
        -------
        list of str
            Paths written.
        """
        os.makedirs(output_dir, exist_ok=True)
        paths = {kk: os.path.join(output_dir, kk) for kk in
                 ("cells.csv", "medians.csv", "per_shape.csv", "report.txt")}
        write_csv(self.cells, paths["cells.csv"])
        write_csv(self.medians, paths["medians.csv"], index=True)
        write_csv(self.per_shape, paths["per_shape.csv"], index=True)
        with open(paths["report.txt"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())
        written = list(paths.values())

        if svg and len(self.cells):
            import matplotlib
            matplotlib.use("Agg")
            metric = "s" if self.spec.analysis=="search" else "absolute"
            written.append(os.path.join(output_dir, "hist_{}.svg".format(metric)))
            self.hist(metric=metric, exhibit_path=written[-1])
            written.append(os.path.join(output_dir, "shapes.svg"))
            self.plot_shapes(exhibit_path=written[-1])
            for (kdesign, kshape), report in sorted(self.exemplars.items()):
                written.append(os.path.join(
                    output_dir, "hulls_{}_{}.svg".format(report.design.name or kdesign + 1,
                                                         self.spec.task_shapes[kshape][0])
                    ))
                report.plot(exhibit_path=written[-1])
        return(written)


    def hist(self, metric="absolute", color="#FFFFFF", axes_style="darkgrid", context="notebook",
             exhibit_path=None, **kwargs):
        """
        Histograms of ``metric`` per design (columns) and task shape (rows)
        with the median marked.

        Parameters
        ----------
        metric: str
            "absolute", "relative" or "s".

        color: str
            Histogram fill color.

        axes_style: str
            Aesthetic style of plots. Defaults to "darkgrid".

        context: str
            Seaborn plotting context. Defaults to "notebook".

        exhibit_path: str
            Path to which exhibit should be written. If None, exhibit will
            be rendered via ``plt.show()``.

        kwargs: dict
            Dictionary of optional matplotlib styling parameters.
        """
        import matplotlib.pyplot as plt
        import seaborn as sns
        sns.set_context(context)

        data = self.cells[self.cells[metric].notna()]
        with sns.axes_style(axes_style):
            pltkwargs = {"color": color, "bins": 20, "edgecolor": "#484848", "linewidth": .45}
            pltkwargs.update(kwargs)
            grid = sns.FacetGrid(
                data, col="design", row="shape", margin_titles=True, despine=True,
                sharex=False, sharey=False, height=2.75,
                )
            grid.map(plt.hist, metric, **pltkwargs)

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                for (shape, design), ax_ii in grid.axes_dict.items():
                    values = data.loc[(data["design"]==design) & (data["shape"]==shape), metric]
                    if values.empty:
                        continue
                    xmed = values.median()
                    ax_ii.axvline(xmed, color="#E02C70", linestyle="--", linewidth=1.5)
                    ax_ii.annotate(
                        "median = {:.3g}".format(xmed), xy=(.55, .9), xycoords="axes fraction",
                        fontsize=7, color="#000000",
                        )
            grid.set_axis_labels(metric, "")

            if exhibit_path is not None:
                plt.savefig(exhibit_path)
                plt.close(grid.fig)
            else:
                plt.show()


    def plot_shapes(self, axes_style="darkgrid", context="notebook", exhibit_path=None):
        """
        One panel per task shape: the task centerline and, when the search
        ran, each design's best-attempt shapes for below-median cells.
        """
        import matplotlib.pyplot as plt
        import seaborn as sns
        sns.set_context(context)
        palette = sns.color_palette("deep", max(len(self.spec.designs), 1))

        with sns.axes_style(axes_style):
            nshapes = max(len(self.spec.task_shapes), 1)
            fig, axes = plt.subplots(1, nshapes, figsize=(4.5 * nshapes, 4.5), squeeze=False,
                                     tight_layout=True)
            for kshape, (label, _) in enumerate(self.spec.task_shapes):
                ax = axes[0, kshape]
                for kdesign, design in enumerate(self.spec.designs):
                    below = self.cells[
                        (self.cells["design"]==(design.name or "design_{}".format(kdesign + 1)))
                        & (self.cells["shape"]==label) & self.cells["below_median_s"]
                        ]
                    for load in below["load"]:
                        attempt = self.attempts.get((kdesign, kshape, int(load) - 1))
                        if attempt is not None:
                            plot_arm(ax, design, attempt, color=palette[kdesign],
                                     show_actuators=False, alpha=.35)
                design = self.spec.designs[0]
                plot_arm(ax, design, self.spec.shape(kshape, design), color="#000000",
                         linestyle="--", label=label)
                ax.set_title(label, size=9)

            if exhibit_path is not None:
                plt.savefig(exhibit_path)
                plt.close(fig)
            else:
                plt.show()



def hull_search_consistency(summary):
    """
    Spearman rank correlation between summed unattainability (absolute
    plus relative) and the search objective, per design and task shape.

    Parameters
    ----------
    summary: ComparisonSummary or pd.DataFrame
        A summary from an analysis="both" battery, or its cells table.

    Returns
    -------
    pd.DataFrame
        Indexed by (design, shape) with columns rho, pvalue and n.
    """
    cells = summary.cells if isinstance(summary, ComparisonSummary) else summary
    records = []
    for (design, shape), dfgrp in cells.groupby(["design", "shape"], sort=False):
        dfgrp = dfgrp[dfgrp["absolute"].notna() & dfgrp["s"].notna() & np.isfinite(dfgrp["s"])]
        rho, pval = np.nan, np.nan
        if len(dfgrp) >= 3:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                rho, pval = spearmanr(dfgrp["absolute"] + dfgrp["relative"], dfgrp["s"])
        records.append({"design": design, "shape": shape, "rho": rho, "pvalue": pval, "n": len(dfgrp)})
    df = pd.DataFrame.from_records(records, columns=["design", "shape", "rho", "pvalue", "n"])
    return(df.set_index(["design", "shape"]))



def bench(spec):
    """
    Run the battery through both the hull analysis and the search on one
    thread and report wall-clock totals and their ratio.

    Parameters
    ----------
    spec: ExperimentSpec
        Run with analysis "both"; ``spec`` itself is left unchanged.

    Returns
    -------
    BenchReport
    """
    spec = copy.copy(spec)
    spec.analysis = "both"
    summary = compare(spec, threads=1)
    return(BenchReport(summary.timing, summary=summary))



class BenchReport:
    """
    Timing comparison of the hull analysis against the search.
    """
    def __init__(self, timing, summary=None):
        self.timing = timing
        self.comparison = summary
        self._summspecs = {"hull_time": "{:.4f}".format, "search_time": "{:.4f}".format}


    @property
    def hull_total(self):
        return(float(self.timing["hull_time"].sum()))


    @property
    def search_total(self):
        return(float(self.timing["search_time"].sum()))


    @property
    def speedup(self):
        """
        Search time over hull time; nan for an empty battery.
        """
        return(self.search_total / self.hull_total if self.hull_total > 0 else np.nan)


    @property
    def summary(self):
        dfsumm = self.timing.copy()
        dfsumm.index = dfsumm.index.astype(object)
        dfsumm.loc["total"] = ["", "", "", "", self.hull_total, self.search_total]
        return(dfsumm)


    def to_text(self):
        lines = [
            "cells = {}".format(len(self.timing)),
            "hull_total_seconds = {:.6f}".format(self.hull_total),
            "search_total_seconds = {:.6f}".format(self.search_total),
            "speedup = {:.6g}".format(self.speedup),
            ]
        return("\n".join(lines) + "\n")


    def __str__(self):
        return(self.to_text())


    def __repr__(self):
        return(self.to_text())


    def write(self, output_dir):
        os.makedirs(output_dir, exist_ok=True)
        paths = [os.path.join(output_dir, "bench_timing.csv"), os.path.join(output_dir, "report.txt")]
        write_csv(self.timing, paths[0])
        with open(paths[1], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())
        if self.comparison is not None:
            write_csv(self.comparison.cells, os.path.join(output_dir, "cells.csv"))
            paths.append(os.path.join(output_dir, "cells.csv"))
        return(paths)



ShapePlanSpec = collections.namedtuple(
    "ShapePlanSpec", ["design", "tip_pose", "load", "candidates", "per_edge"],
    )
ShapePlanSpec.__doc__ = """
Inputs of a shape-planning run: the design, the common tip pose and load,
and (label, twists) candidates.
"""



def read_shape_plan(path, design=None, tip_pose=None, load=None):
    """
    Parse a shape-plan file::

        {
          "design": "antagonistic",
          "tip_load": [7, 0, 0],
          "target": {"generator": "constant_curvature", "params": {"angle": 1.0}},
          "candidates": {"first_angles": [0.0, 1.0, 2.0], "split": 0.5},
          "include_target": true
        }

    ``target`` may be replaced by an explicit ``"tip_pose": [x, y, theta]``
    and ``candidates`` by a list of ``{"name", "twists"}`` objects. The
    keyword arguments override the file's values.

    Returns
    -------
    ShapePlanSpec
    """
    cfg = Config.read(path)
    if design is None:
        design = _resolve_design(cfg, cfg.get("design"), 0)
    nseg = design.segment_count
    load = cfg.get("tip_load", vector(3), np.asarray([7., 0., 0.])) if load is None else load

    target_twists = None
    if "target" in cfg:
        target_twists = _read_shape(cfg.child("target"))(nseg)
    if tip_pose is None:
        if "tip_pose" in cfg:
            tip_pose = Pose(*cfg.get("tip_pose", vector(3)))
        elif target_twists is not None:
            tip_pose = design.shape(target_twists).tip_pose
        else:
            raise cfg.error("tip_pose", "give `tip_pose` or a `target` shape.")

    candidates = []
    if target_twists is not None and cfg.get("include_target", bool, False):
        candidates.append(("target", target_twists))
    raw = cfg.get("candidates")
    if isinstance(raw, dict):
        ccfg = cfg.child("candidates")
        generated = tip_equivalent_candidates(
            nseg, tip_pose, ccfg.get("first_angles", vector()),
            split=ccfg.get("split", float, .5), base_pose=design.base_pose,
            )
        for first_angle, twists, message in generated:
            if twists is None:
                logger.warning("No candidate for first-arc curvature %g: %s", first_angle, message)
                continue
            candidates.append(("two_arc_{:g}".format(first_angle), twists))
    else:
        for ii, scfg in enumerate(cfg.children("candidates")):
            candidates.append((scfg.get("name", str, "candidate_{}".format(ii + 1)), _read_shape(scfg)(nseg)))

    return(ShapePlanSpec(
        design=design, tip_pose=Pose(*tip_pose), load=np.asarray(load, dtype=float),
        candidates=candidates, per_edge=cfg.get("per_edge", positive(int), 5),
        ))



def shape_plan(design, candidates, tip_pose, load=(7., 0., 0.), per_edge=5, search=False,
               search_settings=None, seed=None, tol=1e-6):
    """
    Rank candidate shapes that reach the same tip pose under the same load
    by (absolute, relative) unattainability.

    Parameters
    ----------
    design: ArmDesign

    candidates: list of tuple
        (label, N x 3 twists) pairs. Labels must be unique.

    tip_pose: Pose
        Common tip pose; candidates missing it by more than ``tol`` are
        rejected.

    load: array_like
        Tip load. Defaults to (7, 0, 0).

    search: bool
        Also run the search baseline on each accepted candidate.

    seed: int
        Search seed.

    Returns
    -------
    ShapePlanReport
    """
    labels = [label for label, _ in candidates]
    duplicates = sorted(set(ll for ll in labels if labels.count(ll) > 1))
    if duplicates:
        raise ValueError(
            "Candidate labels must be unique, repeated: {}.".format(", ".join(map(str, duplicates)))
            )
    tip_pose = np.asarray(tip_pose, dtype=float)
    records, rejected, shapes = [], [], {}
    estimator = WrenchHullAttainability(design)
    for label, twists in candidates:
        shape = design.shape(twists)
        tip = np.asarray(shape.tip_pose)
        miss = max(np.abs(tip[:2] - tip_pose[:2]).max(), abs(wrap_angle(tip[2] - tip_pose[2])))
        if miss > tol:
            msg = "tip pose misses the target by {:.3e}".format(miss)
            warnings.warn("Candidate `{}` rejected: {}.".format(label, msg))
            rejected.append({"candidate": label, "reason": msg})
            continue
        report = estimator(totask(shape, load), per_edge=per_edge)
        record = {"candidate": label, "absolute": report.absolute_unattainability,
                  "relative": report.relative_unattainability, "attainable": report.attainable}
        if search:
            result = SearchAttainability(design)(
                Task(shape, report.task.tip_load), settings=search_settings, random_state=seed,
                )
            record["s"] = result.s
        records.append(record)
        shapes[label] = shape

    if not records:
        raise ValueError("Every candidate was rejected: none reaches the tip pose within {:g}.".format(tol))

    df = pd.DataFrame.from_records(records)
    df["rank_abs"] = df["absolute"].rank(method="min").astype(int)
    df["rank_rel"] = df["relative"].rank(method="min").astype(int)
    df = df.sort_values(["absolute", "relative"], kind="mergesort").reset_index(drop=True)
    df.insert(0, "rank", np.arange(1, len(df) + 1))
    df["disagree"] = df["rank_abs"]!=df["rank_rel"]
    return(ShapePlanReport(
        design, df, pd.DataFrame.from_records(rejected, columns=["candidate", "reason"]),
        tip_pose, np.asarray(load, dtype=float), shapes,
        ))



class ShapePlanReport:
    """
    Ranked candidates of a shape-planning run.
    """
    def __init__(self, design, ranking, rejected, tip_pose, load, shapes):
        self.design = design
        self.ranking = ranking
        self.rejected = rejected
        self.tip_pose = tip_pose
        self.load = load
        self.shapes = shapes
        self._summspecs = {"absolute": "{:.6e}".format, "relative": "{:.6e}".format,
                           "s": "{:.6e}".format}


    @property
    def summary(self):
        return(self.ranking)


    @property
    def best(self):
        return(self.ranking.loc[0, "candidate"])


    def to_text(self):
        lines = [
            "design = {}".format(self.design.name),
            "tip_pose = {}".format(" ".join("{:.17g}".format(v) for v in self.tip_pose)),
            "tip_load = {}".format(" ".join("{:.17g}".format(v) for v in self.load)),
            "candidates = {}".format(len(self.ranking)),
            "rejected = {}".format(len(self.rejected)),
            "",
            self.ranking.to_string(index=False, formatters=self._summspecs),
            ]
        for rec in self.rejected.itertuples(index=False):
            lines.append("rejected {}: {}".format(rec.candidate, rec.reason))
        return("\n".join(lines) + "\n")


    def __str__(self):
        return(self.to_text())


    def __repr__(self):
        return(self.to_text())


    def write(self, output_dir, svg=False):
        os.makedirs(output_dir, exist_ok=True)
        paths = [os.path.join(output_dir, "shape_plan.csv"), os.path.join(output_dir, "report.txt")]
        write_csv(self.ranking, paths[0])
        with open(paths[1], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())
        if svg:
            import matplotlib
            matplotlib.use("Agg")
            paths.append(os.path.join(output_dir, "shape_plan.svg"))
            self.plot(exhibit_path=paths[-1])
        return(paths)


    def plot(self, axes_style="darkgrid", context="notebook", exhibit_path=None):
        """
        Candidate shapes colored by rank, best first.
        """
        import matplotlib.pyplot as plt
        import seaborn as sns
        sns.set_context(context)
        palette = sns.color_palette("rocket", len(self.ranking))

        with sns.axes_style(axes_style):
            fig, ax = plt.subplots(1, 1, figsize=(6, 6), tight_layout=True)
            for rec, color in zip(self.ranking.itertuples(index=False), palette):
                plot_arm(ax, self.design, self.shapes[rec.candidate], color=color,
                         label="{}. {}".format(rec.rank, rec.candidate), show_actuators=False)
            ax.scatter([self.tip_pose[0]], [self.tip_pose[1]], color="#E02C70", marker="x", s=40)
            ax.legend(loc="best", fontsize=8)

            if exhibit_path is not None:
                plt.savefig(exhibit_path)
                plt.close(fig)
            else:
                plt.show()
