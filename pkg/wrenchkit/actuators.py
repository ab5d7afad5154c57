"""
Uniaxial actuator force models f(eps, p) and pressure-scaled bending
moment models tau(kappa, p). Force is positive when the actuator pushes
(extends against its neighbours) and negative when it pulls.

Two analytic surrogates are provided, ``McKibbenModel`` (contracting) and
``BellowsModel`` (extending), together with ``GridModel``, which wraps
characterization data stored in a ``ForceGrid``. All models are immutable
after construction and evaluate element-wise over numpy arrays.
"""
import collections
import warnings
import numpy as np
import pandas as pd
from scipy.interpolate import RegularGridInterpolator


# Bending stiffness shared by both actuator types (N*m^2).
DEFAULT_BENDING_K = -0.285

McKibbenParams = collections.namedtuple(
    "McKibbenParams", ["k_m", "F_m", "eps_free", "max_pressure"],
    )
BellowsParams = collections.namedtuple(
    "BellowsParams", ["A_eff", "k_b", "max_pressure"],
    )

MCKIBBEN_DEFAULTS = McKibbenParams(k_m=80., F_m=60., eps_free=.25, max_pressure=100e3)
BELLOWS_DEFAULTS = BellowsParams(A_eff=1e-3, k_b=40., max_pressure=50e3)
MCKIBBEN_STRAIN_RANGE = (-.35, .10)
BELLOWS_STRAIN_RANGE = (-.05, 1.0)



def _as_output(arr, *args):
    """
    Return a python float when every input was scalar, otherwise ``arr``.
    """
    if all(np.ndim(a)==0 for a in args):
        return(float(arr))
    return(arr)



def _clamp(eps, strain_range):
    eps = np.asarray(eps, dtype=float)
    lower, upper = strain_range
    clamped = np.clip(eps, lower, upper)
    return(clamped, clamped!=eps)



def mckibben_force(eps, p, params=None, strain_range=MCKIBBEN_STRAIN_RANGE,
                   return_flags=False):
    """
    Surrogate McKibben muscle force. A linear passive spring acts on the
    raw strain while the pressure-dependent contraction force acts on the
    strain clamped to ``strain_range``:

        f = -k_m * eps - (p / max_pressure) * F_m * max(0, 1 + eps_c / eps_free)

    The active term vanishes at free contraction eps = -eps_free and is
    held at zero below it, so within the admissible range [-0.35, 0.1] the
    force is f = -k_m * eps for eps <= -eps_free regardless of pressure.
    Without the floor the pressure term would turn into a push that grows
    with pressure, reversing the muscle's direction of monotonicity.

    Parameters
    ----------
    eps: float or np.ndarray
        Actuator strain.

    p: float or np.ndarray
        Actuator pressure in Pa. Broadcast against ``eps``.

    params: McKibbenParams
        Model coefficients. Defaults to ``MCKIBBEN_DEFAULTS``.

    strain_range: tuple
        Admissible (lower, upper) strain.

    return_flags: bool
        If True, also return a boolean array marking clamped evaluations.

    Returns
    -------
    float or np.ndarray, optionally with clamp flags
    """
    prm = MCKIBBEN_DEFAULTS if params is None else params
    eps_raw = np.asarray(eps, dtype=float)
    eps_c, flags = _clamp(eps_raw, strain_range)
    activation = np.maximum(0., 1. + eps_c / prm.eps_free)
    force = -prm.k_m * eps_raw - (np.asarray(p, dtype=float) / prm.max_pressure) * prm.F_m * activation
    force = _as_output(force, eps, p)
    if return_flags:
        return(force, np.broadcast_to(flags, np.shape(force)))
    return(force)



def bellows_force(eps, p, params=None, strain_range=BELLOWS_STRAIN_RANGE,
                  return_flags=False):
    """
    Surrogate bellows force, linear in pressure and strain:

        f = p * A_eff - k_b * eps

    Outside ``strain_range`` the pressure term is held at its value at the
    nearest admissible strain. Since that term does not depend on strain,
    clamping only affects the returned flags.

    Parameters
    ----------
    eps: float or np.ndarray
        Actuator strain.

    p: float or np.ndarray
        Actuator pressure in Pa.

    params: BellowsParams
        Model coefficients. Defaults to ``BELLOWS_DEFAULTS``.

    strain_range: tuple
        Admissible (lower, upper) strain.

    return_flags: bool
        If True, also return a boolean array marking clamped evaluations.

    Returns
    -------
    float or np.ndarray, optionally with clamp flags
    """
    prm = BELLOWS_DEFAULTS if params is None else params
    eps_raw = np.asarray(eps, dtype=float)
    _, flags = _clamp(eps_raw, strain_range)
    force = np.asarray(p, dtype=float) * prm.A_eff - prm.k_b * eps_raw
    force = _as_output(force, eps, p)
    if return_flags:
        return(force, np.broadcast_to(flags, np.shape(force)))
    return(force)



def bending_moment(kappa, p, K=DEFAULT_BENDING_K, p_ref=50e3):
    """
    Pressure-scaled linear bending moment tau = K * (p / p_ref) * kappa.

    Parameters
    ----------
    kappa: float or np.ndarray
        Actuator curvature in 1/m.

    p: float or np.ndarray
        Actuator pressure in Pa, non-negative.

    K: float
        Bending stiffness at the reference pressure (N*m^2). Defaults
        to -0.285.

    p_ref: float
        Reference pressure. Defaults to 50 kPa.

    Returns
    -------
    float or np.ndarray
    """
    if np.any(np.asarray(p) < 0):
        raise ValueError("Pressure must be non-negative for bending_moment.")
    tau = K * (np.asarray(p, dtype=float) / p_ref) * np.asarray(kappa, dtype=float)
    return(_as_output(tau, kappa, p))



class ForceGrid:
    """
    Tabulated force samples over a (strain, pressure) grid.
    """
    def __init__(self, strain_axis, pressure_axis, values):
        """
        Parameters
        ----------
        strain_axis: array_like
            Strictly increasing strain samples.

        pressure_axis: array_like
            Strictly increasing pressure samples in Pa.

        values: array_like
            Force samples in N with shape (len(strain_axis), len(pressure_axis)).
        """
        strain_axis = np.asarray(strain_axis, dtype=float)
        pressure_axis = np.asarray(pressure_axis, dtype=float)
        values = np.asarray(values, dtype=float)

        for name, axis in (("strain_axis", strain_axis), ("pressure_axis", pressure_axis)):
            if axis.ndim!=1 or axis.size < 2:
                raise ValueError("`{}` must be 1-dimensional with at least 2 entries.".format(name))
            if np.any(np.diff(axis) <= 0):
                raise ValueError("`{}` must be strictly increasing.".format(name))

        if values.shape!=(strain_axis.size, pressure_axis.size):
            raise ValueError(
                "`values` has shape {}, expected {}.".format(
                    values.shape, (strain_axis.size, pressure_axis.size)
                    )
                )
        if not np.all(np.isfinite(values)):
            raise ValueError("`values` contains non-finite entries.")

        self.strain_axis = strain_axis
        self.pressure_axis = pressure_axis
        self.values = values
        self._interpolator = None


    @property
    def interpolator(self):
        """
        Bilinear interpolator that extrapolates linearly outside the grid.
        """
        if self._interpolator is None:
            self._interpolator = RegularGridInterpolator(
                (self.strain_axis, self.pressure_axis), self.values,
                method="linear", bounds_error=False, fill_value=None,
                )
        return(self._interpolator)


    @property
    def strain_range(self):
        return((float(self.strain_axis[0]), float(self.strain_axis[-1])))


    @property
    def pressure_range(self):
        return((float(self.pressure_axis[0]), float(self.pressure_axis[-1])))


    def __call__(self, eps, p):
        eps_, p_ = np.broadcast_arrays(np.asarray(eps, dtype=float), np.asarray(p, dtype=float))
        pts = np.stack([eps_.ravel(), p_.ravel()], axis=-1)
        return(self.interpolator(pts).reshape(eps_.shape))


    @classmethod
    def from_csv(cls, path):
        """
        Read a grid from ``path``: the first row holds the pressure axis,
        the first column the strain axis and the body the forces in N.

        Parameters
        ----------
        path: str

        Returns
        -------
        ForceGrid
        """
        df = pd.read_csv(path, index_col=0, encoding="utf-8")
        return(cls(
            strain_axis=df.index.values.astype(float),
            pressure_axis=df.columns.values.astype(float),
            values=df.values,
            ))


    def to_frame(self):
        df = pd.DataFrame(self.values, index=self.strain_axis, columns=self.pressure_axis)
        df.index.name = "strain"
        return(df)


    def to_csv(self, path):
        """
        Write the grid to ``path`` in the layout read by ``from_csv``.
        """
        self.to_frame().to_csv(path, float_format="%.17g", encoding="utf-8")



def grid_force(grid, eps, p):
    """
    Bilinear interpolation of ``grid`` at (``eps``, ``p``). Queries outside
    the grid's bounding box are rejected.

    Parameters
    ----------
    grid: ForceGrid

    eps: float or np.ndarray

    p: float or np.ndarray

    Returns
    -------
    float or np.ndarray
    """
    for name, vals, (lower, upper) in (("strain", eps, grid.strain_range),
                                       ("pressure", p, grid.pressure_range)):
        vals = np.asarray(vals, dtype=float)
        if np.any(vals < lower) or np.any(vals > upper):
            raise ValueError(
                "Query outside the {} axis of the grid: admissible range is "
                "[{}, {}].".format(name, lower, upper)
                )
    return(_as_output(grid(eps, p), eps, p))



class ActuatorModel:
    """
    Base class for actuator force and bending models. Subclasses implement
    ``force_with_flags``.
    """
    kind = None

    def __init__(self, max_pressure, bending_K=DEFAULT_BENDING_K,
                 reference_pressure=None, strain_range=None):
        """
        Parameters
        ----------
        max_pressure: float
            Upper bound of the admissible pressure interval [0, max_pressure].

        bending_K: float
            Bending stiffness at ``reference_pressure``. Defaults to -0.285.

        reference_pressure: float
            Pressure normalizing the bending moment. Defaults to
            ``max_pressure``.

        strain_range: tuple
            Admissible (lower, upper) strain.
        """
        if not max_pressure > 0:
            raise ValueError("`max_pressure` must be positive, got {}.".format(max_pressure))
        self.max_pressure = float(max_pressure)
        self.bending_K = float(bending_K)
        self.reference_pressure = float(
            max_pressure if reference_pressure is None else reference_pressure
            )
        if not self.reference_pressure > 0:
            raise ValueError("`reference_pressure` must be positive.")
        self.strain_range = tuple(float(v) for v in strain_range)


    def force_with_flags(self, eps, p):
        raise NotImplementedError


    def force(self, eps, p):
        """
        Evaluate the axial force, clamping strain where required.

        Parameters
        ----------
        eps: float or np.ndarray

        p: float or np.ndarray

        Returns
        -------
        float or np.ndarray
        """
        force, flags = self.force_with_flags(eps, p)
        if np.any(flags):
            warnings.warn(
                "{} model evaluated outside its strain range {}; active force "
                "clamped.".format(self.kind, self.strain_range)
                )
        return(force)


    def moment(self, kappa, p):
        """
        Bending moment at material curvature ``kappa`` (1/m).
        """
        return(bending_moment(kappa, p, K=self.bending_K, p_ref=self.reference_pressure))


    def to_config(self):
        return({
            "kind": self.kind, "max_pressure": self.max_pressure,
            "bending_K": self.bending_K, "reference_pressure": self.reference_pressure,
            })


    def __repr__(self):
        return("{}(max_pressure={:g})".format(self.__class__.__name__, self.max_pressure))



class McKibbenModel(ActuatorModel):
    """
    Contracting McKibben muscle surrogate. See ``mckibben_force``.
    """
    kind = "mckibben"

    def __init__(self, k_m=80., F_m=60., eps_free=.25, max_pressure=100e3,
                 bending_K=DEFAULT_BENDING_K, reference_pressure=None,
                 strain_range=MCKIBBEN_STRAIN_RANGE):
        super().__init__(max_pressure=max_pressure, bending_K=bending_K,
                         reference_pressure=reference_pressure, strain_range=strain_range)
        if not eps_free > 0:
            raise ValueError("`eps_free` must be positive, got {}.".format(eps_free))
        self.params = McKibbenParams(
            k_m=float(k_m), F_m=float(F_m), eps_free=float(eps_free),
            max_pressure=self.max_pressure,
            )


    def force_with_flags(self, eps, p):
        return(mckibben_force(eps, p, params=self.params, strain_range=self.strain_range,
                              return_flags=True))


    def to_config(self):
        cfg = super().to_config()
        cfg["params"] = {"k_m": self.params.k_m, "F_m": self.params.F_m,
                         "eps_free": self.params.eps_free}
        return(cfg)



class BellowsModel(ActuatorModel):
    """
    Extending bellows surrogate. See ``bellows_force``.
    """
    kind = "bellows"

    def __init__(self, A_eff=1e-3, k_b=40., max_pressure=50e3,
                 bending_K=DEFAULT_BENDING_K, reference_pressure=None,
                 strain_range=BELLOWS_STRAIN_RANGE):
        super().__init__(max_pressure=max_pressure, bending_K=bending_K,
                         reference_pressure=reference_pressure, strain_range=strain_range)
        self.params = BellowsParams(A_eff=float(A_eff), k_b=float(k_b),
                                    max_pressure=self.max_pressure)


    def force_with_flags(self, eps, p):
        return(bellows_force(eps, p, params=self.params, strain_range=self.strain_range,
                             return_flags=True))


    def to_config(self):
        cfg = super().to_config()
        cfg["params"] = {"A_eff": self.params.A_eff, "k_b": self.params.k_b}
        return(cfg)



class GridModel(ActuatorModel):
    """
    Actuator characterized by tabulated data. Evaluations outside the grid
    are extrapolated linearly and flagged.
    """
    kind = "grid"

    def __init__(self, grid, max_pressure=None, bending_K=DEFAULT_BENDING_K,
                 reference_pressure=None):
        if not isinstance(grid, ForceGrid):
            raise TypeError("`grid` must be a ForceGrid instance.")
        max_pressure = grid.pressure_range[1] if max_pressure is None else max_pressure
        super().__init__(max_pressure=max_pressure, bending_K=bending_K,
                         reference_pressure=reference_pressure,
                         strain_range=grid.strain_range)
        self.grid = grid


    def force_with_flags(self, eps, p):
        _, flags = _clamp(eps, self.strain_range)
        force = _as_output(self.grid(eps, p), eps, p)
        return(force, np.broadcast_to(flags, np.shape(force)))



def tomodel(kind, **kwds):
    """
    Construct an actuator model by name.

    Parameters
    ----------
    kind: {"mckibben", "bellows", "grid"}

    kwds: dict
        Keyword arguments forwarded to the model class. For "grid", either
        ``grid`` (a ``ForceGrid``) or ``path`` (a CSV file) is required.

    Returns
    -------
    ActuatorModel
    """
    if kind=="mckibben":
        return(McKibbenModel(**kwds))
    elif kind=="bellows":
        return(BellowsModel(**kwds))
    elif kind=="grid":
        path = kwds.pop("path", None)
        if path is not None:
            kwds["grid"] = ForceGrid.from_csv(path)
        return(GridModel(**kwds))
    raise ValueError("`{}` is not a valid actuator kind.".format(kind))



class ModelValidation:
    """
    Monotonicity report returned by ``validate_model``.
    """
    def __init__(self, model, summary):
        """
        Parameters
        ----------
        model: ActuatorModel

        summary: pd.DataFrame
            One row per strain sample with fields ``strain``, ``direction``
            (increasing, decreasing, constant, mixed or non-finite),
            ``violation`` and ``violation_pressure`` (the first pressure at
            which the force moved against the line's overall direction or
            was not finite).
        """
        self.model = model
        self.summary = summary
        self._summspecs = {"strain": "{:.4f}".format, "violation_pressure": "{:,.0f}".format}


    @property
    def ok(self):
        return(not bool(self.summary["violation"].any()))


    @property
    def violations(self):
        return(self.summary[self.summary["violation"]])


    @property
    def direction(self):
        """
        Overall direction of the model in pressure: "increasing" or
        "decreasing" when every strain line agrees (constant lines are
        compatible with both), otherwise "mixed".
        """
        dirs = set(self.summary["direction"]) - {"constant"}
        if len(dirs)==0:
            return("constant")
        elif len(dirs)==1:
            return(dirs.pop())
        return("mixed")


    def __str__(self):
        return(self.summary.to_string(formatters=self._summspecs))


    def __repr__(self):
        return(self.summary.to_string(formatters=self._summspecs))



def validate_model(model, strain_samples=None, pressure_samples=None, tol=1e-12):
    """
    Check that ``model``'s force is monotonic in pressure along every
    sampled strain.

    Parameters
    ----------
    model: ActuatorModel

    strain_samples: array_like
        At least 10 strains. Defaults to 21 points spanning the model's
        strain range.

    pressure_samples: array_like
        At least 10 pressures. Defaults to 21 points on [0, max_pressure].

    tol: float
        Force differences smaller than ``tol`` count as flat.

    Returns
    -------
    ModelValidation
    """
    if strain_samples is None:
        strain_samples = np.linspace(*model.strain_range, 21)
    if pressure_samples is None:
        pressure_samples = np.linspace(0., model.max_pressure, 21)
    strain_samples = np.asarray(strain_samples, dtype=float)
    pressure_samples = np.sort(np.asarray(pressure_samples, dtype=float))

    for name, arr in (("strain_samples", strain_samples), ("pressure_samples", pressure_samples)):
        if arr.size < 10:
            raise ValueError("`{}` requires at least 10 entries, got {}.".format(name, arr.size))

    forces, _ = model.force_with_flags(strain_samples[:, None], pressure_samples[None, :])
    forces = np.asarray(forces)
    diffs = np.diff(forces, axis=1)

    records = []
    for eps, row, drow in zip(strain_samples, forces, diffs):
        finite = np.isfinite(row)
        if not finite.all():
            records.append({
                "strain": eps, "direction": "non-finite", "violation": True,
                "violation_pressure": pressure_samples[~finite][0],
                })
            continue
        overall = row[-1] - row[0]
        if np.all(np.abs(drow) <= tol):
            direction, bad = "constant", np.zeros(drow.size, dtype=bool)
        elif overall >= 0:
            direction, bad = "increasing", drow < -tol
        else:
            direction, bad = "decreasing", drow > tol
        violation = bool(bad.any())
        if violation:
            direction = "mixed"
        records.append({
            "strain": eps, "direction": direction, "violation": violation,
            "violation_pressure": pressure_samples[1:][bad][0] if violation else np.nan,
            })

    return(ModelValidation(model=model, summary=pd.DataFrame.from_records(records)))
