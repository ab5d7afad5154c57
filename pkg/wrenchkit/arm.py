"""
This module contains the arm model: the ``ArmDesign`` and ``ArmShape``
classes, per-node actuator strains, reaction wrenches, load propagation
and the equilibrium residual. Designs are usually built with ``todesign``,
which accepts either a list of ``ActuatorSpec`` or a JSON design file.

Node indices in the public functions are 1-based: node 1 is the base and
node N + 1 the tip. Reaction wrenches and load wrenches are defined on
nodes 1..N, each expressed in that node's body frame.
"""
import collections
import numpy as np
import pandas as pd
from .actuators import ActuatorModel, tomodel, validate_model
from .lie import (
    IDENTITY, Pose, Twist, Wrench, adjoint, coadjoint_transport_wrench, compose,
    inverse, product_of_exponentials,
    )
from .utils import Config, ConfigError, positive, vector


ActuatorSpec = collections.namedtuple("ActuatorSpec", ["offset", "neutral_length", "model"])

DEFAULT_SHEAR_PENALTY = 1e5



class ArmShape:
    """
    Centerline shape of an arm: N total-arm-scale twists and the N + 1 node
    poses they integrate to. Instances are immutable; ``with_twists``
    returns a new shape.
    """
    def __init__(self, twists, base_pose=IDENTITY):
        """
        Parameters
        ----------
        twists: array_like
            N x 3 array of (length, shear, curvature) twists.

        base_pose: Pose
            Pose of node 1. Defaults to the identity.
        """
        twists = np.array(twists, dtype=float)
        if twists.ndim!=2 or twists.shape[1]!=3 or twists.shape[0] < 1:
            raise ValueError("`twists` must have shape (N, 3) with N >= 1, got {}.".format(twists.shape))
        if not np.all(np.isfinite(twists)):
            raise ValueError("`twists` contains non-finite entries.")
        twists.setflags(write=False)
        self._twists = twists
        self.base_pose = Pose(*(float(v) for v in base_pose))
        self._poses = tuple(
            product_of_exponentials(self.base_pose, [Twist(*t) for t in twists], twists.shape[0])
            )


    @property
    def twists(self):
        return(self._twists)


    @property
    def poses(self):
        return(self._poses)


    @property
    def n(self):
        return(self._twists.shape[0])


    @property
    def tip_pose(self):
        return(self._poses[-1])


    def with_twists(self, twists):
        return(ArmShape(twists, base_pose=self.base_pose))


    def to_frame(self):
        """
        One row per node with the node pose and, for nodes 1..N, the twist
        of the segment leaving it.

        Returns
        -------
        pd.DataFrame
        """
        dfposes = pd.DataFrame(self._poses, columns=["x", "y", "theta"])
        dfposes.insert(0, "node", np.arange(1, self.n + 2))
        dftwists = pd.DataFrame(self._twists, columns=["l", "gamma", "kappa"])
        dftwists["node"] = np.arange(1, self.n + 1)
        return(dfposes.merge(dftwists, on="node", how="left"))


    def __repr__(self):
        return("ArmShape(n={}, tip={})".format(self.n, tuple(round(v, 6) for v in self.tip_pose)))



class ArmDesign:
    """
    Actuator layout, material models and discretization of an arm.
    """
    def __init__(self, actuators, segment_count=5, base_pose=IDENTITY,
                 shear_penalty=DEFAULT_SHEAR_PENALTY, name=None):
        """
        Parameters
        ----------
        actuators: list of ActuatorSpec
            At least two actuators with at least two distinct offsets.

        segment_count: int
            Number of constant-twist segments N. Defaults to 5.

        base_pose: Pose
            Pose of the arm's base. Defaults to the identity.

        shear_penalty: float
            Stiffness (N per unit shear) resisting centerline shear.
            Defaults to 1e5.

        name: str
            Optional label used in reports.
        """
        actuators = [ActuatorSpec(*a) for a in actuators]
        self._validate(actuators, segment_count, shear_penalty)
        self.actuators = tuple(
            ActuatorSpec(float(a.offset), float(a.neutral_length), a.model) for a in actuators
            )
        self.segment_count = int(segment_count)
        self.base_pose = Pose(*(float(v) for v in base_pose))
        self.shear_penalty = float(shear_penalty)
        self.name = name
        self._models_checked = False

        self.offsets = np.asarray([a.offset for a in self.actuators])
        self.neutral_lengths = np.asarray([a.neutral_length for a in self.actuators])
        self.max_pressures = np.asarray([a.model.max_pressure for a in self.actuators])
        self.offsets.setflags(write=False)
        self.neutral_lengths.setflags(write=False)
        self.max_pressures.setflags(write=False)

        # Adjoint of each actuator's inverse mounting transform.
        self._actuator_adjoints = np.stack(
            [adjoint(inverse(Pose(0., r, 0.))) for r in self.offsets]
            )


    @staticmethod
    def _validate(actuators, segment_count, shear_penalty):
        if len(actuators) < 2:
            raise ValueError("A design requires at least 2 actuators, got {}.".format(len(actuators)))
        for ii, act in enumerate(actuators):
            if not isinstance(act.model, ActuatorModel):
                raise TypeError("Actuator {} has no ActuatorModel.".format(ii))
            if not act.neutral_length > 0:
                raise ValueError(
                    "Actuator {} neutral_length must be positive, got {}.".format(ii, act.neutral_length)
                    )
            if not np.isfinite(act.offset):
                raise ValueError("Actuator {} offset must be finite.".format(ii))
        if len(set(float(a.offset) for a in actuators)) < 2:
            raise ValueError("A design requires at least two distinct actuator offsets.")
        if int(segment_count) < 1:
            raise ValueError("`segment_count` must be at least 1, got {}.".format(segment_count))
        if not shear_penalty > 0:
            raise ValueError("`shear_penalty` must be positive, got {}.".format(shear_penalty))


    @property
    def n_actuators(self):
        return(len(self.actuators))


    @property
    def models(self):
        return([a.model for a in self.actuators])


    @property
    def pressure_space(self):
        from .estimators.attainability import PressureSpace
        return(PressureSpace(self.max_pressures))


    def neutral_shape(self):
        """
        Straight shape with every twist equal to (mean neutral length, 0, 0).

        Returns
        -------
        ArmShape
        """
        twist = [self.neutral_lengths.mean(), 0., 0.]
        return(ArmShape(np.tile(twist, (self.segment_count, 1)), base_pose=self.base_pose))


    def shape(self, twists):
        """
        ``ArmShape`` rooted at this design's base pose, checking that the
        segment count matches.
        """
        shape = ArmShape(twists, base_pose=self.base_pose)
        self.check_shape(shape)
        return(shape)


    def check_shape(self, shape):
        if shape.n!=self.segment_count:
            raise ValueError(
                "Shape has {} segments but the design has N={}.".format(shape.n, self.segment_count)
                )


    def check_models(self):
        """
        Raise ``ValueError`` naming the first actuator whose force is not
        finite and monotonic in pressure over its strain range. Hull
        attainability is only meaningful for such models. The check runs
        once per design.
        """
        if self._models_checked:
            return
        for ii, act in enumerate(self.actuators):
            validation = validate_model(act.model)
            if not validation.ok:
                first = validation.violations.iloc[0]
                raise ValueError(
                    "Actuator {} ({}) force is not monotonic in pressure: {} at strain "
                    "{:.4g}, pressure {:g}.".format(
                        ii, act.model.kind, first["direction"], first["strain"],
                        first["violation_pressure"],
                        )
                    )
        self._models_checked = True


    def check_pressures(self, pressures, atol=1e-9):
        """
        Validate and return ``pressures`` as a float array.

        Parameters
        ----------
        pressures: array_like
            One pressure per actuator within [0, max_pressure].

        atol: float
            Absolute slack on the bounds.

        Returns
        -------
        np.ndarray
        """
        pressures = np.asarray(pressures, dtype=float)
        if pressures.shape!=(self.n_actuators,):
            raise ValueError(
                "Expected {} pressures, got shape {}.".format(self.n_actuators, pressures.shape)
                )
        for ii, (p, pmax) in enumerate(zip(pressures, self.max_pressures)):
            if not (np.isfinite(p) and -atol <= p <= pmax + atol):
                raise ValueError(
                    "Pressure {} of actuator {} is outside [0, {:g}].".format(p, ii, pmax)
                    )
        return(np.clip(pressures, 0., self.max_pressures))


    def solve(self, pressures, q_tip=(0., 0., 0.), **kwargs):
        """
        Convenience wrapper around ``EquilibriumSolver``.
        """
        from .estimators.statics import EquilibriumSolver
        return(EquilibriumSolver(self).__call__(pressures, q_tip, **kwargs))


    def analyze(self, task, **kwargs):
        """
        Convenience wrapper around ``WrenchHullAttainability``.
        """
        from .estimators.attainability.wrenchhull import WrenchHullAttainability
        return(WrenchHullAttainability(self).__call__(task, **kwargs))


    def search(self, task, **kwargs):
        """
        Convenience wrapper around ``SearchAttainability``.
        """
        from .estimators.attainability.search import SearchAttainability
        return(SearchAttainability(self).__call__(task, **kwargs))


    def to_config(self):
        cfg = {} if self.name is None else {"name": self.name}
        cfg.update({
            "segment_count": self.segment_count,
            "base_pose": list(self.base_pose),
            "shear_penalty": self.shear_penalty,
            "actuators": [
                dict(offset=a.offset, neutral_length=a.neutral_length, **a.model.to_config())
                for a in self.actuators
                ],
            })
        return(cfg)


    def __repr__(self):
        kinds = ", ".join("{}@{:g}".format(a.model.kind, a.offset) for a in self.actuators)
        return("ArmDesign(name={!r}, N={}, actuators=[{}])".format(self.name, self.segment_count, kinds))



def actuator_twists(design, twists):
    """
    Twists of every actuator at every node.

    Parameters
    ----------
    design: ArmDesign

    twists: np.ndarray
        N x 3 centerline twists.

    Returns
    -------
    np.ndarray
        N x M x 3 array.
    """
    return(np.einsum("mij,nj->nmi", design._actuator_adjoints, np.asarray(twists, dtype=float)))



def _strains(design, twists):
    lengths = actuator_twists(design, twists)[..., 0]
    return((lengths - design.neutral_lengths) / design.neutral_lengths)



def actuator_strains(design, shape, node_index):
    """
    Strain of every actuator at node ``node_index`` (1-based).

    Parameters
    ----------
    design: ArmDesign

    shape: ArmShape

    node_index: int
        1 <= node_index <= N.

    Returns
    -------
    np.ndarray
        One strain per actuator.
    """
    ii = _node(shape, node_index)
    return(_strains(design, shape.twists)[ii])



def reactions(design, twists, pressures, return_clamps=False):
    """
    Vectorized reaction wrenches for many pressure vectors at once.

    The axial force is the sum of actuator forces, the shear force is the
    shear penalty times the summed actuator shears and the moment adds the
    lever arm of each actuator force (offset (0, r) crossed with (f, 0),
    i.e. -r * f) to the actuators' bending moments. Bending moments are
    evaluated at the material curvature kappa / neutral_length.

    Parameters
    ----------
    design: ArmDesign

    twists: np.ndarray
        N x 3 centerline twists.

    pressures: np.ndarray
        S x M pressures (or a single M-vector).

    return_clamps: bool
        If True, also return the number of clamped force evaluations.

    Returns
    -------
    np.ndarray
        S x N x 3 reaction wrenches (N x 3 for a single pressure vector).
    """
    pressures = np.asarray(pressures, dtype=float)
    single = pressures.ndim==1
    pressures = np.atleast_2d(pressures)
    acttwists = actuator_twists(design, twists)
    strains = (acttwists[..., 0] - design.neutral_lengths) / design.neutral_lengths
    curvatures = acttwists[..., 2] / design.neutral_lengths

    nsamp, nnode = pressures.shape[0], acttwists.shape[0]
    fx = np.zeros((nsamp, nnode))
    mm = np.zeros((nsamp, nnode))
    nclamped = 0
    for aa, act in enumerate(design.actuators):
        force, flags = act.model.force_with_flags(strains[None, :, aa], pressures[:, aa, None])
        force = np.broadcast_to(force, (nsamp, nnode))
        nclamped += int(np.count_nonzero(flags))
        fx += force
        mm += -act.offset * force + act.model.moment(curvatures[None, :, aa], pressures[:, aa, None])
    fy = np.broadcast_to(design.shear_penalty * acttwists[..., 1].sum(axis=1), (nsamp, nnode))

    out = np.stack([fx, fy, mm], axis=-1)
    if single:
        out = out[0]
    if return_clamps:
        return(out, nclamped)
    return(out)



def reaction_wrench(design, shape, pressures, node_index):
    """
    Reaction wrench of the arm's cross-section at node ``node_index``.

    Parameters
    ----------
    design: ArmDesign

    shape: ArmShape

    pressures: array_like
        One pressure per actuator.

    node_index: int
        1 <= node_index <= N.

    Returns
    -------
    Wrench
    """
    ii = _node(shape, node_index)
    pressures = design.check_pressures(pressures)
    return(Wrench(*(float(v) for v in reactions(design, shape.twists, pressures)[ii])))



def tip_wrench_body(shape, q_tip):
    """
    Rotate a tip load given in world-aligned axes into the tip body frame.
    """
    theta = shape.tip_pose[2]
    c, s = np.cos(theta), np.sin(theta)
    return(Wrench(c * q_tip[0] + s * q_tip[1], -s * q_tip[0] + c * q_tip[1], float(q_tip[2])))



def load_wrench_sequence(shape, q_tip, include_tip=False):
    """
    Wrench induced at each node by a tip load. ``q_tip`` is expressed in
    world-aligned axes applied at the tip point. Depends only on the shape
    and the load.

    Parameters
    ----------
    shape: ArmShape

    q_tip: Wrench or array_like
        Tip load (fx, fy, m).

    include_tip: bool
        If True, append the tip node's wrench (the load in the tip body
        frame) as entry N + 1.

    Returns
    -------
    np.ndarray
        N x 3 (or (N + 1) x 3) array of wrenches in node body frames.
    """
    q_body = tip_wrench_body(shape, np.asarray(q_tip, dtype=float))
    tip = shape.tip_pose
    out = [
        coadjoint_transport_wrench(compose(inverse(g), tip), q_body)
        for g in shape.poses[:-1]
        ]
    if include_tip:
        out.append(q_body)
    return(np.asarray(out, dtype=float))



def residual(design, shape, pressures, q_tip):
    """
    Equilibrium residual a_i + q_i at every node.

    Parameters
    ----------
    design: ArmDesign

    shape: ArmShape

    pressures: array_like

    q_tip: Wrench or array_like

    Returns
    -------
    np.ndarray
        N x 3 array.
    """
    pressures = np.asarray(pressures, dtype=float)
    return(reactions(design, shape.twists, pressures) + load_wrench_sequence(shape, q_tip))



def balance_shear(design, shape, q_tip, iterations=3):
    """
    Replace the shear component of each twist by the value for which the
    shear penalty balances the load's transverse component. Shear is not
    actuated, so any other value makes the transverse requirement
    unattainable regardless of pressure.

    Parameters
    ----------
    design: ArmDesign

    shape: ArmShape

    q_tip: array_like

    iterations: int
        Fixed-point passes; the poses move with the shear. Defaults to 3.

    Returns
    -------
    ArmShape
    """
    twists = np.array(shape.twists)
    for _ in range(iterations):
        q = load_wrench_sequence(shape, q_tip)
        twists[:, 1] = -q[:, 1] / (design.shear_penalty * design.n_actuators)
        shape = shape.with_twists(twists)
    return(shape)



def _node(shape, node_index):
    if not 1 <= int(node_index) <= shape.n:
        raise ValueError("`node_index` must lie in [1, {}], got {}.".format(shape.n, node_index))
    return(int(node_index) - 1)



def todesign(source, segment_count=None, name=None):
    """
    Create an ``ArmDesign`` from a JSON design file, a parsed ``Config``,
    a dict or a list of ``ActuatorSpec``.

    A design file has the layout::

        {
          "name": "antagonistic",
          "segment_count": 5,
          "base_pose": [0, 0, 0],
          "shear_penalty": 1e5,
          "actuators": [
            {"kind": "bellows", "offset": 0.025, "neutral_length": 0.5,
             "max_pressure": 50000, "bending_K": -0.285,
             "params": {"A_eff": 0.001, "k_b": 40}},
            {"kind": "grid", "offset": -0.025, "neutral_length": 0.5,
             "grid": "bellows_grid.csv"}
          ]
        }

    Parameters
    ----------
    source: str, dict, Config or list of ActuatorSpec

    segment_count: int
        Overrides the file's segment count when given.

    name: str
        Overrides the file's name when given.

    Returns
    -------
    ArmDesign
    """
    if isinstance(source, (list, tuple)):
        return(ArmDesign(source, segment_count=5 if segment_count is None else segment_count, name=name))

    if isinstance(source, str):
        cfg = Config.read(source)
    elif isinstance(source, dict):
        cfg = Config(source)
    elif isinstance(source, Config):
        cfg = source
    else:
        raise TypeError("`source` must be a path, dict, Config or list of ActuatorSpec.")

    actuators = []
    for acfg in cfg.children("actuators"):
        kind = acfg.get("kind", str)
        kwds = {"bending_K": acfg.get("bending_K", float, -0.285)}
        if "reference_pressure" in acfg:
            kwds["reference_pressure"] = acfg.get("reference_pressure", positive())
        if kind=="grid":
            kwds["path"] = cfg.resolve_path(acfg.get("grid", str))
            if "max_pressure" in acfg:
                kwds["max_pressure"] = acfg.get("max_pressure", positive())
        elif kind in ("bellows", "mckibben"):
            if "max_pressure" in acfg:
                kwds["max_pressure"] = acfg.get("max_pressure", positive())
            if "strain_range" in acfg:
                kwds["strain_range"] = tuple(acfg.get("strain_range", vector(2)))
            params = acfg.get("params", dict, {})
            kwds.update({kk: float(vv) for kk, vv in params.items()})
        else:
            raise acfg.error("kind", "`{}` is not a valid actuator kind.".format(kind))

        try:
            model = tomodel(kind, **kwds)
        except (TypeError, ValueError) as exc:
            raise acfg.error("kind", str(exc)) from exc

        actuators.append(ActuatorSpec(
            offset=acfg.get("offset", float),
            neutral_length=acfg.get("neutral_length", positive()),
            model=model,
            ))

    nseg = cfg.get("segment_count", positive(int), 5) if segment_count is None else segment_count
    try:
        return(ArmDesign(
            actuators,
            segment_count=nseg,
            base_pose=Pose(*cfg.get("base_pose", vector(3), (0., 0., 0.))),
            shear_penalty=cfg.get("shear_penalty", positive(), DEFAULT_SHEAR_PENALTY),
            name=cfg.get("name", str, None) if name is None else name,
            ))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise cfg.error("actuators", str(exc)) from exc
