"""
Planar rigid-body primitives. Poses, twists and wrenches are immutable
namedtuples, so every function in this module is pure and can be called
concurrently. Twists are ordered (length, shear, curvature) and wrenches
(fx, fy, m).

The matrix representation of a pose is

    [[cos(theta), -sin(theta), x],
     [sin(theta),  cos(theta), y],
     [0,           0,          1]]

and the matrix representation of a twist uses the skew form

    [[0,     -kappa, l    ],
     [kappa,  0,     gamma],
     [0,      0,     0    ]]
"""
import collections
import numpy as np


# Curvature magnitude below which a segment is treated as straight.
STRAIGHT_THRESHOLD = 1e-9

Pose = collections.namedtuple("Pose", ["x", "y", "theta"])
Twist = collections.namedtuple("Twist", ["l", "gamma", "kappa"])
Wrench = collections.namedtuple("Wrench", ["fx", "fy", "m"])

IDENTITY = Pose(0., 0., 0.)



def wrap_angle(theta):
    """
    Map ``theta`` onto the half-open interval (-pi, pi].

    Parameters
    ----------
    theta: float or np.ndarray
        Angle(s) in radians.

    Returns
    -------
    float or np.ndarray
    """
    return(np.pi - np.mod(np.pi - theta, 2 * np.pi))



def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return(np.asarray([[c, -s], [s, c]]))



def pose_matrix(g):
    """
    Homogeneous 3x3 matrix form of pose ``g``.

    Parameters
    ----------
    g: Pose

    Returns
    -------
    np.ndarray
    """
    mat = np.eye(3)
    mat[:2, :2] = _rotation(g[2])
    mat[:2, 2] = g[0], g[1]
    return(mat)



def pose_from_matrix(mat):
    """
    Recover a ``Pose`` from its homogeneous matrix form. The angle is read
    with ``arctan2`` and therefore lies in (-pi, pi].

    Parameters
    ----------
    mat: np.ndarray
        3x3 homogeneous matrix.

    Returns
    -------
    Pose
    """
    mat = np.asarray(mat, dtype=float)
    theta = wrap_angle(np.arctan2(mat[1, 0], mat[0, 0]))
    return(Pose(float(mat[0, 2]), float(mat[1, 2]), float(theta)))



def twist_matrix(xi):
    """
    Lie algebra (3x3) matrix form of twist ``xi``.

    Parameters
    ----------
    xi: Twist

    Returns
    -------
    np.ndarray
    """
    l, gamma, kappa = xi
    return(np.asarray([[0., -kappa, l], [kappa, 0., gamma], [0., 0., 0.]]))



def compose(a, b):
    """
    Group product ``a`` * ``b``, equivalent to multiplying the matrix forms
    and converting back. The resulting angle is wrapped to (-pi, pi].

    Parameters
    ----------
    a: Pose

    b: Pose

    Returns
    -------
    Pose
    """
    c, s = np.cos(a[2]), np.sin(a[2])
    x = a[0] + c * b[0] - s * b[1]
    y = a[1] + s * b[0] + c * b[1]
    return(Pose(float(x), float(y), float(wrap_angle(a[2] + b[2]))))



def inverse(g):
    """
    Group inverse of pose ``g``.

    Parameters
    ----------
    g: Pose

    Returns
    -------
    Pose
    """
    c, s = np.cos(g[2]), np.sin(g[2])
    x = -(c * g[0] + s * g[1])
    y = -(-s * g[0] + c * g[1])
    return(Pose(float(x), float(y), float(wrap_angle(-g[2]))))



def _arc_coefficients(theta):
    """
    Return sin(theta)/theta and (1 - cos(theta))/theta, falling back on
    Taylor expansions when ``theta`` is within ``STRAIGHT_THRESHOLD`` of 0.
    """
    if abs(theta) <= STRAIGHT_THRESHOLD:
        return(1. - theta**2 / 6., theta / 2. - theta**3 / 24.)
    return(np.sin(theta) / theta, (1. - np.cos(theta)) / theta)



def exp_twist(xi, scale=1.):
    """
    Exponential map of ``scale`` * ``xi`` in closed form. A segment whose
    rotation is below ``STRAIGHT_THRESHOLD`` is integrated with the Taylor
    limit of the arc formula.

    Parameters
    ----------
    xi: Twist
        Twist at total-arm scale.

    scale: float
        Positive fraction of the twist to integrate, typically 1/N.
        Defaults to 1.

    Returns
    -------
    Pose
    """
    if scale <= 0:
        raise ValueError("`scale` must be positive, got {}.".format(scale))
    l, gamma, theta = scale * xi[0], scale * xi[1], scale * xi[2]
    a, b = _arc_coefficients(theta)
    x = a * l - b * gamma
    y = b * l + a * gamma
    return(Pose(float(x), float(y), float(wrap_angle(theta))))



def log_pose(g):
    """
    Logarithm of pose ``g``: the twist whose unit-scale exponential is
    ``g``. Valid for angles in (-pi, pi].

    Parameters
    ----------
    g: Pose

    Returns
    -------
    Twist
    """
    theta = float(wrap_angle(g[2]))
    a, b = _arc_coefficients(theta)
    det = a * a + b * b
    l = (a * g[0] + b * g[1]) / det
    gamma = (-b * g[0] + a * g[1]) / det
    return(Twist(float(l), float(gamma), theta))



def adjoint(g):
    """
    Adjoint matrix of pose ``g`` acting on (length, shear, curvature)
    twist coordinates.

    Parameters
    ----------
    g: Pose

    Returns
    -------
    np.ndarray
        3x3 matrix.
    """
    mat = np.zeros((3, 3))
    mat[:2, :2] = _rotation(g[2])
    mat[0, 2] = g[1]
    mat[1, 2] = -g[0]
    mat[2, 2] = 1.
    return(mat)



def adjoint_inverse_twist(offset, xi):
    """
    Express centerline twist ``xi`` in an actuator frame mounted at
    ``offset`` relative to the centerline cross-section. For an offset of
    (0, r, 0) the curvature is unchanged and the length component becomes
    l - r * kappa, so an actuator at positive r shortens under positive
    curvature.

    Parameters
    ----------
    offset: Pose
        Cross-section transform from the centerline to the actuator.

    xi: Twist

    Returns
    -------
    Twist
    """
    out = adjoint(inverse(offset)) @ np.asarray(xi, dtype=float)
    return(Twist(*(float(v) for v in out)))



def coadjoint_transport_wrench(relative_pose, w):
    """
    Transport a wrench expressed in the frame reached by ``relative_pose``
    back into the originating frame: the force is rotated into the
    originating axes and the moment picks up the lever arm of the rotated
    force about the originating point.

    Parameters
    ----------
    relative_pose: Pose
        Pose of the wrench's frame expressed in the destination frame.

    w: Wrench

    Returns
    -------
    Wrench
    """
    c, s = np.cos(relative_pose[2]), np.sin(relative_pose[2])
    fx = c * w[0] - s * w[1]
    fy = s * w[0] + c * w[1]
    m = w[2] + relative_pose[0] * fy - relative_pose[1] * fx
    return(Wrench(float(fx), float(fy), float(m)))



def product_of_exponentials(base, twists, n=None):
    """
    Integrate a piecewise-constant twist field into node poses. Pose 1 is
    ``base`` and pose k+1 is pose k composed with exp(twist_k / n).

    Parameters
    ----------
    base: Pose

    twists: sequence of Twist
        One twist per segment, at total-arm scale.

    n: int
        Segment count. Defaults to ``len(twists)``.

    Returns
    -------
    list of Pose
        ``n + 1`` poses.
    """
    twists = list(twists)
    n = len(twists) if n is None else int(n)
    if n < 1 or len(twists)!=n:
        raise ValueError(
            "Expected {} twists for {} segments, got {}.".format(n, n, len(twists))
            )
    poses = [Pose(*(float(v) for v in base))]
    for xi in twists:
        poses.append(compose(poses[-1], exp_twist(xi, 1. / n)))
    return(poses)
