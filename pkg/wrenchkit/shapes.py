"""
Task-shape generators. Each returns an N x 3 array of total-arm-scale
twists (length, shear, curvature); the curvature entry of a segment is the
total bend the whole arm would have if every segment matched it, so a
segment turns through curvature / N.
"""
import numpy as np
from scipy.optimize import root
from .lie import product_of_exponentials, wrap_angle



def constant_curvature(n, length=.5, angle=1.):
    """
    Single arc turning through ``angle`` radians over ``length``.
    """
    return(np.tile([length, 0., angle], (int(n), 1)).astype(float))



def two_arc(n, length=.5, angles=(1., -1.), split=.5):
    """
    Two constant-curvature arcs. The first ``split`` fraction of the
    segments uses curvature ``angles[0]``, the rest ``angles[1]``.
    """
    n = int(n)
    nfirst = int(round(split * n))
    if not 0 <= nfirst <= n:
        raise ValueError("`split` must lie in [0, 1], got {}.".format(split))
    twists = np.tile([length, 0., 0.], (n, 1)).astype(float)
    twists[:nfirst, 2] = angles[0]
    twists[nfirst:, 2] = angles[1]
    return(twists)



def s_curve(n, length=.5, angle=1.5, split=.5):
    """
    Two arcs of opposite curvature.
    """
    return(two_arc(n, length=length, angles=(angle, -angle), split=split))



def curvature_ramp(n, length=.5, start=0., end=2.):
    """
    Curvature varying linearly from ``start`` at the base to ``end`` at
    the tip, sampled at segment midpoints.
    """
    n = int(n)
    mids = (np.arange(n) + .5) / n
    twists = np.tile([length, 0., 0.], (n, 1)).astype(float)
    twists[:, 2] = start + (end - start) * mids
    return(twists)



def tip_curl(n, length=.5, base_angle=.5, tip_angle=4., tip_fraction=.4):
    """
    Gently bent base with a tightly curled tip.
    """
    return(two_arc(n, length=length, angles=(base_angle, tip_angle), split=1. - tip_fraction))



GENERATORS = {
    "constant_curvature": constant_curvature,
    "two_arc": two_arc,
    "s_curve": s_curve,
    "curvature_ramp": curvature_ramp,
    "tip_curl": tip_curl,
    }



def generate(name, n, **params):
    """
    Dispatch to a named generator.

    Parameters
    ----------
    name: str
        One of ``GENERATORS``.

    n: int
        Segment count.

    params: dict
        Generator keyword arguments.

    Returns
    -------
    np.ndarray
    """
    if name not in GENERATORS:
        raise ValueError(
            "`{}` is not a valid shape generator; choose from {}.".format(name, sorted(GENERATORS))
            )
    return(GENERATORS[name](n, **params))



def _two_arc_lengths(n, nfirst, first_angle, second_angle, first_length, second_length):
    twists = np.zeros((n, 3))
    twists[:nfirst] = first_length, 0., first_angle
    twists[nfirst:] = second_length, 0., second_angle
    return(twists)



def tip_equivalent_candidates(n, tip_pose, first_angles, split=.5, base_pose=(0., 0., 0.),
                              length_guess=.5, tol=1e-10):
    """
    Two-arc shapes that all reach ``tip_pose``. For each prescribed
    first-arc curvature the second arc's curvature and both arcs' lengths
    are solved so that the tip pose matches.

    Parameters
    ----------
    n: int
        Segment count, at least 2.

    tip_pose: Pose
        Target tip pose.

    first_angles: sequence of float
        Prescribed curvatures of the first arc, one candidate per entry.

    split: float
        Fraction of segments in the first arc. Defaults to 0.5.

    base_pose: Pose

    length_guess: float
        Starting guess for both arc lengths.

    tol: float
        Root-finding tolerance.

    Returns
    -------
    list of tuple
        (first_angle, twists or None, message); twists is None when no
        admissible solution (positive lengths, tip matched) was found.
    """
    n = int(n)
    nfirst = int(round(split * n))
    if n < 2 or not 1 <= nfirst <= n - 1:
        raise ValueError("Tip-equivalent candidates need two non-empty arcs; got n={}, split={}.".format(n, split))
    tip_pose = np.asarray(tip_pose, dtype=float)

    def tip_error(z, first_angle):
        twists = _two_arc_lengths(n, nfirst, first_angle, z[0], z[1], z[2])
        tip = product_of_exponentials(base_pose, twists, n)[-1]
        return([tip[0] - tip_pose[0], tip[1] - tip_pose[1], wrap_angle(tip[2] - tip_pose[2])])

    out = []
    for first_angle in first_angles:
        # The tip angle fixes the second arc's total turn given the first.
        frac = nfirst / n
        guess_angle = (tip_pose[2] - frac * first_angle) / (1. - frac)
        sol = root(tip_error, x0=[guess_angle, length_guess, length_guess],
                   args=(first_angle,), method="hybr", tol=tol)
        twists = _two_arc_lengths(n, nfirst, first_angle, *sol.x)
        err = np.abs(tip_error(sol.x, first_angle)).max()
        if not sol.success or err > 1e-8:
            out.append((first_angle, None, "root finding failed: {}".format(sol.message)))
        elif sol.x[1] <= 0 or sol.x[2] <= 0:
            out.append((first_angle, None, "solution has non-positive arc length"))
        else:
            out.append((first_angle, twists, "ok"))
    return(out)
