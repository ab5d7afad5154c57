"""
Convex hulls of wrench point sets and the point-to-hull distance used as
the unattainability metric.

A ``WrenchHull`` is built in the affine span of its points, so wrench sets
that are planar, collinear or a single point (rank 2, 1 or 0) are handled
alongside full-dimensional ones. ``hull_distance`` solves the vertex-form
quadratic program

    min |V lambda - w|   subject to   lambda >= 0, sum(lambda) = 1

with Wolfe's minimum-norm-point method, which works unchanged for every
rank and returns the optimal convex weights.
"""
import numpy as np
import pandas as pd
import scipy.linalg
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist
from ...arm import reactions
from . import relative_sequence


WRENCH_COLUMNS = ["fx", "fy", "m"]



class WrenchHull:
    """
    Convex hull of a set of (fx, fy, m) points.

    Attributes
    ----------
    vertices: np.ndarray
        K x 3 extreme points in lexicographic order.

    source_index: np.ndarray
        For each vertex, the row of the input point it came from.

    simplices: np.ndarray
        Facets as rows of vertex indices (triangles for rank 3, edges for
        rank 2, a single segment for rank 1, empty for rank 0).

    equations: np.ndarray
        Facet planes [normal, offset] in wrench coordinates with outward
        normals: normal . w + offset <= 0 inside the hull's affine span.

    degenerate_rank: int
        Dimension of the affine span, 0 to 3.

    basis: np.ndarray
        degenerate_rank x 3 orthonormal basis of the span.

    center: np.ndarray
        Centroid of the distinct input points.
    """
    def __init__(self, vertices, source_index, simplices, equations, degenerate_rank,
                 basis, center):
        self.vertices = vertices
        self.source_index = source_index
        self.simplices = simplices
        self.equations = equations
        self.degenerate_rank = degenerate_rank
        self.basis = basis
        self.center = center
        self._diameter = None


    @classmethod
    def from_points(cls, points, rtol=1e-9, min_distinct=1):
        """
        Build the hull of ``points``.

        Parameters
        ----------
        points: array_like
            P x 3 wrench points.

        rtol: float
            Singular values below ``rtol`` times the largest one are treated
            as zero when determining the rank.

        min_distinct: int
            Minimum number of distinct points required.

        Returns
        -------
        WrenchHull
        """
        points = np.asarray(points, dtype=float)
        if points.ndim!=2 or points.shape[1]!=3:
            raise ValueError("`points` must have shape (P, 3), got {}.".format(points.shape))
        if not np.all(np.isfinite(points)):
            raise ValueError("`points` contains non-finite entries.")

        pts, first = np.unique(points, axis=0, return_index=True)
        if pts.shape[0] < min_distinct:
            raise ValueError(
                "Hull requires at least {} distinct wrench points, got {}: the design has "
                "no actuation authority at this shape.".format(min_distinct, pts.shape[0])
                )

        center = pts.mean(axis=0)
        centered = pts - center
        _, svals, vt = np.linalg.svd(centered, full_matrices=False)
        smax = svals[0] if svals.size else 0.
        rank = int(np.sum(svals > rtol * smax)) if smax > 0 else 0
        basis = vt[:rank]

        if rank==0:
            keep = np.asarray([0])
            simplices = np.zeros((0, 1), dtype=int)
            equations = np.zeros((0, 4))

        elif rank==1:
            coords = centered @ basis[0]
            lo, hi = int(np.argmin(coords)), int(np.argmax(coords))
            keep = np.sort([lo, hi])
            simplices = np.asarray([[0, 1]])
            normals = np.stack([-basis[0], basis[0]])
            offsets = -np.asarray([normals[0] @ pts[lo], normals[1] @ pts[hi]])
            equations = np.column_stack([normals, offsets])

        else:
            coords = centered @ basis.T
            try:
                qhull = ConvexHull(coords)
            except QhullError:
                qhull = ConvexHull(coords, qhull_options="QJ")
            keep = np.sort(qhull.vertices)
            remap = -np.ones(pts.shape[0], dtype=int)
            remap[keep] = np.arange(keep.size)
            simplices = remap[qhull.simplices]
            normals = qhull.equations[:, :-1] @ basis
            offsets = qhull.equations[:, -1] - normals @ center
            equations = np.column_stack([normals, offsets])

        return(cls(
            vertices=pts[keep], source_index=first[keep], simplices=simplices,
            equations=equations, degenerate_rank=rank, basis=basis, center=center,
            ))


    @property
    def diameter(self):
        """
        Largest distance between two vertices.
        """
        if self._diameter is None:
            self._diameter = float(pdist(self.vertices).max()) if len(self.vertices) > 1 else 0.
        return(self._diameter)


    def distance(self, point, weights=None):
        return(hull_distance(self, point, weights=weights))


    def contains(self, point, tol=1e-9):
        """
        True when ``point`` lies inside or on the hull within ``tol``.
        """
        return(hull_distance(self, point) <= tol)


    def to_frame(self):
        df = pd.DataFrame(self.vertices, columns=WRENCH_COLUMNS)
        df.insert(0, "vertex", np.arange(len(self.vertices)))
        return(df)


    def __repr__(self):
        return("WrenchHull(rank={}, vertices={}, diameter={:.4g})".format(
            self.degenerate_rank, len(self.vertices), self.diameter
            ))



def _min_norm_point(points, tol=1e-12, max_iter=500):
    """
    Wolfe's algorithm: minimum-norm point of the convex hull of ``points``.

    Parameters
    ----------
    points: np.ndarray
        K x d array.

    Returns
    -------
    tuple
        (nearest point, K convex weights)
    """
    nbr = points.shape[0]
    sqnorms = np.einsum("ij,ij->i", points, points)
    scale = max(sqnorms.max(), 1.)
    active = [int(np.argmin(sqnorms))]
    lam = np.asarray([1.])
    x = points[active[0]].copy()

    for _ in range(max_iter):
        jj = int(np.argmin(points @ x))
        if x @ x - points[jj] @ x <= tol * scale or jj in active:
            break
        active.append(jj)
        lam = np.append(lam, 0.)

        while True:
            pts = points[active]
            size = len(active)
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = pts @ pts.T
            kkt[:size, size] = 1.
            kkt[size, :size] = 1.
            rhs = np.zeros(size + 1)
            rhs[size] = 1.
            mu = scipy.linalg.lstsq(kkt, rhs)[0][:size]

            if np.all(mu > tol):
                lam = mu
                x = mu @ pts
                break

            # Move toward the affine minimizer until a weight hits zero.
            mask = mu <= tol
            denom = lam[mask] - mu[mask]
            ratios = np.where(denom > 0, lam[mask] / np.where(denom > 0, denom, 1.), 0.)
            theta = min(1., float(ratios.min())) if ratios.size else 1.
            lam = theta * mu + (1. - theta) * lam
            drop = lam <= tol
            if drop.all():
                drop[int(np.argmax(lam))] = False
            active = [aa for aa, dd in zip(active, drop) if not dd]
            lam = lam[~drop]
            lam = lam / lam.sum()
            x = lam @ points[active]

    weights = np.zeros(nbr)
    weights[active] = lam
    return(x, weights)



def hull_projection(hull, point, weights=None):
    """
    Nearest point of ``hull`` to ``point`` and the convex weights over the
    hull's vertices that produce it.

    Parameters
    ----------
    hull: WrenchHull

    point: array_like
        Query wrench.

    weights: array_like
        Optional positive diagonal metric on (fx, fy, m). Defaults to the
        identity.

    Returns
    -------
    tuple
        (distance, lambdas, nearest wrench)
    """
    point = np.asarray(point, dtype=float)
    root = np.ones(3) if weights is None else np.sqrt(np.asarray(weights, dtype=float))
    if np.any(~np.isfinite(root)) or np.any(root <= 0):
        raise ValueError("`weights` must be positive.")
    shifted = (hull.vertices - point) * root
    nearest, lam = _min_norm_point(shifted)
    dist = float(np.linalg.norm(nearest))
    if dist <= 1e-12 * (1. + np.abs(shifted).max()):
        dist = 0.
    return(dist, lam, lam @ hull.vertices)



def hull_distance(hull, point, weights=None):
    """
    Euclidean (optionally diagonally weighted) distance from ``point`` to
    ``hull``; zero when the point is inside or on the hull.

    Parameters
    ----------
    hull: WrenchHull

    point: array_like

    weights: array_like
        Optional positive diagonal metric. Defaults to the identity.

    Returns
    -------
    float
    """
    return(hull_projection(hull, point, weights=weights)[0])



def hulls_from_mapped(mapped, relative=False):
    """
    Node-wise hulls from an S x N x 3 batch of attainable wrench sequences.
    Absolute hulls need two distinct points; relative hulls may collapse to
    a point.
    """
    if relative:
        mapped = relative_sequence(mapped)
    return([
        WrenchHull.from_points(mapped[:, ii, :], min_distinct=1 if relative else 2)
        for ii in range(mapped.shape[1])
        ])



def build_absolute_hulls(design, shape, edge_samples):
    """
    Node-wise hulls of the attainable wrenches at ``shape`` over the
    pressure samples.

    Parameters
    ----------
    design: wrenchkit.arm.ArmDesign

    shape: wrenchkit.arm.ArmShape

    edge_samples: np.ndarray
        S x M pressure vectors, normally from ``sample_pressure_edges``.

    Returns
    -------
    list of WrenchHull
        One hull per node 1..N.
    """
    mapped = reactions(design, shape.twists, np.asarray(edge_samples, dtype=float))
    return(hulls_from_mapped(mapped))



def build_relative_hulls(design, shape, edge_samples):
    """
    Node-wise hulls of a_i(p) - a_1(p) over the pressure samples. The node 1
    hull is the origin.

    Parameters
    ----------
    design: wrenchkit.arm.ArmDesign

    shape: wrenchkit.arm.ArmShape

    edge_samples: np.ndarray

    Returns
    -------
    list of WrenchHull
    """
    mapped = reactions(design, shape.twists, np.asarray(edge_samples, dtype=float))
    return(hulls_from_mapped(mapped, relative=True))



def hulls_to_frame(hulls, family="absolute"):
    """
    One row per vertex with its family and 1-based node index.
    """
    frames = []
    for node, hull in enumerate(hulls, start=1):
        df = hull.to_frame()
        df.insert(0, "node", node)
        df.insert(0, "family", family)
        frames.append(df)
    return(pd.concat(frames, ignore_index=True))



def hulls_from_frame(df, family="absolute"):
    """
    Rebuild hulls from the vertex rows written by ``hulls_to_frame``.
    """
    df = df[df["family"]==family]
    return([
        WrenchHull.from_points(dfnode[WRENCH_COLUMNS].values)
        for _, dfnode in df.groupby("node", sort=True)
        ])
