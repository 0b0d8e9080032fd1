"""Lloyd-relaxed Voronoi meshes clipped to a rectangle.

Clipping uses the reflection trick: every generator is mirrored across the four
sides of the domain, so the Voronoi regions of the original generators are
bounded and coincide with the clipped cells.
"""
from __future__ import annotations

import logging

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Voronoi, cKDTree
from tqdm import tqdm

from ..errors import MeshError
from .polymesh import build_mesh, polygon_centroid

logger = logging.getLogger(__name__)

UNIT_SQUARE = (0.0, 1.0, 0.0, 1.0)


def _check_domain(domain):
    x0, x1, y0, y1 = (float(v) for v in domain)
    if not (x1 > x0 and y1 > y0):
        raise MeshError(f"degenerate domain {domain}")
    return x0, x1, y0, y1


def _diameter(domain):
    x0, x1, y0, y1 = domain
    return float(np.hypot(x1 - x0, y1 - y0))


def _check_generators(points, domain):
    if len(points) < 2:
        return
    dist, _ = cKDTree(points).query(points, k=2)
    if dist[:, 1].min() < 1e-12 * _diameter(domain):
        i = int(np.argmin(dist[:, 1]))
        raise MeshError(f"degenerate generator configuration: generator {i} "
                        "coincides with a neighbour")


def _reflected(points, domain):
    x0, x1, y0, y1 = domain
    x, y = points[:, 0], points[:, 1]
    return np.vstack([
        points,
        np.column_stack([2 * x0 - x, y]),
        np.column_stack([2 * x1 - x, y]),
        np.column_stack([x, 2 * y0 - y]),
        np.column_stack([x, 2 * y1 - y]),
    ])


def _snap(coords, domain, tol):
    x0, x1, y0, y1 = domain
    out = coords.copy()
    for axis, lo, hi in ((0, x0, x1), (1, y0, y1)):
        col = np.clip(out[:, axis], lo, hi)
        col[np.abs(col - lo) <= tol] = lo
        col[np.abs(col - hi) <= tol] = hi
        out[:, axis] = col
    return out


def clipped_voronoi_cells(points, domain):
    """Return ``(vertex coordinates, list of vertex-index loops)`` of the clipped diagram."""
    domain = _check_domain(domain)
    _check_generators(points, domain)
    n = len(points)
    tol = 1e-12 * _diameter(domain)
    vor = Voronoi(_reflected(points, domain))
    used = []
    loops = []
    for i in range(n):
        region = vor.regions[vor.point_region[i]]
        if not region or -1 in region:
            raise MeshError(f"Voronoi region of generator {i} is unbounded")
        loops.append(region)
        used.extend(region)
    used = np.unique(used)
    coords = _snap(vor.vertices[used], domain, tol)

    # merge coincident vertices produced by cocircular generators
    pairs = cKDTree(coords).query_pairs(tol, output_type="ndarray")
    m = len(coords)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(m, m))
    _, labels = connected_components(graph, directed=False)
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    vertex_id = relabel[labels]
    merged = coords[first[order]]

    position = {int(v): k for k, v in enumerate(used)}
    cells = []
    for i, region in enumerate(loops):
        ids = [int(vertex_id[position[v]]) for v in region]
        ids = list(dict.fromkeys(ids))
        if len(ids) < 3:
            raise MeshError(f"Voronoi cell of generator {i} collapsed after vertex merging")
        p = merged[ids]
        c = p.mean(axis=0)
        angle = np.arctan2(p[:, 1] - c[1], p[:, 0] - c[0])
        cells.append(np.asarray(ids, dtype=np.int64)[np.argsort(angle, kind="stable")])
    return merged, cells


def lloyd_relax(points, domain, iterations, progress=False):
    points = np.array(points, dtype=float)
    steps = range(iterations)
    if progress:
        steps = tqdm(steps, desc="Lloyd iterations", leave=False)
    for _ in steps:
        coords, cells = clipped_voronoi_cells(points, domain)
        points = np.array([polygon_centroid(coords[c]) for c in cells])
    return points


def generate_voronoi_mesh(n_cells, seed=0, lloyd_iterations=0, domain=UNIT_SQUARE,
                          generators=None, progress=False):
    """Build a mesh of ``n_cells`` convex Voronoi cells clipped to ``domain``.

    Args:
        n_cells: number of generators / cells (>= 1).
        seed: seed of the uniform random generator positions.
        lloyd_iterations: number of Lloyd (centroid) relaxation sweeps.
        domain: ``(xmin, xmax, ymin, ymax)``.
        generators: optional explicit ``(n_cells, 2)`` generator positions,
            used instead of random ones.

    Returns:
        PolyMesh, deterministic for fixed arguments.
    """
    if int(n_cells) < 1:
        raise MeshError(f"n_cells must be a positive integer, got {n_cells}")
    if int(lloyd_iterations) < 0:
        raise MeshError("lloyd_iterations must be non-negative")
    domain = _check_domain(domain)
    x0, x1, y0, y1 = domain
    if generators is None:
        rng = np.random.default_rng(seed)
        points = np.array([x0, y0]) + rng.random((int(n_cells), 2)) * np.array([x1 - x0, y1 - y0])
    else:
        points = np.asarray(generators, dtype=float).reshape(-1, 2)
        if len(points) != int(n_cells):
            raise MeshError(f"expected {n_cells} generators, got {len(points)}")
    points = lloyd_relax(points, domain, int(lloyd_iterations), progress=progress)
    coords, cells = clipped_voronoi_cells(points, domain)
    mesh = build_mesh(coords, cells)
    logger.info("voronoi mesh (seed=%s, lloyd=%s): %s", seed, lloyd_iterations, mesh.summary())
    return mesh
