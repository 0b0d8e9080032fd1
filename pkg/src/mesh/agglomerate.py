"""Agglomeration of fine simplicial/quadrilateral meshes and aligned mesh families."""
from __future__ import annotations

import logging

import numpy as np

from ..errors import MeshError
from .polymesh import build_mesh, polygon_area
from .voronoi import _check_domain, clipped_voronoi_cells, lloyd_relax

logger = logging.getLogger(__name__)


def structured_quad_mesh(nx, ny, domain=(0.0, 1.0, 0.0, 1.0)):
    """Return ``(vertices, quads)`` of an ``nx`` by ``ny`` grid of rectangles."""
    x0, x1, y0, y1 = _check_domain(domain)
    if nx < 1 or ny < 1:
        raise MeshError("structured mesh needs at least one element per direction")
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    vertices = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    quads = np.column_stack([
        idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel(),
        idx[1:, 1:].ravel(), idx[1:, :-1].ravel(),
    ])
    return vertices, quads


def structured_triangle_mesh(nx, ny, domain=(0.0, 1.0, 0.0, 1.0)):
    """Each grid rectangle split along its (v0, v2) diagonal."""
    vertices, quads = structured_quad_mesh(nx, ny, domain)
    tris = np.vstack([quads[:, [0, 1, 2]], quads[:, [0, 2, 3]]])
    return vertices, tris


def _split_elements(vertices, elements):
    tris, owner = [], []
    for e, el in enumerate(elements):
        el = [int(v) for v in el]
        if polygon_area(vertices[el]) < 0:
            el = el[::-1]
        if len(el) == 3:
            tris.append(el)
            owner.append(e)
        elif len(el) == 4:
            tris.append([el[0], el[1], el[2]])
            tris.append([el[0], el[2], el[3]])
            owner.extend([e, e])
        else:
            raise MeshError(f"fine element {e} has {len(el)} vertices; only triangles and quads")
    return np.array(tris, dtype=np.int64), np.array(owner, dtype=np.int64)


def _group_loop(vertices, elements, members, group):
    directed = {}
    for e in members:
        el = [int(v) for v in elements[e]]
        if polygon_area(vertices[el]) < 0:
            el = el[::-1]
        for k in range(len(el)):
            a, b = el[k], el[(k + 1) % len(el)]
            directed[(a, b)] = directed.get((a, b), 0) + 1
    boundary = [(a, b) for (a, b) in directed if (b, a) not in directed]
    nxt = {}
    for a, b in boundary:
        if a in nxt:
            raise MeshError(f"group {group} is not simply connected (pinched at vertex {a})")
        nxt[a] = b
    if not boundary:
        raise MeshError(f"group {group} has no boundary")
    start = min(nxt)
    loop = [start]
    v = nxt[start]
    while v != start:
        loop.append(v)
        if v not in nxt or len(loop) > len(boundary):
            raise MeshError(f"group {group} boundary is not a closed loop")
        v = nxt[v]
    if len(loop) != len(boundary):
        raise MeshError(f"group {group} is not simply connected or is disconnected")
    return loop


def agglomerate_mesh(vertices, elements, partition, subdomains=None):
    """Agglomerate fine triangles/quads into polygonal cells.

    Cell ``i`` is the union of the fine elements of the ``i``-th smallest group id.
    The fine elements become the sub-triangulation (quads split into two
    triangles); fine edges inside a group disappear from the face list.
    """
    vertices = np.asarray(vertices, dtype=float)
    partition = np.asarray(partition)
    if len(partition) != len(elements):
        raise MeshError("partition must assign a group to every fine element")
    groups, cell_of = np.unique(partition, return_inverse=True)
    tris, owner = _split_elements(vertices, elements)
    cells = []
    for i, g in enumerate(groups):
        members = np.flatnonzero(cell_of == i)
        cells.append(_group_loop(vertices, elements, members, g))
    mesh = build_mesh(vertices, cells, tris, cell_of[owner], subdomains=subdomains)
    logger.info("agglomerated %d fine elements into %s", len(elements), mesh.summary())
    return mesh


def aligned_mesh(n, domain=(-1.0, 1.0, -1.0, 1.0), style="squares", seed=0, lloyd_iterations=50):
    """Mesh aligned with the horizontal mid-line of ``domain``.

    ``squares`` gives n x n rectangles; ``voronoi`` gives n*n/2 relaxed Voronoi
    cells in the upper half, mirrored into the lower half. Cells carry
    subdomain id 1 above the mid-line and 0 below.
    """
    x0, x1, y0, y1 = _check_domain(domain)
    n = int(n)
    if n < 2 or n % 2:
        raise MeshError(f"aligned meshes need an even n >= 2, got {n}")
    mid = 0.5 * (y0 + y1)
    if style == "squares":
        vertices, quads = structured_quad_mesh(n, n, domain)
        centers = vertices[quads].mean(axis=1)
        return build_mesh(vertices, list(quads), subdomains=(centers[:, 1] > mid).astype(int))
    if style != "voronoi":
        raise MeshError(f"unknown aligned mesh style {style!r}")
    half = (x0, x1, mid, y1)
    n_half = n * n // 2
    rng = np.random.default_rng(seed)
    points = np.array([x0, mid]) + rng.random((n_half, 2)) * np.array([x1 - x0, y1 - mid])
    points = lloyd_relax(points, half, lloyd_iterations)
    upper, cells = clipped_voronoi_cells(points, half)
    lower = upper.copy()
    lower[:, 1] = 2 * mid - lower[:, 1]
    # vertices on the mid-line are shared by both halves
    on_mid = upper[:, 1] == mid
    lower_id = np.empty(len(upper), dtype=np.int64)
    lower_id[on_mid] = np.flatnonzero(on_mid)
    extra = np.flatnonzero(~on_mid)
    lower_id[extra] = len(upper) + np.arange(len(extra))
    vertices = np.vstack([upper, lower[extra]])
    mirrored = [lower_id[c][::-1] for c in cells]
    subdomains = np.r_[np.ones(len(cells), dtype=int), np.zeros(len(cells), dtype=int)]
    mesh = build_mesh(vertices, cells + mirrored, subdomains=subdomains)
    logger.info("aligned voronoi mesh: %s", mesh.summary())
    return mesh
