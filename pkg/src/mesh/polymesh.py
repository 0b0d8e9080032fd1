"""Polygonal meshes with a conforming simplicial sub-triangulation."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from ..errors import MeshError

logger = logging.getLogger(__name__)

BOUNDARY = -1

# relative tolerance of geometric predicates, scaled by the local diameter
GEOM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PolyFace:
    """A face of the polytopic mesh, stored as a chain of straight sub-edges.

    Sub-edges are vertex index pairs oriented counterclockwise with respect to
    the owner cell, so ``sub_normals`` point out of the owner.
    """

    sub_edges: np.ndarray
    owner_cell: int
    neighbor_cell: int
    unit_normal: np.ndarray
    sub_normals: np.ndarray
    sub_lengths: np.ndarray
    measure: float

    @property
    def is_boundary(self):
        return self.neighbor_cell == BOUNDARY


@dataclass(frozen=True, eq=False)
class PolyMesh:
    vertices: np.ndarray
    cells: tuple
    subtriangles: np.ndarray
    subtriangle_parent: np.ndarray
    faces: tuple
    cell_diameters: np.ndarray
    c_delta: float
    subdomains: np.ndarray | None = None

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_subtriangles(self):
        return len(self.subtriangles)

    @property
    def h_max(self):
        return float(self.cell_diameters.max())

    @cached_property
    def cell_areas(self):
        return np.array([polygon_area(self.vertices[c]) for c in self.cells])

    @property
    def area(self):
        return float(self.cell_areas.sum())

    @cached_property
    def subtriangle_areas(self):
        p = self.vertices[self.subtriangles]
        return 0.5 * _cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])

    @cached_property
    def interior_faces(self):
        return [i for i, f in enumerate(self.faces) if not f.is_boundary]

    @cached_property
    def boundary_faces(self):
        return [i for i, f in enumerate(self.faces) if f.is_boundary]

    @cached_property
    def cell_faces(self):
        """Face indices touching each cell."""
        out = [[] for _ in range(self.n_cells)]
        for i, f in enumerate(self.faces):
            out[f.owner_cell].append(i)
            if not f.is_boundary:
                out[f.neighbor_cell].append(i)
        return out

    @cached_property
    def bounding_boxes(self):
        """Per-cell (center, half-diagonal) of the axis-aligned bounding box."""
        centers = np.empty((self.n_cells, 2))
        scales = np.empty(self.n_cells)
        for i, c in enumerate(self.cells):
            p = self.vertices[c]
            lo, hi = p.min(axis=0), p.max(axis=0)
            centers[i] = 0.5 * (lo + hi)
            scales[i] = 0.5 * np.linalg.norm(hi - lo)
        return centers, scales

    @cached_property
    def subedge_triangles(self):
        """Map sorted sub-edge vertex pair -> list of sub-triangle indices."""
        table = {}
        for t, tri in enumerate(self.subtriangles):
            for k in range(3):
                a, b = int(tri[k]), int(tri[(k + 1) % 3])
                table.setdefault((min(a, b), max(a, b)), []).append(t)
        return table

    @cached_property
    def vertex_means(self):
        return np.array([self.vertices[c].mean(axis=0) for c in self.cells])

    def summary(self):
        n_int = len(self.interior_faces)
        return (f"{self.n_cells} cells, {self.n_subtriangles} sub-triangles, "
                f"{len(self.faces)} faces ({n_int} interior), h_max={self.h_max:.4g}")


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def polygon_area(points):
    """Signed shoelace area, computed relative to the first vertex."""
    q = np.asarray(points, dtype=float) - points[0]
    return 0.5 * float(np.sum(_cross(q, np.roll(q, -1, axis=0))))


def polygon_centroid(points):
    q = np.asarray(points, dtype=float)
    origin = q[0]
    q = q - origin
    nxt = np.roll(q, -1, axis=0)
    cr = _cross(q, nxt)
    area = 0.5 * cr.sum()
    if abs(area) < np.finfo(float).tiny:
        return origin + q.mean(axis=0)
    c = ((q + nxt) * cr[:, None]).sum(axis=0) / (6.0 * area)
    return origin + c


def cell_diameters(vertices, cells):
    return np.array([pdist(vertices[c]).max() for c in cells])


def mesh_size(mesh):
    """Return ``(h_max, per-cell diameters)``."""
    return mesh.h_max, mesh.cell_diameters.copy()


def _check_cell(vertices, cell, index):
    if len(cell) < 3:
        raise MeshError(f"cell {index} has {len(cell)} vertices, need at least 3")
    if len(set(int(v) for v in cell)) != len(cell):
        raise MeshError(f"cell {index} repeats a vertex")
    p = vertices[cell]
    diam = pdist(p).max()
    tol = GEOM_TOL * diam * diam
    e = np.roll(p, -1, axis=0) - p
    turn = _cross(e, np.roll(e, -1, axis=0))
    if np.any(turn < -tol):
        k = int(np.argmin(turn))
        raise MeshError(f"cell {index} has a reflex vertex at local position {(k + 1) % len(cell)}")
    if polygon_area(p) <= tol:
        raise MeshError(f"cell {index} is degenerate or clockwise")


def _orient_cells(vertices, cells):
    out = []
    for c in cells:
        c = np.asarray(c, dtype=np.int64)
        if polygon_area(vertices[c]) < 0:
            c = c[::-1].copy()
        out.append(c)
    return out


def subtriangulate(vertices, cells):
    """Fan triangulation from local vertex 0 of each (convex) cell.

    Returns ``(triangles, parents)``; an n-gon yields n-2 triangles and no
    vertices are added.
    """
    tris, parents = [], []
    for index, cell in enumerate(cells):
        _check_cell(vertices, cell, index)
        p = vertices[cell]
        diam = pdist(p).max()
        for k in range(1, len(cell) - 1):
            a = 0.5 * _cross(p[k] - p[0], p[k + 1] - p[0])
            if a <= GEOM_TOL * diam * diam:
                raise MeshError(f"cell {index}: fan triangle {k - 1} is degenerate "
                                "(collinear vertices through the fan apex)")
            tris.append((cell[0], cell[k], cell[k + 1]))
            parents.append(index)
    return np.array(tris, dtype=np.int64).reshape(-1, 3), np.array(parents, dtype=np.int64)


def _edge_normal(vertices, a, b):
    t = vertices[b] - vertices[a]
    length = float(np.hypot(t[0], t[1]))
    return np.array([t[1], -t[0]]) / length, length


def _check_t_junctions(vertices, single_edges):
    if not single_edges:
        return
    tree = cKDTree(vertices)
    for (a, b), cell in single_edges:
        pa, pb = vertices[a], vertices[b]
        t = pb - pa
        length = np.hypot(*t)
        mid = 0.5 * (pa + pb)
        for k in tree.query_ball_point(mid, 0.5 * length * (1 + 1e-9)):
            if k in (a, b):
                continue
            s = np.dot(vertices[k] - pa, t) / (length * length)
            dist = abs(_cross(t, vertices[k] - pa)) / length
            if GEOM_TOL < s < 1 - GEOM_TOL and dist <= GEOM_TOL * length:
                raise MeshError(f"unmatched interior edge ({a}, {b}) of cell {cell}: "
                                f"vertex {k} lies inside it (T-junction between polytopes)")


def build_face_topology(vertices, cells=None):
    """Assign every cell-boundary segment to exactly one PolyFace.

    Accepts a PolyMesh or a ``(vertices, cells)`` pair. Interior faces group all
    edges shared by the same pair of cells (owner is the lower cell index);
    boundary faces group consecutive collinear edges of a cell.
    """
    if cells is None:
        vertices, cells = vertices.vertices, vertices.cells
    edge_cells = {}
    for ci, cell in enumerate(cells):
        n = len(cell)
        for k in range(n):
            a, b = int(cell[k]), int(cell[(k + 1) % n])
            edge_cells.setdefault((min(a, b), max(a, b)), []).append(ci)
    single = []
    for key, owners in edge_cells.items():
        if len(owners) > 2:
            raise MeshError(f"edge {key} is shared by {len(owners)} cells")
        if len(owners) == 2 and owners[0] == owners[1]:
            raise MeshError(f"edge {key} appears twice in cell {owners[0]}")
        if len(owners) == 1:
            single.append((key, owners[0]))
    _check_t_junctions(vertices, single)

    builders = []
    pair_face = {}
    for ci, cell in enumerate(cells):
        n = len(cell)
        edges = []
        for k in range(n):
            a, b = int(cell[k]), int(cell[(k + 1) % n])
            owners = edge_cells[(min(a, b), max(a, b))]
            other = BOUNDARY if len(owners) == 1 else (owners[1] if owners[0] == ci else owners[0])
            normal, length = _edge_normal(vertices, a, b)
            edges.append((a, b, other, normal, length))

        def mergeable(e0, e1):
            return (e0[2] == BOUNDARY and e1[2] == BOUNDARY
                    and np.linalg.norm(e0[3] - e1[3]) <= 1e-12)

        start = 0
        for k in range(n):
            if not mergeable(edges[k - 1], edges[k]):
                start = k
                break
        current = None
        for j in range(n):
            e = edges[(start + j) % n]
            a, b, other, normal, length = e
            if other == BOUNDARY:
                if current is not None and mergeable(current["last"], e):
                    current["edges"].append(e)
                    current["last"] = e
                    continue
                current = {"owner": ci, "neighbor": BOUNDARY, "edges": [e], "last": e}
                builders.append(current)
                continue
            current = None
            if other < ci:
                continue
            key = (ci, other)
            if key not in pair_face:
                pair_face[key] = len(builders)
                builders.append({"owner": ci, "neighbor": other, "edges": []})
            builders[pair_face[key]]["edges"].append(e)

    faces = []
    for bld in builders:
        es = bld["edges"]
        sub_edges = np.array([(e[0], e[1]) for e in es], dtype=np.int64)
        normals = np.array([e[3] for e in es])
        lengths = np.array([e[4] for e in es])
        avg = (normals * lengths[:, None]).sum(axis=0)
        faces.append(PolyFace(
            sub_edges=sub_edges,
            owner_cell=bld["owner"],
            neighbor_cell=bld["neighbor"],
            unit_normal=avg / np.linalg.norm(avg),
            sub_normals=normals,
            sub_lengths=lengths,
            measure=float(lengths.sum()),
        ))
    return tuple(faces)


def _check_submesh(vertices, cells, tris, parents, faces):
    n_cells = len(cells)
    if len(tris) == 0:
        raise MeshError("sub-triangulation is empty")
    if parents.min() < 0 or parents.max() >= n_cells:
        raise MeshError("sub-triangle parent index out of range")
    p = vertices[tris]
    areas = 0.5 * _cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    if np.any(areas <= 0):
        raise MeshError(f"sub-triangle {int(np.argmin(areas))} is degenerate or clockwise")
    sums = np.bincount(parents, weights=areas, minlength=n_cells)
    cell_area = np.array([polygon_area(vertices[c]) for c in cells])
    bad = np.abs(sums - cell_area) > 1e-12 * np.maximum(cell_area, 1e-300)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise MeshError(f"sub-triangles of cell {i} cover area {sums[i]!r}, cell area {cell_area[i]!r}")

    counts = {}
    for tri in tris:
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (min(a, b), max(a, b))
            counts[key] = counts.get(key, 0) + 1
    boundary_edges = set()
    for f in faces:
        if f.is_boundary:
            boundary_edges.update((min(a, b), max(a, b)) for a, b in f.sub_edges)
    face_edges = set()
    for f in faces:
        face_edges.update((min(a, b), max(a, b)) for a, b in f.sub_edges)
    for key, c in counts.items():
        if c > 2 or (c == 1 and key not in boundary_edges):
            raise MeshError(f"sub-triangulation is not conforming at sub-edge {key} "
                            f"(shared by {c} sub-triangles)")
    missing = face_edges - set(counts)
    if missing:
        raise MeshError(f"face sub-edge {sorted(missing)[0]} is not a sub-triangle edge")


def _c_delta(vertices, tris, parents, diameters):
    p = vertices[tris]
    h_tri = np.max(np.linalg.norm(p - np.roll(p, -1, axis=1), axis=2), axis=1)
    ratio = diameters[parents] / h_tri
    return float(max(ratio.max(), (1.0 / ratio).max()))


def build_mesh(vertices, cells, subtriangles=None, subtriangle_parent=None, subdomains=None):
    """Validate a polygonal mesh and attach its sub-triangulation and faces.

    Cells are reoriented counterclockwise. Without explicit sub-triangles a fan
    triangulation is used.
    """
    vertices = np.ascontiguousarray(vertices, dtype=float)
    if vertices.ndim != 2 or vertices.shape[1] != 2:
        raise MeshError("vertices must be an (n, 2) array")
    if len(cells) == 0:
        raise MeshError("mesh has no cells")
    for index, c in enumerate(cells):
        c = np.asarray(c)
        if c.size and (c.min() < 0 or c.max() >= len(vertices)):
            raise MeshError(f"cell {index}: vertex index out of range")
    cells = _orient_cells(vertices, cells)
    for index, c in enumerate(cells):
        _check_cell(vertices, c, index)
    if subtriangles is None:
        tris, parents = subtriangulate(vertices, cells)
    else:
        tris = np.asarray(subtriangles, dtype=np.int64).reshape(-1, 3)
        parents = np.asarray(subtriangle_parent, dtype=np.int64)
        if len(parents) != len(tris):
            raise MeshError("one parent cell is needed per sub-triangle")
        p = vertices[tris]
        flip = _cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]) < 0
        tris = tris.copy()
        tris[flip] = tris[flip][:, [0, 2, 1]]
    faces = build_face_topology(vertices, cells)
    _check_submesh(vertices, cells, tris, parents, faces)
    diameters = cell_diameters(vertices, cells)
    if subdomains is not None:
        subdomains = np.asarray(subdomains, dtype=np.int64)
        if len(subdomains) != len(cells):
            raise MeshError("one subdomain id is needed per cell")
    mesh = PolyMesh(
        vertices=vertices,
        cells=tuple(cells),
        subtriangles=tris,
        subtriangle_parent=parents,
        faces=faces,
        cell_diameters=diameters,
        c_delta=_c_delta(vertices, tris, parents, diameters),
        subdomains=subdomains,
    )
    logger.debug("built mesh: %s", mesh.summary())
    return mesh


def check_mesh(mesh, domain_area=None):
    """Re-verify the structural invariants of a mesh; raises MeshError."""
    for index, c in enumerate(mesh.cells):
        _check_cell(mesh.vertices, c, index)
    _check_submesh(mesh.vertices, mesh.cells, mesh.subtriangles, mesh.subtriangle_parent, mesh.faces)
    for f in mesh.faces:
        if abs(np.linalg.norm(f.unit_normal) - 1.0) > 1e-12:
            raise MeshError("face normal is not unit length")
        if abs(f.measure - f.sub_lengths.sum()) > 1e-12 * f.measure:
            raise MeshError("face measure differs from its sub-edge lengths")
    if domain_area is not None and abs(mesh.area - domain_area) > 1e-12 * domain_area:
        raise MeshError(f"cells cover area {mesh.area!r}, domain area {domain_area!r}")
    return True


def nudge_into_cells(mesh, points, cells, eps=1e-10):
    """Move points a relative distance ``eps * h_T`` towards the vertex mean of their cell.

    Gives one-sided evaluation points for fields that jump across faces.
    """
    points = np.asarray(points, dtype=float)
    cells = np.asarray(cells)
    centers = mesh.vertex_means[cells]
    d = centers - points
    dist = np.linalg.norm(d, axis=-1, keepdims=True)
    step = eps * mesh.cell_diameters[cells][..., None]
    return points + step * d / np.maximum(dist, np.finfo(float).tiny)
