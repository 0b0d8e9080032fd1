"""Quadrature on the polytopic skeleton, stored sub-edge by sub-edge."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SpaceError
from ..mesh import BOUNDARY
from .quadrature import map_segments, quadrature


@dataclass(frozen=True, eq=False)
class FaceQuadrature:
    """Flattened sub-edge data; the normal points out of the owner cell."""

    face: np.ndarray
    owner: np.ndarray
    neighbor: np.ndarray
    normal: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    owner_tri: np.ndarray
    neighbor_tri: np.ndarray

    @property
    def interior(self):
        return self.neighbor != BOUNDARY

    @property
    def boundary(self):
        return self.neighbor == BOUNDARY

    def subset(self, mask):
        return FaceQuadrature(**{k: getattr(self, k)[mask] for k in self.__dataclass_fields__})


def face_quadrature(mesh, order):
    rule = quadrature("segment", order)
    parent = mesh.subtriangle_parent
    table = mesh.subedge_triangles
    face, owner, neighbor, normal, a, b, owner_tri, neighbor_tri = ([] for _ in range(8))
    for fi, f in enumerate(mesh.faces):
        for (va, vb), n in zip(f.sub_edges, f.sub_normals):
            tris = table.get((min(va, vb), max(va, vb)), [])
            by_cell = {int(parent[t]): t for t in tris}
            if f.owner_cell not in by_cell:
                raise SpaceError(f"sub-edge ({va}, {vb}) of face {fi} has no sub-triangle "
                                 f"in owner cell {f.owner_cell}")
            face.append(fi)
            owner.append(f.owner_cell)
            neighbor.append(f.neighbor_cell)
            normal.append(n)
            a.append(mesh.vertices[va])
            b.append(mesh.vertices[vb])
            owner_tri.append(by_cell[f.owner_cell])
            neighbor_tri.append(by_cell.get(f.neighbor_cell, BOUNDARY))
    points, weights = map_segments(np.array(a), np.array(b), rule)
    return FaceQuadrature(
        face=np.array(face, dtype=np.int64),
        owner=np.array(owner, dtype=np.int64),
        neighbor=np.array(neighbor, dtype=np.int64),
        normal=np.array(normal),
        points=points,
        weights=weights,
        owner_tri=np.array(owner_tri, dtype=np.int64),
        neighbor_tri=np.array(neighbor_tri, dtype=np.int64),
    )


def face_sizes(mesh):
    """Face-local h: owner diameter on the boundary, mean of both diameters inside."""
    d = mesh.cell_diameters
    return np.array([d[f.owner_cell] if f.is_boundary else 0.5 * (d[f.owner_cell] + d[f.neighbor_cell])
                     for f in mesh.faces])
