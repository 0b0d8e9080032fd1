"""Quadrature geometry and basis values shared by every assembler."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..errors import AssemblyError
from ..mesh import nudge_into_cells
from ..spaces import default_order, face_quadrature, face_sizes, quadrature, volume_quadrature

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VolumePoints:
    points: np.ndarray
    weights: np.ndarray
    tri: np.ndarray
    cell: np.ndarray
    dg_vals: np.ndarray
    dg_grads: np.ndarray
    cf_vals: np.ndarray
    cf_grads: np.ndarray


@dataclass(frozen=True, eq=False)
class FacePoints:
    """Per face quadrature point data; ``*_in``/``*_out`` refer to owner/neighbour sides.

    Neighbour arrays are zero on boundary points. ``points_in``/``points_out``
    are the points nudged into the owner/neighbour cell for one-sided
    coefficient evaluation.
    """

    face: np.ndarray
    owner: np.ndarray
    neighbor: np.ndarray
    normal: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    interior: np.ndarray
    tri_in: np.ndarray
    tri_out: np.ndarray
    points_in: np.ndarray
    points_out: np.ndarray
    dg_in: np.ndarray
    dg_grad_in: np.ndarray
    dg_out: np.ndarray
    dg_grad_out: np.ndarray
    cf_in: np.ndarray
    cf_grad_in: np.ndarray
    cf_out: np.ndarray
    cf_grad_out: np.ndarray

    def select(self, mask):
        return FacePoints(**{k: getattr(self, k)[mask] for k in self.__dataclass_fields__})


@dataclass(frozen=True, eq=False)
class AssemblyContext:
    dg: object
    conf: object
    recovery: object
    order: int
    volume: VolumePoints
    faces: FacePoints
    face_h: np.ndarray

    @property
    def mesh(self):
        return self.dg.mesh

    @property
    def degree(self):
        return self.dg.degree

    @property
    def volume_nq(self):
        return len(quadrature("triangle", self.order))

    @property
    def face_nq(self):
        return len(quadrature("segment", self.order))

    @property
    def interface_points(self):
        """Mask of face points whose two sides lie in different subdomains."""
        fp = self.faces
        part = self.conf.partition
        out = np.zeros(len(fp.weights), dtype=bool)
        if part is None:
            return out
        out[fp.interior] = part[fp.owner[fp.interior]] != part[fp.neighbor[fp.interior]]
        return out

    def skeleton(self):
        """Interior face points away from subdomain interfaces; jump penalties act here."""
        return self.faces.select(self.faces.interior & ~self.interface_points)


def _volume(dg, conf, order):
    mesh = dg.mesh
    points, weights = volume_quadrature(mesh, order)
    nq = weights.shape[1]
    flat = points.reshape(-1, 2)
    tri = np.repeat(np.arange(mesh.n_subtriangles), nq)
    cell = mesh.subtriangle_parent[tri]
    dv, dgr = dg.evaluate(cell, flat)
    cv, cgr = conf.evaluate(tri, flat)
    return VolumePoints(flat, weights.ravel(), tri, cell, dv, dgr, cv, cgr)


def _faces(dg, conf, order):
    mesh = dg.mesh
    fq = face_quadrature(mesh, order)
    nq = fq.weights.shape[1]
    rep = lambda a: np.repeat(a, nq, axis=0)
    points = fq.points.reshape(-1, 2)
    owner, neighbor = rep(fq.owner), rep(fq.neighbor)
    interior = neighbor >= 0
    tri_in, tri_out = rep(fq.owner_tri), rep(fq.neighbor_tri)
    n, m, k = len(points), dg.local_dim, conf.local_dim

    dg_in, dg_grad_in = dg.evaluate(owner, points)
    cf_in, cf_grad_in = conf.evaluate(tri_in, points)
    dg_out, dg_grad_out = np.zeros((n, m)), np.zeros((n, m, 2))
    cf_out, cf_grad_out = np.zeros((n, k)), np.zeros((n, k, 2))
    if interior.any():
        dg_out[interior], dg_grad_out[interior] = dg.evaluate(neighbor[interior], points[interior])
        cf_out[interior], cf_grad_out[interior] = conf.evaluate(tri_out[interior], points[interior])

    points_in = nudge_into_cells(mesh, points, owner)
    points_out = points_in.copy()
    if interior.any():
        points_out[interior] = nudge_into_cells(mesh, points[interior], neighbor[interior])
    return FacePoints(
        face=rep(fq.face), owner=owner, neighbor=neighbor, normal=rep(fq.normal),
        points=points, weights=fq.weights.ravel(), interior=interior,
        tri_in=tri_in, tri_out=tri_out, points_in=points_in, points_out=points_out,
        dg_in=dg_in, dg_grad_in=dg_grad_in, dg_out=dg_out, dg_grad_out=dg_grad_out,
        cf_in=cf_in, cf_grad_in=cf_grad_in, cf_out=cf_out, cf_grad_out=cf_grad_out,
    )


def assembly_context(dg, conf, recovery, order=None):
    """Precompute quadrature points and basis values on sub-triangles and sub-edges."""
    r = dg.degree
    order = default_order(r) if order is None else int(order)
    if order < 2 * r:
        raise AssemblyError(f"quadrature order {order} is below 2r = {2 * r}; refusing to under-integrate")
    if dg.mesh is not conf.mesh or recovery.dg is not dg or recovery.conf is not conf:
        raise AssemblyError("DG space, conforming space and recovery operator do not match")
    ctx = AssemblyContext(
        dg=dg, conf=conf, recovery=recovery, order=order,
        volume=_volume(dg, conf, order),
        faces=_faces(dg, conf, order),
        face_h=face_sizes(dg.mesh),
    )
    logger.debug("assembly context: %d volume points, %d face points (order %d)",
                 len(ctx.volume.weights), len(ctx.faces.weights), order)
    return ctx


def scatter_matrix(rows, cols, local, shape):
    """Sum element matrices ``local[e]`` into ``rows[e] x cols[e]`` of a CSR matrix."""
    r = np.broadcast_to(rows[:, :, None], local.shape)
    c = np.broadcast_to(cols[:, None, :], local.shape)
    return sparse.coo_matrix((local.ravel(), (r.ravel(), c.ravel())), shape=shape).tocsr()


def scatter_vector(rows, local, size):
    out = np.zeros(size)
    np.add.at(out, rows.ravel(), local.ravel())
    return out


def per_element(values, nq):
    """Reshape point-wise arrays ``(n * nq, ...)`` to ``(n, nq, ...)``."""
    return values.reshape((-1, nq) + values.shape[1:])
