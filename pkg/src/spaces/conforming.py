"""Continuous Lagrange P_r functions on the sub-triangulation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..errors import SpaceError
from .dg import inside_polygon, local_dim, scaled_monomials


def lattice_nodes(r):
    """Equispaced reference nodes ``(a, b)`` (point ``(a/r, b/r)``), vertices first."""
    nodes = [(a, b) for b in range(r + 1) for a in range(r + 1 - b)]
    vertices = [(0, 0), (r, 0), (0, r)]
    return vertices + [n for n in nodes if n not in vertices]


@dataclass(frozen=True, eq=False)
class ConformingSpace:
    mesh: object
    degree: int
    n_nodes: int
    node_coords: np.ndarray
    tri_nodes: np.ndarray
    omega: sparse.csr_matrix
    inverse_vandermonde: np.ndarray
    partition: np.ndarray | None = None

    @property
    def local_dim(self):
        return local_dim(self.degree)

    @property
    def omega_sizes(self):
        return np.diff(self.omega.indptr)

    def node_cells(self, node):
        """Cells ``T`` with the node in their closure (restricted to its subdomain copy)."""
        return self.omega.indices[self.omega.indptr[node]:self.omega.indptr[node + 1]]

    def reference_basis(self, ref_points):
        """Values ``(n, m)`` and reference gradients ``(n, m, 2)``."""
        ref_points = np.atleast_2d(ref_points)
        n = len(ref_points)
        vals, grads = scaled_monomials(ref_points, np.zeros((n, 2)), np.ones(n), self.degree)
        C = self.inverse_vandermonde
        return vals @ C, np.einsum("qmd,mk->qkd", grads, C)

    def jacobians(self, tris):
        p = self.mesh.vertices[self.mesh.subtriangles[tris]]
        J = np.stack([p[..., 1, :] - p[..., 0, :], p[..., 2, :] - p[..., 0, :]], axis=-1)
        return p[..., 0, :], J

    def evaluate(self, tris, points):
        """Unchecked vectorised evaluation; ``tris[k]`` is the sub-triangle of ``points[k]``."""
        tris = np.asarray(tris)
        points = np.atleast_2d(points)
        origin, J = self.jacobians(tris)
        ref = np.linalg.solve(J, (points - origin)[..., None])[..., 0]
        vals, ref_grads = self.reference_basis(ref)
        Jinv = np.linalg.inv(J)
        grads = np.einsum("qkd,qde->qke", ref_grads, Jinv)
        return vals, grads

    def eval_triangle(self, tri, points, check=True):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if check:
            poly = self.mesh.vertices[self.mesh.subtriangles[tri]]
            h = np.linalg.norm(poly - np.roll(poly, -1, axis=0), axis=1).max()
            ok = inside_polygon(poly, points, h)
            if not np.all(ok):
                k = int(np.flatnonzero(~ok)[0])
                raise SpaceError(f"point {points[k].tolist()} lies outside sub-triangle {tri}")
        return self.evaluate(np.full(len(points), tri), points)


def _cell_partition(mesh, partition):
    if partition is None:
        return None
    if callable(partition):
        p = mesh.vertices[mesh.subtriangles]
        ids = np.asarray(partition(p.mean(axis=1))).astype(np.int64).reshape(-1)
        parents = mesh.subtriangle_parent
        out = np.full(mesh.n_cells, np.iinfo(np.int64).min)
        for t in np.argsort(parents, kind="stable"):
            cell = parents[t]
            if out[cell] == np.iinfo(np.int64).min:
                out[cell] = ids[t]
            elif out[cell] != ids[t]:
                raise SpaceError(f"partition splits polytopic cell {cell} "
                                 "(subdomain interfaces must follow mesh faces)")
        return out
    out = np.asarray(partition).astype(np.int64).reshape(-1)
    if len(out) != mesh.n_cells:
        raise SpaceError(f"partition has {len(out)} entries for {mesh.n_cells} cells")
    return out


def build_conforming_space(mesh, r, partition=None):
    """Global C0 Lagrange space of degree ``r`` on the sub-triangles of ``mesh``.

    ``partition`` (one id per cell, or a callable evaluated at sub-triangle
    centroids) duplicates nodes on subdomain interfaces, one copy per side.
    """
    if isinstance(r, bool) or int(r) != r or int(r) < 1:
        raise SpaceError(f"unsupported polynomial degree {r!r}; need an integer r >= 1")
    r = int(r)
    cell_part = _cell_partition(mesh, partition)
    tris = mesh.subtriangles
    n_tri = len(tris)
    sub = np.zeros(n_tri, dtype=np.int64) if cell_part is None else cell_part[mesh.subtriangle_parent]

    nodes = lattice_nodes(r)
    keys = np.zeros((n_tri, len(nodes), 5), dtype=np.int64)
    coords = np.zeros((n_tri, len(nodes), 2))
    p = mesh.vertices[tris]
    for k, (a, b) in enumerate(nodes):
        lam = np.array([r - a - b, a, b])
        coords[:, k] = (lam[0] * p[:, 0] + lam[1] * p[:, 1] + lam[2] * p[:, 2]) / r
        nonzero = np.flatnonzero(lam)
        if len(nonzero) == 1:
            keys[:, k, 0] = 0
            keys[:, k, 1] = tris[:, nonzero[0]]
        elif len(nonzero) == 2:
            i, j = nonzero
            gi, gj = tris[:, i], tris[:, j]
            lo, hi = np.minimum(gi, gj), np.maximum(gi, gj)
            keys[:, k, 0] = 1
            keys[:, k, 1] = lo
            keys[:, k, 2] = hi
            keys[:, k, 3] = np.where(gi < gj, lam[j], lam[i])
        else:
            keys[:, k, 0] = 2
            keys[:, k, 1] = np.arange(n_tri)
            keys[:, k, 2] = k
        keys[:, k, 4] = sub

    flat = keys.reshape(-1, 5)
    _, first, inverse = np.unique(flat, axis=0, return_index=True, return_inverse=True)
    tri_nodes = np.asarray(inverse).reshape(n_tri, len(nodes))
    n_nodes = len(first)
    node_coords = coords.reshape(-1, 2)[first]

    parents = np.repeat(mesh.subtriangle_parent, len(nodes))
    omega = sparse.coo_matrix((np.ones(len(parents)), (tri_nodes.ravel(), parents)),
                              shape=(n_nodes, mesh.n_cells)).tocsr()
    omega.sum_duplicates()
    omega.data[:] = 1.0

    ref = np.array(nodes, dtype=float) / r
    V, _ = scaled_monomials(ref, np.zeros((len(nodes), 2)), np.ones(len(nodes)), r)
    try:
        inverse_vandermonde = np.linalg.inv(V)
    except np.linalg.LinAlgError as e:
        raise SpaceError(f"singular Lagrange Vandermonde matrix for degree {r}") from e
    return ConformingSpace(
        mesh=mesh,
        degree=r,
        n_nodes=n_nodes,
        node_coords=node_coords,
        tri_nodes=tri_nodes,
        omega=omega,
        inverse_vandermonde=inverse_vandermonde,
        partition=cell_part,
    )
