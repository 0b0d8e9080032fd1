"""Symmetric Nitsche terms imposing Dirichlet data weakly on recovered functions."""
from __future__ import annotations

import logging

import numpy as np
from scipy import sparse

from ..errors import AssemblyError
from ..problem import BoundaryLabel
from .geometry import per_element, scatter_matrix, scatter_vector

logger = logging.getLogger(__name__)


def penalty_parameter(c_sigma, alpha, r, h):
    """``sigma_D = C_sigma * alpha * r^2 / h``."""
    return c_sigma * alpha * r * r / h


def dirichlet_points(ctx, boundary):
    """Face points on Gamma_D, after checking that every boundary face is labelled."""
    fp = ctx.faces
    on_boundary = ~fp.interior
    missing = set(np.unique(fp.face[on_boundary]).tolist()) - set(boundary.labels)
    if missing:
        raise AssemblyError(f"boundary face {min(missing)} has no classification")
    return fp.select(on_boundary & np.isin(fp.face, boundary.dirichlet_faces))


def face_penalties(spec, ctx, boundary, c_sigma):
    """``sigma_D`` per Dirichlet face id, with alpha the max spectral norm of ``a`` on the face."""
    fp = dirichlet_points(ctx, boundary)
    if len(fp.weights) == 0:
        return {}
    a = np.asarray(spec.diffusion(fp.points_in))
    norms = np.linalg.norm(a, ord=2, axis=(1, 2))
    r = ctx.degree
    sigma = {}
    for face in np.unique(fp.face):
        alpha = float(norms[fp.face == face].max())
        h = ctx.mesh.cell_diameters[ctx.mesh.faces[face].owner_cell]
        s = penalty_parameter(c_sigma, alpha, r, h)
        if boundary.labels[int(face)] is BoundaryLabel.DIRICHLET_ELLIPTIC and not s > 0:
            raise AssemblyError(f"Nitsche penalty {s} <= 0 on elliptic face {face}")
        sigma[int(face)] = s
    return sigma


def nitsche_blocks(spec, ctx, boundary, penalty):
    """Conforming-level Nitsche matrix and data vector."""
    conf = ctx.conf
    fp = dirichlet_points(ctx, boundary)
    N = conf.n_nodes
    if len(fp.weights) == 0:
        return sparse.csr_matrix((N, N)), np.zeros(N)
    sigma_face = face_penalties(spec, ctx, boundary, penalty.c_sigma)
    sigma = np.array([sigma_face[int(f)] for f in fp.face])
    a = np.asarray(spec.diffusion(fp.points_in))
    g = np.asarray(spec.dirichlet(fp.points_in))
    an = np.einsum("pde,pe->pd", a, fp.normal)
    flux = np.einsum("pjd,pd->pj", fp.cf_grad_in, an)

    nq = ctx.face_nq
    w = per_element(fp.weights, nq)
    phi = per_element(fp.cf_in, nq)
    G = per_element(flux, nq)
    s = per_element(sigma, nq)
    local = (-np.einsum("eq,eqi,eqj->eij", w, phi, G)
             - np.einsum("eq,eqi,eqj->eij", w, G, phi)
             + np.einsum("eq,eqi,eqj->eij", w * s, phi, phi))
    nodes = per_element(conf.tri_nodes[fp.tri_in], nq)[:, 0]
    matrix = scatter_matrix(nodes, nodes, local, (N, N))
    wg = w * per_element(g, nq)
    rhs_local = np.einsum("eq,eqi->ei", wg, -G + s[..., None] * phi)
    rhs = scatter_vector(nodes, rhs_local, N)
    logger.debug("Nitsche terms on %d Dirichlet faces, sigma_D in [%.3g, %.3g]",
                 len(sigma_face), min(sigma_face.values()), max(sigma_face.values()))
    return matrix, rhs


def assemble_nitsche_dirichlet(spec, ctx, boundary, penalty):
    """DG-level Nitsche matrix ``R^T N R`` and data ``R^T n``."""
    N, n = nitsche_blocks(spec, ctx, boundary, penalty)
    R = ctx.recovery.matrix
    return (R.T @ N @ R).tocsr(), R.T @ n


def assemble_neumann(spec, ctx, boundary):
    """``R^T`` of ``int_{Gamma_N} g_N phi_i``; zero when the problem has no Neumann data."""
    conf = ctx.conf
    fp = ctx.faces
    mask = ~fp.interior & np.isin(fp.face, boundary.neumann_faces)
    if spec.neumann is None or not mask.any():
        return np.zeros(ctx.dg.dim)
    fp = fp.select(mask)
    nq = ctx.face_nq
    g = spec.neumann_data(fp.points, fp.normal)
    local = np.einsum("eq,eqi->ei", per_element(fp.weights * g, nq), per_element(fp.cf_in, nq))
    nodes = per_element(conf.tri_nodes[fp.tri_in], nq)[:, 0]
    return ctx.recovery.matrix.T @ scatter_vector(nodes, local, conf.n_nodes)
