"""Volume terms: diffusion and reaction on recovered functions, advection of the DG trial."""
from __future__ import annotations

import numpy as np

from .geometry import per_element, scatter_matrix, scatter_vector


def volume_blocks(spec, ctx):
    """Return ``(A_cc, C_cd)``.

    ``A_cc[i, j] = int a grad(phi_j).grad(phi_i) + c phi_j phi_i`` over conforming
    basis pairs and ``C_cd[i, j] = int (b.grad psi_j) phi_i`` couples DG trial
    functions with conforming test functions.
    """
    vol, nq = ctx.volume, ctx.volume_nq
    mesh, dg, conf = ctx.mesh, ctx.dg, ctx.conf
    a = np.asarray(spec.diffusion(vol.points))
    b = np.asarray(spec.advection(vol.points))
    c = np.asarray(spec.reaction(vol.points))

    w = per_element(vol.weights, nq)
    G = per_element(vol.cf_grads, nq)
    phi = per_element(vol.cf_vals, nq)
    aG = np.einsum("tqde,tqje->tqjd", per_element(a, nq), G)
    local = np.einsum("tq,tqid,tqjd->tij", w, G, aG, optimize=True)
    local += np.einsum("tq,tqi,tqj->tij", w * per_element(c, nq), phi, phi, optimize=True)
    nodes = conf.tri_nodes
    A = scatter_matrix(nodes, nodes, local, (conf.n_nodes, conf.n_nodes))

    bgrad = np.einsum("pd,pjd->pj", b, vol.dg_grads)
    local = np.einsum("tq,tqi,tqj->tij", w, phi, per_element(bgrad, nq), optimize=True)
    C = scatter_matrix(nodes, dg.dofs_of(mesh.subtriangle_parent), local, (conf.n_nodes, dg.dim))
    return A, C


def assemble_volume(spec, ctx):
    """``R^T A_cc R + R^T C_cd`` in DG x DG indexing."""
    A, C = volume_blocks(spec, ctx)
    R = ctx.recovery.matrix
    return (R.T @ A @ R + R.T @ C).tocsr()


def assemble_source(spec, ctx):
    """``R^T F`` with ``F[i] = int f phi_i``."""
    vol, nq = ctx.volume, ctx.volume_nq
    f = np.asarray(spec.source(vol.points))
    local = np.einsum("tq,tqi->ti", per_element(vol.weights * f, nq), per_element(vol.cf_vals, nq))
    F = scatter_vector(ctx.conf.tri_nodes, local, ctx.conf.n_nodes)
    return ctx.recovery.matrix.T @ F
