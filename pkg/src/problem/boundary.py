"""Boundary splitting into elliptic/hyperbolic and inflow/outflow parts."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import BoundaryClassificationError, ProblemError
from ..mesh import nudge_into_cells
from ..spaces import face_quadrature

logger = logging.getLogger(__name__)


class BoundaryLabel(Enum):
    DIRICHLET_ELLIPTIC = "dirichlet"
    NEUMANN = "neumann"
    HYPERBOLIC_INFLOW = "inflow"
    HYPERBOLIC_OUTFLOW = "outflow"

    @property
    def is_dirichlet(self):
        return self in (BoundaryLabel.DIRICHLET_ELLIPTIC, BoundaryLabel.HYPERBOLIC_INFLOW)


@dataclass(frozen=True)
class BoundaryClassification:
    """Labels per boundary face id; ``dirichlet_inflow`` marks the faces of Gamma_D^-."""

    labels: dict
    dirichlet_inflow: dict

    def faces_with(self, *labels):
        return sorted(f for f, lab in self.labels.items() if lab in labels)

    @property
    def dirichlet_faces(self):
        return sorted(f for f, lab in self.labels.items() if lab.is_dirichlet)

    @property
    def neumann_faces(self):
        """Elliptic faces carrying ``g_N``; outflow faces carry no datum."""
        return self.faces_with(BoundaryLabel.NEUMANN)

    @property
    def outflow_faces(self):
        return self.faces_with(BoundaryLabel.HYPERBOLIC_OUTFLOW)

    def counts(self):
        out = {lab.value: 0 for lab in BoundaryLabel}
        for lab in self.labels.values():
            out[lab.value] += 1
        return out


def tolerance_b(b_values):
    return 1e-10 * (float(np.abs(b_values).max(initial=0.0)) + 1.0)


def _face_samples(mesh, spec, order):
    fq = face_quadrature(mesh, order)
    fq = fq.subset(fq.boundary)
    nq = fq.weights.shape[1]
    pts = nudge_into_cells(mesh, fq.points, np.repeat(fq.owner[:, None], nq, axis=1))
    flat = pts.reshape(-1, 2)
    normals = np.repeat(fq.normal, nq, axis=0)
    a = np.asarray(spec.diffusion(flat))
    b = np.asarray(spec.advection(flat))
    nan = np.einsum("ni,nij,nj->n", normals, a, normals)
    tol_a = 1e-12 * (np.linalg.norm(a, ord=2, axis=(1, 2)) + 1.0)
    bn = np.einsum("ni,ni->n", b, normals)
    return fq, flat, nan, tol_a, bn, tolerance_b(b)


def classify_boundary(mesh, spec, order=4):
    """Label every boundary face; raise on faces with mixed inflow/outflow.

    A face is elliptic when ``n.a.n`` exceeds its tolerance at some quadrature
    point; it then carries Dirichlet data unless ``spec.neumann_marker`` selects
    it. Other faces are split by the sign of ``b.n``; characteristic faces count
    as outflow.
    """
    fq, flat, nan, tol_a, bn, tol_b = _face_samples(mesh, spec, order)
    nq = fq.weights.shape[1]
    labels, inflow = {}, {}
    for face in np.unique(fq.face):
        rows = np.flatnonzero(np.repeat(fq.face == face, nq))
        elliptic = np.any(nan[rows] > tol_a[rows])
        neg = np.any(bn[rows] < -tol_b)
        pos = np.any(bn[rows] > tol_b)
        if elliptic:
            label = BoundaryLabel.DIRICHLET_ELLIPTIC
            if spec.neumann_marker is not None:
                marks = np.asarray(spec.neumann_marker(flat[rows]), dtype=bool)
                if marks.all():
                    label = BoundaryLabel.NEUMANN
                elif marks.any():
                    raise BoundaryClassificationError(
                        f"boundary face {face} is partly Neumann, partly Dirichlet")
        elif neg and pos:
            where = flat[rows].mean(axis=0)
            raise BoundaryClassificationError(
                f"boundary face {face} near {where.round(6).tolist()} is partly inflow and partly "
                "outflow; refine or align the mesh with the sign changes of b.n")
        elif neg:
            label = BoundaryLabel.HYPERBOLIC_INFLOW
        else:
            label = BoundaryLabel.HYPERBOLIC_OUTFLOW
        labels[int(face)] = label
        inflow[int(face)] = bool(label.is_dirichlet and neg)
    if np.any(nan > tol_a) and not any(lab.is_dirichlet for lab in labels.values()):
        raise ProblemError(f"{spec.name}: the elliptic boundary has no Dirichlet part")
    result = BoundaryClassification(labels=labels, dirichlet_inflow=inflow)
    logger.info("boundary faces: %s", result.counts())
    return result


@dataclass(frozen=True)
class FlowClassification:
    """Per face sign of ``b.n`` seen from the owner: -1 inflow, +1 outflow, 0 characteristic.

    ``None`` marks mixed faces (only when classified non-strictly).
    """

    face_sign: list
    inflow: list
    outflow: list
    characteristic: list

    def sign_for(self, face, cell, mesh):
        s = self.face_sign[face]
        if s is None:
            return None
        return s if mesh.faces[face].owner_cell == cell else -s


def classify_element_faces_flow(mesh, advection, order=4, strict=True):
    """Split the faces of every cell into inflow, outflow and characteristic parts."""
    fq = face_quadrature(mesh, order)
    nq = fq.weights.shape[1]
    pts = nudge_into_cells(mesh, fq.points, np.repeat(fq.owner[:, None], nq, axis=1)).reshape(-1, 2)
    b = np.asarray(advection(pts))
    bn = np.einsum("ni,ni->n", b, np.repeat(fq.normal, nq, axis=0))
    tol_b = tolerance_b(b)
    sign = [0] * len(mesh.faces)
    face_rows = np.repeat(fq.face, nq)
    for face in range(len(mesh.faces)):
        vals = bn[face_rows == face]
        neg, pos = np.any(vals < -tol_b), np.any(vals > tol_b)
        if neg and pos:
            if strict:
                raise BoundaryClassificationError(
                    f"face {face} is partly inflow and partly outflow for cell {mesh.faces[face].owner_cell}")
            sign[face] = None
        else:
            sign[face] = -1 if neg else (1 if pos else 0)
    inflow = [[] for _ in range(mesh.n_cells)]
    outflow = [[] for _ in range(mesh.n_cells)]
    characteristic = [[] for _ in range(mesh.n_cells)]
    for face, f in enumerate(mesh.faces):
        s = sign[face]
        if s is None:
            continue
        sides = [(f.owner_cell, s)]
        if not f.is_boundary:
            sides.append((f.neighbor_cell, -s))
        for cell, cs in sides:
            {-1: inflow, 1: outflow, 0: characteristic}[cs][cell].append(face)
    return FlowClassification(face_sign=sign, inflow=inflow, outflow=outflow,
                              characteristic=characteristic)
