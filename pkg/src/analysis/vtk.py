"""Legacy ASCII VTK output over the sub-triangulation."""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from ..errors import AnalysisError

logger = logging.getLogger(__name__)

VTK_TRIANGLE = 5


def recovered_path(path):
    """``solution.vtk`` -> ``solution_recovered.vtk``."""
    path = Path(path)
    return path.with_name(f"{path.stem}_recovered{path.suffix or '.vtk'}")


def _write_grid(path, title, points, triangles, cell_data, point_data):
    n_tri = len(triangles)
    try:
        with open(path, "w") as f:
            f.write("# vtk DataFile Version 3.0\n")
            f.write(f"{title}\n")
            f.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
            f.write(f"POINTS {len(points)} double\n")
            np.savetxt(f, np.column_stack([points, np.zeros(len(points))]), fmt="%.16e")
            f.write(f"CELLS {n_tri} {4 * n_tri}\n")
            np.savetxt(f, np.column_stack([np.full(n_tri, 3), triangles]), fmt="%d")
            f.write(f"CELL_TYPES {n_tri}\n")
            np.savetxt(f, np.full(n_tri, VTK_TRIANGLE), fmt="%d")
            f.write(f"CELL_DATA {n_tri}\n")
            for name, data in cell_data.items():
                f.write(f"SCALARS {name} int 1\nLOOKUP_TABLE default\n")
                np.savetxt(f, data, fmt="%d")
            f.write(f"POINT_DATA {len(points)}\n")
            for name, data in point_data.items():
                f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                np.savetxt(f, data, fmt="%.16e")
    except OSError as e:
        raise AnalysisError(f"cannot write VTK file {path}: {e}") from e


def export_vtk(mesh, dg, conf, u_h, recovered, path, title="rfem solution"):
    """Write ``u_h`` to ``path`` and ``recovered`` next to it; returns both paths.

    ``u_h`` lives on duplicated corners (three points per sub-triangle) so its
    jumps show. ``recovered`` lives on the vertex nodes of the conforming
    space, shared between neighbouring sub-triangles except across subdomain
    interfaces. Both grids carry the parent cell index as cell data.
    """
    path = Path(path)
    tris = mesh.subtriangles
    n_tri = len(tris)
    corners = mesh.vertices[tris].reshape(-1, 2)
    cells = np.repeat(mesh.subtriangle_parent, 3)
    vals, _ = dg.evaluate(cells, corners)
    dg_values = np.einsum("pm,pm->p", vals, np.asarray(u_h)[dg.dofs_of(cells)])
    parent = {"parent_cell": mesh.subtriangle_parent}
    _write_grid(path, title, corners, np.arange(3 * n_tri).reshape(-1, 3), parent, {"u_h": dg_values})

    # corners are lattice nodes 0, 1, 2 of every sub-triangle
    nodes, local = np.unique(conf.tri_nodes[:, :3], return_inverse=True)
    rec_path = recovered_path(path)
    _write_grid(rec_path, f"{title} (recovered)", conf.node_coords[nodes], np.asarray(local).reshape(-1, 3),
                parent, {"recovered": np.asarray(recovered)[nodes]})
    logger.info("wrote %s and %s (%d sub-triangles)", path, rec_path, n_tri)
    return path, rec_path
