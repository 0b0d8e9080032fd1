from .polymesh import (
    BOUNDARY,
    PolyFace,
    PolyMesh,
    build_face_topology,
    build_mesh,
    check_mesh,
    mesh_size,
    nudge_into_cells,
    polygon_area,
    polygon_centroid,
    subtriangulate,
)
from .voronoi import UNIT_SQUARE, generate_voronoi_mesh, lloyd_relax
from .agglomerate import agglomerate_mesh, aligned_mesh, structured_quad_mesh, structured_triangle_mesh
from .io import read_mesh, write_mesh
