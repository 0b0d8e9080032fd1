import numpy as np
import pytest

from conftest import quad_grid_mesh, unit_square_mesh
from src.errors import MeshError, MeshFormatError
from src.mesh import (
    agglomerate_mesh,
    aligned_mesh,
    build_mesh,
    check_mesh,
    generate_voronoi_mesh,
    mesh_size,
    polygon_area,
    read_mesh,
    structured_quad_mesh,
    structured_triangle_mesh,
    subtriangulate,
    write_mesh,
)


def test_single_generator_gives_the_domain():
    mesh = generate_voronoi_mesh(1, seed=7)
    assert mesh.n_cells == 1
    assert len(mesh.cells[0]) == 4
    assert mesh.area == pytest.approx(1.0, abs=1e-14)
    assert mesh.h_max == pytest.approx(np.sqrt(2))


def test_voronoi_256_tiles_the_square():
    mesh = generate_voronoi_mesh(256, seed=1, lloyd_iterations=100)
    assert mesh.n_cells == 256
    assert mesh.area == pytest.approx(1.0, abs=1e-10)
    assert mesh.n_subtriangles == sum(len(c) - 2 for c in mesh.cells)
    assert check_mesh(mesh, domain_area=1.0)
    # Euler: V - E + F = 1 with polygon corners, cell edges and cells
    edges = {tuple(sorted((int(c[k]), int(c[(k + 1) % len(c)])))) for c in mesh.cells for k in range(len(c))}
    assert mesh.n_vertices - len(edges) + mesh.n_cells == 1


def test_voronoi_is_deterministic():
    a = generate_voronoi_mesh(32, seed=5, lloyd_iterations=5)
    b = generate_voronoi_mesh(32, seed=5, lloyd_iterations=5)
    np.testing.assert_array_equal(a.vertices, b.vertices)
    assert all(np.array_equal(x, y) for x, y in zip(a.cells, b.cells))


def test_lattice_generators_give_four_squares():
    generators = np.array([[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]])
    mesh = generate_voronoi_mesh(4, generators=generators)
    assert mesh.n_cells == 4
    np.testing.assert_allclose(mesh.cell_areas, 0.25, atol=1e-14)
    assert all(len(c) == 4 for c in mesh.cells)
    _, diameters = mesh_size(mesh)
    np.testing.assert_allclose(diameters, np.sqrt(2) / 2, atol=1e-14)
    assert len(mesh.interior_faces) == 4
    assert len(mesh.boundary_faces) == 8


def test_invalid_cell_count():
    with pytest.raises(MeshError):
        generate_voronoi_mesh(0)


def test_coincident_generators_are_rejected():
    with pytest.raises(MeshError, match="degenerate generator"):
        generate_voronoi_mesh(2, generators=[[0.5, 0.5], [0.5, 0.5]])


def test_refinement_halves_h():
    coarse = generate_voronoi_mesh(64, seed=2, lloyd_iterations=50)
    fine = generate_voronoi_mesh(256, seed=2, lloyd_iterations=50)
    assert 0.375 <= fine.h_max / coarse.h_max <= 0.625


def test_subtriangulate_square_and_hexagon():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    tris, parents = subtriangulate(square, [np.arange(4)])
    assert len(tris) == 2
    np.testing.assert_array_equal(parents, [0, 0])

    angles = np.arange(6) * np.pi / 3
    hexagon = np.column_stack([np.cos(angles), np.sin(angles)])
    tris, _ = subtriangulate(hexagon, [np.arange(6)])
    assert len(tris) == 4
    assert all(0 in t for t in tris)
    total = sum(polygon_area(hexagon[t]) for t in tris)
    assert total == pytest.approx(polygon_area(hexagon), rel=1e-14)
    assert total == pytest.approx(3 * np.sqrt(3) / 2, rel=1e-14)


def test_reflex_cell_is_rejected():
    dart = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.3], [1.0, 2.0]])
    with pytest.raises(MeshError, match="reflex"):
        build_mesh(dart, [[0, 1, 2, 3]])


def test_single_cell_faces():
    mesh = unit_square_mesh()
    assert mesh.interior_faces == []
    assert len(mesh.boundary_faces) == 4
    assert mesh.h_max == pytest.approx(np.sqrt(2))


def test_face_normals_point_out_of_owner():
    mesh = quad_grid_mesh(3)
    for f in mesh.faces:
        assert np.linalg.norm(f.unit_normal) == pytest.approx(1.0, abs=1e-12)
        owner_center = mesh.vertex_means[f.owner_cell]
        mid = mesh.vertices[f.sub_edges[0]].mean(axis=0)
        assert np.dot(mid - owner_center, f.unit_normal) > 0
        if not f.is_boundary:
            other = mesh.vertex_means[f.neighbor_cell]
            assert np.dot(mid - other, -f.unit_normal) > 0


def test_t_junction_is_rejected():
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [1.0, 1.0], [0.0, 1.0],
                         [2.0, 0.0], [2.0, 1.0]])
    with pytest.raises(MeshError, match="T-junction"):
        build_mesh(vertices, [[0, 1, 2, 3, 4], [1, 5, 6, 3]])


def test_agglomerate_identity_partition():
    vertices, tris = structured_triangle_mesh(2, 2)
    mesh = agglomerate_mesh(vertices, tris, np.arange(len(tris)))
    assert mesh.n_cells == len(tris)
    assert mesh.n_subtriangles == len(tris)
    assert all(len(c) == 3 for c in mesh.cells)


def test_agglomerate_squares_into_one_cell():
    vertices, quads = structured_quad_mesh(2, 2)
    mesh = agglomerate_mesh(vertices, quads, np.zeros(4, dtype=int))
    assert mesh.n_cells == 1
    assert len(mesh.cells[0]) == 8
    assert mesh.n_subtriangles == 8
    assert mesh.area == pytest.approx(4 * 0.25)
    assert mesh.interior_faces == []
    # collinear boundary edges merge into one face per side
    assert len(mesh.faces) == 4
    assert sum(len(f.sub_edges) for f in mesh.faces) == 8


def test_agglomerate_disconnected_group_names_the_group():
    vertices, quads = structured_quad_mesh(3, 1)
    with pytest.raises(MeshError, match="group 7"):
        agglomerate_mesh(vertices, quads, np.array([7, 3, 7]))


def test_aligned_square_mesh():
    mesh = aligned_mesh(8)
    assert mesh.n_cells == 64
    assert mesh.n_subtriangles == 128
    assert mesh.area == pytest.approx(4.0)
    centers = mesh.vertex_means
    np.testing.assert_array_equal(mesh.subdomains, (centers[:, 1] > 0).astype(int))


def test_aligned_voronoi_mesh_follows_the_interface():
    mesh = aligned_mesh(8, style="voronoi", seed=3, lloyd_iterations=10)
    assert mesh.n_cells == 64
    assert check_mesh(mesh, domain_area=4.0)
    for cell, group in zip(mesh.cells, mesh.subdomains):
        y = mesh.vertices[cell][:, 1]
        assert (y >= 0).all() if group == 1 else (y <= 0).all()


def test_aligned_mesh_needs_even_n():
    with pytest.raises(MeshError):
        aligned_mesh(5)


def test_mesh_file_round_trip(tmp_path):
    mesh = aligned_mesh(8)
    path = write_mesh(mesh, tmp_path / "aligned.rfem")
    back = read_mesh(path)
    np.testing.assert_allclose(back.vertices, mesh.vertices, atol=1e-15)
    assert all(np.array_equal(a, b) for a, b in zip(back.cells, mesh.cells))
    np.testing.assert_array_equal(back.subdomains, mesh.subdomains)
    np.testing.assert_array_equal(back.subtriangles, mesh.subtriangles)


def test_agglomerated_sub_triangles_round_trip(tmp_path):
    vertices, quads = structured_quad_mesh(2, 2)
    mesh = agglomerate_mesh(vertices, quads, np.array([0, 0, 1, 1]))
    back = read_mesh(write_mesh(mesh, tmp_path / "agg.rfem"))
    np.testing.assert_array_equal(back.subtriangles, mesh.subtriangles)
    np.testing.assert_array_equal(back.subtriangle_parent, mesh.subtriangle_parent)


def _write(tmp_path, text):
    path = tmp_path / "bad.rfem"
    path.write_text(text)
    return path


def test_missing_vertex_is_reported_with_its_line(tmp_path):
    path = _write(tmp_path, "RFEM-MESH 1\nVERTICES 3\n0 0\n1 0\n0 1\nCELLS 1\n3 0 1 5\n")
    with pytest.raises(MeshFormatError, match="vertex index out of range") as err:
        read_mesh(path)
    assert err.value.line == 7


def test_empty_cell_list(tmp_path):
    path = _write(tmp_path, "RFEM-MESH 1\nVERTICES 3\n0 0\n1 0\n0 1\nCELLS 0\n")
    with pytest.raises(MeshFormatError, match="mesh has no cells"):
        read_mesh(path)


def test_trailing_content_and_comments(tmp_path):
    ok = _write(tmp_path, "# a triangle\nRFEM-MESH 1\nVERTICES 3\n0 0\n1 0 # corner\n0 1\nCELLS 1\n3 0 1 2\n")
    assert read_mesh(ok).n_cells == 1
    bad = _write(tmp_path, "RFEM-MESH 1\nVERTICES 3\n0 0\n1 0\n0 1\nCELLS 1\n3 0 1 2\nextra\n")
    with pytest.raises(MeshFormatError, match="unexpected content"):
        read_mesh(bad)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        read_mesh("does/not/exist.rfem")
