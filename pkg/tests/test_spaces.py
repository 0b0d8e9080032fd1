import numpy as np
import pytest

from conftest import quad_grid_mesh, unit_square_mesh
from src.errors import SpaceError
from src.mesh import aligned_mesh, build_mesh
from src.spaces import (
    build_conforming_space,
    build_dg_space,
    eval_basis,
    eval_conforming_function,
    eval_dg_function,
    l2_project,
    mass_matrices,
    volume_quadrature,
)


def test_dg_dimensions(voronoi256, voronoi64):
    assert build_dg_space(voronoi256, 1).dim == 768
    assert build_dg_space(unit_square_mesh(), 4).dim == 15
    assert build_dg_space(voronoi64, 2).dim == 384


@pytest.mark.parametrize("r", [0, -1, 1.5])
def test_unsupported_degree(r):
    with pytest.raises(SpaceError):
        build_dg_space(unit_square_mesh(), r)


def test_scaled_monomials_at_the_cell_center(voronoi64):
    dg = build_dg_space(voronoi64, 2)
    cell = 5
    center = dg.centers[cell]
    vals, grads = eval_basis(dg, cell, voronoi64.vertex_means[cell])
    assert vals[0, 0] == 1.0
    np.testing.assert_array_equal(grads[0, 0], [0.0, 0.0])
    vals, grads = dg.evaluate([cell], center[None])
    # basis 1 is (x - x_T) / s_T
    assert vals[0, 1] == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(grads[0, 1], [1.0 / dg.scales[cell], 0.0])


def test_point_outside_the_cell_is_rejected():
    mesh = quad_grid_mesh(2)
    dg = build_dg_space(mesh, 1)
    with pytest.raises(SpaceError, match="outside cell 0"):
        eval_basis(dg, 0, [[0.9, 0.9]])
    # points on the boundary are inside up to the tolerance
    eval_basis(dg, 0, [[0.5, 0.5 + 1e-13]])


def test_single_triangle_has_three_nodes():
    mesh = build_mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), [[0, 1, 2]])
    conf = build_conforming_space(mesh, 1)
    assert conf.n_nodes == 3
    np.testing.assert_array_equal(conf.omega_sizes, [1, 1, 1])


def test_partition_duplicates_interface_nodes():
    mesh = aligned_mesh(8)
    plain = build_conforming_space(mesh, 1)
    split = build_conforming_space(mesh, 1, partition=mesh.subdomains)
    assert plain.n_nodes == 81
    assert split.n_nodes == 90
    by_callable = build_conforming_space(mesh, 1, partition=lambda p: (p[:, 1] > 0).astype(int))
    assert by_callable.n_nodes == 90
    np.testing.assert_array_equal(by_callable.partition, mesh.subdomains)


def test_partition_splitting_a_cell_is_rejected():
    mesh = quad_grid_mesh(2)
    with pytest.raises(SpaceError, match="splits polytopic cell"):
        build_conforming_space(mesh, 1, partition=lambda p: (p[:, 0] > p[:, 1]).astype(int))


def test_p2_nodes_are_vertices_plus_sub_edges(voronoi64):
    conf = build_conforming_space(voronoi64, 2)
    assert conf.n_nodes == voronoi64.n_vertices + len(voronoi64.subedge_triangles)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_lagrange_partition_of_unity(r, rng):
    mesh = quad_grid_mesh(2)
    conf = build_conforming_space(mesh, r)
    lam = rng.dirichlet(np.ones(3), size=20)
    tri = 3
    points = lam @ mesh.vertices[mesh.subtriangles[tri]]
    vals, grads = eval_basis(conf, tri, points)
    np.testing.assert_allclose(vals.sum(axis=1), 1.0, atol=1e-13)
    np.testing.assert_allclose(grads.sum(axis=1), 0.0, atol=1e-11)


@pytest.mark.parametrize("r", [1, 3])
def test_conforming_functions_are_continuous(r, voronoi64, rng):
    conf = build_conforming_space(voronoi64, r)
    coeffs = rng.standard_normal(conf.n_nodes)
    t = np.linspace(0.1, 0.9, 5)
    for (a, b), tris in list(voronoi64.subedge_triangles.items())[:200]:
        if len(tris) != 2:
            continue
        pa, pb = voronoi64.vertices[a], voronoi64.vertices[b]
        points = pa + t[:, None] * (pb - pa)
        left, _ = eval_conforming_function(conf, coeffs, np.full(5, tris[0]), points)
        right, _ = eval_conforming_function(conf, coeffs, np.full(5, tris[1]), points)
        np.testing.assert_allclose(left, right, atol=1e-12)


def test_partitioned_space_may_jump_across_the_interface():
    mesh = aligned_mesh(4)
    conf = build_conforming_space(mesh, 1, partition=mesh.subdomains)
    upper = conf.partition[mesh.subtriangle_parent] == 1
    coeffs = np.zeros(conf.n_nodes)
    coeffs[np.unique(conf.tri_nodes[upper])] = 1.0
    (a, b), tris = next((key, t) for key, t in mesh.subedge_triangles.items()
                        if len(t) == 2 and np.all(mesh.vertices[list(key), 1] == 0.0))
    point = 0.5 * (mesh.vertices[a] + mesh.vertices[b])[None]
    values = {bool(upper[t]): eval_conforming_function(conf, coeffs, [t], point)[0][0] for t in tris}
    assert values[True] == pytest.approx(1.0)
    assert values[False] == pytest.approx(0.0)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_projection_reproduces_polynomials(r, voronoi64):
    dg = build_dg_space(voronoi64, r)

    def f(p):
        return 1 + p[:, 0] ** r - 3 * p[:, 0] * p[:, 1] ** (r - 1) + 0.5 * p[:, 1] ** r

    coeffs = l2_project(f, dg)
    points, _ = volume_quadrature(voronoi64, 4)
    flat = points.reshape(-1, 2)
    cells = np.repeat(voronoi64.subtriangle_parent, points.shape[1])
    values, _ = eval_dg_function(dg, coeffs, cells, flat)
    np.testing.assert_allclose(values, f(flat), atol=1e-10)


def test_projection_orthogonality_and_idempotence(voronoi64, rng):
    r = 2
    dg = build_dg_space(voronoi64, r)
    a = rng.standard_normal(6)

    def f(p):
        x, y = p[:, 0], p[:, 1]
        return a[0] * x ** 4 + a[1] * x ** 2 * y ** 2 + a[2] * y ** 3 + a[3] * x * y + a[4] + a[5] * y ** 4

    coeffs = l2_project(f, dg)
    points, weights = volume_quadrature(voronoi64, 12)
    nq = points.shape[1]
    flat = points.reshape(-1, 2)
    cells = np.repeat(voronoi64.subtriangle_parent, nq)
    values, _ = eval_dg_function(dg, coeffs, cells, flat)
    basis, _ = dg.evaluate(cells, flat)
    moments = np.zeros((voronoi64.n_cells, dg.local_dim))
    np.add.at(moments, cells, (weights.ravel() * (f(flat) - values))[:, None] * basis)
    norm_f = np.sqrt(np.sum(weights.ravel() * f(flat) ** 2))
    assert np.abs(moments).max() <= 1e-10 * norm_f

    v = rng.standard_normal(dg.dim)

    def as_field(p):
        c = np.repeat(voronoi64.subtriangle_parent, p.shape[0] // voronoi64.n_subtriangles)
        return eval_dg_function(dg, v, c, p)[0]

    np.testing.assert_allclose(l2_project(as_field, dg), v, atol=1e-10)


def test_projection_converges_at_order_r_plus_one():
    errors, sizes = [], []
    for n in (4, 8, 16):
        mesh = quad_grid_mesh(n)
        dg = build_dg_space(mesh, 2)

        def f(p):
            return np.sin(np.pi * p[:, 0]) * np.sin(np.pi * p[:, 1])

        coeffs = l2_project(f, dg)
        points, weights = volume_quadrature(mesh, 10)
        nq = points.shape[1]
        flat = points.reshape(-1, 2)
        values, _ = eval_dg_function(dg, coeffs, np.repeat(mesh.subtriangle_parent, nq), flat)
        errors.append(np.sqrt(np.sum(weights.ravel() * (f(flat) - values) ** 2)))
        sizes.append(mesh.h_max)
    rate = np.log(errors[-2] / errors[-1]) / np.log(sizes[-2] / sizes[-1])
    assert rate == pytest.approx(3.0, abs=0.2)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_mass_matrices_are_well_conditioned(r, voronoi64):
    M = mass_matrices(build_dg_space(voronoi64, r))
    assert np.linalg.cond(M).max() < 1e8
