import dataclasses

import numpy as np
import pandas as pd
import pytest

from conftest import context_for, polynomial_problem, simple_problem, two_cell_mesh, unit_square_mesh
from src.analysis import (
    CSV_COLUMNS,
    EXACT,
    FULL_COLUMNS,
    compute_errors,
    eoc,
    export_vtk,
    solution_range,
    streamline_weights,
)
from src.errors import AnalysisError
from src.mesh import aligned_mesh
from src.problem import builtin_example
from src.spaces import l2_project


def row(h, dofs, **errors):
    out = {"h": h, "dofs": dofs}
    out.update({c: errors.get(c, 1.0) for c in FULL_COLUMNS if c not in ("h", "dofs")})
    return out


def test_rate_of_quadratic_decay():
    table = eoc([row(0.1, 100, l2=1e-1), row(0.05, 400, l2=2.5e-2)])
    assert table.rates.loc[1, "l2"] == pytest.approx(2.0)
    assert table.final_rates()["l2"] == pytest.approx(2.0)
    # constant errors
    assert table.final_rates()["h1"] == pytest.approx(0.0)


def test_rows_are_sorted_by_decreasing_h():
    table = eoc([row(0.025, 1600, l2=1e-3), row(0.1, 100, l2=6.4e-2), row(0.05, 400, l2=8e-3)])
    assert table.errors["h"].tolist() == [0.1, 0.05, 0.025]
    np.testing.assert_allclose(table.rates["l2"].to_numpy(), [3.0, 3.0])


def test_zero_error_is_flagged_exact():
    table = eoc([row(0.1, 100, l2=1e-3), row(0.05, 400, l2=0.0)])
    assert table.exact.loc[1, "l2"]
    assert np.isnan(table.rates.loc[1, "l2"])
    assert table.final_rates()["l2"] == EXACT
    assert f"({EXACT})" in table.format_table()


def test_single_level_has_no_rates():
    table = eoc([row(0.1, 100)])
    assert len(table) == 1
    assert table.final_rates() == {}
    assert table.rates.empty


def test_equal_mesh_sizes_give_undefined_rate():
    table = eoc([row(0.1, 100, l2=1.0), row(0.1, 100, l2=0.5)])
    assert np.isnan(table.rates.loc[1, "l2"])
    assert "(  -  )" in table.format_table()


@pytest.mark.parametrize("rows, match", [
    ([], "no rows"),
    ([{"h": 0.1, "l2": 1.0}], "lack the columns"),
    ([row(0.0, 10)], "positive"),
    ([row(0.1, 10, l2=-1.0)], "non-negative"),
])
def test_bad_rows(rows, match):
    with pytest.raises(AnalysisError, match=match):
        eoc(rows)


def test_csv_layout(tmp_path):
    table = eoc([row(0.1, 100, l2=1e-1), row(0.05, 400, l2=2.5e-2)])
    path = table.to_csv(tmp_path / "study.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "h,dofs,l2,h1,bnorm,streamline,stab_ac,stab_b,nitsche,l2_rec,h1_rec"
    assert lines[0].split(",") == CSV_COLUMNS
    assert lines[1].split(",")[1] == "100"
    full = pd.read_csv(table.to_csv(tmp_path / "full.csv", columns=FULL_COLUMNS))
    assert list(full.columns) == FULL_COLUMNS
    assert full["l2"].tolist() == [1e-1, 2.5e-2]


def test_projected_polynomial_has_zero_error(voronoi64):
    spec = polynomial_problem(2)
    ctx = context_for(spec, voronoi64, 2)
    errors = compute_errors(spec, ctx, l2_project(spec.exact, ctx.dg))
    for name, value in errors.to_row().items():
        if name not in ("h", "dofs"):
            assert value <= 1e-9, name
    assert errors.dofs == ctx.dg.dim
    assert errors.h_max == voronoi64.h_max


def test_errors_are_homogeneous(voronoi64):
    spec = builtin_example(2)
    double = dataclasses.replace(spec, exact=lambda p: 2 * spec.exact(p),
                                 exact_gradient=lambda p: 2 * spec.exact_gradient(p))
    ctx = context_for(spec, voronoi64, 1)
    zero = np.zeros(ctx.dg.dim)
    once = compute_errors(spec, ctx, zero).to_row()
    twice = compute_errors(double, ctx, zero).to_row()
    for name in FULL_COLUMNS[2:]:
        assert twice[name] == pytest.approx(2 * once[name], rel=1e-12, abs=1e-300), name
    # ||u||_L2 of sin(pi x) sin(pi y) is 1/2
    assert once["l2"] == pytest.approx(0.5, rel=1e-3)
    assert once["stab_ac"] <= 1e-8


def test_norms_satisfy_the_triangle_inequality(voronoi64, rng):
    spec = builtin_example(2)
    vanishing = dataclasses.replace(spec, exact=lambda p: np.zeros(len(p)),
                                    exact_gradient=lambda p: np.zeros((len(p), 2)))
    ctx = context_for(spec, voronoi64, 2)

    def norms(v):
        # against a zero exact solution every component is a norm of -v
        return compute_errors(vanishing, ctx, v).to_row()

    for _ in range(3):
        u, v, w = rng.standard_normal((3, ctx.dg.dim))
        uw, uv, vw = norms(u - w), norms(u - v), norms(v - w)
        for name in FULL_COLUMNS[2:]:
            assert uw[name] <= (uv[name] + vw[name]) * (1 + 1e-12), name


def test_interface_jumps_are_not_penalised():
    spec = builtin_example(4)
    joined = dataclasses.replace(spec, subdomains=None)
    stab = {}
    for n in (8, 16):
        ctx = context_for(spec, aligned_mesh(n), 2)
        stab[n] = compute_errors(spec, ctx, l2_project(spec.exact, ctx.dg)).stab_ac
    # only the projection error is left on the same-side faces
    assert stab[16] < 0.5 * stab[8]
    ctx = context_for(joined, aligned_mesh(8), 2)
    assert compute_errors(joined, ctx, l2_project(spec.exact, ctx.dg)).stab_ac > 2.0


def test_errors_need_an_exact_solution(voronoi64):
    spec = builtin_example(3)
    ctx = context_for(spec, voronoi64, 1)
    with pytest.raises(AnalysisError, match="no exact solution"):
        compute_errors(spec, ctx, np.zeros(ctx.dg.dim))


def test_streamline_weights(voronoi64):
    ctx = context_for(simple_problem(a=0.0, b=(2.0, 0.0)), voronoi64, 1)
    lam = streamline_weights(simple_problem(a=0.0, b=(2.0, 0.0)), ctx)
    np.testing.assert_allclose(lam, voronoi64.cell_diameters / 2)
    lam = streamline_weights(simple_problem(a=0.0, b=(0.0, 0.0)), ctx)
    assert np.all(np.isinf(lam))
    # diffusion dominated: h / sigma_T = h^2 / (C_sigma r^2)
    lam = streamline_weights(simple_problem(a=1.0, b=(1e-3, 0.0)), ctx)
    np.testing.assert_allclose(lam, voronoi64.cell_diameters ** 2 / 10)


def test_solution_range_of_constant():
    mesh = unit_square_mesh()
    ctx = context_for(simple_problem(), mesh, 2)
    u_h = np.zeros(ctx.dg.dim)
    u_h[ctx.dg.offsets] = 3.0
    r = solution_range(ctx, u_h)
    for key in ("min_dg", "max_dg", "min_rec", "max_rec"):
        assert r[key] == pytest.approx(3.0)


def read_scalars(lines, name, count):
    start = lines.index(f"SCALARS {name} double 1") + 2
    return np.array([float(v) for v in lines[start:start + count]])


def test_vtk_export(tmp_path):
    mesh = unit_square_mesh()
    ctx = context_for(simple_problem(), mesh, 1)
    u_h = np.zeros(ctx.dg.dim)
    u_h[ctx.dg.offsets] = 1.0
    path, rec_path = export_vtk(mesh, ctx.dg, ctx.conf, u_h, ctx.recovery.apply(u_h), tmp_path / "u.vtk",
                                title="unit")
    assert rec_path == tmp_path / "u_recovered.vtk"
    lines = path.read_text().splitlines()
    assert lines[:5] == ["# vtk DataFile Version 3.0", "unit", "ASCII", "DATASET UNSTRUCTURED_GRID",
                         "POINTS 6 double"]
    assert "CELLS 2 8" in lines
    assert "CELL_TYPES 2" in lines
    np.testing.assert_allclose(read_scalars(lines, "u_h", 6), 1.0)
    # the recovered field sits on the four shared corners
    lines = rec_path.read_text().splitlines()
    assert lines[4] == "POINTS 4 double"
    assert "CELLS 2 8" in lines
    np.testing.assert_allclose(read_scalars(lines, "recovered", 4), 1.0)


def test_vtk_recovered_points_split_at_interfaces(tmp_path):
    mesh = two_cell_mesh()
    split = dataclasses.replace(simple_problem(), subdomains=lambda p: (p[:, 0] > 0.5).astype(int))
    for spec, n_points in ((simple_problem(), 6), (split, 8)):
        ctx = context_for(spec, mesh, 1)
        u_h = np.zeros(ctx.dg.dim)
        u_h[ctx.dg.offsets] = [0.0, 1.0]
        _, rec_path = export_vtk(mesh, ctx.dg, ctx.conf, u_h, ctx.recovery.apply(u_h), tmp_path / "u.vtk")
        lines = rec_path.read_text().splitlines()
        assert lines[4] == f"POINTS {n_points} double"
    # each side keeps its own value on the interface copies
    assert sorted(read_scalars(lines, "recovered", 8)) == [0.0] * 4 + [1.0] * 4


def test_vtk_export_to_missing_directory(tmp_path):
    mesh = unit_square_mesh()
    ctx = context_for(simple_problem(), mesh, 1)
    u_h = np.zeros(ctx.dg.dim)
    with pytest.raises(AnalysisError, match="cannot write"):
        export_vtk(mesh, ctx.dg, ctx.conf, u_h, ctx.recovery.apply(u_h), tmp_path / "no" / "u.vtk")
