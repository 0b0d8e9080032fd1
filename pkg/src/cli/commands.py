"""The ``mesh``, ``solve`` and ``study`` commands."""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from tqdm import tqdm

from ..analysis import FULL_COLUMNS, compute_errors, eoc, export_vtk, solution_range
from ..assembly import assemble_system
from ..errors import ConfigError, RfemError
from ..mesh import aligned_mesh, check_mesh, generate_voronoi_mesh, read_mesh, write_mesh
from ..problem import builtin_example, problem_from_expressions
from ..solver import solve
from ..utils.report import generate_html_report

logger = logging.getLogger(__name__)

THREADS_ENV = "RFEM_THREADS"


def make_problem(config):
    problem = config.problem
    if "example" in problem:
        return builtin_example(problem["example"], epsilon=problem.get("epsilon", 1e-2))
    return problem_from_expressions(problem["custom"], name=problem.get("name", "custom"))


def mesh_kind(config, spec):
    return config.mesh.kind or spec.mesh_family


def make_mesh(config, spec, level=0):
    """Mesh of refinement ``level``: 4x the Voronoi cells, or twice the aligned n, per level.

    Lloyd sweeps double with the level so every mesh of a study is relaxed
    alike and h_max halves from one level to the next.
    """
    m = config.mesh
    sweeps = m.lloyd * 2 ** level
    kind = mesh_kind(config, spec)
    if kind == "file":
        return read_mesh(m.path)
    if kind == "aligned":
        mesh = aligned_mesh(m.n * 2 ** level, domain=spec.domain, style=m.style, seed=m.seed,
                            lloyd_iterations=sweeps)
    else:
        mesh = generate_voronoi_mesh(m.n_cells * 4 ** level, seed=m.seed, lloyd_iterations=sweeps,
                                     domain=spec.domain)
    x0, x1, y0, y1 = spec.domain
    check_mesh(mesh, domain_area=(x1 - x0) * (y1 - y0))
    return mesh


def study_threads():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        threads = int(raw)
    except ValueError as e:
        raise ConfigError(f"expected a positive integer, got {raw!r}", THREADS_ENV) from e
    if threads < 1:
        raise ConfigError(f"expected a positive integer, got {raw!r}", THREADS_ENV)
    return threads


def write_json(data, path):
    # atomic: write then rename
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, default=_jsonable)
        f.write("\n")
    os.replace(tmp, path)
    return path


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_effective_config(config, out_dir):
    return write_json(config.to_dict(), os.path.join(out_dir, "config.json"))


def cmd_mesh(config, out_dir):
    print("--- Generating Mesh ---")
    spec = make_problem(config)
    mesh = make_mesh(config, spec)
    path = write_mesh(mesh, os.path.join(out_dir, "mesh.rfem"))
    print(f"{mesh.n_cells} cells, {mesh.n_subtriangles} sub-triangles, {len(mesh.faces)} faces "
          f"({len(mesh.interior_faces)} interior, {len(mesh.boundary_faces)} boundary)")
    print(f"Mesh saved to {path}")
    return path


def cmd_solve(config, out_dir):
    spec = make_problem(config)
    print(f"--- Solving {spec.name} (r={config.degree}) ---")
    mesh = make_mesh(config, spec)
    print(f"Mesh: {mesh.summary()}")
    system = assemble_system(spec, mesh, config.degree, penalty=config.penalty,
                             order=config.quadrature_order)
    solved = solve(system, config.solver)
    print(solved.summary())
    u_h = solved.solution

    result = {
        "problem": spec.name,
        "degree": config.degree,
        "mesh": {"cells": mesh.n_cells, "sub_triangles": mesh.n_subtriangles, "h_max": mesh.h_max},
        "dofs": system.dim,
        "boundary": system.boundary.counts(),
        "solver": {"method": solved.method, "iterations": solved.iterations,
                   "residual": solved.residual},
        "range": solution_range(system, u_h),
    }
    if spec.has_exact:
        errors = compute_errors(spec, system, u_h, boundary=system.boundary, penalty=config.penalty)
        result["errors"] = errors.to_dict()
        print("\n" + "=" * 60)
        print(f"ERRORS ({spec.name}, {system.dim} dofs)")
        print("=" * 60)
        for name, value in errors.to_row().items():
            if name not in ("h", "dofs"):
                print(f"  {name:<12} {value:.6e}")
        print("=" * 60 + "\n")
    else:
        r = result["range"]
        print(f"u_h in [{r['min_dg']:.4f}, {r['max_dg']:.4f}], "
              f"E(u_h) in [{r['min_rec']:.4f}, {r['max_rec']:.4f}]")

    report_path = write_json(result, os.path.join(out_dir, "report.json"))
    print(f"Report saved to {report_path}")
    if config.output.vtk:
        vtk_paths = export_vtk(mesh, system.dg, system.conf, u_h, system.recovery.apply(u_h),
                               os.path.join(out_dir, "solution.vtk"), title=spec.name)
        print(f"VTK saved to {vtk_paths[0]} and {vtk_paths[1]}")
    return result


def run_level(config, spec, level):
    """Mesh, assemble, solve and measure one refinement level; returns its ErrorReport."""
    mesh = make_mesh(config, spec, level)
    system = assemble_system(spec, mesh, config.degree, penalty=config.penalty,
                             order=config.quadrature_order)
    solved = solve(system, config.solver)
    errors = compute_errors(spec, system, solved.solution, boundary=system.boundary,
                            penalty=config.penalty)
    logger.info("level %d: %s", level, mesh.summary())
    return errors


def _write_tables(rows, out_dir):
    table = eoc(rows)
    table.to_csv(os.path.join(out_dir, "study.csv"))
    table.to_csv(os.path.join(out_dir, "study_full.csv"), columns=FULL_COLUMNS)
    return table


def cmd_study(config, out_dir):
    spec = make_problem(config)
    if not spec.has_exact:
        raise ConfigError(f"{spec.name} has no exact solution to study convergence against", "problem")
    threads = study_threads()
    print(f"--- Convergence Study: {spec.name}, r={config.degree}, {config.levels} level(s), "
          f"{threads} thread(s) ---")
    level_dir = os.path.join(out_dir, "levels")
    os.makedirs(level_dir, exist_ok=True)

    rows = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(run_level, config, spec, level) for level in range(config.levels)]
        for level, future in enumerate(tqdm(futures, desc="Levels")):
            try:
                errors = future.result()
            except RfemError:
                for pending in futures[level + 1:]:
                    pending.cancel()
                if rows:
                    _write_tables(rows, out_dir)
                    print(f"Level {level} failed; partial table with {len(rows)} level(s) saved")
                raise
            rows.append(errors)
            write_json(errors.to_row(), os.path.join(level_dir, f"level_{level}.json"))

    table = _write_tables(rows, out_dir)
    print("\n" + "=" * 60)
    print(f"CONVERGENCE ({spec.name}, r={config.degree})")
    print("=" * 60)
    print(table.format_table())
    rates = table.final_rates()
    if rates:
        print("Final-segment rates: " + ", ".join(
            f"{k}={v}" if isinstance(v, str) else f"{k}={v:.2f}" for k, v in rates.items()))
    print("=" * 60 + "\n")
    print(f"Results saved to {os.path.join(out_dir, 'study.csv')}")
    if config.output.report:
        generate_html_report(table, title=f"{spec.name}, r={config.degree}",
                             output_path=os.path.join(out_dir, "report.html"))
    return table


COMMANDS = {
    "mesh": cmd_mesh,
    "solve": cmd_solve,
    "study": cmd_study,
}
