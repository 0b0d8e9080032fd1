"""Plain-text mesh files.

Format::

    RFEM-MESH 1
    VERTICES n
    x y                     (n lines)
    CELLS m
    k v1 ... vk             (m lines)
    GROUPS m                (optional, one subdomain id per cell)
    g
    SUBTRIANGLES t          (optional, otherwise cells are fan-triangulated)
    a b c parent

Tokens are whitespace separated and ``#`` starts a comment.
"""
import os

import numpy as np

from ..errors import MeshError, MeshFormatError
from .polymesh import build_mesh

HEADER = "RFEM-MESH 1"


def _tokens(path):
    with open(path, "r") as f:
        for number, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield number, line


def _section(lines, name):
    try:
        number, line = next(lines)
    except StopIteration:
        return None, None
    parts = line.split()
    if len(parts) != 2 or parts[0] != name:
        return (number, line), None
    try:
        count = int(parts[1])
    except ValueError:
        raise MeshFormatError(f"bad {name} count {parts[1]!r}", number)
    if count < 0:
        raise MeshFormatError(f"negative {name} count", number)
    return (number, line), count


def _rows(lines, count, name, last_number):
    rows = []
    for _ in range(count):
        try:
            number, line = next(lines)
        except StopIteration:
            raise MeshFormatError(f"unexpected end of file in {name} section", last_number)
        rows.append((number, line.split()))
        last_number = number
    return rows


def read_mesh(path):
    """Parse a mesh file; errors carry the offending line number."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"File not found: {path}")
    lines = _tokens(path)
    try:
        number, line = next(lines)
    except StopIteration:
        raise MeshFormatError("empty mesh file", 1)
    if line != HEADER:
        raise MeshFormatError(f"expected header {HEADER!r}", number)

    head, n_vertices = _section(lines, "VERTICES")
    if n_vertices is None:
        raise MeshFormatError("expected VERTICES section", head[0] if head else number)
    vertices = np.empty((n_vertices, 2))
    for i, (number, parts) in enumerate(_rows(lines, n_vertices, "VERTICES", head[0])):
        if len(parts) != 2:
            raise MeshFormatError("vertex line needs two coordinates", number)
        try:
            vertices[i] = [float(parts[0]), float(parts[1])]
        except ValueError:
            raise MeshFormatError("vertex coordinate is not a number", number)

    head, n_cells = _section(lines, "CELLS")
    if n_cells is None:
        raise MeshFormatError("mesh has no cells", head[0] if head else number)
    if n_cells == 0:
        raise MeshFormatError("mesh has no cells", head[0])
    cells = []
    last = head[0]
    for number, parts in _rows(lines, n_cells, "CELLS", head[0]):
        last = number
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise MeshFormatError("cell entries must be integers", number)
        if not values or values[0] != len(values) - 1:
            raise MeshFormatError("cell vertex count does not match its entries", number)
        if min(values[1:], default=0) < 0 or max(values[1:], default=0) >= n_vertices:
            raise MeshFormatError("vertex index out of range", number)
        cells.append(values[1:])

    groups = None
    subtriangles = parents = None
    head, count = _section(lines, "GROUPS")
    if count is not None:
        groups = []
        for number, parts in _rows(lines, count, "GROUPS", head[0]):
            last = number
            try:
                groups.append(int(parts[0]))
            except (ValueError, IndexError):
                raise MeshFormatError("group id must be an integer", number)
        if count != n_cells:
            raise MeshFormatError("GROUPS count differs from CELLS count", head[0])
        head, count = _section(lines, "SUBTRIANGLES")
    elif head is not None:
        head, count = _resection(head, "SUBTRIANGLES")
    if count is not None:
        rows = []
        for number, parts in _rows(lines, count, "SUBTRIANGLES", head[0]):
            last = number
            try:
                values = [int(p) for p in parts]
            except ValueError:
                raise MeshFormatError("sub-triangle entries must be integers", number)
            if len(values) != 4:
                raise MeshFormatError("sub-triangle line needs three vertices and a parent", number)
            if min(values[:3]) < 0 or max(values[:3]) >= n_vertices:
                raise MeshFormatError("vertex index out of range", number)
            if not 0 <= values[3] < n_cells:
                raise MeshFormatError("parent cell index out of range", number)
            rows.append(values)
        subtriangles = [r[:3] for r in rows]
        parents = [r[3] for r in rows]
    elif head is not None:
        raise MeshFormatError(f"unexpected content {head[1]!r}", head[0])
    rest = next(lines, None)
    if rest is not None:
        raise MeshFormatError(f"unexpected content {rest[1]!r}", rest[0])

    try:
        return build_mesh(vertices, cells, subtriangles, parents, subdomains=groups)
    except MeshError as e:
        raise MeshFormatError(str(e), last) from e


def _resection(head, name):
    number, line = head
    parts = line.split()
    if len(parts) == 2 and parts[0] == name:
        try:
            return head, int(parts[1])
        except ValueError:
            raise MeshFormatError(f"bad {name} count {parts[1]!r}", number)
    return head, None


def write_mesh(mesh, path, include_subtriangles=None):
    """Write ``mesh``; sub-triangles are stored unless they are the default fan."""
    if include_subtriangles is None:
        include_subtriangles = not _is_fan(mesh)
    with open(path, "w") as f:
        f.write(f"{HEADER}\n")
        f.write(f"# {mesh.summary()}\n")
        f.write(f"VERTICES {mesh.n_vertices}\n")
        for x, y in mesh.vertices:
            f.write(f"{float(x)!r} {float(y)!r}\n")
        f.write(f"CELLS {mesh.n_cells}\n")
        for c in mesh.cells:
            f.write(" ".join(str(int(v)) for v in [len(c), *c]) + "\n")
        if mesh.subdomains is not None:
            f.write(f"GROUPS {mesh.n_cells}\n")
            for g in mesh.subdomains:
                f.write(f"{int(g)}\n")
        if include_subtriangles:
            f.write(f"SUBTRIANGLES {mesh.n_subtriangles}\n")
            for tri, parent in zip(mesh.subtriangles, mesh.subtriangle_parent):
                f.write(f"{int(tri[0])} {int(tri[1])} {int(tri[2])} {int(parent)}\n")
    return path


def _is_fan(mesh):
    expected = []
    for index, c in enumerate(mesh.cells):
        expected.extend((int(c[0]), int(c[k]), int(c[k + 1]), index) for k in range(1, len(c) - 1))
    actual = [(int(t[0]), int(t[1]), int(t[2]), int(p))
              for t, p in zip(mesh.subtriangles, mesh.subtriangle_parent)]
    return expected == actual
