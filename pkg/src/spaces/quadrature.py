"""Gauss rules on the reference triangle and the reference segment.

Reference triangle: (0, 0), (1, 0), (0, 1), area 1/2. Reference segment: [-1, 1].
Triangle rules are collapsed (Duffy) tensor products of a Gauss-Jacobi rule in
the collapsed direction and a Gauss-Legendre rule along the other one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from ..errors import QuadratureError

MIN_ORDER = 1
MAX_ORDER = 20


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    kind: str
    order: int
    points: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    def integrate(self, values):
        """Weighted sum over the rule points along the first axis."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def _check_order(q):
    if isinstance(q, bool) or int(q) != q:
        raise QuadratureError(f"quadrature order must be an integer, got {q!r}")
    q = int(q)
    if not MIN_ORDER <= q <= MAX_ORDER:
        raise QuadratureError(f"unsupported quadrature order {q}; supported range is "
                              f"[{MIN_ORDER}, {MAX_ORDER}]")
    return q


@lru_cache(maxsize=None)
def _segment(q):
    n = math.ceil((q + 1) / 2)
    x, w = special.roots_legendre(n)
    return QuadratureRule("segment", q, x.reshape(-1, 1), w)


@lru_cache(maxsize=None)
def _triangle(q):
    n = math.ceil((q + 1) / 2)
    s, ws = special.roots_legendre(n)
    t, wt = special.roots_jacobi(n, 1.0, 0.0)
    u = 0.5 * (1.0 + s)
    v = 0.5 * (1.0 + t)
    U, V = np.meshgrid(u, v, indexing="ij")
    points = np.column_stack([(U * (1.0 - V)).ravel(), V.ravel()])
    weights = (np.outer(ws, wt) / 8.0).ravel()
    return QuadratureRule("triangle", q, points, weights)


def quadrature(kind, order):
    """Return a rule of ``kind`` ('triangle' or 'segment') exact to degree ``order``."""
    q = _check_order(order)
    if kind == "triangle":
        return _triangle(q)
    if kind == "segment":
        return _segment(q)
    raise QuadratureError(f"unknown quadrature kind {kind!r}")


def map_triangles(vertices, triangles, rule):
    """Physical points ``(n_tri, nq, 2)`` and weights ``(n_tri, nq)`` of ``rule``."""
    p = np.asarray(vertices)[np.asarray(triangles)]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    ref = rule.points
    points = p[:, None, 0] + ref[None, :, 0, None] * e1[:, None] + ref[None, :, 1, None] * e2[:, None]
    det = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    return points, det[:, None] * rule.weights[None, :]


def map_segments(a, b, rule):
    """Physical points ``(n_seg, nq, 2)`` and weights for segments from ``a`` to ``b``."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    t = 0.5 * (rule.points[:, 0] + 1.0)
    points = a[:, None] + t[None, :, None] * (b - a)[:, None]
    length = np.linalg.norm(b - a, axis=1)
    return points, 0.5 * length[:, None] * rule.weights[None, :]
