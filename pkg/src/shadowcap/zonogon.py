"""Planar shadows of the cube [-1, 1]^{2n} under a rotation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import kernels
from .linalg import ComplexLine, apply_j

ZERO_TOL = 1e-14
HULL_MAX_GENERATORS = 14


@dataclass(frozen=True)
class Zonogon:
    """Minkowski sum of the segments [-g_i, g_i]; ``generators`` has shape (m, 2)."""

    generators: np.ndarray

    def scaled(self, t: float) -> "Zonogon":
        return Zonogon(t * self.generators)


def project_generators(O: np.ndarray, line: ComplexLine) -> Zonogon:
    """Shadow of O Q on ``line``: g_i = ((O^T e)_i, (O^T Je)_i)."""
    O = np.asarray(O, dtype=float)
    if O.shape != (line.dim, line.dim):
        raise ValueError(f"rotation is {O.shape}, line lives in R^{line.dim}")
    return Zonogon(np.column_stack([O.T @ line.e, O.T @ line.je]))


def area(z: Zonogon) -> float:
    g = np.ascontiguousarray(z.generators, dtype=float)
    return float(kernels.zonogon_area(np.ascontiguousarray(g[:, 0]), np.ascontiguousarray(g[:, 1])))


def support(z: Zonogon, theta: float) -> float:
    w = np.array([np.cos(theta), np.sin(theta)])
    return float(np.abs(z.generators @ w).sum())


def _half_turn_sorted(g: np.ndarray) -> np.ndarray:
    """Nonzero generators flipped into angle [0, pi), sorted, parallel ones merged."""
    g = g[np.abs(g).max(axis=1) > ZERO_TOL]
    if g.shape[0] == 0:
        return g
    flip = (g[:, 1] < 0) | ((g[:, 1] == 0) & (g[:, 0] < 0))
    g = np.where(flip[:, None], -g, g)
    ang = np.arctan2(g[:, 1], g[:, 0])
    # a tiny positive y next to x < 0 can round to exactly pi; that generator is at angle 0
    wrap = ang >= np.pi
    g[wrap] = -g[wrap]
    ang[wrap] = 0.0
    order = np.argsort(ang, kind="stable")
    g, ang = g[order], ang[order]
    merged = [g[0].copy()]
    last = ang[0]
    for gi, ai in zip(g[1:], ang[1:]):
        if ai - last <= 1e-15:
            merged[-1] += gi
        else:
            merged.append(gi.copy())
            last = ai
    return np.array(merged)


def vertices(z: Zonogon) -> np.ndarray:
    """Vertices in counter-clockwise order (2k of them for k distinct directions)."""
    g = _half_turn_sorted(np.asarray(z.generators, dtype=float))
    if g.shape[0] == 0:
        return np.zeros((1, 2))
    start = -g.sum(axis=0)
    half = start + 2.0 * np.cumsum(g, axis=0)
    lower = np.vstack([start, half[:-1]])
    return np.vstack([lower, -lower])


def diameter(z: Zonogon) -> float:
    """2 * max vertex norm, i.e. 2 * max_theta support(theta)."""
    v = vertices(z)
    return 2.0 * float(np.sqrt((v * v).sum(axis=1)).max())


def hull_oracle(z: Zonogon) -> dict:
    """Brute force: all sign patterns, planar hull, exact area and max pairwise distance."""
    g = np.asarray(z.generators, dtype=float)
    m = g.shape[0]
    if m > HULL_MAX_GENERATORS:
        raise ValueError(f"{m} generators: 2^{m} sign patterns is past the enumeration limit")
    bits = (np.arange(2**m)[:, None] >> np.arange(m)[None, :]) & 1
    pts = (2.0 * bits - 1.0) @ g
    try:
        hull = ConvexHull(pts)
        hull_area = float(hull.volume)
        cand = pts[hull.vertices]
    except QhullError:
        # flat: a segment or a point
        hull_area = 0.0
        cand = pts
    diff = cand[:, None, :] - cand[None, :, :]
    diam = float(np.sqrt((diff**2).sum(axis=-1)).max())
    return {"area": hull_area, "diameter": diam}


def line_shadow(O: np.ndarray, e) -> Zonogon:
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    return Zonogon(np.column_stack([O.T @ e, O.T @ apply_j(e)]))
