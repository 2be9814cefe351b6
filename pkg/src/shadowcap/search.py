"""Minimisation over complex lines and the bounds that bracket it.

Minima returned by the multi-start descent are values actually attained at a
point, so they are *upper* bounds on the true infimum. Certified lower bounds
come from :mod:`shadowcap.nets`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .linalg import (
    ComplexLine,
    RngSeed,
    apply_j,
    check_orthogonal,
    rotated_complex_structure,
)
from .zonogon import area, line_shadow


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iters: int = 500
    step_init: float = 0.1
    step_shrink: float = 0.5
    grad_tol: float = 1e-8
    rng: RngSeed = field(default_factory=lambda: RngSeed(0))
    # extra deterministic starts at the lines span{O e_k, J O e_k}, best first
    coordinate_starts: int = 8

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if self.step_init <= 0 or self.grad_tol <= 0:
            raise ValueError("step_init and grad_tol must be positive")
        if not 0.0 < self.step_shrink < 1.0:
            raise ValueError("step_shrink must lie in (0, 1)")
        if self.coordinate_starts < 0:
            raise ValueError("coordinate_starts must be >= 0")


@dataclass(frozen=True)
class MinimizationResult:
    best_line: ComplexLine
    best_value: float
    restarts_used: int
    converged: bool
    iterations: int
    objective: str
    point: np.ndarray
    restart_values: np.ndarray


def _objective_matrices(objective: str, O: np.ndarray):
    """(M1, M2) so that the objective is a function of M1 x and M2 x."""
    if objective == "area":
        # rows of O^T J are -J applied to rows of O^T
        return np.ascontiguousarray(O.T), np.ascontiguousarray(-apply_j(O.T))
    A = rotated_complex_structure(O)
    return np.eye(O.shape[0]), np.ascontiguousarray(A)


def objective_value(objective: str, O: np.ndarray, e) -> float:
    """Objective at the complex line through e (e in the ambient frame)."""
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    a = O.T @ e
    b = O.T @ apply_j(e)
    if objective == "area":
        return float(kernels.zonogon_area(a, b))
    na, nb = float(np.abs(a).sum()), float(np.abs(b).sum())
    if objective == "diam_proxy":
        return max(na, nb)
    if objective == "l1_sum":
        return na + nb
    raise ValueError(f"unknown objective {objective!r}")


def _minimize(objective, O, cfg: OptimizerConfig, extra_starts=None) -> MinimizationResult:
    O = check_orthogonal(O)
    dim = O.shape[0]
    M1, M2 = _objective_matrices(objective, O)
    A = rotated_complex_structure(O)
    starts = [np.stack([cfg.rng.substream(r).standard_normal(dim) for r in range(cfg.restarts)])]
    if cfg.coordinate_starts:
        # v = e_k gives |v|_1 = 1 and |A v|_1 = |A e_k|_1; smallest columns first
        ks = np.argsort(np.abs(A).sum(axis=0), kind="stable")[: cfg.coordinate_starts]
        coord = np.eye(dim)[ks]
        starts.append(coord @ O.T if objective == "area" else coord)
    if extra_starts is not None:
        starts.append(np.atleast_2d(np.asarray(extra_starts, dtype=float)))
    starts = np.vstack(starts)
    xs, fs, its, conv = kernels.descend_many(
        kernels.OBJECTIVE_CODES[objective],
        M1,
        M2,
        np.ascontiguousarray(starts),
        float(cfg.step_init),
        float(cfg.step_shrink),
        int(cfg.max_iters),
        float(cfg.grad_tol),
    )
    best = int(np.argmin(fs))  # ties -> lowest restart index
    x = xs[best]
    # area works in the ambient frame; the l1 objectives in the rotated one (e = O x)
    e = x if objective == "area" else O @ x
    line = ComplexLine.from_vector(e)
    value = objective_value(objective, O, line.e)
    return MinimizationResult(
        best_line=line,
        best_value=value,
        restarts_used=starts.shape[0],
        converged=bool(conv.any()),
        iterations=int(its.sum()),
        objective=objective,
        point=x,
        restart_values=fs,
    )


def shadow_area(O: np.ndarray, e) -> float:
    return area(line_shadow(O, e))


def minimize_shadow_area(O, cfg: OptimizerConfig | None = None, extra_starts=None) -> MinimizationResult:
    """Multi-start projected subgradient descent of the shadow area over lines."""
    return _minimize("area", O, cfg or OptimizerConfig(), extra_starts)


def minimize_diam_proxy(O, cfg: OptimizerConfig | None = None, extra_starts=None) -> MinimizationResult:
    """min over unit v of max(|v|_1, |A v|_1), A = O^T J O.

    ``extra_starts`` are points v in the rotated frame; passing O^T e for a known
    line e guarantees the result does not exceed that line's proxy value.
    """
    return _minimize("diam_proxy", O, cfg or OptimizerConfig(), extra_starts)


def width_direction_upper_bound(O) -> dict:
    """Line through the minimal-width direction of O Q; its area is at most 4 sqrt(2n)."""
    O = check_orthogonal(O)
    widths = 2.0 * np.abs(O.T @ O).sum(axis=0)  # width of OQ along O e_k
    k = int(np.flatnonzero(widths <= widths.min() + 1e-12)[0])
    line = ComplexLine.from_vector(O[:, k])
    return {"line": line, "area_ub": shadow_area(O, line.e), "index": k}


def j_operator_norm_cube(O) -> float:
    """||J|| from (OQ)° to OQ, which is max |(O^T J O)_{ij}|."""
    return float(np.abs(rotated_complex_structure(O)).max())


def capacity_sandwich(O, cfg: OptimizerConfig | None = None) -> dict:
    """1/||J|| and 4/||J|| (which bracket the symplectic quantity) next to the U(n) estimate.

    The estimate must stay above ``lower``; ``upper`` does not bound it.
    """
    jn = j_operator_norm_cube(O)
    lower = 1.0 / jn
    est = minimize_shadow_area(O, cfg)
    return {"lower": lower, "upper": 4.0 * lower, "cUn_estimate": est.best_value, "j_norm": jn}


@dataclass(frozen=True)
class SectionDiameter:
    diameter: float
    m2: float
    point: np.ndarray
    # m2 comes from minimisation, so it may overshoot the true minimum and the
    # diameter 2 sqrt(2) / m2 is then an underestimate
    lower_estimate: bool = True


def octahedron_section_diameter(O, cfg: OptimizerConfig | None = None, extra_starts=None) -> SectionDiameter:
    """Diameter of B_1^{4n} cut by {(x, A x)}: 2 sqrt(2) / min_{|x|=1} (|x|_1 + |A x|_1)."""
    res = _minimize("l1_sum", O, cfg or OptimizerConfig(), extra_starts)
    m2 = res.best_value
    return SectionDiameter(diameter=2.0 * np.sqrt(2.0) / m2, m2=m2, point=res.point)
