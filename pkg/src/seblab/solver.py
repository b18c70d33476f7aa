"""Enclosing-ball pipeline: regime gating, QP solve, recovery, certificates.

The center is recovered as the multiplier combination of the input centers
and the radius as the square root of the QP optimum; the rank of the centers
decides whether minimality is certified.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ValidationFailure
from .geometry import (
    BASE_TOL,
    Certificate,
    Instance,
    Solution,
    SolveStatus,
    UnitQuadratic,
    eval_quadratic,
)
from .linalg import arrowhead_psd, numerical_rank
from .simplex_qp import build_qp, solve


class Regime(Enum):
    CONVEX = "ConvexCase"
    CRITICAL = "CriticalCase"
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class RankRegime:
    rank_centers: int
    regime: Regime
    rank_shifted: int | None = None


def _regime_of(rank, n, m):
    if rank < n:
        return Regime.CONVEX
    if m == n:
        return Regime.CRITICAL
    return Regime.UNSUPPORTED


def classify(instance: Instance) -> RankRegime:
    """Pre-solve gate on rank{a_1, ..., a_m} (the shifted rank needs the
    still-unknown center, so the unshifted rank stands in; it only
    over-reports)."""
    rank = numerical_rank(instance.centers_matrix())
    return RankRegime(rank_centers=rank,
                      regime=_regime_of(rank, instance.dimension, instance.m))


def solve_seb(instance: Instance, tol_gap=None, max_iter=None, base_tol=BASE_TOL):
    """Solve the simplex QP and recover the enclosing ball.

    q* > 0: ball of radius sqrt(q*), certified when the post-solve shifted
    rank satisfies the gating condition. |q*| ~ 0: the intersection is a
    single touching point (radius 0). q* < 0: empty interior.
    """
    qp = build_qp(instance)
    res = solve(qp, tol_gap=tol_gap, max_iter=max_iter)
    mu = res.minimizer
    q_star = res.value
    centers = instance.centers_matrix()
    a = centers.T @ mu
    tol = base_tol * instance.scale()

    if q_star < -tol:
        status = SolveStatus.EMPTY_INTERIOR
        radius = 0.0
    elif q_star <= tol:
        status = SolveStatus.DEGENERATE_POINT
        radius = 0.0  # sqrt of noise-level q* clamps to 0
    else:
        rank_shifted = numerical_rank(centers - a)
        post = _regime_of(rank_shifted, instance.dimension, instance.m)
        if post in (Regime.CONVEX, Regime.CRITICAL):
            status = SolveStatus.CERTIFIED_OPTIMAL
        else:
            status = SolveStatus.UPPER_BOUND_ONLY
        radius = float(np.sqrt(q_star))
    return Solution(center=a, radius=radius, multipliers=mu, qp_value=q_star,
                    status=status, fw_gap=res.gap, fw_iterations=res.iterations)


def regime_report(instance: Instance, solution: Solution) -> RankRegime:
    """Pre-solve regime enriched with the post-solve shifted rank."""
    pre = classify(instance)
    rank_shifted = numerical_rank(instance.centers_matrix() - solution.center)
    return RankRegime(rank_centers=pre.rank_centers, regime=pre.regime,
                      rank_shifted=rank_shifted)


def check_interior(instance: Instance, solution: Solution, base_tol=BASE_TOL):
    """Slater check via the minimax identity min_x max_i g_i(x) = -q*.

    The intersection has nonempty interior iff q* > 0, and the computed
    center is then itself a Slater point with max_i g_i(center) = -q*.
    Returns (nonempty, slater_point_or_None) and validates the identity.
    """
    tol = base_tol * instance.scale()
    a = solution.center
    worst = max(eval_quadratic(q, a) for q in instance.quadratics())
    if worst > -solution.qp_value + tol:
        raise ValidationFailure(
            f"max_i g_i(center) = {worst} exceeds -q* = {-solution.qp_value}"
        )
    nonempty = solution.qp_value > tol
    return nonempty, (a if nonempty else None)


def build_certificate(instance: Instance, solution: Solution,
                      base_tol=BASE_TOL) -> Certificate:
    """Multiplier certificate blocks for the containment LMI.

    alpha = sum(mu) - 1, offdiag = a - sum(mu_i a_i),
    beta = r^2 - |a|^2 + sum(mu_i (|a_i|^2 - r_i^2)); all three vanish at an
    exact QP optimum.
    """
    mu = solution.multipliers
    centers = instance.centers_matrix()
    a = solution.center
    alpha = float(mu.sum() - 1.0)
    offdiag = a - centers.T @ mu
    theta = np.einsum("ij,ij->i", centers, centers) - instance.radii() ** 2
    beta = float(solution.radius**2 - np.dot(a, a) + mu @ theta)
    tol = base_tol * instance.scale()
    psd_ok, residual = arrowhead_psd(alpha, offdiag, beta, tol=tol)
    return Certificate(multipliers=mu, alpha=alpha, offdiag=offdiag, beta=beta,
                       psd_ok=psd_ok, residual=residual)


def identity_residual(instance: Instance, solution: Solution, x) -> float:
    """sum_i mu_i g_i(x) - g_solution(x); identically 0 at a QP optimum.

    The identity needs only sum(mu) = 1, a = sum(mu_i a_i) and
    theta = sum(mu_i theta_i); it does not depend on the rank condition.
    """
    x = np.asarray(x, dtype=float)
    mu = solution.multipliers
    weighted = sum(
        float(w) * eval_quadratic(q, x)
        for w, q in zip(mu, instance.quadratics())
    )
    return weighted - eval_quadratic(solution.target_quadratic(), x)


def target_from(instance: Instance, solution: Solution = None) -> UnitQuadratic:
    """Quadratic of the solved (or provided) enclosing ball."""
    if solution is None:
        solution = solve_seb(instance)
    return solution.target_quadratic()
