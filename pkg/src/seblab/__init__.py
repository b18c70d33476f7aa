"""Smallest enclosing ball of an intersection of balls, solved as a convex
quadratic program on the unit simplex, with multiplier certificates and an
exact joint-numerical-range membership lab for verification."""

from .geometry import (
    Ball,
    Certificate,
    Instance,
    Solution,
    SolveStatus,
    UnitQuadratic,
    ball_to_quadratic,
    eval_quadratic,
    quadratic_to_ball,
)
from .numrange import MembershipVerdict, QuadraticMap
from .solver import (
    RankRegime,
    Regime,
    build_certificate,
    check_interior,
    classify,
    identity_residual,
    solve_seb,
)

__all__ = [
    "Ball",
    "Certificate",
    "Instance",
    "MembershipVerdict",
    "QuadraticMap",
    "RankRegime",
    "Regime",
    "Solution",
    "SolveStatus",
    "UnitQuadratic",
    "ball_to_quadratic",
    "build_certificate",
    "check_interior",
    "classify",
    "eval_quadratic",
    "identity_residual",
    "quadratic_to_ball",
    "solve_seb",
]

__version__ = "0.1.0"
