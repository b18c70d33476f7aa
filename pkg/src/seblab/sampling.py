"""Independent verification machinery: feasible sampling and brute-force
oracles for the enclosing-ball solver."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import (
    DimensionTooLarge,
    EmptyInteriorError,
    RejectionStall,
    ValidationError,
)
from .geometry import BASE_TOL, Instance, SolveStatus

REJECTION_BUDGET = 5_000_000
MIN_ACCEPT_RATE = 1e-6


class SampleMethod(Enum):
    REJECTION = "Rejection"
    HIT_AND_RUN = "HitAndRun"


@dataclass(frozen=True)
class SampleCloud:
    points: np.ndarray
    seed: int
    method: SampleMethod

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]


def _slater_point(instance: Instance):
    from .solver import check_interior, solve_seb

    solution = solve_seb(instance)
    if solution.status is SolveStatus.EMPTY_INTERIOR:
        raise EmptyInteriorError("ball intersection has empty interior")
    nonempty, point = check_interior(instance, solution)
    if not nonempty:
        raise EmptyInteriorError("ball intersection has empty interior")
    return point


def _feasible_mask(instance: Instance, X, tol):
    centers = instance.centers_matrix()
    radii2 = instance.radii() ** 2
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.all(d2 <= radii2[None, :] + tol, axis=1)


def _rejection(instance: Instance, count, seed, tol):
    """Uniform rejection from the bounding box of the smallest input ball."""
    rng = np.random.default_rng(seed)
    smallest = min(instance.balls, key=lambda b: b.radius)
    lo = smallest.center - smallest.radius
    hi = smallest.center + smallest.radius
    kept = []
    drawn = 0
    accepted = 0
    while accepted < count:
        batch = max(4 * count, 4096)
        if drawn + batch > REJECTION_BUDGET:
            batch = REJECTION_BUDGET - drawn
            if batch <= 0:
                raise RejectionStall(
                    f"acceptance rate below {MIN_ACCEPT_RATE} after {drawn} draws"
                )
        X = rng.uniform(lo, hi, size=(batch, instance.dimension))
        mask = _feasible_mask(instance, X, tol)
        drawn += batch
        accepted += int(mask.sum())
        kept.append(X[mask])
        if drawn >= 1_000_000 and accepted / drawn < MIN_ACCEPT_RATE:
            raise RejectionStall(
                f"acceptance rate {accepted / drawn:.2e} below {MIN_ACCEPT_RATE}"
            )
    return np.vstack(kept)[:count]


def sample_intersection(instance: Instance, count: int, seed: int = 0,
                        method=SampleMethod.HIT_AND_RUN, start=None,
                        burn_in=100, thin=5, base_tol=BASE_TOL) -> SampleCloud:
    """Draw `count` points of the ball intersection.

    Hit-and-run walks exact chords from a Slater point (computed from the
    solver when `start` is omitted); rejection samples the bounding box of
    the smallest ball and falls back to hit-and-run if acceptance collapses.
    """
    if count < 0:
        raise ValidationError("count must be >= 0")
    method = SampleMethod(method)
    tol = base_tol * instance.scale()
    if count == 0:
        return SampleCloud(points=np.empty((0, instance.dimension)),
                           seed=seed, method=method)
    if method is SampleMethod.REJECTION:
        try:
            pts = _rejection(instance, count, seed, tol)
            return SampleCloud(points=pts, seed=seed, method=method)
        except RejectionStall:
            method = SampleMethod.HIT_AND_RUN
    if start is None:
        start = _slater_point(instance)
    pts = kernels.hit_and_run(
        np.ascontiguousarray(instance.centers_matrix()),
        np.ascontiguousarray(instance.radii()),
        np.ascontiguousarray(np.asarray(start, dtype=float)),
        int(count), int(burn_in), int(thin), int(seed) % 2**31,
    )
    return SampleCloud(points=pts, seed=seed, method=SampleMethod.HIT_AND_RUN)


def farthest_distance(cloud: SampleCloud, center) -> float:
    """max over cloud points of |x - center|."""
    if len(cloud) == 0:
        raise ValidationError("empty cloud")
    diff = cloud.points - np.asarray(center, dtype=float)[None, :]
    return float(np.sqrt(np.einsum("ij,ij->i", diff, diff).max()))


def cloud_meb(cloud: SampleCloud, iterations: int = 1000):
    """Core-set minimum enclosing ball of the cloud: (center, radius).

    The cloud lies inside the intersection, so this radius lower-bounds the
    optimal enclosing radius up to the (1 + eps(iterations)) core-set factor.
    """
    if len(cloud) == 0:
        raise ValidationError("empty cloud")
    c, r = kernels.cloud_meb(np.ascontiguousarray(cloud.points),
                             int(iterations))
    return c, float(r)


def default_box(instance: Instance, pad=0.0):
    """Axis-aligned box covering every input ball (plus padding)."""
    centers = instance.centers_matrix()
    radii = instance.radii()[:, None]
    lo = (centers - radii).min(axis=0) - pad
    hi = (centers + radii).max(axis=0) + pad
    return lo, hi


def grid_min_maxg(instance: Instance, resolution: int, box=None) -> float:
    """Exhaustive grid minimum of max_i g_i(x) over a box (n <= 3 only).

    Independent oracle for the minimax identity min_x max_i g_i = -q*.
    """
    n = instance.dimension
    if n > 3:
        raise DimensionTooLarge("grid oracle supports n <= 3")
    if resolution < 1:
        raise ValidationError("resolution must be >= 1")
    lo, hi = box if box is not None else default_box(instance)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    centers = np.ascontiguousarray(instance.centers_matrix())
    theta = np.einsum("ij,ij->i", centers, centers) - instance.radii() ** 2
    return float(kernels.grid_min_maxg(centers, theta, lo, hi, int(resolution)))


def grid_resolution_bound(instance: Instance, resolution: int, box=None) -> float:
    """Lipschitz error bound for grid_min_maxg at the given resolution.

    |grad g_i| <= 2(|x| + |a_i|) over the box; the grid minimum overshoots
    the true minimum by at most L * h * sqrt(n) / 2.
    """
    lo, hi = box if box is not None else default_box(instance)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    corner = np.maximum(np.abs(lo), np.abs(hi))
    xmax = float(np.linalg.norm(corner))
    amax = float(np.linalg.norm(instance.centers_matrix(), axis=1).max())
    L = 2.0 * (xmax + amax)
    h = float((hi - lo).max()) / resolution
    return L * h * np.sqrt(lo.size) / 2.0
