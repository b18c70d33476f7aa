import math

import numpy as np
import pytest

from seblab import Instance, UnitQuadratic
from seblab.numrange import QuadraticMap

SQRT2 = math.sqrt(2.0)


def lens_instance():
    """Two balls of radius sqrt(2) centered at (+-1, 0); optimal ball is the
    unit disk (the circles cross at (0, +-1))."""
    return Instance.from_data([[-1.0, 0.0], [1.0, 0.0]], [SQRT2, SQRT2])


def critical_instance():
    """Centers (1,0) and (0,1), radii 2: rank = n = m = 2, optimum at
    (1/2, 1/2) with radius sqrt(3.5)."""
    return Instance.from_data([[1.0, 0.0], [0.0, 1.0]], [2.0, 2.0])


def disjoint_instance():
    return Instance.from_data([[-5.0, 0.0], [5.0, 0.0]], [1.0, 1.0])


def unsupported_instance():
    """n = 2, m = 3, full-rank centers: minimality is not certified."""
    return Instance.from_data([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
                              [2.0, 2.0, 2.0])


def example_map():
    """The 2-D non-convex range: target center (1,1), components centered at
    (0,1) and (1,0), all quadratic constants zero."""
    inst = Instance.from_data([[0.0, 1.0], [1.0, 0.0]], [1.0, 1.0])
    target = UnitQuadratic(a=np.array([1.0, 1.0]), theta=0.0)
    return QuadraticMap.from_instance(inst, target)


def random_supported_instance(rng, n, slack=0.5):
    """n = m instance with i.i.d. normal centers and radii guaranteeing a
    common interior point."""
    while True:
        centers = rng.standard_normal((n, n))
        if np.linalg.matrix_rank(centers) == n:
            break
    p = rng.standard_normal(n) * 0.3
    radii = np.linalg.norm(centers - p, axis=1) + slack + rng.uniform(0.0, 0.5, n)
    return Instance.from_data(centers, radii)


def random_rank_deficient_map(rng, n=3, m=3):
    """Quadratic map with rank{a_i - a} < n (convex range)."""
    a = rng.standard_normal(n)
    W = rng.standard_normal((n, n - 1))
    centers = a[None, :] + rng.standard_normal((m, n - 1)) @ W.T
    target = UnitQuadratic(a=a, theta=float(a @ a) - rng.uniform(0.5, 2.0) ** 2)
    comps = tuple(
        UnitQuadratic(a=c, theta=float(c @ c) - rng.uniform(0.5, 2.0) ** 2)
        for c in centers
    )
    return QuadraticMap(target=target, components=comps, dimension=n)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
