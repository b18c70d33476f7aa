"""Hot numerical kernels, numba-jitted with a pure-numpy fallback.

Set the environment variable SEBLAB_NUMBA=0 before import to force the
numpy path (also used automatically when numba is not installed). Both
variants of every kernel stay importable (`*_py` / `*_nb`) so the benchmark
in benchmarks/bench_kernels.py can time them side by side.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("SEBLAB_NUMBA", "1") != "0"


# ---------------------------------------------------------------------------
# Frank-Wolfe loop for min mu^T M mu - c^T mu over the unit simplex
# ---------------------------------------------------------------------------

def _fw_minimize(M, c, tol_gap, max_iter):
    """Conditional-gradient loop with exact line search.

    Returns (mu, iterations, gap). Vertex ties break to the lowest index
    (np.argmin). Each iterate is a convex combination of vertices, so mu
    stays exactly on the simplex.
    """
    m = M.shape[0]
    mu = np.full(m, 1.0 / m)
    Mmu = M @ mu
    for it in range(max_iter):
        grad = 2.0 * Mmu - c
        j = int(np.argmin(grad))
        gap = float(np.dot(grad, mu)) - grad[j]
        if gap <= tol_gap:
            return mu, it, gap
        # direction d = e_j - mu; M @ d = M[:, j] - Mmu
        Md = M[:, j] - Mmu
        a2 = float(np.dot(Md, -mu)) + Md[j]  # d^T M d
        a1 = -gap  # grad^T d
        if a2 <= 0.0:
            gamma = 1.0 if a1 < 0.0 else 0.0
        else:
            gamma = -a1 / (2.0 * a2)
            if gamma > 1.0:
                gamma = 1.0
            elif gamma < 0.0:
                gamma = 0.0
        mu = (1.0 - gamma) * mu
        mu[j] += gamma
        Mmu = (1.0 - gamma) * Mmu + gamma * M[:, j]
    grad = 2.0 * Mmu - c
    j = int(np.argmin(grad))
    gap = float(np.dot(grad, mu)) - grad[j]
    return mu, max_iter, gap


# ---------------------------------------------------------------------------
# Hit-and-run chain inside an intersection of balls
# ---------------------------------------------------------------------------

def _hit_and_run(centers, radii, start, count, burn_in, thin, seed):
    """Uniform-ish samples from the ball intersection via exact chords.

    Each step intersects the line x + t*u with every ball (roots of a scalar
    quadratic) and draws t uniformly on the resulting interval, so every
    sample is exactly feasible.
    """
    np.random.seed(seed)
    m, n = centers.shape
    out = np.empty((count, n))
    x = start.copy()
    total = burn_in + count * thin
    k = 0
    for step in range(total):
        u = np.random.standard_normal(n)
        u = u / np.sqrt(np.dot(u, u))
        tlo = -1e300
        thi = 1e300
        for i in range(m):
            diff = x - centers[i]
            b = np.dot(u, diff)
            c0 = np.dot(diff, diff) - radii[i] * radii[i]
            disc = b * b - c0
            if disc < 0.0:
                disc = 0.0  # chord degenerates at the boundary
            s = np.sqrt(disc)
            lo = -b - s
            hi = -b + s
            if lo > tlo:
                tlo = lo
            if hi < thi:
                thi = hi
        if thi < tlo:  # numerical corner: stay put
            tlo = 0.0
            thi = 0.0
        t = tlo + (thi - tlo) * np.random.random()
        x = x + t * u
        if step >= burn_in and (step - burn_in) % thin == thin - 1:
            out[k] = x
            k += 1
    return out


# ---------------------------------------------------------------------------
# Core-set style minimum enclosing ball of a point cloud
# ---------------------------------------------------------------------------

def _cloud_meb(points, iterations):
    """Badoiu-Clarkson iteration: walk toward the farthest point with step 1/(t+2)."""
    N, n = points.shape
    c = np.zeros(n)
    for j in range(N):
        c += points[j]
    c /= N
    for t in range(iterations):
        best = -1.0
        jbest = 0
        for j in range(N):
            d2 = 0.0
            for d in range(n):
                diff = points[j, d] - c[d]
                d2 += diff * diff
            if d2 > best:
                best = d2
                jbest = j
        c = c + (points[jbest] - c) / (t + 2.0)
    best = 0.0
    for j in range(N):
        d2 = 0.0
        for d in range(n):
            diff = points[j, d] - c[d]
            d2 += diff * diff
        if d2 > best:
            best = d2
    return c, np.sqrt(best)


def _cloud_meb_py(points, iterations):
    """Vectorized numpy variant of the core-set iteration."""
    c = points.mean(axis=0)
    for t in range(iterations):
        j = int(np.argmax(np.einsum("ij,ij->i", points - c, points - c)))
        c = c + (points[j] - c) / (t + 2.0)
    d2 = np.einsum("ij,ij->i", points - c, points - c)
    return c, float(np.sqrt(d2.max()))


# ---------------------------------------------------------------------------
# Exhaustive grid minimization of max_i g_i(x) over a box
# ---------------------------------------------------------------------------

def _grid_min_maxg(centers, theta, lo, hi, resolution):
    """Minimum over a regular (resolution+1)^n grid of max_i g_i(x)."""
    n = lo.shape[0]
    m = centers.shape[0]
    steps = resolution + 1
    total = steps**n
    best = 1e300
    x = np.empty(n)
    for flat in range(total):
        rem = flat
        for d in range(n):
            idx = rem % steps
            rem //= steps
            x[d] = lo[d] + (hi[d] - lo[d]) * idx / resolution
        xx = np.dot(x, x)
        gmax = -1e300
        for i in range(m):
            gi = xx - 2.0 * np.dot(centers[i], x) + theta[i]
            if gi > gmax:
                gmax = gi
        if gmax < best:
            best = gmax
    return best


def _grid_min_maxg_py(centers, theta, lo, hi, resolution):
    """Vectorized numpy variant: evaluates whole grid slabs at once."""
    n = lo.shape[0]
    axes = [np.linspace(lo[d], hi[d], resolution + 1) for d in range(n)]
    grids = np.meshgrid(*axes, indexing="ij")
    X = np.stack([g.ravel() for g in grids], axis=1)
    best = np.inf
    for chunk in np.array_split(X, max(1, X.shape[0] // 200000)):
        xx = np.einsum("ij,ij->i", chunk, chunk)
        g = xx[:, None] - 2.0 * chunk @ centers.T + theta[None, :]
        best = min(best, float(g.max(axis=1).min()))
    return best


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

fw_minimize_py = _fw_minimize
hit_and_run_py = _hit_and_run
cloud_meb_py = _cloud_meb_py
grid_min_maxg_py = _grid_min_maxg_py

if HAVE_NUMBA:
    fw_minimize_nb = njit(cache=True)(_fw_minimize)
    hit_and_run_nb = njit(cache=True)(_hit_and_run)
    cloud_meb_nb = njit(cache=True)(_cloud_meb)
    grid_min_maxg_nb = njit(cache=True)(_grid_min_maxg)

if USE_NUMBA:
    fw_minimize = fw_minimize_nb
    hit_and_run = hit_and_run_nb
    cloud_meb = cloud_meb_nb
    grid_min_maxg = grid_min_maxg_nb
else:
    fw_minimize = fw_minimize_py
    hit_and_run = hit_and_run_py
    cloud_meb = cloud_meb_py
    grid_min_maxg = grid_min_maxg_py
