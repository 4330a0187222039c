"""Averaging (Markov) operator on regular multigraphs and its contraction tests.

For a d-regular multigraph, ``(M f)(v)`` is the mean of f over the d edge
slots at v, parallel edges counted with multiplicity. Norms are the
probability-normalized ones:

    ||f||   = sqrt( (1/n) sum f(v)^2 )        (L2)
    ||f||_1 = (1/n) sum |f(v)|                (L1)

so indicator functions tie boundaries to norms exactly:
``n * ||M chi_S - chi_S||_1 = 2 * boundary(S) / d``.

A function is *boxed* when every value lies in [0, 1]. The contraction
defect of a boxed f at contraction target (1 - eps) is

    ||M^2 f - M f|| - (1 - eps) * ||M f - f||

Nonpositive defects over a rich function family are evidence the graph
contracts like an expander; a positive defect is a concrete witness
against it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multigraph import GraphError, MultiGraph, VertexSet, require_regular
from .rng import TAG_FAMILY, stream


def l2_norm(f: np.ndarray) -> float:
    f = np.asarray(f, dtype=np.float64)
    if f.size == 0:
        raise GraphError("norm of an empty vector")
    return float(np.sqrt(np.mean(f * f)))


def l1_norm(f: np.ndarray) -> float:
    f = np.asarray(f, dtype=np.float64)
    if f.size == 0:
        raise GraphError("norm of an empty vector")
    return float(np.mean(np.abs(f)))


def is_boxed(f: np.ndarray) -> bool:
    f = np.asarray(f, dtype=np.float64)
    return bool(np.all(f >= 0.0) and np.all(f <= 1.0))


def _check_function(g: MultiGraph, f) -> np.ndarray:
    arr = np.asarray(f, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != g.n:
        raise GraphError(f"function has length {arr.shape}, graph has n={g.n}")
    if not np.all(np.isfinite(arr)):
        raise GraphError("function has non-finite values")
    return arr


def apply_markov(g: MultiGraph, f) -> np.ndarray:
    """M f: average of f over the d incident edge slots of each vertex."""
    d = require_regular(g)
    arr = _check_function(g, f)
    if d == 0:
        raise GraphError("Markov operator undefined for degree 0")
    src, dst = g._directed
    out = np.bincount(dst, weights=arr[src], minlength=g.n)
    return out / d


def markov_matrix(g: MultiGraph) -> np.ndarray:
    """Dense n x n matrix of the averaging operator. Small graphs only."""
    d = require_regular(g)
    if d == 0:
        raise GraphError("Markov operator undefined for degree 0")
    mat = np.zeros((g.n, g.n), dtype=np.float64)
    for u, v in g.edges.tolist():
        mat[u, v] += 1.0
        mat[v, u] += 1.0
    return mat / d


def contraction_defect(g: MultiGraph, f, epsilon: float) -> float:
    """||M^2 f - M f|| - (1 - eps) ||M f - f|| for a boxed f."""
    if not (0.0 < epsilon < 1.0):
        raise GraphError("epsilon must be in (0, 1)")
    arr = _check_function(g, f)
    if not is_boxed(arr):
        raise GraphError("function is not boxed into [0, 1]")
    mf = apply_markov(g, arr)
    m2f = apply_markov(g, mf)
    return l2_norm(m2f - mf) - (1.0 - epsilon) * l2_norm(mf - arr)


def markov_power_defect(g: MultiGraph, s, k: int, epsilon: float) -> float:
    """||M^{k+1} chi_S - M^k chi_S|| - (1-eps)^k ||M chi_S - chi_S||."""
    if k < 1:
        raise GraphError("k must be >= 1")
    if not (0.0 < epsilon < 1.0):
        raise GraphError("epsilon must be in (0, 1)")
    if not isinstance(s, VertexSet):
        s = VertexSet.of(g.n, s)
    chi = s.indicator()
    cur = chi
    for _ in range(k):
        cur = apply_markov(g, cur)
    nxt = apply_markov(g, cur)
    first = apply_markov(g, chi)
    return l2_norm(nxt - cur) - (1.0 - epsilon) ** k * l2_norm(first - chi)


# -- spectral estimates ------------------------------------------------------

@dataclass(frozen=True)
class SpectralEstimate:
    """Power-iteration estimates of the extreme nontrivial eigenvalues of M.

    lambda2 is the largest eigenvalue on the mean-zero subspace, lambda_min
    the smallest; residual is the worst operator residual across the runs
    (in the scale of M itself). converged reports whether every run met its
    tolerance within the iteration budget.
    """

    lambda2: float
    lambda_min: float
    iterations: int
    residual: float
    converged: bool


def _power_top(matvec, n: int, tolerance: float, max_iter: int, rng) -> tuple:
    """Top eigenvalue of a PSD operator restricted to the mean-zero subspace.

    Plain power iteration with mean deflation each step. For PSD operators
    the Rayleigh quotient is nondecreasing, so the estimate approaches the
    true value from below. Returns (rho, vector, residual, iterations).
    """
    x = rng.standard_normal(n)
    x -= x.mean()
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise GraphError("degenerate start vector")
    x /= nx
    rho = 0.0
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        y = matvec(x)
        y -= y.mean()
        rho = float(np.dot(x, y))
        res = float(np.linalg.norm(y - rho * x))
        if res <= tolerance:
            break
        ny = np.linalg.norm(y)
        if ny == 0.0:
            # operator annihilates the vector: eigenvalue 0 on this subspace
            return 0.0, x, 0.0, it
        x = y / ny
    return rho, x, res, it


def second_eigenvalue(g: MultiGraph, tolerance: float = 1e-9,
                      max_iter: int = 100_000) -> SpectralEstimate:
    """Estimate lambda_2 and lambda_min of the averaging operator.

    Two shifted power iterations on the mean-zero subspace: (M + I)/2 has
    top eigenvalue (1 + lambda_2)/2 and (I - M)/2 has top eigenvalue
    (1 - lambda_min)/2; both shifts are positive semidefinite, which makes
    the Rayleigh quotients monotone and the estimates one-sided.
    """
    require_regular(g)
    if g.n < 2:
        raise GraphError("spectral estimate needs at least 2 vertices")
    rng = stream(0x51DE, g.n)

    def op_plus(x):
        return 0.5 * (apply_markov(g, x) + x)

    def op_minus(x):
        return 0.5 * (x - apply_markov(g, x))

    # residuals of the shifted operators are half-scale relative to M
    rho2, _, res2, it2 = _power_top(op_plus, g.n, tolerance / 2, max_iter, rng)
    rhom, _, resm, itm = _power_top(op_minus, g.n, tolerance / 2, max_iter, rng)
    lam2 = 2.0 * rho2 - 1.0
    lam_min = 1.0 - 2.0 * rhom
    residual = 2.0 * max(res2, resm)
    converged = residual <= tolerance
    return SpectralEstimate(lam2, lam_min, it2 + itm, residual, converged)


def second_eigenvector(g: MultiGraph, tolerance: float = 1e-7,
                       max_iter: int = 100_000) -> np.ndarray:
    """Unit mean-zero vector approximating the lambda_2 eigendirection."""
    require_regular(g)
    if g.n < 2:
        raise GraphError("spectral estimate needs at least 2 vertices")
    rng = stream(0x51DE, g.n, 1)

    def op_plus(x):
        return 0.5 * (apply_markov(g, x) + x)

    _, vec, _, _ = _power_top(op_plus, g.n, tolerance / 2, max_iter, rng)
    return vec


def cheeger_certificate(g: MultiGraph, epsilon_target: float = 1e-9,
                        max_iter: int = 100_000) -> float:
    """Certified expansion lower bound (1 - lambda_2)/2 from the spectral gap.

    Power iteration approaches lambda_2 from below, which is the unsafe
    side for a certificate, so the estimate is widened by its residual and
    tolerance before converting. The returned gamma satisfies
    boundary(S) >= gamma * d * |S| for all |S| <= n/2 whenever the widened
    estimate really does dominate lambda_2 (it does at convergence).
    """
    est = second_eigenvalue(g, tolerance=epsilon_target, max_iter=max_iter)
    if not est.converged:
        raise GraphError(f"eigenvalue estimation did not converge "
                         f"(residual {est.residual:.3e})")
    lam2_upper = est.lambda2 + est.residual + 10.0 * epsilon_target
    return max(0.0, (1.0 - lam2_upper) / 2.0)


# -- declared function family ------------------------------------------------

def standard_function_family(g: MultiGraph, seed: int = 0, random_count: int = 24):
    """Labeled boxed test functions for defect scans.

    Mix of indicators (random sets of several sizes), uniform random boxed
    vectors, clamped eigenvector bumps for both spectral ends, and graph
    tents (clipped BFS distance profiles). Deterministic for a given seed.
    """
    require_regular(g)
    n = g.n
    rng = stream(seed, TAG_FAMILY, n)
    family = []
    family.append(("constant-half", np.full(n, 0.5)))
    sizes = sorted({1, max(1, n // 8), max(1, n // 4), max(1, n // 2)})
    for sz in sizes:
        for rep in range(2):
            members = rng.choice(n, size=sz, replace=False)
            chi = np.zeros(n)
            chi[members] = 1.0
            family.append((f"indicator-{sz}-{rep}", chi))
    for i in range(random_count):
        family.append((f"uniform-{i}", rng.uniform(0.0, 1.0, size=n)))
    if n >= 2:
        v2 = second_eigenvector(g)
        vm = _extreme_vector(g, low_end=True)
        for label, vec in (("eig-top", v2), ("eig-bottom", vm)):
            peak = np.max(np.abs(vec))
            if peak > 0:
                unit = vec / peak
                for c in (0.5, 0.25):
                    family.append((f"{label}-bump-{c}", np.clip(0.5 + c * unit, 0.0, 1.0)))
    for root in sorted({0, n // 3, (2 * n) // 3}):
        _, dist = g.bfs_order(root)
        reach = dist[dist >= 0]
        ecc = int(reach.max()) if reach.size else 0
        if ecc >= 1:
            scale = max(1, ecc // 2)
            prof = np.where(dist >= 0, dist, ecc).astype(np.float64)
            family.append((f"tent-{root}", np.clip(prof / scale, 0.0, 1.0)))
    return family


def _extreme_vector(g: MultiGraph, low_end: bool, tolerance: float = 1e-7,
                    max_iter: int = 100_000) -> np.ndarray:
    rng = stream(0x51DE, g.n, 2 + int(low_end))

    def op(x):
        mx = apply_markov(g, x)
        return 0.5 * (x - mx) if low_end else 0.5 * (x + mx)

    _, vec, _, _ = _power_top(op, g.n, tolerance / 2, max_iter, rng)
    return vec
