"""Samplers for the random-matrix and random-graph models.

All samplers draw from counter-based Philox streams keyed by (seed,
purpose, row), so results are reproducible bit for bit, independent of
evaluation order, and safe to parallelize across rows.  Sampled
adjacency-style matrices are symmetric with zero diagonal.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ConvergenceError, ValidationError
from .graphons import ConstantGraphon, ProductGraphon, StepGraphon, pair_values

# purpose tags for the per-row random streams
_WIGNER, _INHOM_ER, _LATENTS, _W_RANDOM, _CONSTRAINED = 1, 2, 3, 4, 5
_DECOUPLED_OFFDIAG, _DECOUPLED_DIAG, _MULTIPLICATIVE_G, _MULTIPLICATIVE_U = 6, 7, 8, 9


def row_rng(seed, *tags):
    """Independent generator for one logical stream of a seeded experiment."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(t) for t in tags))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed, *tags):
    """Stable 64-bit child seed for nested experiments (per N, per trial)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(t) for t in tags))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def variance_matrix(graphon, n, block_average=False):
    """Variance profile sigma^2_ij from a graphon on an n x n grid.

    Default is midpoint evaluation at (i/n, j/n); block averaging takes
    the exact mean of the kernel over each grid cell instead.
    """
    if not block_average:
        grid = np.arange(1, n + 1) / n
        return pair_values(graphon, grid, grid)
    if isinstance(graphon, ConstantGraphon):
        return np.full((n, n), graphon.c)
    if isinstance(graphon, ProductGraphon):
        cells = np.arange(n + 1) / n
        g = np.array([graphon.profile.integral_on(cells[i], cells[i + 1]) for i in range(n)])
        return n * n * np.outer(g, g)
    if isinstance(graphon, StepGraphon):
        overlap = _interval_overlap(n, graphon.n) * n
        return overlap @ graphon.values @ overlap.T
    raise ValidationError(f"unsupported graphon type: {type(graphon).__name__}")


def _interval_overlap(n_fine, n_blocks):
    """Lengths |I_i^(fine) cap B_b| between two uniform partitions of [0,1]."""
    fine = np.arange(n_fine + 1) / n_fine
    coarse = np.arange(n_blocks + 1) / n_blocks
    lo = np.maximum(fine[:-1, None], coarse[None, :-1])
    hi = np.minimum(fine[1:, None], coarse[None, 1:])
    return np.clip(hi - lo, 0.0, None)


def _symmetric_from_rows(n, fill_row):
    """Assemble a symmetric zero-diagonal matrix from per-row upper-triangle draws."""
    out = np.zeros((n, n))
    for i in range(n - 1):
        row = fill_row(i, n - 1 - i)
        out[i, i + 1 :] = row
    return out + out.T


def sample_generalized_wigner(
    graphon, n, seed, entry_law="gaussian", mean=0.0, block_average=False
):
    """Symmetric matrix with independent entries of variance W(i/n, j/n).

    entry_law "gaussian" draws N(mean, sigma^2); "rademacher" draws
    mean +/- sigma with equal probability.  The diagonal is zero.
    """
    if entry_law not in ("gaussian", "rademacher"):
        raise ValidationError(f"unknown entry law: {entry_law!r}")
    sigma = np.sqrt(variance_matrix(graphon, n, block_average=block_average))

    def fill(i, count):
        rng = row_rng(seed, _WIGNER, i)
        scale = sigma[i, i + 1 :]
        if entry_law == "gaussian":
            return mean + scale * rng.standard_normal(count)
        return mean + scale * (2.0 * rng.integers(0, 2, size=count) - 1.0)

    return _symmetric_from_rows(n, fill)


def mean_matrix(n, mean):
    """Expected value of a constant-mean sampled matrix (zero diagonal)."""
    out = np.full((n, n), float(mean))
    np.fill_diagonal(out, 0.0)
    return out


def laplacian_of(a):
    """Off-diagonal copy of A with the diagonal forced so every row sums to zero.

    The input diagonal is ignored.
    """
    out = np.array(a, dtype=float, copy=True)
    np.fill_diagonal(out, 0.0)
    np.fill_diagonal(out, -out.sum(axis=1))
    return out


def center_scale(matrix, means, scale=None):
    """(M - means) / scale, defaulting to scale = sqrt(N)."""
    matrix = np.asarray(matrix, dtype=float)
    means = np.asarray(means, dtype=float)
    if matrix.shape != means.shape:
        raise ValidationError(f"shape mismatch: {matrix.shape} vs {means.shape}")
    if scale is None:
        scale = np.sqrt(matrix.shape[0])
    if not scale > 0:
        raise ValidationError("scale must be positive")
    return (matrix - means) / scale


def inhom_er_edge_probabilities(graphon, eps, n):
    p = eps * variance_matrix(graphon, n)
    np.fill_diagonal(p, 0.0)
    if p.max() > 1.0 + 1e-12:
        raise ValidationError(f"edge probability {p.max():.4f} exceeds 1")
    return np.clip(p, 0.0, 1.0)


def sample_inhom_er(graphon, eps, n, seed):
    """Inhomogeneous Erdos-Renyi adjacency: edge (i,j) present w.p. eps W(i/n, j/n)."""
    p = inhom_er_edge_probabilities(graphon, eps, n)

    def fill(i, count):
        rng = row_rng(seed, _INHOM_ER, i)
        return (rng.random(count) < p[i, i + 1 :]).astype(float)

    return _symmetric_from_rows(n, fill)


def sample_sparse_w_random(graphon, eps, n, seed):
    """Sparse W-random graph: uniform latents X_i, edges w.p. eps W(X_i, X_j).

    Returns (adjacency, latents).
    """
    if not 0 < eps < 1:
        raise ValidationError("eps must lie in (0,1)")
    latents = row_rng(seed, _LATENTS, 0).random(n)
    p = eps * pair_values(graphon, latents, latents)

    def fill(i, count):
        rng = row_rng(seed, _W_RANDOM, i)
        return (rng.random(count) < p[i, i + 1 :]).astype(float)

    return _symmetric_from_rows(n, fill), latents


def solve_constrained(kstar, tol=1e-10, max_iterations=10_000, damping=0.5):
    """Fit the maximum-entropy edge probabilities p_ij = x_i x_j / (1 + x_i x_j)
    whose expected degrees match kstar.

    Damped fixed point x_i <- k_i / sum_{j != i} x_j/(1 + x_i x_j), started
    from x_i = k_i / sqrt(sum k).  Soft feasibility only: no graphicality
    check beyond k_i <= N - 1.
    """
    k = np.asarray(kstar, dtype=float)
    n = k.size
    if np.any(k <= 0):
        raise ValidationError("target degrees must be positive")
    if np.any(k >= n):
        raise ValidationError("target degree k_i >= N is infeasible")
    x = k / np.sqrt(k.sum())
    residual = np.inf
    for _ in range(max_iterations):
        outer = np.outer(x, x)
        p = outer / (1.0 + outer)
        np.fill_diagonal(p, 0.0)
        rows = p.sum(axis=1)
        residual = float(np.max(np.abs(k - rows)))
        if residual < tol:
            return x, p
        x = (1.0 - damping) * x + damping * k * x / rows
    raise ConvergenceError(
        f"degree fit stalled at residual {residual:.3e} after {max_iterations} iterations",
        residual=residual,
    )


def constrained_epsilon(kstar):
    """Companion sparsity scale max(k)^2 / sum(k) for the fitted graph."""
    k = np.asarray(kstar, dtype=float)
    return float(k.max() ** 2 / k.sum())


def sample_constrained(p, seed):
    """Adjacency with independent Bernoulli(p_ij) edges from a fitted p matrix."""
    p = np.asarray(p, dtype=float)
    n = p.shape[0]

    def fill(i, count):
        rng = row_rng(seed, _CONSTRAINED, i)
        return (rng.random(count) < p[i, i + 1 :]).astype(float)

    return _symmetric_from_rows(n, fill)


def sample_decoupled_model(graphon, n, seed):
    """Gaussian off-diagonal part plus an independent Gaussian diagonal.

    Off-diagonal (i,j) is N(0, sigma^2_ij / n); diagonal (i,i) is
    Z_i sqrt(sum_{j != i} sigma^2_ij / n) with Z independent of the rest.
    The eigenvalue distribution of this matrix carries the Laplacian limit.
    """
    sigma2 = variance_matrix(graphon, n)
    np.fill_diagonal(sigma2, 0.0)
    sigma = np.sqrt(sigma2)

    def fill(i, count):
        rng = row_rng(seed, _DECOUPLED_OFFDIAG, i)
        return sigma[i, i + 1 :] * rng.standard_normal(count) / np.sqrt(n)

    out = _symmetric_from_rows(n, fill)
    z = row_rng(seed, _DECOUPLED_DIAG, 0).standard_normal(n)
    np.fill_diagonal(out, z * np.sqrt(sigma2.sum(axis=1) / n))
    return out


def sample_multiplicative_model(profile, n, seed):
    """Matrix model for separable kernels: R G R + alpha R^(1/2) U R^(1/2).

    R = diag(sqrt(n g_i)) with g_i the profile mass on cell i, G a
    GOE-type matrix with N(0, 1/n) entries, U an independent standard
    Gaussian diagonal, and alpha the square root of the profile's mass.
    """
    cells = np.arange(n + 1) / n
    g = np.array([profile.integral_on(cells[i], cells[i + 1]) for i in range(n)])
    if np.any(g < -1e-15):
        raise ValidationError("profile must be nonnegative")
    g = np.clip(g, 0.0, None)
    r = np.sqrt(n * g)
    alpha = np.sqrt(profile.power_integral(1))

    goe = np.zeros((n, n))
    for i in range(n):
        rng = row_rng(seed, _MULTIPLICATIVE_G, i)
        goe[i, i:] = rng.standard_normal(n - i) / np.sqrt(n)
    goe = goe + np.triu(goe, 1).T

    u = row_rng(seed, _MULTIPLICATIVE_U, 0).standard_normal(n)
    return r[:, None] * goe * r[None, :] + np.diag(alpha * r * u)


# ---------------------------------------------------------------------------
# matrix export

_HEADER = struct.Struct("<Q")


def write_matrix(path, matrix):
    """Binary dump: 8-byte little-endian dimension header, float64 row-major body."""
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(n))
        fh.write(matrix.astype("<f8").tobytes(order="C"))


def read_matrix(path):
    with open(path, "rb") as fh:
        (n,) = _HEADER.unpack(fh.read(_HEADER.size))
        body = np.frombuffer(fh.read(), dtype="<f8")
    if body.size != n * n:
        raise ValidationError(f"matrix file truncated: expected {n * n} values, got {body.size}")
    return body.reshape(n, n).copy()


def write_matrix_csv(path, matrix):
    np.savetxt(path, np.asarray(matrix, dtype=float), delimiter=",")
