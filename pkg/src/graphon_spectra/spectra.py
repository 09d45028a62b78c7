"""Eigenvalue statistics of sampled matrices.

Covers the dense symmetric eigensolve, empirical spectral moments,
spectral norms, distances between empirical distribution functions, the
norm-scaling scans, and deterministic histograms for figure exports.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .ensembles import derive_seed, laplacian_of, mean_matrix, sample_generalized_wigner
from .errors import ValidationError
from .moments import MomentReport

ASYMMETRY_TOLERANCE = 1e-12
LEVY_TOLERANCE = 1e-9


def eigenvalues_sym(matrix):
    """All eigenvalues of a symmetric matrix, ascending."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError("eigensolver needs a square matrix")
    if np.max(np.abs(matrix - matrix.T)) > ASYMMETRY_TOLERANCE:
        raise ValidationError("matrix is not symmetric to 1e-12")
    return np.linalg.eigvalsh(matrix)


@dataclass
class SpectralSample:
    """Sorted spectrum of one sampled matrix plus its provenance."""

    eigenvalues: np.ndarray
    n: int
    scale_applied: float = 1.0
    ensemble: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @classmethod
    def from_matrix(cls, matrix, ensemble=None, scale_applied=1.0):
        start = time.perf_counter()
        eigs = eigenvalues_sym(matrix)
        elapsed = time.perf_counter() - start
        return cls(
            eigenvalues=eigs,
            n=eigs.size,
            scale_applied=float(scale_applied),
            ensemble=dict(ensemble or {}),
            wall_time=elapsed,
        )

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(f"# n={self.n} scale={self.scale_applied} ensemble={self.ensemble}\n")
            fh.write("eigenvalue\n")
            for value in self.eigenvalues:
                fh.write(f"{float(value)!r}\n")


def esd_moments(sample, orders):
    """Empirical moments (1/N) sum lambda_i^k of a spectral sample."""
    entries = {int(k): float(np.mean(sample.eigenvalues ** int(k))) for k in orders}
    metadata = dict(sample.ensemble)
    metadata["n"] = sample.n
    return MomentReport(entries=entries, source="empirical", metadata=metadata)


def spectral_norm(sample):
    eigs = sample.eigenvalues
    return float(max(abs(eigs[0]), abs(eigs[-1])))


# ---------------------------------------------------------------------------
# distances between empirical distribution functions


def _cdf_right(sorted_values, x):
    return np.searchsorted(sorted_values, x, side="right") / sorted_values.size


def _cdf_left(sorted_values, x):
    return np.searchsorted(sorted_values, x, side="left") / sorted_values.size


def ks_distance(sample_a, sample_b):
    """Two-sample Kolmogorov-Smirnov distance sup |F - G|."""
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValidationError("empty sample")
    points = np.concatenate([a, b])
    gaps = np.abs(_cdf_right(a, points) - _cdf_right(b, points))
    gaps_left = np.abs(_cdf_left(a, points) - _cdf_left(b, points))
    return float(max(gaps.max(), gaps_left.max()))


def ks_distance_to_cdf(sample, cdf_xs, cdf_values):
    """KS distance between an empirical CDF and a tabulated reference CDF."""
    a = np.sort(np.asarray(sample, dtype=float))
    ref = np.interp(a, cdf_xs, cdf_values, left=0.0, right=float(cdf_values[-1]))
    upper = np.arange(1, a.size + 1) / a.size
    lower = np.arange(0, a.size) / a.size
    return float(max(np.max(np.abs(upper - ref)), np.max(np.abs(lower - ref))))


def _one_sided_gap(a, b, eps):
    """sup_x A(x) - B(x + eps) for step CDFs A, B."""
    gap_at_jumps = np.max(_cdf_right(a, a) - _cdf_right(b, a + eps))
    # just below a down-jump of x -> B(x + eps), i.e. x -> (b_j - eps)^-
    gap_at_drops = np.max(_cdf_left(a, b - eps) - _cdf_left(b, b))
    return max(float(gap_at_jumps), float(gap_at_drops))


def levy_distance(sample_a, sample_b, tol=LEVY_TOLERANCE):
    """Exact 1-d Levy distance between two empirical CDFs, by bisection.

    eps is feasible when F(x - eps) - eps <= G(x) <= F(x + eps) + eps for
    all x; for step CDFs the binding points are the jump locations.
    """
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValidationError("empty sample")

    def feasible(eps):
        return (
            _one_sided_gap(a, b, eps) <= eps + 1e-15
            and _one_sided_gap(b, a, eps) <= eps + 1e-15
        )

    lo, hi = 0.0, 1.0
    if feasible(lo):
        return 0.0
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return float(hi)


# ---------------------------------------------------------------------------
# scaling experiments


@dataclass
class NormScanResult:
    """Per-trial spectral norms of unscaled centered Laplacians.

    rows hold (n, trial, norm, ratio) with ratio = norm / sqrt(2 n log n);
    summary maps n to (median, q25, q75) of the ratios; bracket is the
    [sqrt(min variance), sqrt(2 max variance)] band from the profile.
    """

    rows: list
    summary: dict
    bracket: tuple

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("n,trial,norm,ratio\n")
            for n, trial, norm, ratio in self.rows:
                fh.write(f"{n},{trial},{norm!r},{ratio!r}\n")


def norm_scan(graphon, ns, trials, seed, entry_law="gaussian"):
    """Sample mean-zero ensembles and record ||Laplacian|| / sqrt(2 n log n)."""
    rows = []
    summary = {}
    for n in ns:
        ratios = []
        for trial in range(trials):
            child = derive_seed(seed, n, trial)
            a = sample_generalized_wigner(graphon, n, child, entry_law=entry_law)
            delta = laplacian_of(a)
            norm = float(np.max(np.abs(eigenvalues_sym(delta))))
            ratio = norm / np.sqrt(2.0 * n * np.log(n))
            rows.append((n, trial, norm, ratio))
            ratios.append(ratio)
        summary[n] = (
            float(np.median(ratios)),
            float(np.quantile(ratios, 0.25)),
            float(np.quantile(ratios, 0.75)),
        )
    bracket = (np.sqrt(graphon.min_value()), np.sqrt(2.0 * graphon.max_value()))
    return NormScanResult(rows=rows, summary=summary, bracket=bracket)


def mean_norm_scan(graphon, mean, ns, trials, seed, entry_law="gaussian"):
    """Norms of uncentered Laplacians against the ||E Laplacian|| / n limit.

    Returns (rows, m) with rows of (n, trial, norm / n) and m the value of
    ||E Laplacian|| / n at the largest n scanned.
    """
    if mean == 0.0:
        raise ValidationError("mean_norm_scan needs a nonzero mean profile")
    rows = []
    for n in ns:
        for trial in range(trials):
            child = derive_seed(seed, n, trial)
            a = sample_generalized_wigner(graphon, n, child, entry_law=entry_law, mean=mean)
            delta = laplacian_of(a)
            norm = float(np.max(np.abs(eigenvalues_sym(delta))))
            rows.append((n, trial, norm / n))
    largest = max(ns)
    expected = laplacian_of(mean_matrix(largest, mean))
    m = float(np.max(np.abs(eigenvalues_sym(expected)))) / largest
    return rows, m


def histogram(sample, bins, value_range=None):
    """Deterministic histogram of a spectral sample; right-open bins, last closed."""
    if bins < 1:
        raise ValidationError("need at least one bin")
    eigs = sample.eigenvalues
    if value_range is None:
        value_range = (float(eigs[0]), float(eigs[-1]))
    lo, hi = value_range
    if not lo < hi:
        raise ValidationError(f"invalid histogram range: [{lo}, {hi}]")
    counts, edges = np.histogram(eigs, bins=bins, range=(lo, hi))
    return edges, counts


def write_histogram_csv(path, edges, counts):
    with open(path, "w") as fh:
        fh.write("bin_left,bin_right,count\n")
        for i, count in enumerate(counts):
            fh.write(f"{float(edges[i])!r},{float(edges[i + 1])!r},{int(count)}\n")
