"""Free additive convolution of the semicircle and standard normal laws.

Convention: G(z) = integral of dmu(t)/(z - t), so Im G < 0 on the upper
half-plane and the density is recovered as -Im G(x + i eta)/pi.  Adding a
free standard semicircle shifts the argument of the Gaussian transform by
the unknown itself, so G solves G = G_gauss(z - G); a damped fixed-point
iteration finds it.

Also hosts the non-crossing-partition moment/cumulant transforms used as
the combinatorial cross-check on the moment formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import wofz

from .errors import CapacityError, ConvergenceError, ValidationError
from .trees import gaussian_moment

DEFAULT_ETA = 1e-2
ETA_MIN, ETA_MAX = 1e-4, 1e-1
DEFAULT_DAMPING = 0.5
DEFAULT_TOL = 1e-12
MAX_FIXED_POINT_ITERATIONS = 10_000
MAX_NC_ORDER = 16


def gaussian_stieltjes(z):
    """Stieltjes transform of the standard normal law, Im z > 0.

    Evaluated through the Faddeeva function: G(z) = -i sqrt(pi/2) w(z/sqrt 2),
    accurate to near machine precision.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValidationError("gaussian_stieltjes needs Im z > 0")
    out = -1j * np.sqrt(np.pi / 2.0) * wofz(z / np.sqrt(2.0))
    return out if out.ndim else complex(out)


def free_convolution_stieltjes(
    z,
    damping=DEFAULT_DAMPING,
    tol=DEFAULT_TOL,
    max_iterations=MAX_FIXED_POINT_ITERATIONS,
):
    """Stieltjes transform of the free sum of semicircle and standard normal.

    Damped iteration G <- (1-d) G + d G_gauss(z - G) from G = 1/z; the
    result is certified by the fixed-point residual.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValidationError("free_convolution_stieltjes needs Im z > 0")
    g = 1.0 / z
    for _ in range(max_iterations):
        g_new = (1.0 - damping) * g + damping * gaussian_stieltjes(z - g)
        delta = np.max(np.abs(g_new - g))
        g = g_new
        if delta < tol:
            break
    residual = np.max(np.abs(g - gaussian_stieltjes(z - g)))
    if residual > 100 * tol:
        raise ConvergenceError(
            f"subordination fixed point stalled at residual {residual:.3e}",
            residual=float(residual),
        )
    return g if g.ndim else complex(g)


@dataclass
class StieltjesGrid:
    """Transform values G(x + i eta) along a real grid."""

    xs: np.ndarray
    eta: float
    values: np.ndarray

    def write_csv(self, path):
        header = "x,re_g,im_g"
        data = np.column_stack([self.xs, self.values.real, self.values.imag])
        np.savetxt(path, data, delimiter=",", header=header, comments="")


@dataclass
class DensityCurve:
    """Density samples on a real grid, with the smoothing eta that produced them."""

    xs: np.ndarray
    density: np.ndarray
    eta: float

    def mass(self):
        return float(trapezoid(self.density, self.xs))

    def moment(self, order):
        return float(trapezoid(self.density * self.xs**order, self.xs))

    def cdf(self):
        """Cumulative distribution on the grid (trapezoid)."""
        steps = np.diff(self.xs) * (self.density[:-1] + self.density[1:]) / 2.0
        return np.concatenate([[0.0], np.cumsum(steps)])

    def write_csv(self, path):
        data = np.column_stack([self.xs, self.density])
        np.savetxt(path, data, delimiter=",", header="x,density", comments="")


def default_grid(lo=-8.0, hi=8.0, points=1601):
    return np.linspace(lo, hi, points)


def stieltjes_grid(xs, eta=DEFAULT_ETA, **kwargs):
    xs = np.asarray(xs, dtype=float)
    values = free_convolution_stieltjes(xs + 1j * eta, **kwargs)
    return StieltjesGrid(xs=xs, eta=eta, values=values)


def free_convolution_density(xs=None, eta=DEFAULT_ETA, extrapolate=True, **kwargs):
    """Density of the convolved law on a grid.

    The raw value at height eta is -Im G(x + i eta)/pi; by default the
    eta-linear smoothing error is removed by extrapolating from heights
    eta and 2 eta, which also restores the slowly-decaying moment tails.
    """
    if xs is None:
        xs = default_grid()
    xs = np.asarray(xs, dtype=float)
    if not ETA_MIN <= eta <= ETA_MAX:
        raise ValidationError(f"eta must lie in [{ETA_MIN}, {ETA_MAX}], got {eta}")
    if extrapolate and 2 * eta > ETA_MAX:
        raise ValidationError(f"extrapolation needs 2*eta <= {ETA_MAX}")
    dens = -free_convolution_stieltjes(xs + 1j * eta, **kwargs).imag / np.pi
    if extrapolate:
        coarse = -free_convolution_stieltjes(xs + 2j * eta, **kwargs).imag / np.pi
        dens = 2.0 * dens - coarse
    return DensityCurve(xs=xs, density=dens, eta=eta)


# ---------------------------------------------------------------------------
# non-crossing partition transforms


def _block_convolutions(values, parts, total):
    """h[s][t] = sum over s-tuples of nonneg indices summing to t of prod values."""
    h = [np.zeros(total + 1) for _ in range(parts + 1)]
    h[0][0] = 1.0
    for s in range(1, parts + 1):
        for t in range(total + 1):
            h[s][t] = sum(h[s - 1][t - i] * values[i] for i in range(t + 1))
    return h


def moments_from_free_cumulants(kappa, order):
    """Moment of the law with free cumulants kappa (kappa[i] = order i+1).

    Sums over non-crossing partitions by peeling the block containing the
    first element: a block of size s splits the rest into s independent
    non-crossing gaps.
    """
    if order > MAX_NC_ORDER:
        raise CapacityError(f"non-crossing transform limited to order {MAX_NC_ORDER}")
    kappa = list(kappa) + [0.0] * max(0, order - len(kappa))
    m = [1.0] + [0.0] * order
    for n in range(1, order + 1):
        h = _block_convolutions(m, n, n)
        m[n] = sum(kappa[s - 1] * h[s][n - s] for s in range(1, n + 1))
    return m[order]


def free_cumulants_from_moments(moments):
    """Invert the non-crossing moment formula; moments[i] is order i+1."""
    order = len(moments)
    if order > MAX_NC_ORDER:
        raise CapacityError(f"non-crossing transform limited to order {MAX_NC_ORDER}")
    m = [1.0] + [float(x) for x in moments]
    kappa = []
    for n in range(1, order + 1):
        h = _block_convolutions(m, n, n)
        lower = sum(kappa[s - 1] * h[s][n - s] for s in range(1, n))
        kappa.append(m[n] - lower)
    return kappa


def gaussian_free_cumulants(order):
    """Free cumulants of the standard normal law, derived from its moments."""
    moments = [float(gaussian_moment(t)) for t in range(1, order + 1)]
    return free_cumulants_from_moments(moments)


def convolved_free_cumulants(order):
    """Free cumulants of the convolved law: cumulants add under free convolution."""
    kappa = gaussian_free_cumulants(order)
    if order >= 2:
        kappa[1] += 1.0  # the standard semicircle contributes only kappa_2 = 1
    return kappa
