"""Graphon kernels and the metrics and densities built on them.

A graphon here is a symmetric kernel W: [0,1]^2 -> [0,1] in one of three
forms: a constant, a separable product r(x)r(y) of a 1-d profile, or a
step function on an n x n grid of blocks.  Step blocks follow the
half-open convention I_j = [(j-1)/n, j/n), with the last interval closed.

The module provides pointwise evaluation, empirical (step) graphons built
from symmetric matrices, the L1 and cut distances, and homomorphism
densities of forests, which are the only densities the moment formulas
need.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import CapacityError, ValidationError

MIDPOINT_POINTS_1D = 1024
MIDPOINT_POINTS_2D = 256
CUT_NORM_EXACT_MAX_BLOCKS = 16
CUT_DISTANCE_EXHAUSTIVE_MAX_BLOCKS = 8
CUT_NORM_RESTARTS = 32


def _midpoints(n):
    return (np.arange(n) + 0.5) / n


class Profile:
    """1-d profile r: [0,1] -> [0,1] used by separable product kernels.

    Named variants ("sqrt", "identity", affine a+bx) integrate in closed
    form; sampled profiles interpolate linearly on a uniform mesh and
    integrate with a 1024-point midpoint rule.
    """

    def __init__(self, kind, a=0.0, b=0.0, values=None):
        self.kind = kind
        self.a = float(a)
        self.b = float(b)
        self.values = None
        if kind == "affine":
            lo, hi = min(a, a + b), max(a, a + b)
            if lo < -1e-12 or hi > 1 + 1e-12:
                raise ValidationError(f"affine profile leaves [0,1]: range [{lo}, {hi}]")
        elif kind == "sampled":
            vals = np.asarray(values, dtype=float)
            if vals.ndim != 1 or vals.size < 2:
                raise ValidationError("sampled profile needs a 1-d mesh with >= 2 points")
            if vals.min() < -1e-12 or vals.max() > 1 + 1e-12:
                raise ValidationError("sampled profile values must lie in [0,1]")
            self.values = vals
        elif kind not in ("sqrt", "identity"):
            raise ValidationError(f"unknown profile kind: {kind!r}")

    @classmethod
    def sqrt(cls):
        return cls("sqrt")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def affine(cls, a, b):
        return cls("affine", a=a, b=b)

    @classmethod
    def sampled(cls, values):
        return cls("sampled", values=values)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "sqrt":
            out = np.sqrt(x)
        elif self.kind == "identity":
            out = x.copy() if x.ndim else x
        elif self.kind == "affine":
            out = self.a + self.b * x
        else:
            mesh = np.linspace(0.0, 1.0, self.values.size)
            out = np.interp(x, mesh, self.values)
        return out if np.ndim(out) else float(out)

    def power_integral(self, d):
        """Integral of r(x)^d over [0,1] for a nonnegative integer d."""
        if d == 0:
            return 1.0
        if self.kind == "sqrt":
            return 1.0 / (d / 2.0 + 1.0)
        if self.kind == "identity":
            return 1.0 / (d + 1.0)
        if self.kind == "affine":
            if self.b == 0.0:
                return self.a**d
            hi = (self.a + self.b) ** (d + 1)
            lo = self.a ** (d + 1)
            return (hi - lo) / (self.b * (d + 1))
        xs = _midpoints(MIDPOINT_POINTS_1D)
        return float(np.mean(self.value(xs) ** d))

    def integral_on(self, lo, hi):
        """Integral of r over [lo, hi] within [0,1]."""
        if self.kind == "sqrt":
            return (2.0 / 3.0) * (hi**1.5 - lo**1.5)
        if self.kind == "identity":
            return (hi**2 - lo**2) / 2.0
        if self.kind == "affine":
            return self.a * (hi - lo) + self.b * (hi**2 - lo**2) / 2.0
        xs = lo + (hi - lo) * _midpoints(MIDPOINT_POINTS_1D)
        return float((hi - lo) * np.mean(self.value(xs)))

    def min_value(self):
        if self.kind == "sqrt" or self.kind == "identity":
            return 0.0
        if self.kind == "affine":
            return min(self.a, self.a + self.b)
        return float(self.values.min())

    def max_value(self):
        if self.kind == "sqrt" or self.kind == "identity":
            return 1.0
        if self.kind == "affine":
            return max(self.a, self.a + self.b)
        return float(self.values.max())

    def to_json(self):
        if self.kind == "affine":
            return {"kind": "affine", "a": self.a, "b": self.b}
        if self.kind == "sampled":
            return {"kind": "sampled", "values": self.values.tolist()}
        return self.kind

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            return cls(data)
        if not isinstance(data, dict) or "kind" not in data:
            raise ValidationError(f"bad profile spec: {data!r}")
        kind = data["kind"]
        if kind == "affine":
            return cls.affine(data["a"], data["b"])
        if kind == "sampled":
            return cls.sampled(data["values"])
        return cls(kind)


def _check_unit_square(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(x > 1) or np.any(y < 0) or np.any(y > 1):
        raise ValidationError("graphon coordinates must lie in [0,1]")
    return x, y


class Graphon:
    """Base class; concrete kernels implement value() on the unit square."""

    def value(self, x, y):
        raise NotImplementedError

    def min_value(self):
        raise NotImplementedError

    def max_value(self):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


class ConstantGraphon(Graphon):
    def __init__(self, c):
        c = float(c)
        if not 0.0 <= c <= 1.0:
            raise ValidationError(f"constant kernel value {c} outside [0,1]")
        self.c = c

    def value(self, x, y):
        x, y = _check_unit_square(x, y)
        out = np.broadcast_arrays(x, y)[0]
        out = np.full_like(np.asarray(out, dtype=float), self.c)
        return out if out.ndim else float(out)

    def min_value(self):
        return self.c

    def max_value(self):
        return self.c

    def to_json(self):
        return {"type": "constant", "value": self.c}

    def __repr__(self):
        return f"ConstantGraphon({self.c})"


class ProductGraphon(Graphon):
    """Separable kernel W(x,y) = r(x) r(y)."""

    def __init__(self, profile):
        self.profile = profile

    def value(self, x, y):
        x, y = _check_unit_square(x, y)
        out = np.asarray(self.profile.value(x)) * np.asarray(self.profile.value(y))
        return out if out.ndim else float(out)

    def min_value(self):
        return self.profile.min_value() ** 2

    def max_value(self):
        return self.profile.max_value() ** 2

    def to_json(self):
        return {"type": "product", "profile": self.profile.to_json()}

    def __repr__(self):
        return f"ProductGraphon({self.profile.to_json()!r})"


class StepGraphon(Graphon):
    """Step kernel constant on blocks I_i x I_j of an n x n grid."""

    def __init__(self, values):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValidationError("step kernel needs a square matrix")
        if np.max(np.abs(vals - vals.T)) > 1e-12:
            raise ValidationError("step kernel matrix must be symmetric")
        if vals.min() < -1e-12 or vals.max() > 1 + 1e-12:
            raise ValidationError("step kernel values must lie in [0,1]")
        self.values = np.clip((vals + vals.T) / 2.0, 0.0, 1.0)
        self.n = vals.shape[0]

    def block_index(self, x):
        # half-open blocks, last one closed at x = 1
        idx = np.minimum(np.floor(np.asarray(x, dtype=float) * self.n).astype(int), self.n - 1)
        return idx

    def value(self, x, y):
        x, y = _check_unit_square(x, y)
        out = self.values[self.block_index(x), self.block_index(y)]
        return out if np.ndim(out) else float(out)

    def min_value(self):
        return float(self.values.min())

    def max_value(self):
        return float(self.values.max())

    def to_json(self):
        return {"type": "step", "n": self.n, "values": self.values.tolist()}

    def __repr__(self):
        return f"StepGraphon(n={self.n})"


def graphon_from_json(data):
    if not isinstance(data, dict) or "type" not in data:
        raise ValidationError(f"bad graphon spec: {data!r}")
    kind = data["type"]
    if kind == "constant":
        return ConstantGraphon(data["value"])
    if kind == "product":
        return ProductGraphon(Profile.from_json(data["profile"]))
    if kind == "step":
        return StepGraphon(data["values"])
    raise ValidationError(f"unknown graphon type: {kind!r}")


def empirical_graphon(profile_matrix):
    """Step graphon carrying entry (i,j) of a symmetric matrix on block (i,j)."""
    return StepGraphon(profile_matrix)


def discretize_kernel(fn, n):
    """Step graphon sampling a symmetric kernel at block midpoints."""
    xs = _midpoints(n)
    vals = np.asarray(fn(xs[:, None], xs[None, :]), dtype=float)
    vals = (vals + vals.T) / 2.0
    return StepGraphon(vals)


def pair_values(graphon, xs, ys):
    """Matrix W(x_i, y_j) for coordinate vectors xs, ys."""
    xs, ys = _check_unit_square(xs, ys)
    if isinstance(graphon, ConstantGraphon):
        return np.full((xs.size, ys.size), graphon.c)
    if isinstance(graphon, ProductGraphon):
        return np.outer(graphon.profile.value(xs), graphon.profile.value(ys))
    if isinstance(graphon, StepGraphon):
        return graphon.values[np.ix_(graphon.block_index(xs), graphon.block_index(ys))]
    raise ValidationError(f"unsupported graphon type: {type(graphon).__name__}")


# ---------------------------------------------------------------------------
# distances


def _as_block_values(graphon):
    """(breakpoints, values) for piecewise-constant kernels, else None."""
    if isinstance(graphon, ConstantGraphon):
        return np.array([0.0, 1.0]), np.array([[graphon.c]])
    if isinstance(graphon, StepGraphon):
        return np.linspace(0.0, 1.0, graphon.n + 1), graphon.values
    return None


def l1_distance(w1, w2):
    """Integral of |W1 - W2| over the unit square.

    Exact for pairs of piecewise-constant kernels via the common block
    refinement; otherwise a 256x256 midpoint rule.
    """
    b1 = _as_block_values(w1)
    b2 = _as_block_values(w2)
    if b1 is not None and b2 is not None:
        cuts = np.union1d(b1[0], b2[0])
        widths = np.diff(cuts)
        mids = (cuts[:-1] + cuts[1:]) / 2.0
        i1 = np.minimum((mids * (b1[0].size - 1)).astype(int), b1[0].size - 2)
        i2 = np.minimum((mids * (b2[0].size - 1)).astype(int), b2[0].size - 2)
        diff = np.abs(b1[1][np.ix_(i1, i1)] - b2[1][np.ix_(i2, i2)])
        return float(widths @ diff @ widths)
    xs = _midpoints(MIDPOINT_POINTS_2D)
    diff = np.abs(pair_values(w1, xs, xs) - pair_values(w2, xs, xs))
    return float(diff.mean())


def _cut_value(kernel, s_mask, t_mask):
    n = kernel.shape[0]
    return abs(kernel[np.ix_(s_mask, t_mask)].sum()) / n**2


def _subset_matrix(n):
    masks = np.arange(2**n, dtype=np.uint32)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


def cut_norm_exact(kernel):
    """Exact cut norm of an n x n signed step kernel, n <= 16.

    The supremum over measurable S, T is attained on unions of blocks, so
    a sweep over the 2^n row subsets with the sign-optimal column subset
    for each equals the full 2^n x 2^n block enumeration.
    """
    kernel = np.asarray(kernel, dtype=float)
    n = kernel.shape[0]
    if n > CUT_NORM_EXACT_MAX_BLOCKS:
        raise CapacityError(f"exact cut norm limited to {CUT_NORM_EXACT_MAX_BLOCKS} blocks, got {n}")
    col_sums = _subset_matrix(n) @ kernel  # subset x column
    pos = np.clip(col_sums, 0.0, None).sum(axis=1)
    neg = np.clip(-col_sums, 0.0, None).sum(axis=1)
    return float(max(pos.max(), neg.max()) / n**2)


def cut_norm_heuristic(kernel, restarts=CUT_NORM_RESTARTS, seed=0):
    """Alternating maximization over block subsets; a lower bound on the exact value.

    Fixing S, the optimal T keeps the columns whose partial sums share a
    sign; the roles then alternate until the objective stops improving.
    """
    kernel = np.asarray(kernel, dtype=float)
    n = kernel.shape[0]
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        s = rng.random(n) < 0.5
        value = -1.0
        for _ in range(4 * n + 8):
            cols = kernel[s].sum(axis=0)
            t_pos, t_neg = cols > 0, cols < 0
            t = t_pos if cols[t_pos].sum() >= -cols[t_neg].sum() else t_neg
            rows = kernel[:, t].sum(axis=1)
            r_pos, r_neg = rows > 0, rows < 0
            s = r_pos if rows[r_pos].sum() >= -rows[r_neg].sum() else r_neg
            new = abs(kernel[np.ix_(s, t)].sum())
            if new <= value + 1e-15:
                value = max(value, new)
                break
            value = new
        best = max(best, value)
    return float(best / n**2)


def cut_norm(kernel, mode="exact", restarts=CUT_NORM_RESTARTS, seed=0):
    if mode == "exact":
        return cut_norm_exact(kernel)
    if mode == "heuristic":
        return cut_norm_heuristic(kernel, restarts=restarts, seed=seed)
    raise ValidationError(f"unknown cut norm mode: {mode!r}")


def cut_distance_matrix(w1, w2):
    """Block value matrices of two step graphons with equal block counts."""
    if not isinstance(w1, StepGraphon) or not isinstance(w2, StepGraphon):
        raise ValidationError("cut distance needs two step graphons")
    if w1.n != w2.n:
        raise ValidationError(f"block counts differ: {w1.n} vs {w2.n}")
    return w1.values, w2.values


def _perm_cut_norms(v1, v2, perms):
    """Exact cut norms of v1 - v2[perm][:, perm] for a batch of permutations."""
    n = v1.shape[0]
    subsets = _subset_matrix(n)
    perms = np.asarray(perms)
    out = np.empty(len(perms))
    chunk = max(1, 2_000_000 // (2**n * n))
    for start in range(0, len(perms), chunk):
        p = perms[start : start + chunk]
        kernels = v1[None, :, :] - v2[p[:, :, None], p[:, None, :]]
        col_sums = np.einsum("si,pij->psj", subsets, kernels)
        pos = np.clip(col_sums, 0.0, None).sum(axis=2).max(axis=1)
        neg = np.clip(-col_sums, 0.0, None).sum(axis=2).max(axis=1)
        out[start : start + len(p)] = np.maximum(pos, neg)
    return out / n**2


def cut_distance_step(w1, w2):
    """Cut distance between equal-size step graphons, minimized over block
    permutations.

    Exhaustive over all permutations for n <= 8; beyond that a greedy
    row-sum matching plus local pair-swap descent, which only upper-bounds
    the true distance.
    """
    v1, v2 = cut_distance_matrix(w1, w2)
    n = v1.shape[0]
    if n <= CUT_DISTANCE_EXHAUSTIVE_MAX_BLOCKS:
        perms = np.array(list(permutations(range(n))))
        return float(_perm_cut_norms(v1, v2, perms).min())

    def norm_for(perm):
        kernel = v1 - v2[np.ix_(perm, perm)]
        if n <= CUT_NORM_EXACT_MAX_BLOCKS:
            return cut_norm_exact(kernel)
        return cut_norm_heuristic(kernel)

    greedy = np.argsort(v2.sum(axis=1))[np.argsort(np.argsort(v1.sum(axis=1)))]
    best_perm, best = list(greedy), norm_for(list(greedy))
    improved = True
    while improved:
        improved = False
        for i in range(n):
            for j in range(i + 1, n):
                cand = list(best_perm)
                cand[i], cand[j] = cand[j], cand[i]
                val = norm_for(cand)
                if val < best - 1e-15:
                    best, best_perm, improved = val, cand, True
    return float(best)


# ---------------------------------------------------------------------------
# simple graphs and homomorphism densities


@dataclass(frozen=True)
class SimpleGraph:
    """Loop-free graph given by a vertex count and sorted edge pairs."""

    n: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < self.n):
                raise ValidationError(f"bad edge {e} on {self.n} vertices")
            if e in seen:
                raise ValidationError(f"duplicate edge {e}")
            seen.add(e)

    @classmethod
    def from_edges(cls, n, edges):
        return cls(n, tuple(sorted(tuple(sorted(e)) for e in edges)))

    @classmethod
    def single_edge(cls):
        return cls(2, ((0, 1),))

    @classmethod
    def path(cls, num_vertices):
        return cls(num_vertices, tuple((i, i + 1) for i in range(num_vertices - 1)))

    @classmethod
    def star(cls, leaves):
        return cls(leaves + 1, tuple((0, i + 1) for i in range(leaves)))

    def degrees(self):
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_forest(self):
        parent = list(range(self.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def adjacency_lists(self):
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


def _step_density_forest(graph, step):
    """Leaf-to-root message passing over each tree component, O(|V| n^2)."""
    n = step.n
    vals = step.values
    adj = graph.adjacency_lists()
    seen = [False] * graph.n
    total = 1.0
    for root in range(graph.n):
        if seen[root]:
            continue
        order = [root]
        parent = {root: -1}
        seen[root] = True
        for v in order:
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    order.append(w)
        messages = {v: np.ones(n) for v in order}
        for v in reversed(order):
            if parent[v] != -1:
                messages[parent[v]] *= (vals @ messages[v]) / n
        total *= float(np.mean(messages[root]))
    return total


def hom_density(graph, graphon):
    """Homomorphism density t(F, W) for a forest F.

    Constant kernels give c^|E|; product kernels factor over vertex
    degrees; step kernels use exact dynamic programming on each tree.
    """
    if not graph.is_forest():
        raise ValidationError("homomorphism density supports forests only")
    if isinstance(graphon, ConstantGraphon):
        return graphon.c ** len(graph.edges)
    if isinstance(graphon, ProductGraphon):
        out = 1.0
        for d in graph.degrees():
            out *= graphon.profile.power_integral(d)
        return out
    if isinstance(graphon, StepGraphon):
        return _step_density_forest(graph, graphon)
    raise ValidationError(f"unsupported graphon type: {type(graphon).__name__}")
