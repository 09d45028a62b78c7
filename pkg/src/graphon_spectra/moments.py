"""Closed-form limiting spectral moments.

Adjacency moments sum forest densities over all rooted planar trees of
the right size.  Laplacian moments expand the trace of (offdiagonal +
diagonal)^L word by word: each word with an even A-count selects the
planar trees on half that many edges, decorates them with the word's
Y-weights, and contributes the decorated tree's density times its
Gaussian weight.  The diagonal part alone contributes Gaussian moments
times star densities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ValidationError
from .graphons import SimpleGraph, hom_density
from .trees import (
    decorate_tree,
    enumerate_trees,
    enumerate_words,
    gaussian_moment,
    gaussian_weight,
)

MAX_ADJACENCY_ORDER = 20
MAX_LAPLACIAN_ORDER = 12
MAX_DIAGONAL_ORDER = 20

SOURCES = ("adjacency", "laplacian", "diagonal", "empirical", "freeconv")
SOURCE_ALIASES = {"yn": "diagonal"}


@dataclass
class MomentReport:
    """Moment table keyed by order, with provenance."""

    entries: dict
    source: str
    graphon: dict | None = None
    metadata: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "source": self.source,
            "graphon": self.graphon,
            "moments": {str(k): v for k, v in sorted(self.entries.items())},
            "metadata": self.metadata,
        }

    def to_json_str(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def adjacency_moment(order, graphon):
    """Moment of the adjacency limit: sum of tree densities, 0 for odd orders."""
    if order % 2 == 1:
        return 0.0
    if order > MAX_ADJACENCY_ORDER:
        raise CapacityError(f"adjacency moments limited to order {MAX_ADJACENCY_ORDER}")
    k = order // 2
    terms = [hom_density(tree.as_graph(), graphon) for tree in enumerate_trees(k)]
    return float(np.sum(terms)) if terms else 0.0


def laplacian_moment(order, graphon):
    """Moment of the Laplacian limit via the word-by-word trace expansion."""
    if order % 2 == 1:
        return 0.0
    if order > MAX_LAPLACIAN_ORDER:
        raise CapacityError(f"laplacian moments limited to order {MAX_LAPLACIAN_ORDER}")
    density_cache = {}
    terms = []
    for word in enumerate_words(order):
        if word.a_count % 2 == 1:
            continue
        for tree in enumerate_trees(word.a_count // 2):
            decorated = decorate_tree(tree, word)
            if not decorated.valid:
                continue
            key = (tree.dyck, decorated.leaf_counts)
            density = density_cache.get(key)
            if density is None:
                density = hom_density(decorated.as_graph(), graphon)
                density_cache[key] = density
            terms.append(density * gaussian_weight(decorated))
    return float(np.sum(terms)) if terms else 0.0


def diagonal_moment(order, graphon):
    """Moment of the diagonal (row-sum) part: gaussian moment times a star density."""
    if order % 2 == 1:
        return 0.0
    if order > MAX_DIAGONAL_ORDER:
        raise CapacityError(f"diagonal moments limited to order {MAX_DIAGONAL_ORDER}")
    if order == 0:
        return 1.0
    star = SimpleGraph.star(order // 2)
    return float(gaussian_moment(order)) * hom_density(star, graphon)


_MOMENT_FUNCTIONS = {
    "adjacency": adjacency_moment,
    "laplacian": laplacian_moment,
    "diagonal": diagonal_moment,
}


def canonical_source(source):
    source = SOURCE_ALIASES.get(source, source)
    if source not in SOURCES:
        raise ValidationError(f"unknown moment source: {source!r}")
    return source


def moment_table(orders, graphon, source):
    """MomentReport for the requested orders and theoretical source."""
    source = canonical_source(source)
    fn = _MOMENT_FUNCTIONS.get(source)
    if fn is None:
        raise ValidationError(f"source {source!r} has no closed-form moments")
    entries = {int(order): fn(int(order), graphon) for order in orders}
    return MomentReport(entries=entries, source=source, graphon=graphon.to_json())
