"""Rooted planar trees, two-letter trace words, and leaf decorations.

Rooted planar trees on k+1 vertices are encoded by balanced Dyck words of
length 2k and carry the closed depth-first walk that visits every edge
twice.  Trace words over the alphabet {A, Y} index the terms of the
binomial expansion of (offdiagonal + diagonal)^L; attaching half of the
Y-weight collected at each walk position to the corresponding tree vertex
yields the decorated tree whose forest density and Gaussian weight enter
the Laplacian moment formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import CapacityError, ValidationError
from .graphons import SimpleGraph

MAX_TREE_EDGES = 12
MAX_WORD_LENGTH = 20
MAX_GAUSSIAN_ORDER = 40


@dataclass(frozen=True)
class RootedPlanarTree:
    """Ordered rooted tree with k edges, vertices labelled in DFS preorder."""

    k: int
    dyck: str
    parent: tuple
    children: tuple
    dfs_walk: tuple

    @property
    def vertex_count(self):
        return self.k + 1

    @classmethod
    def from_dyck(cls, dyck):
        k2 = len(dyck)
        if k2 % 2 != 0:
            raise ValidationError(f"Dyck word has odd length: {dyck!r}")
        k = k2 // 2
        parent = [-1]
        children = [[]]
        walk = [0]
        current = 0
        next_label = 1
        depth = 0
        for ch in dyck:
            if ch == "(":
                parent.append(current)
                children.append([])
                children[current].append(next_label)
                current = next_label
                next_label += 1
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth < 0:
                    raise ValidationError(f"unbalanced Dyck word: {dyck!r}")
                current = parent[current]
            else:
                raise ValidationError(f"Dyck word must use '(' and ')': {dyck!r}")
            walk.append(current)
        if depth != 0:
            raise ValidationError(f"unbalanced Dyck word: {dyck!r}")
        return cls(
            k=k,
            dyck=dyck,
            parent=tuple(parent),
            children=tuple(tuple(c) for c in children),
            dfs_walk=tuple(walk),
        )

    def as_graph(self):
        return SimpleGraph.from_edges(
            self.k + 1, [(self.parent[v], v) for v in range(1, self.k + 1)]
        )


def _dyck_words(k):
    # lexicographic with '(' < ')'
    out = []

    def rec(prefix, opened, closed):
        if opened == k and closed == k:
            out.append("".join(prefix))
            return
        if opened < k:
            prefix.append("(")
            rec(prefix, opened + 1, closed)
            prefix.pop()
        if closed < opened:
            prefix.append(")")
            rec(prefix, opened, closed + 1)
            prefix.pop()

    rec([], 0, 0)
    return out


@lru_cache(maxsize=None)
def enumerate_trees(k):
    """All rooted planar trees with k edges, in lexicographic Dyck order."""
    if k < 0:
        raise ValidationError("edge count must be nonnegative")
    if k > MAX_TREE_EDGES:
        raise CapacityError(f"tree enumeration limited to {MAX_TREE_EDGES} edges, got {k}")
    return tuple(RootedPlanarTree.from_dyck(w) for w in _dyck_words(k))


@dataclass(frozen=True)
class TraceWord:
    """Word over {A, Y}: one term of the expansion of (A + Y)^L.

    runs holds the canonical run-length pairs (m_1, n_1), (m_2, n_2), ...
    with a possibly-zero leading A-run; a_count is the total number of
    A letters.
    """

    word: str
    runs: tuple
    a_count: int
    y_count: int

    @classmethod
    def from_word(cls, word):
        if any(ch not in "AY" for ch in word):
            raise ValidationError(f"trace word must use letters A and Y: {word!r}")
        runs = []
        i = 0
        length = len(word)
        while i < length:
            m = 0
            while i < length and word[i] == "A":
                m += 1
                i += 1
            n = 0
            while i < length and word[i] == "Y":
                n += 1
                i += 1
            runs.append((m, n))
        a_count = sum(m for m, _ in runs)
        return cls(word=word, runs=tuple(runs), a_count=a_count, y_count=length - a_count)

    def reconstruct(self):
        return "".join("A" * m + "Y" * n for m, n in self.runs)


def enumerate_words(length):
    """All 2^length words over {A, Y}; length must be even and modest."""
    if length % 2 != 0:
        raise ValidationError(f"word length must be even, got {length}")
    if length > MAX_WORD_LENGTH:
        raise ValidationError(f"word enumeration limited to length {MAX_WORD_LENGTH}, got {length}")
    return tuple(TraceWord.from_word("".join(p)) for p in product("AY", repeat=length))


@lru_cache(maxsize=None)
def gaussian_moment(t):
    """t-th moment of a standard normal: 0 for odd t, (t-1)!! for even t."""
    if t < 0:
        raise ValidationError("moment order must be nonnegative")
    if t > MAX_GAUSSIAN_ORDER:
        raise CapacityError(f"gaussian moments limited to order {MAX_GAUSSIAN_ORDER}, got {t}")
    if t % 2 == 1:
        return 0
    out = 1
    for odd in range(1, t, 2):
        out *= odd
    return out


@dataclass(frozen=True)
class DecoratedTree:
    """A rooted planar tree with extra leaves hung on its vertices.

    leaf_counts[v] is the number of leaves attached at vertex v.  valid is
    False when the Y-weight accumulated at some vertex was odd, in which
    case the decoration contributes nothing.
    """

    base: RootedPlanarTree
    leaf_counts: tuple
    valid: bool

    @property
    def vertex_count(self):
        return self.base.vertex_count + sum(self.leaf_counts)

    def as_graph(self):
        edges = [(self.base.parent[v], v) for v in range(1, self.base.k + 1)]
        nxt = self.base.vertex_count
        for v, count in enumerate(self.leaf_counts):
            for _ in range(count):
                edges.append((v, nxt))
                nxt += 1
        return SimpleGraph.from_edges(nxt, edges)


def decorate_tree(tree, word):
    """Attach the word's Y-weights to the tree along its depth-first walk.

    The j-th run (m_j, n_j) drops weight n_j at walk position 1 + sum of
    the m's so far (the position one past the last A-step, with position
    m+1 wrapping to the root).  A vertex whose accumulated weight is odd
    invalidates the decoration; otherwise each vertex receives half its
    accumulated weight in new leaves.
    """
    if word.a_count != 2 * tree.k:
        raise ValidationError(
            f"word has {word.a_count} A-letters but the tree needs {2 * tree.k}"
        )
    accumulated = [0] * tree.vertex_count
    walk = tree.dfs_walk
    position = 0  # walk index of 1 + sum m_p, 0-based; wraps since the walk is closed
    for m, n in word.runs:
        position += m
        accumulated[walk[position]] += n
    if any(a % 2 for a in accumulated):
        return DecoratedTree(base=tree, leaf_counts=tuple(0 for _ in accumulated), valid=False)
    return DecoratedTree(base=tree, leaf_counts=tuple(a // 2 for a in accumulated), valid=True)


def gaussian_weight(decorated):
    """Product of Gaussian moments m_{2 leaf_count} over base vertices; 0 if invalid."""
    if not decorated.valid:
        return 0.0
    out = 1
    for count in decorated.leaf_counts:
        out *= gaussian_moment(2 * count)
    return float(out)


def catalan(k):
    """Catalan numbers by the convolution recurrence."""
    vals = [1]
    for n in range(k):
        vals.append(sum(vals[i] * vals[n - i] for i in range(n + 1)))
    return vals[k]
