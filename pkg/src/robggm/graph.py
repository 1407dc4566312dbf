"""Undirected graphs encoding the zero pattern of a concentration matrix."""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DimensionMismatch, InputError, NonBinaryEntry, NotSymmetric


def _normalize_edge(i, j, p):
    i, j = int(i), int(j)
    if i == j:
        raise InputError(f"self-loop at vertex {i}")
    if not (0 <= i < p and 0 <= j < p):
        raise InputError(f"edge ({i}, {j}) out of range for {p} vertices")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0, ..., p-1``.

    Edges are stored as sorted ``(i, j)`` tuples with ``i < j``. Labels default
    to ``V1, ..., Vp``.
    """

    p: int
    edges: frozenset = frozenset()
    labels: tuple = field(default=None)

    def __post_init__(self):
        if int(self.p) < 1:
            raise InputError("a graph needs at least one vertex")
        object.__setattr__(self, "p", int(self.p))
        edges = frozenset(_normalize_edge(i, j, self.p) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        labels = self.labels
        if labels is None:
            labels = tuple(f"V{k + 1}" for k in range(self.p))
        labels = tuple(str(s) for s in labels)
        if len(labels) != self.p:
            raise DimensionMismatch(f"{len(labels)} labels for {self.p} vertices")
        if len(set(labels)) != self.p:
            raise InputError("vertex labels must be unique")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def full(cls, p, labels=None):
        return cls(p, frozenset(combinations(range(p), 2)), labels)

    @classmethod
    def empty(cls, p, labels=None):
        return cls(p, frozenset(), labels)

    @property
    def missing_edges(self):
        """Sorted list of vertex pairs that are not edges."""
        return [e for e in combinations(range(self.p), 2) if e not in self.edges]

    def sorted_edges(self):
        return sorted(self.edges)

    def has_edge(self, i, j):
        return _normalize_edge(i, j, self.p) in self.edges

    def neighbors(self, i):
        return sorted(j for e in self.edges if i in e for j in e if j != i)

    def is_full(self):
        return len(self.edges) == self.p * (self.p - 1) // 2

    def remove_edge(self, i, j):
        e = _normalize_edge(i, j, self.p)
        if e not in self.edges:
            raise InputError(f"{e} is not an edge")
        return Graph(self.p, self.edges - {e}, self.labels)

    def permuted(self, perm):
        """Graph with vertex ``k`` relabelled as ``perm[k]``."""
        perm = [int(k) for k in perm]
        if sorted(perm) != list(range(self.p)):
            raise InputError("not a permutation")
        labels = [None] * self.p
        for k, new in enumerate(perm):
            labels[new] = self.labels[k]
        return Graph(self.p, {(perm[i], perm[j]) for i, j in self.edges}, tuple(labels))

    def adjacency(self):
        """0/1 integer adjacency matrix with a unit diagonal."""
        A = np.eye(self.p, dtype=int)
        for i, j in self.edges:
            A[i, j] = A[j, i] = 1
        return A


def parse_adjacency(m, labels=None):
    """Build a :class:`Graph` from a symmetric 0/1 adjacency matrix.

    The diagonal is ignored, but each diagonal entry must still be 0 or 1.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"adjacency matrix must be square, got shape {m.shape}")
    if m.dtype == bool:
        m = m.astype(int)
    if not np.all(np.isin(m, (0, 1))):
        bad = np.argwhere(~np.isin(m, (0, 1)))[0]
        raise NonBinaryEntry(f"entry ({bad[0]}, {bad[1]}) is {m[tuple(bad)]!r}, expected 0 or 1")
    if not np.array_equal(m, m.T):
        i, j = np.argwhere(m != m.T)[0]
        raise NotSymmetric(f"adjacency entries ({i}, {j}) and ({j}, {i}) differ")
    p = m.shape[0]
    edges = {(i, j) for i, j in combinations(range(p), 2) if m[i, j] == 1}
    return Graph(p, frozenset(edges), labels)


def missing_edge_count(G):
    """Number of vertex pairs without an edge, ``p(p-1)/2 - |E|``."""
    return G.p * (G.p - 1) // 2 - len(G.edges)


def _quote(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(G, edge_weights=None, name="G"):
    """Render ``G`` as a Graphviz ``graph`` document.

    If ``edge_weights`` (a p x p matrix) is given, every edge gets a
    ``label`` attribute with the weight rounded to two decimals.
    """
    if edge_weights is not None:
        edge_weights = np.asarray(edge_weights, dtype=float)
        if edge_weights.shape != (G.p, G.p):
            raise DimensionMismatch(
                f"edge weights have shape {edge_weights.shape}, graph has {G.p} vertices"
            )
    lines = [f"graph {_quote(name)} {{"]
    for label in G.labels:
        lines.append(f"  {_quote(label)};")
    for i, j in G.sorted_edges():
        line = f"  {_quote(G.labels[i])} -- {_quote(G.labels[j])}"
        if edge_weights is not None:
            w = round(float(edge_weights[i, j]), 2) + 0.0  # no "-0.00"
            line += f' [label="{w:.2f}"]'
        lines.append(line + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"
