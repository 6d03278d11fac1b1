"""Undirected weighted graphs and symmetric graph shifts built from them.

Vertices are numbered 1..n in every public interface (edge lists, JSON,
CSV output); arrays are indexed 0..n-1 internally.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidShiftError

SHIFT_KINDS = ("adjacency", "degree", "laplacian", "custom")


def _normalize_edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph without self-loops.

    Attributes:
        n: Number of vertices (>= 2).
        edges: Normalized edge tuples (i, j) with 1 <= i < j <= n.
        weights: Nonnegative edge weights, parallel to ``edges``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"graph order must be an integer >= 2, got {self.n!r}")
        if len(self.edges) != len(self.weights):
            raise ValueError("edges and weights must have equal length")
        seen: set[tuple[int, int]] = set()
        for (i, j), w in zip(self.edges, self.weights):
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge ({i},{j}) out of range 1..{self.n}")
            if i == j:
                raise ValueError(f"self-loop ({i},{j}) not allowed")
            if i > j:
                raise ValueError(f"edge ({i},{j}) not normalized (need i < j)")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"edge ({i},{j}) has invalid weight {w!r}")

    @staticmethod
    def from_edges(n: int, edges: Iterable[Sequence[float]]) -> "Graph":
        """Build a graph from ``(i, j)`` or ``(i, j, weight)`` items (weight defaults to 1)."""
        normalized: list[tuple[int, int]] = []
        weights: list[float] = []
        for item in edges:
            if len(item) == 2:
                i, j = item
                w = 1.0
            elif len(item) == 3:
                i, j, w = item
            else:
                raise ValueError(f"edge item {item!r} must have 2 or 3 entries")
            normalized.append(_normalize_edge(int(i), int(j)))
            weights.append(float(w))
        order = sorted(range(len(normalized)), key=lambda k: normalized[k])
        return Graph(
            n=int(n),
            edges=tuple(normalized[k] for k in order),
            weights=tuple(weights[k] for k in order),
        )

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        return _normalize_edge(i, j) in self.edge_set

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        """Dense symmetric adjacency matrix W (read-only)."""
        w = np.zeros((self.n, self.n))
        for (i, j), wij in zip(self.edges, self.weights):
            w[i - 1, j - 1] = wij
            w[j - 1, i - 1] = wij
        w.flags.writeable = False
        return w

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "edges": [[i, j, w] for (i, j), w in zip(self.edges, self.weights)],
        }
        return json.dumps(payload)

    @staticmethod
    def from_json(text: str) -> "Graph":
        payload = json.loads(text)
        return Graph.from_edges(payload["n"], payload["edges"])


@dataclass(frozen=True, eq=False)
class GraphShift:
    """Symmetric shift matrix tied to a graph's sparsity pattern."""

    graph: Graph
    matrix: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in SHIFT_KINDS:
            raise ValueError(f"unknown shift kind {self.kind!r}")
        mat = np.array(self.matrix, dtype=float)
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return self.graph.n


def cycle_graph(n: int) -> Graph:
    """Unweighted cycle graph C_n (n >= 3)."""
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise ValueError(f"cycle graph needs n >= 3, got {n!r}")
    edges = [(k, k + 1) for k in range(1, n)] + [(1, n)]
    return Graph.from_edges(n, edges)


def validate_shift(graph: Graph, matrix: np.ndarray) -> bool:
    """Check that ``matrix`` is symmetric with off-diagonal support only on edges."""
    mat = np.asarray(matrix, dtype=float)
    if mat.shape != (graph.n, graph.n):
        raise ValueError(
            f"shift matrix shape {mat.shape} does not match graph order {graph.n}"
        )
    if not np.array_equal(mat, mat.T):
        return False
    rows, cols = np.nonzero(mat)
    for r, c in zip(rows, cols):
        if r == c:
            continue
        if not graph.has_edge(r + 1, c + 1):
            return False
    return True


def build_shift(graph: Graph, kind: str, matrix: np.ndarray | None = None) -> GraphShift:
    """Construct a graph shift: adjacency W, degree D, Laplacian D - W, or a custom matrix."""
    if kind not in SHIFT_KINDS:
        raise ValueError(f"unknown shift kind {kind!r}; expected one of {SHIFT_KINDS}")
    if kind == "custom":
        if matrix is None:
            raise ValueError("custom shift requires an explicit matrix")
        mat = np.asarray(matrix, dtype=float)
        if not validate_shift(graph, mat):
            raise InvalidShiftError(
                "custom shift is asymmetric or has off-diagonal entries outside edges"
            )
        return GraphShift(graph=graph, matrix=mat, kind=kind)
    if matrix is not None:
        raise ValueError(f"matrix argument only valid for kind='custom', got {kind!r}")
    w = graph.weight_matrix
    if kind == "adjacency":
        return GraphShift(graph=graph, matrix=w, kind=kind)
    degrees = w.sum(axis=1)
    if kind == "degree":
        return GraphShift(graph=graph, matrix=np.diag(degrees), kind=kind)
    return GraphShift(graph=graph, matrix=np.diag(degrees) - w, kind="laplacian")
