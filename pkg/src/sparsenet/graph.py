"""Undirected simple graphs with naturally ordered vertices.

Vertices are dense integer ids ``0..n-1``; the id order is the natural
ordering that the acyclic orientation in :mod:`sparsenet.dag` relies on.
Graphs are immutable after construction and safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable

import numpy as np

from .errors import FormatError

Edge = tuple[int, int]


def _canonical_edges(n: int, edges: Iterable[Edge]) -> tuple[Edge, ...]:
    seen: set[Edge] = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) has endpoint outside 0..{n - 1}")
        e = (u, v) if u < v else (v, u)
        if e in seen:
            raise ValueError(f"duplicate edge ({e[0]},{e[1]})")
        seen.add(e)
    return tuple(sorted(seen))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: ``n`` vertices, canonical sorted edge tuple."""

    n: int
    edges: tuple[Edge, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        object.__setattr__(self, "edges", _canonical_edges(self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbor tuples, one per vertex (derived view)."""
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range 0..{self.n - 1}")
        return len(self.adjacency[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)


def is_connected(g: Graph) -> bool:
    """True iff a traversal from vertex 0 reaches every vertex."""
    if g.n == 1:
        return True
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    stack = [0]
    reached = 1
    while stack:
        u = stack.pop()
        for w in g.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                reached += 1
                stack.append(w)
    return reached == g.n


def read_edge_list(stream: IO[str] | str) -> Graph:
    """Parse the ``n m`` / ``u v`` edge-list text format.

    Raises FormatError with the offending line number on malformed input.
    """
    text = stream if isinstance(stream, str) else stream.read()
    lines = text.splitlines()
    if not lines:
        raise FormatError("line 1: missing 'n m' header")
    try:
        n, m = (int(t) for t in lines[0].split())
    except ValueError:
        raise FormatError(f"line 1: expected 'n m' header, got {lines[0]!r}") from None
    if n < 1:
        raise FormatError("line 1: vertex count must be positive")
    edges: list[Edge] = []
    seen: set[Edge] = set()
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            u, v = (int(t) for t in line.split())
        except ValueError:
            raise FormatError(f"line {i}: expected 'u v', got {line!r}") from None
        if u == v:
            raise FormatError(f"line {i}: self-loop at {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"line {i}: endpoint out of range ({u},{v})")
        e = (u, v) if u < v else (v, u)
        if e in seen:
            raise FormatError(f"line {i}: duplicate edge ({e[0]},{e[1]})")
        seen.add(e)
        edges.append(e)
    if len(edges) != m:
        raise FormatError(f"header declares {m} edges, found {len(edges)}")
    return Graph(n, tuple(edges))


def write_edge_list(g: Graph) -> str:
    """Serialize to canonical edge-list text (edges sorted, LF endings)."""
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(out) + "\n"
