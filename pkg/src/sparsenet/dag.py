"""Acyclic orientation and layer indexing.

Orientation directs every undirected edge from its higher-indexed endpoint
to its lower-indexed one, which is acyclic by construction (the adjacency
matrix becomes strictly triangular). The layer index of a vertex is one plus
the maximum layer of its in-neighbors (-1 base), i.e. the longest directed
path from any source.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable

from .errors import FormatError, StructureError
from .graph import Graph

Arc = tuple[int, int]


@dataclass(frozen=True)
class LayeredDag:
    """Oriented acyclic graph plus per-vertex layer assignment.

    ``layer_of`` is empty until :func:`layer_index` fills it. Arcs are stored
    canonically sorted.
    """

    n: int
    arcs: tuple[Arc, ...]
    layer_of: tuple[int, ...] = ()
    layers: tuple[tuple[int, ...], ...] = ()

    @property
    def is_layered(self) -> bool:
        return len(self.layer_of) == self.n

    @property
    def sources(self) -> tuple[int, ...]:
        has_in = [False] * self.n
        for _, v in self.arcs:
            has_in[v] = True
        return tuple(v for v in range(self.n) if not has_in[v])

    @property
    def sinks(self) -> tuple[int, ...]:
        has_out = [False] * self.n
        for u, _ in self.arcs:
            has_out[u] = True
        return tuple(v for v in range(self.n) if not has_out[v])

    def in_neighbors(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            nbrs[v].append(u)
        return tuple(tuple(a) for a in nbrs)


def orient(g: Graph) -> LayeredDag:
    """Direct every edge {u,v} from max(u,v) to min(u,v)."""
    arcs = tuple(sorted((max(u, v), min(u, v)) for u, v in g.edges))
    return LayeredDag(g.n, arcs)


def layer_index(d: LayeredDag) -> LayeredDag:
    """Fill in layers: layer(v) = 1 + max(layer of in-neighbors, base -1).

    Works for any arc set, not only orientation output; raises
    StructureError when the arcs contain a cycle.
    """
    n = d.n
    out: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for u, v in d.arcs:
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise StructureError(f"invalid arc ({u},{v})")
        out[u].append(v)
        indeg[v] += 1
    layer = [0] * n
    queue = [v for v in range(n) if indeg[v] == 0]
    done = 0
    while queue:
        nxt: list[int] = []
        for u in queue:
            done += 1
            for v in out[u]:
                layer[v] = max(layer[v], layer[u] + 1)
                indeg[v] -= 1
                if indeg[v] == 0:
                    nxt.append(v)
        queue = nxt
    if done != n:
        raise StructureError("arc set contains a cycle")
    depth = max(layer) if n else 0
    groups: list[list[int]] = [[] for _ in range(depth + 1)]
    for v in range(n):
        groups[layer[v]].append(v)
    return LayeredDag(n, d.arcs, tuple(layer), tuple(tuple(g) for g in groups))


def layered_dag(g: Graph) -> LayeredDag:
    """Convenience composition: orient then layer."""
    return layer_index(orient(g))


def write_layered_dag(d: LayeredDag) -> str:
    """Serialize as arc lines ``u v`` followed by ``v:layer`` lines."""
    if not d.is_layered:
        d = layer_index(d)
    out = [f"{u} {v}" for u, v in d.arcs]
    out.extend(f"{v}:{d.layer_of[v]}" for v in range(d.n))
    return "\n".join(out) + "\n"


def read_layered_dag(stream: IO[str] | str) -> LayeredDag:
    """Parse the arc-list + layer-map format; layering is recomputed."""
    text = stream if isinstance(stream, str) else stream.read()
    arcs: list[Arc] = []
    vertices: set[int] = set()
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if ":" in line:
            try:
                v, _ = line.split(":")
                vertices.add(int(v))
            except ValueError:
                raise FormatError(f"line {i}: bad layer entry {line!r}") from None
        else:
            try:
                u, v = (int(t) for t in line.split())
            except ValueError:
                raise FormatError(f"line {i}: expected 'u v' arc, got {line!r}") from None
            arcs.append((u, v))
    if not vertices:
        raise FormatError("no 'v:layer' lines found")
    n = max(vertices) + 1
    if vertices != set(range(n)):
        raise FormatError("layer map must cover vertices 0..n-1")
    return layer_index(LayeredDag(n, tuple(sorted(arcs))))
