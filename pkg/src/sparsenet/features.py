"""Structural properties of connected undirected graphs.

All path-based metrics (eccentricity, closeness, path lengths, edge
betweenness) are computed on the undirected graph; only the source/sink
counts come from the acyclic orientation. Distribution summaries use
population variance and population standard deviation throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Mapping

import numpy as np

from .dag import LayeredDag
from .errors import StructureError
from .graph import Graph


@dataclass(frozen=True)
class FeatureVector:
    """The 25 structural properties of one graph, field order fixed."""

    number_vertices: int
    number_edges: int
    number_source_vertices: int
    number_sink_vertices: int
    diameter: int
    density: float
    degree_distribution_mean: float
    degree_distribution_var: float
    eccentricity_mean: float
    eccentricity_var: float
    eccentricity_max: int
    neighborhood_mean: float
    neighborhood_var: float
    neighborhood_min: int
    neighborhood_max: int
    path_length_mean: float
    path_length_var: float
    closeness_min: float
    closeness_mean: float
    closeness_max: float
    closeness_std: float
    edge_betweenness_min: float
    edge_betweenness_mean: float
    edge_betweenness_max: float
    edge_betweenness_std: float

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def as_array(self, names: tuple[str, ...] | None = None) -> np.ndarray:
        names = names or FEATURE_NAMES
        return np.array([float(getattr(self, name)) for name in names])


FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in fields(FeatureVector))

_PARAM_COUNT_FEATURES = (
    "number_vertices",
    "number_edges",
    "number_source_vertices",
    "number_sink_vertices",
)

# Named feature subsets used by the estimator study. "op" holds the four
# features that directly indicate trainable-parameter counts, "np" the rest;
# "var" keeps only spread information; "small" and "min" are reduced sets.
FEATURE_SETS: Mapping[str, tuple[str, ...]] = {
    "omega": FEATURE_NAMES,
    "op": _PARAM_COUNT_FEATURES,
    "np": tuple(n for n in FEATURE_NAMES if n not in _PARAM_COUNT_FEATURES),
    "var": (
        "degree_distribution_var",
        "eccentricity_var",
        "neighborhood_var",
        "path_length_var",
        "closeness_std",
        "edge_betweenness_std",
    ),
    "small": (
        "number_source_vertices",
        "number_sink_vertices",
        "degree_distribution_var",
        "density",
        "neighborhood_var",
        "path_length_var",
        "closeness_std",
        "edge_betweenness_std",
        "eccentricity_var",
    ),
    "min": (
        "number_source_vertices",
        "number_sink_vertices",
        "degree_distribution_var",
        "path_length_var",
        "closeness_std",
    ),
}


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Unweighted shortest-path hop counts, one BFS per source."""
    n = g.n
    adj = g.adjacency
    dist = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        row = dist[s]
        row[s] = 0
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if row[w] < 0:
                        row[w] = d
                        nxt.append(w)
            frontier = nxt
    if (dist < 0).any():
        raise StructureError("graph is disconnected; path metrics undefined")
    return dist


def eccentricities(g: Graph, dist: np.ndarray | None = None) -> np.ndarray:
    """Per-vertex maximum distance to any other vertex."""
    dist = all_pairs_distances(g) if dist is None else dist
    return dist.max(axis=1)


def closeness(g: Graph, dist: np.ndarray | None = None) -> np.ndarray:
    """(n-1) / sum of distances; 1.0 iff adjacent to every other vertex."""
    dist = all_pairs_distances(g) if dist is None else dist
    if g.n == 1:
        return np.ones(1)
    return (g.n - 1) / dist.sum(axis=1)


def neighborhood_sizes(g: Graph) -> np.ndarray:
    """Vertices within distance one, self included: degree + 1."""
    return g.degrees() + 1


def edge_betweenness(g: Graph) -> np.ndarray:
    """Brandes accumulation over unordered vertex pairs, endpoints included.

    Returns one value per edge, aligned with ``g.edges``; no normalization,
    so each edge scores at least 1 from its own endpoint pair.
    """
    n = g.n
    adj = g.adjacency
    index = {e: i for i, e in enumerate(g.edges)}
    eb = np.zeros(g.m)
    for s in range(n):
        order: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                order.append(u)
                for w in adj[u]:
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
                    if dist[w] == dist[u] + 1:
                        sigma[w] += sigma[u]
                        preds[w].append(u)
            frontier = nxt
        delta = np.zeros(n)
        for w in reversed(order):
            for v in preds[w]:
                c = sigma[v] / sigma[w] * (1.0 + delta[w])
                eb[index[(v, w) if v < w else (w, v)]] += c
                delta[v] += c
    return eb / 2.0


def feature_vector(g: Graph, d: LayeredDag) -> FeatureVector:
    """Assemble all 25 properties from the graph and its layered DAG."""
    if not d.is_layered or d.n != g.n:
        raise ValueError("expected the layered DAG of the same graph")
    dist = all_pairs_distances(g)
    ecc = eccentricities(g, dist)
    close = closeness(g, dist)
    nbh = neighborhood_sizes(g)
    eb = edge_betweenness(g)
    deg = g.degrees()
    iu = np.triu_indices(g.n, k=1)
    plen = dist[iu].astype(np.float64)
    n = g.n
    return FeatureVector(
        number_vertices=n,
        number_edges=g.m,
        number_source_vertices=len(d.sources),
        number_sink_vertices=len(d.sinks),
        diameter=int(ecc.max()),
        density=2.0 * g.m / (n * (n - 1)) if n > 1 else 0.0,
        degree_distribution_mean=float(deg.mean()),
        degree_distribution_var=float(deg.var()),
        eccentricity_mean=float(ecc.mean()),
        eccentricity_var=float(ecc.var()),
        eccentricity_max=int(ecc.max()),
        neighborhood_mean=float(nbh.mean()),
        neighborhood_var=float(nbh.var()),
        neighborhood_min=int(nbh.min()),
        neighborhood_max=int(nbh.max()),
        path_length_mean=float(plen.mean()) if plen.size else 0.0,
        path_length_var=float(plen.var()) if plen.size else 0.0,
        closeness_min=float(close.min()),
        closeness_mean=float(close.mean()),
        closeness_max=float(close.max()),
        closeness_std=float(close.std()),
        edge_betweenness_min=float(eb.min()) if eb.size else 0.0,
        edge_betweenness_mean=float(eb.mean()) if eb.size else 0.0,
        edge_betweenness_max=float(eb.max()) if eb.size else 0.0,
        edge_betweenness_std=float(eb.std()) if eb.size else 0.0,
    )
