"""Random graph generators: Watts-Strogatz, Barabási-Albert, Erdős-Rényi.

All generators are pure functions of their spec, keyed by a Philox stream,
so any number of workers can generate the same graph for the same spec.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .errors import GenerationError
from .graph import Graph, is_connected
from .rng import make_rng

WATTS_STROGATZ = "watts_strogatz"
BARABASI_ALBERT = "barabasi_albert"
ERDOS_RENYI = "erdos_renyi"

KINDS = (WATTS_STROGATZ, BARABASI_ALBERT, ERDOS_RENYI)
KIND_ALIASES: Mapping[str, str] = {
    "ws": WATTS_STROGATZ,
    "ba": BARABASI_ALBERT,
    "er": ERDOS_RENYI,
}

# Parameter ranges for sampled specs. Calibrated so the sampled population
# has mean degree near 10.4 and edge counts spanning roughly 100..4500 at
# the 50..500-vertex scale.
WS_K_CHOICES = tuple(range(4, 20, 2))
WS_P_RANGE = (0.1, 0.9)
BA_M_CHOICES = tuple(range(1, 10))
ER_TARGET_DEGREE_RANGE = (4.0, 18.0)


def canonical_kind(kind: str) -> str:
    k = KIND_ALIASES.get(kind, kind)
    if k not in KINDS:
        raise ValueError(f"unknown generator kind {kind!r}; use one of {KINDS}")
    return k


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters identifying one random graph, including its seed."""

    kind: str
    n: int
    seed: int
    ws_k: int | None = None
    ws_p: float | None = None
    ba_m: int | None = None
    er_p: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        if self.n < 1:
            raise ValueError("vertex count must be positive")
        if self.kind == WATTS_STROGATZ:
            if self.ws_k is None or self.ws_p is None:
                raise ValueError("watts_strogatz requires ws_k and ws_p")
            if self.ws_k % 2 != 0 or not 2 <= self.ws_k < self.n:
                raise ValueError(f"ws_k must be even with 2 <= ws_k < n, got {self.ws_k}")
            if not 0.0 <= self.ws_p <= 1.0:
                raise ValueError(f"ws_p must be in [0,1], got {self.ws_p}")
        elif self.kind == BARABASI_ALBERT:
            if self.ba_m is None:
                raise ValueError("barabasi_albert requires ba_m")
            if not 1 <= self.ba_m < self.n:
                raise ValueError(f"ba_m must satisfy 1 <= ba_m < n, got {self.ba_m}")
        else:
            if self.er_p is None:
                raise ValueError("erdos_renyi requires er_p")
            if not 0.0 <= self.er_p <= 1.0:
                raise ValueError(f"er_p must be in [0,1], got {self.er_p}")

    def flatten(self) -> dict:
        """Flat key-value form for provenance records."""
        return {
            "kind": self.kind,
            "n": self.n,
            "seed": self.seed,
            "ws_k": self.ws_k,
            "ws_p": self.ws_p,
            "ba_m": self.ba_m,
            "er_p": self.er_p,
        }


def _watts_strogatz(n: int, k: int, p: float, rng: np.random.Generator) -> Graph:
    # Ring lattice: each vertex linked to k/2 neighbors on each side, then
    # every lattice edge (i, i+j) is independently rewired to (i, w) with
    # probability p. Rewiring keeps the edge count constant; an edge is kept
    # if vertex i is already adjacent to everything else.
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for j in range(1, k // 2 + 1):
        for i in range(n):
            t = (i + j) % n
            nbrs[i].add(t)
            nbrs[t].add(i)
    for j in range(1, k // 2 + 1):
        for i in range(n):
            t = (i + j) % n
            if rng.random() >= p:
                continue
            if t not in nbrs[i]:
                # Already rewired away from the other side of a wrapped ring.
                continue
            if len(nbrs[i]) >= n - 1:
                continue
            w = int(rng.integers(0, n))
            while w == i or w in nbrs[i]:
                w = int(rng.integers(0, n))
            nbrs[i].discard(t)
            nbrs[t].discard(i)
            nbrs[i].add(w)
            nbrs[w].add(i)
    edges = [(i, t) for i in range(n) for t in nbrs[i] if i < t]
    return Graph(n, tuple(edges))


def _barabasi_albert(n: int, m: int, rng: np.random.Generator) -> Graph:
    # Seed clique on m+1 vertices, then each arriving vertex attaches m
    # distinct edges with probability proportional to current degree.
    degree = np.zeros(n, dtype=np.float64)
    edges: list[tuple[int, int]] = []
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            edges.append((i, j))
    degree[: m + 1] = m
    for v in range(m + 1, n):
        weights = degree[:v] / degree[:v].sum()
        targets = rng.choice(v, size=m, replace=False, p=weights)
        for t in sorted(int(t) for t in targets):
            edges.append((t, v))
            degree[t] += 1
        degree[v] = m
    return Graph(n, tuple(edges))


def _erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.shape[0]) < p
    edges = tuple(zip(iu[mask].tolist(), ju[mask].tolist()))
    return Graph(n, edges)


def generate(spec: GeneratorSpec) -> Graph:
    """Generate the graph identified by the spec (deterministic per seed)."""
    rng = make_rng(spec.seed)
    if spec.kind == WATTS_STROGATZ:
        return _watts_strogatz(spec.n, spec.ws_k, spec.ws_p, rng)
    if spec.kind == BARABASI_ALBERT:
        return _barabasi_albert(spec.n, spec.ba_m, rng)
    return _erdos_renyi(spec.n, spec.er_p, rng)


def generate_connected(spec: GeneratorSpec, max_retries: int = 100) -> Graph:
    """First connected sample, re-seeding with seed+attempt per retry."""
    if max_retries < 1:
        raise ValueError("max_retries must be >= 1")
    for attempt in range(max_retries):
        g = generate(replace(spec, seed=spec.seed + attempt))
        if is_connected(g):
            return g
    raise GenerationError(
        f"no connected graph within {max_retries} attempts for spec {spec.flatten()}"
    )


def sample_spec(
    seed: int,
    kind: str,
    n_range: tuple[int, int] = (50, 500),
) -> GeneratorSpec:
    """Draw one generator spec with n uniform in n_range.

    WS draws an even ring degree from 4..18 and a rewiring probability from
    [0.1, 0.9]; BA draws 1..9 edges per arriving vertex; ER matches the same
    mean-degree band. The drawn spec carries its own derived graph seed.
    """
    lo, hi = n_range
    if lo > hi or lo < 1:
        raise ValueError(f"invalid n_range {n_range}")
    kind = canonical_kind(kind)
    rng = make_rng(seed, 0xA11CE)
    n = int(rng.integers(lo, hi + 1))
    graph_seed = int(rng.integers(0, 1 << 63))
    if kind == WATTS_STROGATZ:
        choices = [k for k in WS_K_CHOICES if k < n] or [2]
        ws_k = int(choices[rng.integers(0, len(choices))])
        ws_p = float(rng.uniform(*WS_P_RANGE))
        return GeneratorSpec(kind, n, graph_seed, ws_k=ws_k, ws_p=ws_p)
    if kind == BARABASI_ALBERT:
        choices = [m for m in BA_M_CHOICES if m < n]
        ba_m = int(choices[rng.integers(0, len(choices))])
        return GeneratorSpec(kind, n, graph_seed, ba_m=ba_m)
    target = float(rng.uniform(*ER_TARGET_DEGREE_RANGE))
    return GeneratorSpec(kind, n, graph_seed, er_p=min(1.0, target / max(n - 1, 1)))


def expected_edges(spec: GeneratorSpec) -> int | None:
    """Exact edge count where the construction fixes it (WS, BA), else None."""
    if spec.kind == WATTS_STROGATZ:
        return spec.n * spec.ws_k // 2
    if spec.kind == BARABASI_ALBERT:
        m = spec.ba_m
        return m * (spec.n - m - 1) + m * (m + 1) // 2
    return None
