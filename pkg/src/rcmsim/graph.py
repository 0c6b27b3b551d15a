"""Undirected communication graphs and the Laplacian as an algebra operator."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GenerationError

TOPOLOGIES = ("complete", "ring", "path", "erdos_renyi")


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph on agents 0..n_agents-1. Immutable."""

    n_agents: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("need at least one agent")
        normalized = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n_agents and 0 <= j < self.n_agents):
                raise ValueError(f"edge {e} out of range")
            normalized.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @cached_property
    def edge_array(self):
        """Sorted (E, 2) array of undirected edges (i < j)."""
        if not self.edges:
            return np.zeros((0, 2), dtype=int)
        return np.array(sorted(self.edges), dtype=int)

    @cached_property
    def directed_edges(self):
        """(src, dst) index arrays with both orientations of every edge."""
        e = self.edge_array
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        return src, dst

    @cached_property
    def adjacency(self):
        a = np.zeros((self.n_agents, self.n_agents))
        e = self.edge_array
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
        return a

    def degrees(self):
        return self.adjacency.sum(axis=1)

    def laplacian_matrix(self):
        """L = D - A; symmetric PSD with zero row sums."""
        return np.diag(self.degrees()) - self.adjacency

    def laplacian_apply(self, v):
        """(L v)_i = sum_{j ~ i} (v_i - v_j) for a per-agent field v of shape (N, d).

        Each edge contributes one difference and its exact negation, so the
        output sums to zero up to the accumulation of the given entries.
        """
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.n_agents:
            raise ValueError(f"field has {v.shape[0]} entries, graph has {self.n_agents}")
        out = np.zeros_like(v)
        e = self.edge_array
        if len(e):
            diff = v[e[:, 0]] - v[e[:, 1]]
            np.add.at(out, e[:, 0], diff)
            np.add.at(out, e[:, 1], -diff)
        return out

    def is_connected(self) -> bool:
        """Breadth-first reachability from vertex 0."""
        if self.n_agents == 1:
            return True
        neighbors = [[] for _ in range(self.n_agents)]
        for i, j in self.edges:
            neighbors[i].append(j)
            neighbors[j].append(i)
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for i in frontier:
                for j in neighbors[i]:
                    if j not in seen:
                        seen.add(j)
                        nxt.append(j)
            frontier = nxt
        return len(seen) == self.n_agents


def parse_topology(spec: str):
    """Split a topology string like "ring" or "erdos_renyi:0.4" into (name, p)."""
    name, _, arg = spec.partition(":")
    name = name.strip()
    if name not in TOPOLOGIES:
        raise ValueError(f"unknown topology {name!r}; expected one of {TOPOLOGIES}")
    if name == "erdos_renyi":
        if not arg:
            raise ValueError("erdos_renyi needs an edge probability, e.g. erdos_renyi:0.4")
        p = float(arg)
        if not 0.0 < p <= 1.0:
            raise ValueError(f"edge probability must be in (0, 1], got {p}")
        return name, p
    if arg:
        raise ValueError(f"topology {name!r} takes no parameter")
    return name, None


def generate(topology: str, n: int, seed=None, rng=None) -> Graph:
    """Build a connected graph of the given topology.

    erdos_renyi resamples from a fresh seed stream until connected, up to
    1000 attempts.  Deterministic in seed (or in the passed generator state).
    """
    name, p = parse_topology(topology)
    if rng is None:
        rng = np.random.default_rng(seed)
    if name == "complete":
        edges = {(i, j) for i in range(n) for j in range(i + 1, n)}
    elif name == "path":
        edges = {(i, i + 1) for i in range(n - 1)}
    elif name == "ring":
        edges = {(i, i + 1) for i in range(n - 1)}
        if n > 2:
            edges.add((0, n - 1))
    else:  # erdos_renyi
        for _ in range(1000):
            mask = rng.random((n, n)) < p
            edges = {(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]}
            g = Graph(n, frozenset(edges))
            if g.is_connected():
                return g
        raise GenerationError(
            f"no connected erdos_renyi({p}) graph on {n} vertices in 1000 attempts"
        )
    return Graph(n, frozenset(edges))
