"""Rooted finite metric spaces and shortest-path metric closure.

Distances for unit-cost graphs are exact integers; general metrics (random
test instances, weighted graphs) use floats with a fixed comparison tolerance.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphs import Graph, GraphError

#: Comparison tolerance for float-valued metrics.
FLOAT_TOL = 1e-9


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricSpace:
    n: int
    dist: np.ndarray
    root: int

    def __post_init__(self) -> None:
        if self.dist.shape != (self.n, self.n):
            raise MetricError(f"distance table shape {self.dist.shape} != ({self.n}, {self.n})")
        if not (0 <= self.root < self.n):
            raise MetricError(f"root {self.root} out of range")
        self.dist.setflags(write=False)

    def d(self, u: int, v: int) -> float:
        return float(self.dist[u, v])

    @property
    def is_integral(self) -> bool:
        return np.issubdtype(self.dist.dtype, np.integer)


@dataclass(frozen=True)
class MetricViolation:
    kind: str  # "negative" | "self" | "symmetry" | "triangle"
    triple: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind} violation at {self.triple}"


def shortest_path_metric(g: Graph, root: int, weights: np.ndarray | None = None) -> MetricSpace:
    """Metric closure of a connected graph, rooted at ``root``.

    Unweighted graphs get exact integer distances via levelwise BFS over the
    whole vertex set at once; positive edge weights fall back to per-source
    Dijkstra.

    Raises GraphError naming an unreachable pair if ``g`` is disconnected.
    """
    if g.n == 0:
        raise MetricError("empty graph has no metric")
    if weights is None:
        dist = _unit_all_pairs(g)
    else:
        dist = _dijkstra_all_pairs(g, np.asarray(weights, dtype=np.float64))
    bad = np.argwhere(dist < 0)
    if bad.size:
        u, v = int(bad[0][0]), int(bad[0][1])
        raise GraphError(f"graph is disconnected: no path between {u} and {v}")
    return MetricSpace(n=g.n, dist=dist, root=root)


def _unit_all_pairs(g: Graph) -> np.ndarray:
    n = g.n
    adj = (g.adjacency > 0).astype(np.uint8)
    dist = np.full((n, n), -1, dtype=np.int32)
    np.fill_diagonal(dist, 0)
    frontier = np.eye(n, dtype=np.uint8)
    known = frontier.copy()
    level = 0
    while True:
        level += 1
        frontier = (adj @ frontier > 0).astype(np.uint8)
        frontier &= 1 - known
        if not frontier.any():
            break
        dist[frontier.astype(bool).T] = level
        known |= frontier
    return dist


def _dijkstra_all_pairs(g: Graph, weights: np.ndarray) -> np.ndarray:
    if len(weights) != g.m:
        raise MetricError("need one weight per edge")
    if np.any(weights <= 0):
        raise MetricError("edge weights must be positive")
    adj: list[list[tuple[int, float]]] = [[] for _ in range(g.n)]
    for (u, v), w in zip(g.edges, weights):
        adj[u].append((v, float(w)))
        adj[v].append((u, float(w)))
    dist = np.full((g.n, g.n), -1.0, dtype=np.float64)
    for s in range(g.n):
        d = dist[s]
        d[s] = 0.0
        heap = [(0.0, s)]
        done = np.zeros(g.n, dtype=bool)
        while heap:
            du, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for v, w in adj[u]:
                nd = du + w
                if d[v] < 0 or nd < d[v]:
                    d[v] = nd
                    heapq.heappush(heap, (nd, v))
    return dist


def validate_metric(m: MetricSpace) -> MetricViolation | None:
    """First violated axiom, or None for a valid metric.

    Violations are a return value, not an error: callers probe candidate
    tables with this.
    """
    d = m.dist.astype(np.float64, copy=False)
    tol = 0.0 if m.is_integral else FLOAT_TOL
    diag = np.diagonal(d)
    bad = np.nonzero(np.abs(diag) > tol)[0]
    if bad.size:
        return MetricViolation("self", (int(bad[0]),))
    asym = np.argwhere(np.abs(d - d.T) > tol)
    if asym.size:
        u, v = map(int, asym[0])
        return MetricViolation("symmetry", (u, v))
    off = d.copy()
    np.fill_diagonal(off, np.inf)
    neg = np.argwhere(off <= tol)
    if neg.size:
        u, v = map(int, neg[0])
        return MetricViolation("negative", (u, v))
    for w in range(m.n):
        slack = d - (d[:, w, None] + d[None, w, :])
        viol = np.argwhere(slack > tol)
        for u, v in viol:
            if u != w and v != w and u != v:
                return MetricViolation("triangle", (int(u), int(w), int(v)))
    return None


def diameter(m: MetricSpace) -> float:
    val = m.dist.max()
    return int(val) if m.is_integral else float(val)


def write_metric(m: MetricSpace, path: str | Path) -> None:
    """Text format: first line ``n root``, then n rows of n numbers."""
    lines = [f"{m.n} {m.root}"]
    for row in m.dist:
        if m.is_integral:
            lines.append(" ".join(str(int(x)) for x in row))
        else:
            lines.append(" ".join(repr(float(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_metric(path: str | Path) -> MetricSpace:
    text = Path(path).read_text().split("\n")
    header = text[0].split()
    n, root = int(header[0]), int(header[1])
    values = " ".join(text[1:]).split()
    if len(values) != n * n:
        raise MetricError(f"{path}: expected {n * n} entries, found {len(values)}")
    integral = all("." not in v and "e" not in v and "inf" not in v for v in values)
    dtype = np.int64 if integral else np.float64
    dist = np.array(values, dtype=dtype).reshape(n, n)
    return MetricSpace(n=n, dist=dist, root=root)


def random_euclidean_metric(n: int, rng: np.random.Generator, root: int = 0) -> MetricSpace:
    """Pairwise distances of n uniform points in the unit square."""
    pts = rng.random((n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    return MetricSpace(n=n, dist=dist, root=root)


def random_uniform_metric(n: int, rng: np.random.Generator, root: int = 0) -> MetricSpace:
    """Random metric: uniform [1,2) off-diagonal entries (triangle-safe by range)."""
    a = rng.uniform(1.0, 2.0, size=(n, n))
    dist = np.triu(a, 1)
    dist = dist + dist.T
    return MetricSpace(n=n, dist=dist, root=root)
