"""The three universal solution shapes and their cost projections.

A universal algorithm commits to a solution over all of V before the terminal
set X is revealed; the cost charged is that of the induced sub-solution:

* ``SpanningTree`` -> minimal rooted subtree covering X (``project_tree``),
* ``TourOrder``    -> X visited in tour order, root to root (``project_tour``),
* ``PathCollection`` -> union of the root-paths of X (``project_paths``).

Projections of ``X`` that is empty or ``{root}`` cost 0 by convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .graphs import Graph, GraphError, bfs_parents
from .metric import MetricSpace


@dataclass(frozen=True)
class SpanningTree:
    """Rooted spanning tree as a parent map; the root is its own parent."""

    root: int
    parent: tuple[int, ...]
    edge_cost: tuple[float, ...]  # cost of (v, parent[v]); 0 at the root

    def __post_init__(self) -> None:
        n = len(self.parent)
        if self.parent[self.root] != self.root:
            raise ValueError("root must be a fixed point of the parent map")
        seen_depth = [-1] * n
        seen_depth[self.root] = 0
        for v in range(n):
            trail = []
            u = v
            while seen_depth[u] < 0:
                trail.append(u)
                u = self.parent[u]
                if len(trail) > n:
                    raise ValueError("parent map contains a cycle")
            base = seen_depth[u]
            for i, w in enumerate(reversed(trail)):
                seen_depth[w] = base + i + 1

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def total_cost(self) -> float:
        return float(sum(self.edge_cost))

    def path_to_root(self, v: int) -> tuple[int, ...]:
        path = [v]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        return tuple(path)

    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in range(self.n)]
        for v in range(self.n):
            if v != self.root:
                ch[self.parent[v]].append(v)
        return ch


@dataclass(frozen=True)
class PathCollection:
    """One path from every vertex to the root; the root's path is empty."""

    root: int
    paths: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for v, p in enumerate(self.paths):
            if v == self.root:
                if p not in ((), (self.root,)):
                    raise ValueError("root path must be empty")
                continue
            if not p or p[0] != v or p[-1] != self.root:
                raise ValueError(f"path of {v} must run from {v} to the root")

    @property
    def n(self) -> int:
        return len(self.paths)

    @cached_property
    def first_edges(self) -> frozenset[tuple[int, int]]:
        """The set F of first edges (v, v1), undirected."""
        out = set()
        for v, p in enumerate(self.paths):
            if v != self.root and len(p) >= 2:
                a, b = p[0], p[1]
                out.add((a, b) if a < b else (b, a))
        return frozenset(out)


@dataclass(frozen=True)
class TourOrder:
    """Visiting order of the non-root vertices; the tour is r -> sigma -> r."""

    root: int
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.order) + 1
        expected = set(range(n)) - {self.root}
        if set(self.order) != expected:
            raise ValueError("order must list each non-root vertex exactly once")

    @property
    def n(self) -> int:
        return len(self.order) + 1

    def positions(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.order)}


def shortest_path_tree(m: MetricSpace, g: Graph) -> SpanningTree:
    """BFS/shortest-path tree rooted at the metric's root.

    The tree path cost from any v to the root equals dist(v, root).
    """
    tree = bfs_tree(g, m.root)
    costs = tuple(
        0.0 if v == m.root else float(m.dist[v, tree.parent[v]]) for v in range(g.n)
    )
    out = SpanningTree(root=m.root, parent=tree.parent, edge_cost=costs)
    return out


def bfs_tree(g: Graph, root: int) -> SpanningTree:
    """Unit-cost shortest-path tree straight from the graph (no metric table)."""
    dist, parent = bfs_parents(g, root)
    if np.any(parent < 0):
        raise GraphError("graph is disconnected")
    costs = tuple(0.0 if v == root else 1.0 for v in range(g.n))
    return SpanningTree(root=root, parent=tuple(int(p) for p in parent), edge_cost=costs)


def _tree_edge(v: int, parent: int) -> tuple[int, int]:
    return (v, parent) if v < parent else (parent, v)


def project_tree(t: SpanningTree, X) -> tuple[float, frozenset[tuple[int, int]]]:
    """Cost and edges of the minimal rooted subtree containing X."""
    edges: set[tuple[int, int]] = set()
    cost = 0.0
    marked = {t.root}
    for x in X:
        v = x
        while v not in marked:
            marked.add(v)
            p = t.parent[v]
            edges.add(_tree_edge(v, p))
            cost += t.edge_cost[v]
            v = p
    return cost, frozenset(edges)


def project_tour(sigma: TourOrder, m: MetricSpace, X) -> float:
    """Cost of visiting X in sigma's order, starting and ending at the root.

    c(sigma_X) = c(r, x_1) + sum c(x_i, x_{i+1}) + c(x_k, r).
    """
    pos = sigma.positions()
    xs = sorted((v for v in X if v != sigma.root), key=pos.__getitem__)
    if not xs:
        return 0.0
    cost = m.d(sigma.root, xs[0]) + m.d(xs[-1], sigma.root)
    for a, b in zip(xs, xs[1:]):
        cost += m.d(a, b)
    return cost


def project_paths(
    p: PathCollection, X, m: MetricSpace | None = None
) -> tuple[float, frozenset[tuple[int, int]]]:
    """Cost of the union of the root-paths of X; shared edges count once.

    Edge costs come from the metric when given, else unit cost per edge.
    """
    edges: set[tuple[int, int]] = set()
    for x in X:
        if x == p.root:
            continue
        path = p.paths[x]
        for a, b in zip(path, path[1:]):
            edges.add((a, b) if a < b else (b, a))
    if m is None:
        return float(len(edges)), frozenset(edges)
    return float(sum(m.d(a, b) for a, b in edges)), frozenset(edges)


def tree_to_path_collection(t: SpanningTree) -> PathCollection:
    """The equivalent path collection: p_v = unique tree path v -> root."""
    paths = tuple(
        () if v == t.root else t.path_to_root(v) for v in range(t.n)
    )
    return PathCollection(root=t.root, paths=paths)


def tree_to_tour(t: SpanningTree) -> TourOrder:
    """Depth-first traversal order (children ascending), skipping the root.

    Deterministic: with the fixed child order, equal trees give equal tours.
    """
    ch = t.children()
    order: list[int] = []
    stack = [t.root]
    while stack:
        v = stack.pop()
        if v != t.root:
            order.append(v)
        stack.extend(reversed(ch[v]))
    return TourOrder(root=t.root, order=tuple(order))


def restricted_dfs_order(t: SpanningTree, X) -> tuple[int, ...]:
    """DFS first-visit order of X inside the projected subtree T[X].

    Used to check contiguity: this must equal the restriction of
    ``tree_to_tour(t)`` to X.
    """
    _, edges = project_tree(t, X)
    keep = {v for e in edges for v in e} | {t.root}
    ch = t.children()
    order: list[int] = []
    xset = {v for v in X if v != t.root}
    stack = [t.root]
    while stack:
        v = stack.pop()
        if v in xset:
            order.append(v)
        stack.extend(reversed([c for c in ch[v] if c in keep]))
    return tuple(order)


def write_tree(t: SpanningTree, path: str | Path) -> None:
    """Text format: n lines of ``v parent(v)``."""
    Path(path).write_text("\n".join(f"{v} {t.parent[v]}" for v in range(t.n)) + "\n")


def read_tree(path: str | Path, m: MetricSpace) -> SpanningTree:
    parent = [0] * m.n
    root = None
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        v, p = map(int, line.split())
        parent[v] = p
        if v == p:
            root = v
    if root is None:
        raise ValueError(f"{path}: no root (fixed point) found")
    costs = tuple(0.0 if v == root else float(m.dist[v, parent[v]]) for v in range(m.n))
    return SpanningTree(root=root, parent=tuple(parent), edge_cost=costs)


def write_tour(sigma: TourOrder, path: str | Path) -> None:
    """Text format: the permutation on one line."""
    Path(path).write_text(" ".join(map(str, sigma.order)) + "\n")


def read_tour(path: str | Path, root: int) -> TourOrder:
    order = tuple(int(x) for x in Path(path).read_text().split())
    return TourOrder(root=root, order=order)


def write_paths(p: PathCollection, path: str | Path) -> None:
    """Text format: n lines, line v = vertex sequence of p_v."""
    lines = []
    for v in range(p.n):
        seq = p.paths[v] if v != p.root else (p.root,)
        lines.append(" ".join(map(str, seq)))
    Path(path).write_text("\n".join(lines) + "\n")


def read_paths(path: str | Path, root: int) -> PathCollection:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    paths = []
    for v, ln in enumerate(lines):
        seq = tuple(int(x) for x in ln.split())
        paths.append(() if v == root else seq)
    return PathCollection(root=root, paths=tuple(paths))
