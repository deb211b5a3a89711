"""Randomized hierarchical tree embeddings (ball-carving HSTs).

``frt_sample`` draws one hierarchically well-separated tree: a shared random
permutation settles every point into the ball of the first permutation point
within radius beta * 2^(i-1) at each level i, with beta uniform in [1, 2) and
the top scale the smallest power of two at least the diameter. Tree distances
dominate metric distances on every sample by construction; the O(log n)
expected stretch is measured, not assumed.

``hst_to_spanning_tree`` collapses an HST onto a spanning tree of the metric
points by contracting every internal node to a representative member, losing
only bounded cost (total tree cost never exceeds total HST weight).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metric import MetricSpace
from .solutions import SpanningTree


@dataclass
class HstNode:
    level: int
    center: int                # representative member of the cluster
    members: tuple[int, ...]
    parent: int                # index into HST.nodes; -1 at the root
    parent_weight: float       # weight of the edge to the parent; 0 at the root
    children: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class HST:
    nodes: tuple[HstNode, ...]
    root: int
    leaf_of: tuple[int, ...]   # vertex -> leaf node index
    base_scale: float          # beta
    top_level: int

    @property
    def n(self) -> int:
        return len(self.leaf_of)

    @property
    def total_weight(self) -> float:
        return float(sum(nd.parent_weight for nd in self.nodes))

    def depth_weight(self, node: int) -> float:
        total = 0.0
        while node >= 0:
            total += self.nodes[node].parent_weight
            node = self.nodes[node].parent
        return total

    def distance(self, u: int, v: int) -> float:
        """HST path distance between the leaves of u and v."""
        if u == v:
            return 0.0
        a, b = self.leaf_of[u], self.leaf_of[v]
        ancestors = {}
        x, acc = a, 0.0
        while x >= 0:
            ancestors[x] = acc
            acc += self.nodes[x].parent_weight
            x = self.nodes[x].parent
        y, acc = b, 0.0
        while y not in ancestors:
            acc += self.nodes[y].parent_weight
            y = self.nodes[y].parent
        return acc + ancestors[y]

    def all_pairs(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for u in range(self.n):
            for v in range(u + 1, self.n):
                d = self.distance(u, v)
                out[u, v] = out[v, u] = d
        return out


def frt_sample(m: MetricSpace, rng: np.random.Generator) -> HST:
    """One HST from the ball-carving distribution over ``m``."""
    n = m.n
    beta = float(rng.uniform(1.0, 2.0))
    pi = [int(v) for v in rng.permutation(n)]
    rank = {v: i for i, v in enumerate(pi)}

    if n == 1:
        leaf = HstNode(level=0, center=0, members=(0,), parent=-1, parent_weight=0.0)
        return HST(nodes=(leaf,), root=0, leaf_of=(0,), base_scale=beta, top_level=0)

    diam = float(m.dist.max())
    top = max(0, math.ceil(math.log2(diam))) if diam > 0 else 0

    nodes: list[HstNode] = []
    leaf_of = [-1] * n

    def rep(members: tuple[int, ...]) -> int:
        return min(members, key=rank.__getitem__)

    root = HstNode(level=top, center=rep(tuple(range(n))), members=tuple(range(n)),
                   parent=-1, parent_weight=0.0)
    nodes.append(root)

    # Carve top-down; a cluster becomes a leaf once it is a singleton.
    pending = [0]
    while pending:
        idx = pending.pop()
        node = nodes[idx]
        if len(node.members) == 1:
            leaf_of[node.members[0]] = idx
            continue
        level = node.level
        radius = beta * 2.0 ** (level - 1)
        groups: dict[int, list[int]] = {}
        for u in node.members:
            for w in pi:
                if m.dist[u, w] <= radius:
                    groups.setdefault(w, []).append(u)
                    break
        # Any two members of the level-`level` cluster are within 2*beta*2^level
        # of each other, so this weight dominates every contracted edge.
        child_weight = beta * 2.0 ** (level + 1)
        for w in pi:
            if w not in groups:
                continue
            members = tuple(sorted(groups[w]))
            child = HstNode(level=level - 1, center=rep(members), members=members,
                            parent=idx, parent_weight=child_weight)
            nodes.append(child)
            node.children.append(len(nodes) - 1)
            pending.append(len(nodes) - 1)

    return HST(nodes=tuple(nodes), root=0, leaf_of=tuple(leaf_of),
               base_scale=beta, top_level=top)


def hst_dominates(h: HST, m: MetricSpace) -> bool:
    """True iff HST distance >= metric distance for every pair."""
    tol = 1e-12 * max(1.0, float(m.dist.max()))
    for u in range(m.n):
        for v in range(u + 1, m.n):
            if h.distance(u, v) < float(m.dist[u, v]) - tol:
                return False
    return True


def hst_to_spanning_tree(h: HST, m: MetricSpace) -> SpanningTree:
    """Contract every HST node to its representative member.

    Connect each child's representative to its parent's; duplicates collapse.
    The result spans V, is re-rooted at the metric root, and its total cost
    is at most the total HST weight (each kept edge is no longer than the HST
    edge it replaces, because a child's representative lies in the parent's
    cluster).
    """
    adj: dict[int, set[int]] = {v: set() for v in range(m.n)}
    for nd in h.nodes:
        if nd.parent < 0:
            continue
        a, b = nd.center, h.nodes[nd.parent].center
        if a != b:
            adj[a].add(b)
            adj[b].add(a)

    parent = [-1] * m.n
    parent[m.root] = m.root
    stack = [m.root]
    seen = {m.root}
    while stack:
        v = stack.pop()
        for w in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                parent[w] = v
                stack.append(w)
    if len(seen) != m.n:
        raise ValueError("contracted HST does not span the point set")
    costs = tuple(
        0.0 if v == m.root else float(m.dist[v, parent[v]]) for v in range(m.n)
    )
    return SpanningTree(root=m.root, parent=tuple(parent), edge_cost=costs)


def stretch_stats(m: MetricSpace, trees: list[SpanningTree]) -> dict[str, float]:
    """Empirical stretch of a sampled spanning-tree distribution.

    The stretch of a pair is mean tree-path cost over samples divided by the
    metric distance; the distribution's measured stretch is the max over
    pairs, and the mean over pairs is reported alongside.
    """
    n = m.n
    total = np.zeros((n, n))
    for t in trees:
        td = _tree_all_pairs(t)
        total += td
    mean_tree = total / len(trees)
    ratios = []
    for u in range(n):
        for v in range(u + 1, n):
            ratios.append(mean_tree[u, v] / float(m.dist[u, v]))
    arr = np.array(ratios)
    return {"max_pair_stretch": float(arr.max()), "mean_pair_stretch": float(arr.mean())}


def _tree_all_pairs(t: SpanningTree) -> np.ndarray:
    """All-pairs path costs inside a spanning tree."""
    n = t.n
    ch = t.children()
    order = []
    stack = [t.root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(ch[v])
    depth_cost = np.zeros(n)
    for v in order:
        if v != t.root:
            depth_cost[v] = depth_cost[t.parent[v]] + t.edge_cost[v]
    # dist(u,v) = cost(u) + cost(v) - 2 * cost(lca)
    out = np.zeros((n, n))
    parents = t.parent
    depth_int = np.zeros(n, dtype=int)
    for v in order:
        if v != t.root:
            depth_int[v] = depth_int[parents[v]] + 1
    for u in range(n):
        for v in range(u + 1, n):
            a, b = u, v
            while a != b:
                if depth_int[a] >= depth_int[b]:
                    a = parents[a]
                else:
                    b = parents[b]
            lca = a
            d = depth_cost[u] + depth_cost[v] - 2 * depth_cost[lca]
            out[u, v] = out[v, u] = d
    return out
