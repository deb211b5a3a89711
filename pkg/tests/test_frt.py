from __future__ import annotations

import math

import numpy as np
import pytest

from univlb.frt import frt_sample, hst_dominates, hst_to_spanning_tree, stretch_stats
from univlb.metric import MetricSpace, random_euclidean_metric, shortest_path_metric
from univlb.rng import stream
from univlb.solutions import project_tree


def test_single_point():
    m = MetricSpace(n=1, dist=np.zeros((1, 1)), root=0)
    h = frt_sample(m, stream(1, 0))
    assert h.n == 1
    assert h.distance(0, 0) == 0.0


def test_two_point_bounds():
    for d0 in (0.5, 1.0, 5.0, 73.0):
        m = MetricSpace(n=2, dist=np.array([[0.0, d0], [d0, 0.0]]), root=0)
        for i in range(20):
            h = frt_sample(m, stream(2, i))
            dh = h.distance(0, 1)
            assert d0 <= dh <= 32.0 * d0
            t = hst_to_spanning_tree(h, m)
            assert t.total_cost == pytest.approx(d0)


def test_domination_every_sample():
    m = random_euclidean_metric(24, stream(3, 0))
    for i in range(25):
        h = frt_sample(m, stream(3, 1, i))
        assert hst_dominates(h, m)


def test_leaves_are_singletons_and_cover():
    m = random_euclidean_metric(17, stream(4, 0))
    h = frt_sample(m, stream(4, 1))
    assert sorted(h.nodes[h.leaf_of[v]].members[0] for v in range(17)) == list(range(17))
    for node in h.nodes:
        if node.children:
            got = sorted(v for c in node.children for v in h.nodes[c].members)
            assert got == sorted(node.members)
        else:
            assert len(node.members) == 1


def test_contracted_tree_cost_bounded():
    m = random_euclidean_metric(40, stream(5, 0))
    for i in range(15):
        h = frt_sample(m, stream(5, 1, i))
        t = hst_to_spanning_tree(h, m)
        assert t.root == m.root
        assert t.total_cost <= h.total_weight + 1e-9
        # spans every point
        assert len(t.parent) == m.n


def test_mean_stretch_within_logn_budget(petersen):
    # 64-point random metric, many samples; flag if mean stretch exceeds 8 ln n
    m = random_euclidean_metric(64, stream(6, 0))
    trees = [hst_to_spanning_tree(frt_sample(m, stream(6, 1, i)), m) for i in range(60)]
    st_stats = stretch_stats(m, trees)
    assert st_stats["mean_pair_stretch"] <= 8 * math.log(64)
    assert st_stats["max_pair_stretch"] >= st_stats["mean_pair_stretch"] >= 1.0 - 1e-9


def test_tree_projection_consistency(petersen):
    m = shortest_path_metric(petersen, 0)
    h = frt_sample(m, stream(7, 0))
    t = hst_to_spanning_tree(h, m)
    full, _ = project_tree(t, set(range(1, 10)))
    assert full == pytest.approx(t.total_cost)


def _hst_subtree_cost(h, terminals) -> float:
    """Weight of the minimal HST subtree spanning the given leaves."""
    keep: set[int] = set()
    for v in terminals:
        node = h.leaf_of[v]
        while node >= 0 and node not in keep:
            keep.add(node)
            node = h.nodes[node].parent
    # prune to the union of leaf-to-LCA paths: drop weights above the
    # shallowest node common to all paths (the subtree root)
    total = sum(h.nodes[i].parent_weight for i in keep)
    node = h.leaf_of[next(iter(terminals))]
    common = []
    while node >= 0:
        common.append(node)
        node = h.nodes[node].parent
    counts = {i: 0 for i in common}
    for v in terminals:
        node = h.leaf_of[v]
        while node >= 0:
            if node in counts:
                counts[node] += 1
            node = h.nodes[node].parent
    k = len(set(terminals))
    for i in common:
        if counts[i] == k and i != h.root:
            total -= h.nodes[i].parent_weight
    return total


def test_tree_ratio_within_hst_ratio():
    # the contracted tree never charges more on X than the HST subtree does
    m = random_euclidean_metric(64, stream(8, 0))
    for i in range(10):
        h = frt_sample(m, stream(8, 1, i))
        t = hst_to_spanning_tree(h, m)
        xr = stream(8, 2, i)
        x = set(int(v) for v in xr.choice(range(1, 64), size=6, replace=False))
        tree_cost, _ = project_tree(t, x)
        hst_cost = _hst_subtree_cost(h, x | {m.root})
        assert tree_cost <= hst_cost + 1e-9
        assert tree_cost <= 2.0 * hst_cost + 1e-9
