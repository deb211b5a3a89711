from __future__ import annotations

import math

import pytest

from univlb.experiments import star_metric, suite_mechanism
from univlb.oracles import steiner_exact
from univlb.privacy import (
    LowerBoundWitness,
    MechanismError,
    MechanismTable,
    all_subsets,
    dp_audit,
    empty_support_check,
    exponential_mechanism,
    group_privacy,
    neighbor_pairs,
    read_mechanism,
    solution_covers,
    transfer_check,
    transfer_lower_bound,
    write_mechanism,
    yao_derandomize,
)
from univlb.rng import stream
from univlb.solutions import SpanningTree, TourOrder


def _const_tree(n: int = 2) -> SpanningTree:
    return SpanningTree(root=0, parent=tuple([0] * n), edge_cost=(0.0,) + (1.0,) * (n - 1))


def _uniform_mech(universe: frozenset[int], ids: list[str]) -> MechanismTable:
    sols = {sid: _const_tree(len(universe) + 1) for sid in ids}
    prob = 1.0 / len(ids)
    table = {X: {sid: prob for sid in ids} for X in all_subsets(universe)}
    return MechanismTable(universe=universe, solutions=sols, table=table)


def test_x_independent_mechanism_is_zero_dp():
    mech = _uniform_mech(frozenset({1, 2, 3}), ["a", "b"])
    report = dp_audit(mech, 0.0)
    assert report.passed
    assert report.worst_ratio == 1.0


def test_two_candidate_closed_form():
    # oracle first: explicit softmax ratio for gap-1 costs at sensitivity 1
    eps = 0.8
    w0 = math.exp(0.0)
    w1 = math.exp(-eps / 2.0)
    expected_ratio = (w0 / (w0 + w1)) / (w1 / (w0 + w1))
    assert expected_ratio == pytest.approx(math.exp(eps / 2.0), rel=1e-12)

    universe = frozenset({1})
    cost = {
        (frozenset(), "a"): 0.0, (frozenset(), "b"): 1.0,
        (frozenset({1}), "a"): 1.0, (frozenset({1}), "b"): 0.0,
    }
    sols = {"a": _const_tree(), "b": _const_tree()}
    mech = exponential_mechanism(universe, sols, cost, eps, 1.0)
    report = dp_audit(mech, eps)
    assert report.passed
    assert report.worst_ratio == pytest.approx(math.exp(eps / 2.0), rel=1e-12)


def test_zero_eps_mechanism_uniform():
    universe = frozenset({1, 2})
    sols = {"a": _const_tree(3), "b": _const_tree(3)}
    cost = {(X, sid): float(len(X)) * (1 if sid == "a" else 3)
            for X in all_subsets(universe) for sid in sols}
    mech = exponential_mechanism(universe, sols, cost, 0.0, 1.0)
    for X in all_subsets(universe):
        assert mech.distribution(X)["a"] == pytest.approx(0.5)


def test_zero_probability_neighbor_fails_all_eps():
    universe = frozenset({1})
    sols = {"a": _const_tree(), "b": _const_tree()}
    table = {frozenset(): {"a": 1.0},
             frozenset({1}): {"a": 0.5, "b": 0.5}}
    mech = MechanismTable(universe=universe, solutions=sols, table=table)
    report = dp_audit(mech, 1e9)
    assert not report.passed
    assert report.worst_ratio == math.inf


def test_unnormalized_rejected():
    with pytest.raises(MechanismError):
        MechanismTable(universe=frozenset({1}), solutions={"a": _const_tree()},
                       table={frozenset(): {"a": 0.7}})


def test_random_cost_tables_pass_at_construction_eps():
    universe = frozenset(range(1, 7))
    ids = ["a", "b", "c"]
    sols = {sid: _const_tree(7) for sid in ids}
    for trial in range(25):
        rng = stream(13, trial)
        cost = {(X, sid): float(rng.random())
                for X in all_subsets(universe) for sid in ids}
        sens = max(
            abs(cost[(X | {v}, sid)] - cost[(X, sid)])
            for X in all_subsets(universe) for v in universe - X for sid in ids
        )
        eps = float(rng.uniform(0.1, 2.0))
        mech = exponential_mechanism(universe, sols, cost, eps, sens)
        assert dp_audit(mech, eps).passed


def test_group_privacy():
    assert group_privacy(0.2, 1) == pytest.approx(0.2)
    assert group_privacy(0.2, 3) == pytest.approx(0.6)
    with pytest.raises(ValueError):
        group_privacy(0.2, 0)


def test_group_privacy_distance_two_audit():
    universe = frozenset(range(1, 7))
    ids = ["a", "b"]
    sols = {sid: _const_tree(7) for sid in ids}
    for trial in range(10):
        rng = stream(14, trial)
        cost = {(X, sid): float(rng.random())
                for X in all_subsets(universe) for sid in ids}
        sens = max(
            abs(cost[(X | {v}, sid)] - cost[(X, sid)])
            for X in all_subsets(universe) for v in universe - X for sid in ids
        )
        eps = 0.5
        mech = exponential_mechanism(universe, sols, cost, eps, sens)
        assert dp_audit(mech, eps, distance=1).passed
        # distance-2 pairs satisfy the exp(2 eps) bound
        assert dp_audit(mech, eps, distance=2).passed


def test_neighbor_pairs_counts():
    u = frozenset({1, 2, 3})
    pairs = neighbor_pairs(u, 1)
    assert len(pairs) == 3 * 4  # each of 8 subsets has 3 neighbors, halved


def test_empty_support_check():
    universe = frozenset({1, 2, 3})
    good = _uniform_mech(universe, ["a"])
    assert empty_support_check(good) == (True, None)

    small = TourOrder(root=0, order=(1, 2))  # misses vertex 3
    assert not solution_covers(small, universe)
    bad = MechanismTable(universe=universe, solutions={"s": small},
                         table={X: {"s": 1.0} for X in all_subsets(universe)})
    ok, sid = empty_support_check(bad)
    assert not ok and sid == "s"


def test_yao_two_by_two():
    sols = {"s1": 0.5, "s2": 0.5}
    sets = {frozenset({1}): 0.5, frozenset({2}): 0.5}

    def event(sid, X):
        return (sid == "s1") == (X == frozenset({1}))

    xstar, val = yao_derandomize(sols, sets, event)
    assert val == pytest.approx(0.5)
    assert xstar in (frozenset({1}), frozenset({2}))


def test_yao_event_never():
    sols = {"s1": 1.0}
    sets = {frozenset({1}): 1.0}
    xstar, val = yao_derandomize(sols, sets, lambda s, X: False)
    assert val == 0.0


def test_yao_min_below_average():
    rng = stream(15, 0)
    sols = {f"s{i}": 0.25 for i in range(4)}
    sets = {frozenset({i}): 0.2 for i in range(1, 6)}
    matrix = {(f"s{i}", frozenset({j})): bool(rng.integers(2))
              for i in range(4) for j in range(1, 6)}
    event = lambda s, X: matrix[(s, X)]
    xstar, val = yao_derandomize(sols, sets, event)
    avg = sum(p * sum(sp for s, sp in sols.items() if event(s, X))
              for X, p in sets.items())
    assert val <= avg + 1e-12


def test_transfer_threshold_values():
    w = LowerBoundWitness(alpha=3.0, rho={k: 0.5 * math.exp(-k) for k in range(1, 8)})
    assert transfer_lower_bound(w) == pytest.approx(1.0, rel=1e-12)

    flat = LowerBoundWitness(alpha=3.0, rho={k: 0.5 for k in range(1, 5)})
    assert transfer_lower_bound(flat) == pytest.approx(0.0, abs=1e-12)

    with pytest.raises(ValueError):
        transfer_lower_bound(LowerBoundWitness(alpha=1.0, rho={}))


def test_rho_must_be_non_increasing():
    with pytest.raises(ValueError):
        LowerBoundWitness(alpha=1.0, rho={1: 0.1, 2: 0.4})


def test_transfer_end_to_end():
    m = star_metric(8)
    universe = frozenset(range(1, 9))
    for i in range(6):
        mech, witness = suite_mechanism(m, universe, 0.5, stream(16, i))
        assert dp_audit(mech, 0.5).passed
        eps0 = transfer_lower_bound(witness)
        assert eps0 == pytest.approx(math.log(2.0), rel=1e-6)
        chk = transfer_check(mech, m, witness, 0.5,
                             opt_fn=lambda X: steiner_exact(m, X))
        assert chk.ok
        assert chk.prob_beat <= chk.bound <= 0.5 + 1e-12


def test_mechanism_file_roundtrip(tmp_path):
    m = star_metric(4)
    universe = frozenset(range(1, 5))
    mech, _ = suite_mechanism(m, universe, 0.4, stream(17, 0))
    path = tmp_path / "mech.json"
    write_mechanism(mech, path)
    back = read_mechanism(path)
    assert back.universe == mech.universe
    assert set(back.solutions) == set(mech.solutions)
    for X in all_subsets(universe):
        for sid, p in mech.distribution(X).items():
            assert back.distribution(X)[sid] == pytest.approx(p, rel=1e-12)
    assert dp_audit(back, 0.4).passed
