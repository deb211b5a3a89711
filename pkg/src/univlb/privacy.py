"""Finite differential-privacy auditing and the universal-to-private transfer.

Everything here is exact: universes are capped small enough that all 2^|U|
terminal sets, all neighboring pairs, and all support probabilities are
enumerated and compared with rational-strength arithmetic (floats plus a
relative tolerance on ratio comparisons only).

The transfer theorem machinery: an (alpha, rho) lower-bound witness for
universal algorithms yields the privacy threshold

    eps0 = inf over witness sizes k of (1/k) * ln(1 / (2 * rho(k))),

and any mechanism audited at eps <= eps0 keeps probability at most 1/2 of
beating alpha times the optimum on the witness set. ``transfer_check``
verifies the full chain on a concrete mechanism by exhaustive arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .metric import MetricSpace
from .solutions import (
    PathCollection,
    SpanningTree,
    TourOrder,
    project_paths,
    project_tree,
    project_tour,
)

#: Relative tolerance on probability-ratio comparisons.
RATIO_RTOL = 1e-9

Solution = SpanningTree | PathCollection | TourOrder


class MechanismError(ValueError):
    pass


def solution_covers(s: Solution, universe: frozenset[int]) -> bool:
    """Feasibility at a terminal set: the solution must span/order all of it."""
    if isinstance(s, SpanningTree):
        return universe <= set(range(s.n))
    if isinstance(s, PathCollection):
        return all(v == s.root or (v < s.n and len(s.paths[v]) > 0) for v in universe)
    if isinstance(s, TourOrder):
        return universe <= set(s.order) | {s.root}
    raise MechanismError(f"unknown solution type {type(s)!r}")


def solution_cost(s: Solution, m: MetricSpace, X) -> float:
    """Projected cost of a solution on terminal set X."""
    if isinstance(s, SpanningTree):
        return project_tree(s, X)[0]
    if isinstance(s, PathCollection):
        return project_paths(s, X, m)[0]
    if isinstance(s, TourOrder):
        return project_tour(s, m, X)
    raise MechanismError(f"unknown solution type {type(s)!r}")


@dataclass(frozen=True)
class MechanismTable:
    """Explicit finite mechanism: one distribution over solutions per X."""

    universe: frozenset[int]
    solutions: dict[str, Solution]
    table: dict[frozenset[int], dict[str, float]]
    claimed_eps: float | None = None

    def __post_init__(self) -> None:
        for X, row in self.table.items():
            total = sum(row.values())
            if abs(total - 1.0) > 1e-12:
                raise MechanismError(f"distribution at X={sorted(X)} sums to {total}")
            for sid, prob in row.items():
                if sid not in self.solutions:
                    raise MechanismError(f"unknown solution id {sid!r}")
                if prob < 0:
                    raise MechanismError(f"negative probability for {sid!r}")

    def distribution(self, X: frozenset[int]) -> dict[str, float]:
        try:
            return self.table[X]
        except KeyError:
            raise MechanismError(f"mechanism not defined on X={sorted(X)}") from None


@dataclass(frozen=True)
class AuditReport:
    passed: bool
    worst_ratio: float
    witness_pair: tuple[frozenset[int], frozenset[int]] | None
    witness_solution: str | None


def all_subsets(universe: frozenset[int]) -> list[frozenset[int]]:
    items = sorted(universe)
    return [
        frozenset(v for i, v in enumerate(items) if mask >> i & 1)
        for mask in range(1 << len(items))
    ]


def neighbor_pairs(
    universe: frozenset[int], distance: int = 1
) -> list[tuple[frozenset[int], frozenset[int]]]:
    """Unordered pairs of terminal sets at symmetric difference ``distance``."""
    subsets = all_subsets(universe)
    if distance == 1:
        return [(X, X | {v}) for X in subsets for v in sorted(universe - X)]
    out = []
    for i, a in enumerate(subsets):
        for b in subsets[i + 1:]:
            if len(a ^ b) == distance:
                out.append((a, b))
    return out


def dp_audit(
    mech: MechanismTable, eps: float, distance: int = 1
) -> AuditReport:
    """Check the eps-DP ratio bound on every pair at the given distance.

    Pointwise per-solution checks suffice for finite supports (any event is
    a union of atoms). Convention: 0/0 passes; p/0 fails for every finite
    eps. At ``distance`` k the allowed ratio is exp(k * eps) (group
    privacy).
    """
    try:
        bound = math.exp(distance * eps)
    except OverflowError:
        bound = math.inf
    worst = 1.0
    witness_pair = None
    witness_sid = None
    for a, b in neighbor_pairs(mech.universe, distance):
        row_a = mech.distribution(a)
        row_b = mech.distribution(b)
        for sid in set(row_a) | set(row_b):
            pa = row_a.get(sid, 0.0)
            pb = row_b.get(sid, 0.0)
            if pa == 0.0 and pb == 0.0:
                continue
            if pa == 0.0 or pb == 0.0:
                return AuditReport(False, math.inf, (a, b), sid)
            ratio = max(pa / pb, pb / pa)
            if ratio > worst:
                worst, witness_pair, witness_sid = ratio, (a, b), sid
    passed = worst <= bound * (1.0 + RATIO_RTOL)
    return AuditReport(passed, worst, witness_pair, witness_sid)


def group_privacy(eps: float, k: int) -> float:
    """Privacy parameter after k iterated neighbor steps."""
    if k < 1:
        raise ValueError("group size must be at least 1")
    return k * eps


def exponential_mechanism(
    universe: frozenset[int],
    candidates: dict[str, Solution],
    cost: dict[tuple[frozenset[int], str], float],
    eps: float,
    sensitivity: float,
) -> MechanismTable:
    """Reference mechanism: Pr_X[s] proportional to exp(-eps*cost/(2*sens)).

    Materialized for every X in 2^U. Probabilities are shifted by the
    minimum exponent before exponentiation so the table never overflows.
    """
    if sensitivity <= 0:
        raise MechanismError("sensitivity must be positive")
    table: dict[frozenset[int], dict[str, float]] = {}
    for X in all_subsets(universe):
        exponents = {
            sid: -eps * cost[(X, sid)] / (2.0 * sensitivity) for sid in candidates
        }
        shift = max(exponents.values())
        weights = {sid: math.exp(e - shift) for sid, e in exponents.items()}
        total = sum(weights.values())
        table[X] = {sid: w / total for sid, w in weights.items()}
    return MechanismTable(
        universe=universe, solutions=dict(candidates), table=table, claimed_eps=eps
    )


def empty_support_check(mech: MechanismTable) -> tuple[bool, str | None]:
    """Every solution with mass at the empty set must be feasible for all of U.

    This is the first step of the transfer argument: privacy forces the
    empty-input distribution to stay inside the feasible set of the full
    universe, otherwise running the mechanism on U would emit an infeasible
    solution with positive probability.
    """
    row = mech.distribution(frozenset())
    for sid, prob in row.items():
        if prob > 0.0 and not solution_covers(mech.solutions[sid], mech.universe):
            return False, sid
    return True, None


def yao_derandomize(
    solution_probs: dict[str, float],
    set_probs: dict[frozenset[int], float],
    event,
) -> tuple[frozenset[int], float]:
    """Exchange the averaging order to extract a single hard terminal set.

    Computes Pr_{s,X}[event] both ways (the double sums must agree), then
    returns the X minimizing Pr_s[event(s, X)]; that minimum never exceeds
    the X-average.
    """
    per_set = {
        X: sum(p for sid, p in solution_probs.items() if event(sid, X))
        for X in set_probs
    }
    total_sx = sum(
        p_s * sum(px for X, px in set_probs.items() if event(sid, X))
        for sid, p_s in solution_probs.items()
    )
    total_xs = sum(px * per_set[X] for X, px in set_probs.items())
    if abs(total_sx - total_xs) > 1e-12 * max(1.0, abs(total_sx)):
        raise AssertionError("summation interchange mismatch")
    best = min(sorted(per_set, key=sorted), key=per_set.__getitem__)
    assert per_set[best] <= total_xs + 1e-12
    return best, per_set[best]


@dataclass(frozen=True)
class LowerBoundWitness:
    """(alpha, rho) lower bound: on instance ``metric``, any solution
    distribution has a terminal set in ``sets`` where beating ratio alpha
    has probability at most rho(|X|)."""

    alpha: float
    rho: dict[int, float]
    metric: MetricSpace | None = None
    sets: tuple[frozenset[int], ...] = ()

    def __post_init__(self) -> None:
        sizes = sorted(self.rho)
        for a, b in zip(sizes, sizes[1:]):
            if self.rho[b] > self.rho[a] + 1e-12:
                raise ValueError("rho must be non-increasing in |X|")
        for v in self.rho.values():
            if not 0.0 <= v <= 1.0:
                raise ValueError("rho values must lie in [0, 1]")


def transfer_lower_bound(w: LowerBoundWitness) -> float:
    """The privacy threshold eps0 = inf_k (1/k) ln(1 / (2 rho(k))).

    Nonpositive (transfer vacuous) whenever some rho(k) >= 1/2.
    """
    if not w.rho:
        raise ValueError("witness table is empty")
    values = []
    for k, r in w.rho.items():
        if k < 1:
            raise ValueError("witness sizes must be positive")
        if r <= 0.0:
            continue  # unbeatable size: contributes +infinity
        values.append(math.log(1.0 / (2.0 * r)) / k)
    return min(values) if values else math.inf


@dataclass(frozen=True)
class TransferCheck:
    ok: bool
    eps0: float
    witness_set: frozenset[int]
    prob_beat: float
    bound: float


def transfer_check(
    mech: MechanismTable,
    m: MetricSpace,
    witness: LowerBoundWitness,
    eps: float,
    opt_fn,
) -> TransferCheck:
    """Verify the transfer conclusion on a concrete audited mechanism.

    Treats the mechanism's empty-input distribution as its universal
    solution, finds the witness set X for it (the rho-hardest of the witness
    family), and checks by exact arithmetic that

        Pr_{S ~ D_X}[cost(S on X) <= alpha * opt(X)]
            <= exp(eps |X|) * rho(|X|) <= 1/2.
    """
    ok_support, bad = empty_support_check(mech)
    if not ok_support:
        raise MechanismError(f"solution {bad!r} infeasible at the full universe")
    d_empty = mech.distribution(frozenset())

    def beats(sid: str, X: frozenset[int]) -> bool:
        opt = opt_fn(X)
        return solution_cost(mech.solutions[sid], m, X) <= witness.alpha * opt

    if not witness.sets:
        raise ValueError("witness family is empty")
    # The (alpha, rho) guarantee is existential: some family member must be
    # hard for this mechanism's universal (empty-input) distribution. Take
    # the hardest among those achieving their rho bound.
    best_x = None
    best_p = math.inf
    for X in sorted(witness.sets, key=sorted):
        p = sum(prob for sid, prob in d_empty.items() if beats(sid, X))
        if p <= witness.rho[len(X)] + 1e-12 and p < best_p:
            best_x, best_p = X, p
    if best_x is None:
        raise AssertionError(
            "witness family does not achieve its rho bound on this mechanism"
        )
    rho_k = witness.rho[len(best_x)]

    d_x = mech.distribution(best_x)
    prob_beat = sum(prob for sid, prob in d_x.items() if beats(sid, best_x))
    bound = math.exp(eps * len(best_x)) * rho_k
    ok = prob_beat <= bound + 1e-12 and (bound <= 0.5 + 1e-12)
    return TransferCheck(
        ok=ok, eps0=transfer_lower_bound(witness), witness_set=best_x,
        prob_beat=prob_beat, bound=bound,
    )


def write_mechanism(mech: MechanismTable, path: str | Path) -> None:
    """JSON serialization: solution registry plus per-X probability rows."""
    items = sorted(mech.universe)
    doc = {
        "universe": items,
        "claimed_eps": mech.claimed_eps,
        "solutions": {sid: _solution_doc(s) for sid, s in mech.solutions.items()},
        "table": {
            _mask(X, items): {sid: p for sid, p in sorted(row.items())}
            for X, row in sorted(mech.table.items(), key=lambda kv: _mask(kv[0], items))
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_mechanism(path: str | Path) -> MechanismTable:
    doc = json.loads(Path(path).read_text())
    items = list(doc["universe"])
    solutions = {sid: _solution_from_doc(d) for sid, d in doc["solutions"].items()}
    table = {
        frozenset(v for i, v in enumerate(items) if int(mask) >> i & 1): dict(row)
        for mask, row in doc["table"].items()
    }
    return MechanismTable(
        universe=frozenset(items), solutions=solutions, table=table,
        claimed_eps=doc.get("claimed_eps"),
    )


def _mask(X: frozenset[int], items: list[int]) -> str:
    return str(sum(1 << i for i, v in enumerate(items) if v in X))


def _solution_doc(s: Solution) -> dict:
    if isinstance(s, SpanningTree):
        return {"kind": "tree", "root": s.root, "parent": list(s.parent),
                "edge_cost": list(s.edge_cost)}
    if isinstance(s, PathCollection):
        return {"kind": "paths", "root": s.root, "paths": [list(p) for p in s.paths]}
    if isinstance(s, TourOrder):
        return {"kind": "tour", "root": s.root, "order": list(s.order)}
    raise MechanismError(f"unknown solution type {type(s)!r}")


def _solution_from_doc(doc: dict) -> Solution:
    kind = doc["kind"]
    if kind == "tree":
        return SpanningTree(root=doc["root"], parent=tuple(doc["parent"]),
                            edge_cost=tuple(doc["edge_cost"]))
    if kind == "paths":
        return PathCollection(root=doc["root"],
                              paths=tuple(tuple(p) for p in doc["paths"]))
    if kind == "tour":
        return TourOrder(root=doc["root"], order=tuple(doc["order"]))
    raise MechanismError(f"unknown solution kind {kind!r}")
