"""Adversarial terminal-set samplers and the exact lower-bound certificates.

The Steiner adversary draws one random walk of t steps (t at most a third of
the girth in certificate mode) and takes its distinct vertices as terminals.
For any fixed path collection, a *good* walk (few first-edge traversals, many
distinct vertices) forces the projected cost up via a girth argument, checked
here as an exact inequality with explicit witness data.

The TSP adversary draws two independent walks; when their starts are far
apart (event E1) and both walks spread over many tour blocks (event E2),
every shared block forces one expensive leg of the projected tour.

Certificates never estimate: ``holds`` is a statement about exactly computed
quantities, and a False on inputs meeting the preconditions would falsify
the argument the certificate encodes (treated as a fatal event by the
harness).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph
from .metric import MetricSpace
from .solutions import PathCollection, TourOrder
from .walks import WalkTrace, random_walk


class PreconditionError(ValueError):
    """Certificate invoked on inputs outside its stated preconditions."""


@dataclass(frozen=True)
class SteinerAdversaryConfig:
    t: int
    bad_edge_fraction: float = 1.0 / 8.0
    distinct_fraction: float = 1.0 / 2.0
    certificate_mode: bool = True

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ValueError("walk length must be at least 1")
        if not (0 <= self.bad_edge_fraction <= 1 and 0 <= self.distinct_fraction <= 1):
            raise ValueError("thresholds must lie in [0, 1]")

    @property
    def bad_edge_budget(self) -> float:
        return self.bad_edge_fraction * self.t

    @property
    def distinct_required(self) -> float:
        return self.distinct_fraction * self.t

    @staticmethod
    def paper_default(girth: int) -> "SteinerAdversaryConfig":
        return SteinerAdversaryConfig(t=max(1, girth // 3))


@dataclass(frozen=True)
class TspAdversaryConfig:
    t: int
    blocks: int
    separation_multiplier: int = 3
    alternation_fraction: float = 3.0 / 4.0

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ValueError("walk length must be at least 1")
        if self.blocks < 1:
            raise ValueError("need at least one block")

    @staticmethod
    def paper_default(n: int, d: int, gamma: float = 1.0, t: int | None = None) -> "TspAdversaryConfig":
        log_d_n = np.log(n) / np.log(d)
        if t is None:
            t = max(1, int(log_d_n / 4))
        blocks = max(1, min(int(gamma * log_d_n), n - 1))
        return TspAdversaryConfig(t=t, blocks=blocks)


@dataclass(frozen=True)
class TerminalSet:
    vertices: frozenset[int]
    root: int
    provenance: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.root in self.vertices:
            raise ValueError("terminal sets exclude the root")

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class CertificateResult:
    holds: bool
    lhs: float
    rhs: float
    witness: dict = field(default_factory=dict)


def steiner_adversary_sample(
    g: Graph, cfg: SteinerAdversaryConfig, rng: np.random.Generator,
    root: int = 0, girth: int | None = None,
) -> tuple[WalkTrace, TerminalSet]:
    """One t-step walk and the terminal set of its distinct non-root vertices.

    In certificate mode the walk length must not exceed girth/3, otherwise
    the girth argument is void and sampling refuses.
    """
    if cfg.certificate_mode:
        if girth is None:
            raise PreconditionError("certificate mode requires the girth")
        if 3 * cfg.t > girth:
            raise PreconditionError(
                f"walk length {cfg.t} exceeds girth/3 = {girth}/3; certificate invalid"
            )
    w = random_walk(g, cfg.t, rng, seed_label="steiner-walk")
    x = TerminalSet(vertices=frozenset(w.distinct()) - {root}, root=root,
                    provenance=(w.seed_label,))
    return w, x


def first_edge_set(p: PathCollection) -> frozenset[tuple[int, int]]:
    """The bad-edge set F: the first edge of every vertex-to-root path."""
    return p.first_edges


def is_good_walk(
    w: WalkTrace, F: frozenset[tuple[int, int]], cfg: SteinerAdversaryConfig
) -> tuple[bool, int, int]:
    """(good?, bad traversal count, distinct vertex count).

    Bad traversals count every walk step along an F edge (multiset
    semantics); edges compare undirected. Thresholds are closed: at most
    t/8 bad, at least t/2 distinct.
    """
    bad = 0
    for a, b in w.edges:
        key = (a, b) if a < b else (b, a)
        if key in F:
            bad += 1
    distinct = len(w.distinct())
    good = bad <= cfg.bad_edge_budget and distinct >= cfg.distinct_required
    return good, bad, distinct


def steiner_certificate(
    p: PathCollection,
    w: WalkTrace,
    girth: int,
    cfg: SteinerAdversaryConfig,
    m: MetricSpace | None = None,
) -> CertificateResult:
    """Exact girth certificate: a good walk forces c(P[X]) >= |X| * girth / 6.

    Verification steps, all exact:

    1. X' = distinct walk vertices (root excluded) incident to no traversed
       F-edge; a good walk guarantees |X'| >= |X| / 2.
    2. The path stubs (prefixes of each p_u, u in X') are pairwise
       vertex-disjoint. Stub length is floor(girth/3) capped so that
       2*stub + t stays strictly below the girth: any intersection would
       then close a cycle shorter than the girth, so a violation genuinely
       falsifies the girth argument and is returned as holds=False with
       the offending pair.
    3. The stub edges all belong to P[X] and are disjoint, so
       c(P[X]) >= sum of stub lengths; the headline bound |X| * girth / 6
       is checked directly against c(P[X]).

    Paths must be walks in the underlying graph (the girth argument is
    about graph cycles); callers with metric-edge path collections must
    not request certificates. Unit-cost comparisons are exact integer
    arithmetic.
    """
    F = p.first_edges
    good, bad, distinct = is_good_walk(w, F, cfg)
    if not good:
        raise PreconditionError("certificate requires a good walk")
    if 3 * cfg.t > girth:
        raise PreconditionError("walk longer than girth/3")

    root = p.root
    X = frozenset(w.distinct()) - {root}
    touched: set[int] = set()
    for a, b in w.edges:
        key = (a, b) if a < b else (b, a)
        if key in F:
            touched.update((a, b))
    x_prime = sorted(v for v in X if v not in touched)

    # Strictness cap: with 2*stub + t <= girth - 1 an intersection always
    # yields a cycle shorter than the girth (exactly-girth closed walks are
    # legal and do occur at the boundary).
    stub_len = max(0, min(girth // 3, (girth - 1 - cfg.t) // 2))
    stubs = {u: p.paths[u][: stub_len + 1] for u in x_prime}

    overlap: tuple[int, int] | None = None
    seen: dict[int, int] = {}
    for u in x_prime:
        for vtx in stubs[u]:
            if vtx in seen and seen[vtx] != u:
                overlap = (seen[vtx], u)
                break
            seen[vtx] = u
        if overlap:
            break

    # Union cost over the full paths of all of X, shared edges once.
    edges: set[tuple[int, int]] = set()
    for u in X:
        path = p.paths[u]
        for a, b in zip(path, path[1:]):
            edges.add((a, b) if a < b else (b, a))
    if m is None:
        lhs = float(len(edges))
    else:
        lhs = float(sum(m.d(a, b) for a, b in edges))

    rhs = len(X) * girth / 6.0
    stub_sum = sum(len(stubs[u]) - 1 for u in x_prime)
    witness = {
        "x_size": len(X),
        "x_prime_size": len(x_prime),
        "bad_traversals": bad,
        "distinct": distinct,
        "stub_edge_sum": stub_sum,
        "stub_overlap": overlap,
    }
    holds = overlap is None and 6.0 * lhs >= len(X) * girth and lhs >= stub_sum
    return CertificateResult(holds=holds, lhs=lhs, rhs=rhs, witness=witness)


def good_walk_frequency(
    g: Graph,
    F: frozenset[tuple[int, int]],
    cfg: SteinerAdversaryConfig,
    trials: int,
    rngs: list[np.random.Generator],
) -> tuple[float, float]:
    """Monte Carlo frequency of good walks with its binomial standard error."""
    if len(F) > g.n:
        raise PreconditionError(f"|F| = {len(F)} exceeds the bad-edge budget n = {g.n}")
    if len(rngs) < trials:
        raise ValueError("need one rng stream per trial")
    hits = 0
    for i in range(trials):
        w = random_walk(g, cfg.t, rngs[i])
        good, _, _ = is_good_walk(w, F, cfg)
        if good:
            hits += 1
    freq = hits / trials if trials else 0.0
    stderr = float(np.sqrt(max(freq * (1 - freq), 0.0) / trials)) if trials else 0.0
    return freq, stderr


def tsp_adversary_sample(
    g: Graph, cfg: TspAdversaryConfig, rng1: np.random.Generator,
    rng2: np.random.Generator, root: int = 0,
) -> tuple[WalkTrace, WalkTrace, TerminalSet]:
    """Two independent walks; terminals are the union of their vertices."""
    q1 = random_walk(g, cfg.t, rng1, seed_label="tsp-walk-1")
    q2 = random_walk(g, cfg.t, rng2, seed_label="tsp-walk-2")
    x = TerminalSet(
        vertices=(frozenset(q1.distinct()) | frozenset(q2.distinct())) - {root},
        root=root,
        provenance=(q1.seed_label, q2.seed_label),
    )
    return q1, q2, x


def check_separation(
    q1: WalkTrace, q2: WalkTrace, m: MetricSpace, t: int, multiplier: int = 3
) -> bool:
    """Event E1: walk starts at distance >= 3t.

    When E1 holds, the triangle inequality puts every cross pair at distance
    at least t; that implication is re-verified exhaustively and a failure
    (impossible for a true metric) raises.
    """
    sep = m.d(q1.start, q2.start)
    if sep < multiplier * t:
        return False
    floor = (multiplier - 2) * t
    for u in q1.distinct():
        for v in q2.distinct():
            if m.d(u, v) < floor:
                raise AssertionError(
                    f"separation implication violated: d({u},{v}) < {floor}"
                )
    return True


def _block_of_position(i: int, order_len: int, blocks: int) -> int:
    """Contiguous blocks of size floor(len/blocks); remainder joins the last."""
    size = max(1, order_len // blocks)
    return min(i // size, blocks - 1)


def block_alternation(
    sigma: TourOrder, x1: set[int], x2: set[int], blocks: int,
    alternation_fraction: float = 3.0 / 4.0,
) -> tuple[int, int, int, bool]:
    """Block visit counts (blocks1, blocks2, shared, E2).

    E2 holds when both terminal sets touch at least 3/4 of the blocks;
    inclusion-exclusion then forces at least blocks/4 shared blocks
    (asserted -- a failure would be an arithmetic impossibility).
    """
    order = sigma.order
    hit1 = set()
    hit2 = set()
    for i, v in enumerate(order):
        b = _block_of_position(i, len(order), blocks)
        if v in x1:
            hit1.add(b)
        if v in x2:
            hit2.add(b)
    b1, b2 = len(hit1), len(hit2)
    shared = len(hit1 & hit2)
    e2 = b1 >= alternation_fraction * blocks and b2 >= alternation_fraction * blocks
    if e2 and alternation_fraction >= 3.0 / 4.0 and shared < blocks / 4.0:
        raise AssertionError("inclusion-exclusion violated: E2 with < blocks/4 shared")
    return b1, b2, shared, e2


def tsp_certificate(
    sigma: TourOrder,
    m: MetricSpace,
    x1: set[int],
    x2: set[int],
    t: int,
    blocks: int,
) -> CertificateResult:
    """Exact alternation certificate: c(sigma_X) >= shared_blocks * t.

    Preconditions (E1 and E2, verified by the caller) make the two terminal
    classes disjoint and t-separated. The terminals inside one block form a
    contiguous run of the projected tour; a block visited by both classes
    therefore contains a consecutive crossing pair, whose leg costs at least
    t, and legs found in different blocks are different tour legs. The
    witness lists one crossing pair per shared block.
    """
    if x1 & x2:
        raise PreconditionError("terminal classes overlap; E1 cannot have held")
    pos = sigma.positions()
    xs = sorted((v for v in (x1 | x2) if v != sigma.root), key=pos.__getitem__)
    shared = _shared_blocks(sigma, x1, x2, blocks)
    if not xs:
        return CertificateResult(holds=True, lhs=0.0, rhs=0.0, witness={"pairs": []})

    # Projected tour cost, exact.
    lhs = m.d(sigma.root, xs[0]) + m.d(xs[-1], sigma.root)
    for a, b in zip(xs, xs[1:]):
        lhs += m.d(a, b)

    pairs: list[tuple[int, int]] = []
    used: set[int] = set()
    for a, b in zip(xs, xs[1:]):
        ba = _block_of_position(pos[a], len(sigma.order), blocks)
        bb = _block_of_position(pos[b], len(sigma.order), blocks)
        if ba != bb or ba in used:
            continue
        if (a in x1 and b in x2) or (a in x2 and b in x1):
            pairs.append((a, b))
            used.add(ba)

    rhs = float(shared * t)
    holds = (
        len(pairs) >= shared
        and all(m.d(a, b) >= t for a, b in pairs)
        and lhs >= rhs
    )
    return CertificateResult(
        holds=holds, lhs=float(lhs), rhs=rhs,
        witness={"pairs": pairs, "shared": shared},
    )


def _shared_blocks(sigma: TourOrder, x1: set[int], x2: set[int], blocks: int) -> int:
    hit1, hit2 = set(), set()
    for i, v in enumerate(sigma.order):
        b = _block_of_position(i, len(sigma.order), blocks)
        if v in x1:
            hit1.add(b)
        if v in x2:
            hit2.add(b)
    return len(hit1 & hit2)
