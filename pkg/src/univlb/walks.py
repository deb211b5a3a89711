"""Random walks on graphs and Monte Carlo validation of expander-walk tail bounds.

A t-step walk starts at a uniform vertex and moves to a uniform neighbor at
each step. Traces are reproducible bit-exactly from (graph, generator state).

Two validators estimate the classical spectral confinement bounds:

* confinement -- Pr[walk stays inside B] vs the bound (alpha + beta)^t,
* visit count -- Pr[more than gamma*t walk positions in B] vs
  2^t * (alpha + beta)^(gamma*t).

The visit validator counts both positions (walk steps landing in B, repeats
included) and distinct vertices; the bound is compared against the position
count and both are reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph


@dataclass(frozen=True)
class WalkTrace:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    seed_label: str = ""

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.vertices) - 1:
            raise ValueError("trace length fields inconsistent")

    @property
    def steps(self) -> int:
        return len(self.edges)

    @property
    def start(self) -> int:
        return self.vertices[0]

    def distinct(self) -> set[int]:
        return set(self.vertices)


def random_walk(g: Graph, t: int, rng: np.random.Generator, seed_label: str = "") -> WalkTrace:
    """Uniform-start t-step random walk; each step is a uniform neighbor."""
    if t < 0:
        raise ValueError("walk length must be nonnegative")
    start = int(rng.integers(g.n))
    verts = [start]
    table = g.neighbor_table
    if table is not None and t > 0:
        choices = rng.integers(0, table.shape[1], size=t)
        v = start
        for c in choices:
            v = int(table[v, c])
            verts.append(v)
    else:
        indptr, indices = g.neighbors
        v = start
        for _ in range(t):
            deg = indptr[v + 1] - indptr[v]
            if deg == 0:
                raise ValueError(f"walk stuck at isolated vertex {v}")
            v = int(indices[indptr[v] + rng.integers(deg)])
            verts.append(v)
    edges = tuple((verts[i], verts[i + 1]) for i in range(t))
    return WalkTrace(vertices=tuple(verts), edges=edges, seed_label=seed_label)


@dataclass(frozen=True)
class WalkBoundReport:
    frequency: float
    bound: float
    trials: int
    stderr: float
    extra: dict[str, float] | None = None

    def within(self, sigmas: float = 3.0) -> bool:
        return self.frequency <= self.bound + sigmas * self.stderr


def _binomial_stderr(freq: float, trials: int) -> float:
    if trials == 0:
        return 0.0
    return float(np.sqrt(max(freq * (1.0 - freq), 0.0) / trials))


def walk_confinement_stats(
    g: Graph,
    subset: np.ndarray,
    t: int,
    beta: float,
    trials: int,
    rngs: list[np.random.Generator],
) -> WalkBoundReport:
    """Monte Carlo Pr[all t+1 walk positions lie in ``subset``] with its bound.

    ``rngs`` supplies one independent stream per trial.
    """
    if len(rngs) < trials:
        raise ValueError("need one rng stream per trial")
    mask = np.zeros(g.n, dtype=bool)
    mask[subset] = True
    if not mask.any():
        raise ValueError("subset must be nonempty")
    alpha = float(mask.sum()) / g.n
    hits = 0
    for i in range(trials):
        w = random_walk(g, t, rngs[i])
        if all(mask[v] for v in w.vertices):
            hits += 1
    freq = hits / trials if trials else 0.0
    bound = (alpha + beta) ** t
    return WalkBoundReport(frequency=freq, bound=bound, trials=trials,
                           stderr=_binomial_stderr(freq, trials))


def walk_visit_stats(
    g: Graph,
    subset: np.ndarray,
    t: int,
    gamma: float,
    beta: float,
    trials: int,
    rngs: list[np.random.Generator],
) -> WalkBoundReport:
    """Monte Carlo Pr[more than gamma*t positions in ``subset``] with its bound.

    Reports the distinct-vertex frequency alongside (``extra``), since the
    source bound does not pin down which count is meant; positions are the
    weaker reading and are what the bound is checked against.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if len(rngs) < trials:
        raise ValueError("need one rng stream per trial")
    mask = np.zeros(g.n, dtype=bool)
    mask[subset] = True
    alpha = float(mask.sum()) / g.n
    threshold = gamma * t
    pos_hits = 0
    distinct_hits = 0
    for i in range(trials):
        w = random_walk(g, t, rngs[i])
        positions = sum(1 for v in w.vertices if mask[v])
        distinct = sum(1 for v in w.distinct() if mask[v])
        if positions > threshold:
            pos_hits += 1
        if distinct > threshold:
            distinct_hits += 1
    freq = pos_hits / trials if trials else 0.0
    dfreq = distinct_hits / trials if trials else 0.0
    bound = (2.0 ** t) * (alpha + beta) ** (gamma * t)
    return WalkBoundReport(frequency=freq, bound=bound, trials=trials,
                           stderr=_binomial_stderr(freq, trials),
                           extra={"distinct_frequency": dfreq})
