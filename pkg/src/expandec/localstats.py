"""Rooted-ball extraction, canonical forms, and local statistics.

The local statistic of radius r for a graph is the exact distribution, over
a uniform root vertex, of the isomorphism class of the rooted r-ball. Keys
for isomorphism classes come from a canonical form: two balls get the same
key exactly when they are isomorphic as rooted graphs. Distributions carry
exact rational weights so that total-variation comparisons have no float
noise in them.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .multigraph import GraphError, MultiGraph

#: refuse to canonize balls larger than this (individualization search
#: on big graphs is not desk-scale)
MAX_BALL_VERTICES = 10_000


@dataclass(frozen=True)
class RootedBall:
    """Induced subgraph of everything within distance <= radius of a root.

    Vertices are relabeled 0..k-1 in breadth-first order from the root (so
    root is always 0); ``vertices[i]`` is the original id of local vertex i.
    """

    radius: int
    graph: MultiGraph
    root: int
    vertices: tuple

    @cached_property
    def canonical_key(self) -> bytes:
        return canonical_form(self)


def extract_ball(g: MultiGraph, v: int, r: int) -> RootedBall:
    """Rooted r-ball around v, multiplicities preserved."""
    if r < 0:
        raise GraphError("radius must be nonnegative")
    order, _ = g.bfs_order(v, max_depth=r)
    local = {orig: i for i, orig in enumerate(order)}
    edges = []
    for u, w in g.edges.tolist():
        if u in local and w in local:
            edges.append((local[u], local[w]))
    ball = MultiGraph(len(order), edges)
    return RootedBall(radius=r, graph=ball, root=0, vertices=tuple(order))


# -- canonical forms ---------------------------------------------------------

def _ahu_code(g: MultiGraph, root: int) -> bytes:
    """Canonical code of a rooted tree (iterative AHU)."""
    children = [[] for _ in range(g.n)]
    parent = [-1] * g.n
    order, _ = g.bfs_order(root)
    seen = {root}
    for v in order:
        for w in g._adj_unique[v]:
            w = int(w)
            if w not in seen:
                seen.add(w)
                parent[w] = v
                children[v].append(w)
    code = [None] * g.n
    for v in reversed(order):
        parts = sorted(code[c] for c in children[v])
        code[v] = b"(" + b"".join(parts) + b")"
    return code[root]


def _refine(n: int, adj, colors):
    """Color refinement to a fixpoint.

    adj[v] is a list of (neighbor, multiplicity). Colors are ints assigned
    by rank of sorted signatures, so they are isomorphism-invariant given
    invariant input colors. Returns (colors, trace) where trace records the
    sorted histogram of color class sizes after each round.
    """
    trace = []
    ncolors = len(set(colors))
    while True:
        sigs = []
        for v in range(n):
            nbr = sorted((colors[w], mult) for w, mult in adj[v])
            sigs.append((colors[v], tuple(nbr)))
        ranking = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        colors = [ranking[sig] for sig in sigs]
        hist = {}
        for c in colors:
            hist[c] = hist.get(c, 0) + 1
        trace.append(tuple(sorted(hist.items())))
        new_n = len(ranking)
        if new_n == ncolors:
            return colors, tuple(trace)
        ncolors = new_n


def _encode_leaf(n: int, adj, colors) -> tuple:
    """Edge multiset relabeled by the discrete coloring."""
    perm = [0] * n
    for v in range(n):
        perm[v] = colors[v]
    rows = []
    for v in range(n):
        for w, mult in adj[v]:
            if v <= w:
                a, b = perm[v], perm[w]
                rows.append((min(a, b), max(a, b), mult))
    return tuple(sorted(rows))


#: refinement calls allowed per canonization before giving up; generous for
#: desk-scale balls, a stop for pathologically symmetric large ones
SEARCH_BUDGET = 100_000


def _search(n: int, adj, colors, trace, budget) -> tuple:
    """Canonical suffix for an already-refined coloring (exhaustive, pruned).

    Branches on the smallest non-singleton class; children are grouped by
    their refinement trace and only the minimal-trace group is explored
    (the trace is part of the compared value, so discarding larger-trace
    children never changes the minimum).
    """
    counts = {}
    for c in colors:
        counts[c] = counts.get(c, 0) + 1
    non_singleton = [c for c, k in counts.items() if k > 1]
    if not non_singleton:
        return (trace, _encode_leaf(n, adj, colors))
    target = min(non_singleton, key=lambda c: (counts[c], c))
    cell = [v for v in range(n) if colors[v] == target]
    # widen the color space so the individualized vertex sorts just below
    # its old class
    base = [2 * c for c in colors]
    children = []
    for v in cell:
        budget[0] -= 1
        if budget[0] < 0:
            raise GraphError("canonical search budget exceeded (ball too symmetric)")
        child_colors = list(base)
        child_colors[v] = 2 * colors[v] - 1
        refined, child_trace = _refine(n, adj, child_colors)
        children.append((child_trace, refined))
    best_trace = min(t for t, _ in children)
    best = None
    for child_trace, refined in children:
        if child_trace != best_trace:
            continue
        cand = _search(n, adj, refined, child_trace, budget)
        if best is None or cand < best:
            best = cand
    return (trace,) + best


def canonical_form(ball: RootedBall) -> bytes:
    """Canonical key: equal byte strings iff rooted-isomorphic balls.

    Tree balls take a rooted-AHU fast path; being a tree is itself an
    isomorphism invariant and the two paths tag their keys differently,
    so the dispatch cannot merge distinct classes. General balls run an
    individualization-refinement search seeded with distance-from-root
    colors; the full refinement trace is folded into the key.
    """
    g = ball.graph
    if g.n > MAX_BALL_VERTICES:
        raise GraphError(f"ball too large to canonize ({g.n} > {MAX_BALL_VERTICES})")
    root = ball.root
    simple = g.m == len({(int(a), int(b)) for a, b in g.edges.tolist()})
    if g.m == g.n - 1 and simple:
        payload = b"T" + _ahu_code(g, root)
    else:
        adj = [[(int(w), int(mult)) for w, mult in row] for row in g._adj_mult]
        _, dist = g.bfs_order(root)
        colors = [int(x) for x in dist]
        if any(c < 0 for c in colors):
            raise GraphError("ball graph must be connected")
        budget = [SEARCH_BUDGET]
        refined, trace = _refine(g.n, adj, colors)
        key_obj = _search(g.n, adj, refined, trace, budget)
        payload = b"G" + repr((g.n, key_obj)).encode()
    return hashlib.sha256(payload).digest()


# -- distributions -----------------------------------------------------------

@dataclass(frozen=True)
class LocalDistribution:
    """Exact distribution of rooted r-ball classes over a uniform root."""

    radius: int
    counts: dict            # canonical key (bytes) -> number of roots
    total: int

    def __post_init__(self):
        if self.total <= 0:
            raise GraphError("distribution needs a positive total")
        if sum(self.counts.values()) != self.total:
            raise GraphError("class counts must sum to the total")

    @property
    def weights(self) -> dict:
        return {k: Fraction(c, self.total) for k, c in self.counts.items()}

    def weight_of(self, key: bytes) -> Fraction:
        return Fraction(self.counts.get(key, 0), self.total)

    def to_json_dict(self) -> dict:
        classes = [{"key": k.hex(), "count": c, "total": self.total}
                   for k, c in sorted(self.counts.items(), key=lambda kv: kv[0].hex())]
        return {"radius": self.radius, "classes": classes}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "LocalDistribution":
        radius = int(obj["radius"])
        classes = obj["classes"]
        if not classes:
            raise GraphError("distribution with no classes")
        totals = {int(c["total"]) for c in classes}
        if len(totals) != 1:
            raise GraphError("inconsistent totals in distribution")
        counts = {bytes.fromhex(c["key"]): int(c["count"]) for c in classes}
        return cls(radius=radius, counts=counts, total=totals.pop())


def local_statistics(g: MultiGraph, r: int) -> LocalDistribution:
    """Exact rooted r-ball class distribution of g.

    Balls are BFS-relabeled before keying, so structurally identical balls
    hit a cache and are canonized once.
    """
    if g.n == 0:
        raise GraphError("local statistics of the empty graph")
    if r < 0:
        raise GraphError("radius must be nonnegative")
    cache = {}
    counts = {}
    for v in range(g.n):
        ball = extract_ball(g, v, r)
        sig = (ball.graph.n, ball.graph.edges.tobytes())
        key = cache.get(sig)
        if key is None:
            key = ball.canonical_key
            cache[sig] = key
        counts[key] = counts.get(key, 0) + 1
    return LocalDistribution(radius=r, counts=counts, total=g.n)


def tv_distance(p: LocalDistribution, q: LocalDistribution) -> Fraction:
    """Total variation distance, exact."""
    if p.radius != q.radius:
        raise GraphError(f"radius mismatch ({p.radius} vs {q.radius})")
    keys = set(p.counts) | set(q.counts)
    return sum((abs(p.weight_of(k) - q.weight_of(k)) for k in keys), Fraction(0)) / 2
