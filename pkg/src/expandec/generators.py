"""Deterministic graph families and seeded random regular graphs."""
from __future__ import annotations

import numpy as np

from .multigraph import GraphError, MultiGraph
from .rng import TAG_GENERATE, stream


def cycle(n: int) -> MultiGraph:
    """Cycle on n >= 2 vertices. C_2 is the doubled edge (2-regular multigraph)."""
    if n < 2:
        raise GraphError("cycle needs at least 2 vertices")
    return circulant(n, [1])


def complete(n: int) -> MultiGraph:
    """Complete simple graph K_n."""
    if n < 2:
        raise GraphError("complete graph needs at least 2 vertices")
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return MultiGraph(n, edges)


def circulant(n: int, offsets) -> MultiGraph:
    """Circulant graph: i is joined to i +- o (mod n) for each offset o.

    Offsets must be distinct integers in 1..n/2. An offset o < n/2
    contributes edge instances {i, i+o} for every i (degree 2 per offset);
    the half offset o = n/2 pairs vertices once (degree 1), so for example
    circulant(4, {1, 2}) is K_4. Exception: for n = 2 the single offset 1
    is self-paired and contributes the doubled edge, keeping the graph
    2-regular (the 2-cycle).
    """
    if n < 2:
        raise GraphError("circulant needs at least 2 vertices")
    offs = sorted(int(o) for o in offsets)
    if not offs:
        raise GraphError("circulant needs at least one offset")
    if len(set(offs)) != len(offs):
        raise GraphError("offsets must be distinct")
    edges = []
    for o in offs:
        if not (1 <= o <= n // 2) or 2 * o > n:
            raise GraphError(f"offset {o} outside 1..n/2 for n={n}")
        if 2 * o == n and n > 2:
            for i in range(o):
                edges.append((i, i + o))
        else:
            for i in range(n):
                edges.append((i, (i + o) % n))
    return MultiGraph(n, edges)


def petersen() -> MultiGraph:
    """The Petersen graph: outer 5-cycle, inner pentagram, spokes."""
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return MultiGraph(10, edges)


def random_regular(n: int, d: int, seed: int = 0, max_tries: int = 1000) -> MultiGraph:
    """Simple d-regular graph from the pairing model with rejection.

    Random stub pairs are drawn one at a time; a pair forming a loop or a
    parallel edge is rejected and redrawn. When no legal pair remains the
    whole pairing restarts, up to max_tries restarts. (Rejecting entire
    pairings instead would need ~exp(d^2/4) tries and is hopeless already
    at d = 6.)
    """
    if n <= 0 or d < 0:
        raise GraphError("need n > 0 and d >= 0")
    if d >= n:
        raise GraphError("simple d-regular graph needs d < n")
    if (n * d) % 2:
        raise GraphError("n*d must be even")
    if d == 0:
        return MultiGraph(n, [])
    rng = stream(seed, TAG_GENERATE, n, d)
    for _ in range(max_tries):
        stubs = list(rng.permutation(np.repeat(np.arange(n, dtype=np.int64), d)))
        edges = []
        taken = set()
        stuck = False
        while stubs:
            placed = False
            # bounded random probing, then an exhaustive scan before giving up
            for _ in range(40):
                i = int(rng.integers(len(stubs)))
                j = int(rng.integers(len(stubs)))
                if i == j:
                    continue
                u, v = int(stubs[i]), int(stubs[j])
                if u == v or (min(u, v), max(u, v)) in taken:
                    continue
                placed = True
                break
            if not placed:
                found = None
                for a in range(len(stubs)):
                    for b in range(a + 1, len(stubs)):
                        u, v = int(stubs[a]), int(stubs[b])
                        if u != v and (min(u, v), max(u, v)) not in taken:
                            found = (a, b)
                            break
                    if found:
                        break
                if found is None:
                    stuck = True
                    break
                i, j = found
                u, v = int(stubs[i]), int(stubs[j])
            edges.append((u, v))
            taken.add((min(u, v), max(u, v)))
            for idx in sorted((i, j), reverse=True):
                stubs[idx] = stubs[-1]
                stubs.pop()
        if not stuck:
            return MultiGraph(n, edges)
    raise GraphError(f"pairing model failed to produce a simple graph in {max_tries} tries")


def generate(kind: str, n: int, *, d: int | None = None, offsets=None,
             seed: int = 0) -> MultiGraph:
    """Dispatch by family name; the command-line `gen` subcommand calls this."""
    if kind == "cycle":
        return cycle(n)
    if kind == "complete":
        return complete(n)
    if kind == "circulant":
        if offsets is None:
            raise GraphError("circulant requires offsets")
        return circulant(n, offsets)
    if kind == "random_regular":
        if d is None:
            raise GraphError("random_regular requires d")
        return random_regular(n, d, seed=seed)
    if kind == "petersen":
        if n not in (None, 10):
            raise GraphError("petersen is a fixed 10-vertex graph")
        return petersen()
    raise GraphError(f"unknown graph kind {kind!r}")
