"""Reference balls of standard Cayley graphs.

Each oracle produces the rooted r-ball around the identity of a fixed
group/generating-set pair. Cayley graphs are vertex transitive, so a graph
locally modeled on the group should have every vertex's ball in the single
class the oracle reports; ``cayley_defect`` measures the failing fraction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .localstats import RootedBall, local_statistics
from .multigraph import GraphError, MultiGraph

SL3Z_MAX_RADIUS = 4


def _ball_from_group(root_elem, gens, r: int) -> RootedBall:
    """BFS ball in a group: elements as hashable keys, one edge per generator slot.

    gens is a list of functions elem -> elem. Each unordered application
    {x, x*s} inside the ball contributes edge instances with multiplicity
    equal to the number of generator slots realizing it (inverse pairs both
    count), divided by two for the two directions of the same slot pair.
    """
    order = [root_elem]
    index = {root_elem: 0}
    dist = {root_elem: 0}
    frontier = [root_elem]
    depth = 0
    while frontier and depth < r:
        depth += 1
        nxt = []
        for x in frontier:
            for gen in gens:
                y = gen(x)
                if y not in index:
                    index[y] = len(order)
                    order.append(y)
                    dist[y] = depth
                    nxt.append(y)
        frontier = nxt
    # directed slot count between ball elements; each undirected instance is
    # seen once from each side, so halve at the end
    directed = {}
    for x in order:
        for gen in gens:
            y = gen(x)
            if y in index:
                a, b = index[x], index[y]
                if a == b:
                    raise GraphError("generator fixes an element (loop)")
                directed[(a, b)] = directed.get((a, b), 0) + 1
    edges = []
    for (a, b), cnt in directed.items():
        if a < b:
            back = directed.get((b, a), 0)
            if back != cnt:
                raise GraphError("generator set is not symmetric")
            edges.extend([(a, b)] * cnt)
    g = MultiGraph(len(order), edges)
    return RootedBall(radius=r, graph=g, root=0, vertices=tuple(range(len(order))))


@dataclass(frozen=True)
class CayleyOracle:
    """Named group with a fixed symmetric generating set."""

    group_id: str
    degree: int
    _build: object

    def ball(self, r: int) -> RootedBall:
        if r < 0:
            raise GraphError("radius must be nonnegative")
        return self._build(r)


def grid_oracle(k: int) -> CayleyOracle:
    """Z^k with the 2k unit steps."""
    if k < 1:
        raise GraphError("dimension must be >= 1")

    def step(i, sign):
        def gen(x):
            y = list(x)
            y[i] += sign
            return tuple(y)
        return gen

    gens = [step(i, s) for i in range(k) for s in (1, -1)]

    def build(r):
        return _ball_from_group(tuple([0] * k), gens, r)

    return CayleyOracle(group_id=f"grid_Z{k}", degree=2 * k, _build=build)


def free_group_oracle(k: int) -> CayleyOracle:
    """Free group of rank k with the standard generators: the 2k-regular tree."""
    if k < 1:
        raise GraphError("rank must be >= 1")

    def step(letter):
        def gen(word):
            if word and word[-1] == -letter:
                return word[:-1]
            return word + (letter,)
        return gen

    gens = [step(s * (i + 1)) for i in range(k) for s in (1, -1)]

    def build(r):
        return _ball_from_group(tuple(), gens, r)

    return CayleyOracle(group_id=f"free_{k}", degree=2 * k, _build=build)


def _transvections():
    """The 12 elementary matrices I +- E_ij of SL(3, Z), as functions."""
    gens = []
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            for sign in (1, -1):
                def gen(x, i=i, j=j, sign=sign):
                    m = [list(x[0:3]), list(x[3:6]), list(x[6:9])]
                    # left-multiply by I + sign*E_ij: row i += sign * row j
                    for col in range(3):
                        m[i][col] += sign * m[j][col]
                    return tuple(m[0] + m[1] + m[2])
                gens.append(gen)
    return gens


def sl3z_ball(r: int) -> RootedBall:
    """Ball of SL(3, Z) with the 12 elementary transvections, r <= 4."""
    if r < 0:
        raise GraphError("radius must be nonnegative")
    if r > SL3Z_MAX_RADIUS:
        raise GraphError(f"sl3z ball radius capped at {SL3Z_MAX_RADIUS}")
    ident = (1, 0, 0, 0, 1, 0, 0, 0, 1)
    return _ball_from_group(ident, _transvections(), r)


def sl3z_oracle() -> CayleyOracle:
    return CayleyOracle(group_id="sl3z", degree=12, _build=sl3z_ball)


ORACLES = {
    "grid_Z1": lambda: grid_oracle(1),
    "grid_Z2": lambda: grid_oracle(2),
    "grid_Z3": lambda: grid_oracle(3),
    "free_2": lambda: free_group_oracle(2),
    "free_3": lambda: free_group_oracle(3),
    "sl3z": sl3z_oracle,
}


def oracle_by_name(name: str) -> CayleyOracle:
    try:
        return ORACLES[name]()
    except KeyError:
        raise GraphError(f"unknown oracle {name!r}; choices: {sorted(ORACLES)}") from None


def cayley_defect(g: MultiGraph, oracle: CayleyOracle, r: int) -> Fraction:
    """Fraction of vertices whose rooted r-ball differs from the oracle's."""
    ref_key = oracle.ball(r).canonical_key
    stats = local_statistics(g, r)
    return 1 - stats.weight_of(ref_key)
