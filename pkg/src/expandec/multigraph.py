"""Loop-free multigraphs on integer vertices, with edge-expansion primitives.

The central object is :class:`MultiGraph`, an immutable multiset of
undirected edges over vertices ``0..n-1``. Parallel edges are allowed and
counted with multiplicity everywhere (degrees, boundaries, the averaging
operator); loops are rejected at construction.

Expansion here is always the raw-count kind: a d-regular graph is a
gamma-expander when every vertex set S with ``|S| <= n/2`` has at least
``gamma * d * |S|`` boundary edges, multiplicities included.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Structurally invalid graph, vertex set, or operation input."""


@dataclass(frozen=True)
class RegularityWitness:
    """Result of a degree check: the relevant degree and whether it is uniform.

    For an irregular graph ``degree`` is the maximum degree and ``valid`` is
    False.
    """

    degree: int
    valid: bool


@dataclass(frozen=True)
class VertexSet:
    """A subset of the vertices of an n-vertex graph.

    ``mass`` is the exact normalized size |S|/n used by the Markov-norm
    identities; raw counts are ``len(vs)``.
    """

    n: int
    members: frozenset

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("vertex count must be nonnegative")
        for v in self.members:
            if not (0 <= int(v) < self.n):
                raise GraphError(f"vertex {v} out of range for n={self.n}")

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> "VertexSet":
        return cls(int(n), frozenset(int(v) for v in members))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        return v in self.members

    @property
    def mass(self) -> Fraction:
        if self.n == 0:
            return Fraction(0)
        return Fraction(len(self.members), self.n)

    def sorted(self) -> list:
        return sorted(self.members)

    def indicator(self) -> np.ndarray:
        f = np.zeros(self.n, dtype=np.float64)
        if self.members:
            f[np.fromiter(self.members, dtype=np.int64)] = 1.0
        return f

    def complement(self) -> "VertexSet":
        return VertexSet(self.n, frozenset(range(self.n)) - self.members)


def _coerce_members(n: int, s) -> frozenset:
    """Accept a VertexSet or any iterable of vertex indices."""
    if isinstance(s, VertexSet):
        if s.n != n:
            raise GraphError(f"vertex set is over n={s.n}, graph has n={n}")
        return s.members
    members = frozenset(int(v) for v in s)
    for v in members:
        if not (0 <= v < n):
            raise GraphError(f"vertex {v} out of range for n={n}")
    return members


class MultiGraph:
    """Immutable loop-free multigraph.

    Edges are stored canonically: each row is (min(u,v), max(u,v)) and rows
    are sorted lexicographically. Two graphs are equal iff they have the
    same vertex count and the same edge multiset. Parallel edges are
    distinct instances and appear as repeated rows.
    """

    __slots__ = ("n", "edges", "__dict__")

    def __init__(self, vertex_count: int, edges: Iterable[Sequence[int]]):
        n = int(vertex_count)
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise GraphError("edges must be pairs of vertex indices")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise GraphError("edge endpoint out of range")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise GraphError("loops are not allowed")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        canon = np.stack([lo, hi], axis=1)
        order = np.lexsort((canon[:, 1], canon[:, 0]))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", canon[order])
        self.edges.setflags(write=False)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.bincount(self.edges.ravel(), minlength=self.n)
        d.setflags(write=False)
        return d

    @cached_property
    def _directed(self):
        """Each undirected instance in both directions: (src, dst) arrays."""
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        return src, dst

    @cached_property
    def _csr(self):
        """Directed instances grouped by source: (indptr, dst, inst) arrays.

        ``inst[j]`` is the undirected edge-instance index behind directed
        slot j, which is what lets the walk samplers attribute weights to
        specific parallel instances.
        """
        src, dst = self._directed
        inst = np.concatenate([np.arange(self.m), np.arange(self.m)])
        order = np.argsort(src, kind="stable")
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, dst[order], inst[order]

    @cached_property
    def _adj_unique(self):
        """Neighbor lists without multiplicity, each sorted, as a list of arrays."""
        indptr, dst, _ = self._csr
        return [np.unique(dst[indptr[v]:indptr[v + 1]]) for v in range(self.n)]

    @cached_property
    def _adj_mult(self):
        """Neighbor (vertex, multiplicity) pair lists, for incremental scans."""
        out = []
        indptr, dst, _ = self._csr
        for v in range(self.n):
            nbrs, counts = np.unique(dst[indptr[v]:indptr[v + 1]], return_counts=True)
            out.append(list(zip(nbrs.tolist(), counts.tolist())))
        return out

    def neighbors(self, v: int) -> np.ndarray:
        if not (0 <= v < self.n):
            raise GraphError(f"vertex {v} out of range")
        return self._adj_unique[v]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return self.n == other.n and self.edges.shape == other.edges.shape \
            and bool(np.array_equal(self.edges, other.edges))

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self):
        return f"MultiGraph(n={self.n}, m={self.m})"

    # -- traversal ---------------------------------------------------------

    def bfs_order(self, root: int, max_depth: int | None = None):
        """Breadth-first order from root with distances.

        Returns (order, dist) where order lists reached vertices in visit
        order (ties broken by vertex index) and dist maps vertex -> distance,
        -1 for unreached. Parallel edges do not affect distances.
        """
        if not (0 <= root < self.n):
            raise GraphError(f"vertex {root} out of range")
        dist = np.full(self.n, -1, dtype=np.int64)
        dist[root] = 0
        order = [root]
        frontier = [root]
        depth = 0
        while frontier and (max_depth is None or depth < max_depth):
            depth += 1
            nxt = []
            for v in frontier:
                for w in self._adj_unique[v]:
                    w = int(w)
                    if dist[w] < 0:
                        dist[w] = depth
                        nxt.append(w)
            nxt.sort()
            order.extend(nxt)
            frontier = nxt
        return order, dist

    def components(self) -> list:
        """Connected components as sorted vertex lists, in order of smallest vertex."""
        seen = np.zeros(self.n, dtype=bool)
        comps = []
        for v in range(self.n):
            if not seen[v]:
                order, _ = self.bfs_order(v)
                for u in order:
                    seen[u] = True
                comps.append(sorted(order))
        return comps

    def induced(self, members: Iterable[int]):
        """Induced sub-multigraph on the given vertices.

        Returns (subgraph, vertices) where vertices is the sorted array of
        original ids and subgraph uses local indices into it.
        """
        verts = np.array(sorted(_coerce_members(self.n, members)), dtype=np.int64)
        local = -np.ones(self.n, dtype=np.int64)
        local[verts] = np.arange(len(verts))
        if self.m:
            keep = (local[self.edges[:, 0]] >= 0) & (local[self.edges[:, 1]] >= 0)
            sub_edges = local[self.edges[keep]]
        else:
            sub_edges = np.zeros((0, 2), dtype=np.int64)
        return MultiGraph(len(verts), sub_edges), verts


# -- spec-level operations -------------------------------------------------

def degree_check(g: MultiGraph) -> RegularityWitness:
    """Report whether g is regular; degree is max degree when it is not."""
    if g.n == 0:
        return RegularityWitness(0, True)
    degs = g.degrees
    dmax = int(degs.max())
    return RegularityWitness(dmax, bool(degs.min() == dmax))


def require_regular(g: MultiGraph) -> int:
    w = degree_check(g)
    if not w.valid:
        raise GraphError(f"graph is not regular (max degree {w.degree})")
    return w.degree


def edge_boundary(g: MultiGraph, s) -> int:
    """Number of edge instances with exactly one endpoint in s."""
    members = _coerce_members(g.n, s)
    if g.m == 0:
        return 0
    mask = np.zeros(g.n, dtype=bool)
    if members:
        mask[np.fromiter(members, dtype=np.int64)] = True
    return int(np.count_nonzero(mask[g.edges[:, 0]] != mask[g.edges[:, 1]]))


def _expansion_scan(g: MultiGraph, exact_limit: int):
    """Exact minimum of boundary(S) / (d |S|) over nonempty S, |S| <= n/2.

    Gray-code enumeration of subsets avoiding vertex 0 covers every
    unordered (S, complement) pair once; the side with <= n/2 vertices is
    scored. Returns (h_star as Fraction, minimizing VertexSet).
    """
    d = require_regular(g)
    n = g.n
    if n > exact_limit:
        raise GraphError(f"graph too large for exact mode (n={n} > {exact_limit})")
    if n <= 1:
        raise GraphError("expansion is undefined with no nonempty set of size <= n/2")
    if d == 0:
        raise GraphError("expansion is undefined for degree-0 graphs")
    adj = g._adj_mult
    in_s = [False] * n
    bd = 0
    size = 0
    best_num = None   # boundary count of current best
    best_den = None   # |T| of current best
    best_set = None
    total = 1 << (n - 1)
    for i in range(1, total):
        # reflected Gray code: step i toggles the lowest set bit of i;
        # bit j encodes vertex j+1 (vertex 0 stays outside S)
        v = (i & -i).bit_length()
        entering = not in_s[v]
        if entering:
            size += 1
        else:
            size -= 1
        for (w, mult) in adj[v]:
            if in_s[w]:
                bd -= mult if entering else -mult
            else:
                bd += mult if entering else -mult
        in_s[v] = entering
        t_size = size if 2 * size <= n else n - size
        # ratio = bd / (d * t_size); compare as integers
        if best_num is None or bd * best_den < best_num * t_size:
            best_num = bd
            best_den = t_size
            if 2 * size <= n:
                best_set = [u for u in range(1, n) if in_s[u]]
            else:
                best_set = [0] + [u for u in range(1, n) if not in_s[u]]
    h = Fraction(best_num, d * best_den)
    return h, VertexSet.of(n, best_set)


def edge_expansion_constant(g: MultiGraph, exact_limit: int = 20) -> Fraction:
    """Exact edge-expansion constant min_S boundary(S)/(d |S|), |S| <= n/2."""
    h, _ = _expansion_scan(g, exact_limit)
    return h


def is_gamma_expander(g: MultiGraph, gamma: float, exact_limit: int = 20):
    """Exact check that every S with |S| <= n/2 has boundary >= gamma * d * |S|.

    Returns (ok, witness) where witness is the set minimizing the expansion
    ratio (a violating set whenever ok is False).
    """
    if gamma < 0:
        raise GraphError("gamma must be nonnegative")
    if g.n <= 1:
        # no nonempty subset of size <= n/2 exists; vacuously an expander
        require_regular(g)
        return True, VertexSet.of(g.n, [])
    h, worst = _expansion_scan(g, exact_limit)
    return bool(h >= gamma), worst


def edit_distance(g: MultiGraph, h: MultiGraph) -> float:
    """Size of the edge-multiset symmetric difference divided by vertex count."""
    if g.n != h.n:
        raise GraphError(f"vertex counts differ ({g.n} vs {h.n})")
    if g.n == 0:
        raise GraphError("edit distance is undefined on empty vertex sets")
    from collections import Counter
    cg = Counter(map(tuple, g.edges.tolist()))
    ch = Counter(map(tuple, h.edges.tolist()))
    diff = 0
    for e in set(cg) | set(ch):
        diff += abs(cg.get(e, 0) - ch.get(e, 0))
    return diff / g.n
