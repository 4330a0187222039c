import itertools
from fractions import Fraction

import numpy as np
import pytest

from expandec.generators import complete, cycle, circulant, petersen, random_regular
from expandec.multigraph import (
    GraphError,
    MultiGraph,
    VertexSet,
    degree_check,
    edge_boundary,
    edge_expansion_constant,
    edit_distance,
    is_gamma_expander,
)


def brute_expansion(g):
    """Independent oracle: exact min boundary/(d*|S|) by subset enumeration."""
    d = int(g.degrees[0])
    edges = g.edges.tolist()
    best = None
    for size in range(1, g.n // 2 + 1):
        for S in itertools.combinations(range(g.n), size):
            Sset = set(S)
            bd = sum(1 for u, v in edges if (u in Sset) != (v in Sset))
            h = Fraction(bd, d * size)
            if best is None or h < best:
                best = h
    return best


def test_construction_canonicalizes():
    g = MultiGraph(4, [(3, 1), (0, 2), (1, 3), (2, 0)])
    assert g.n == 4 and g.m == 4
    assert g.edges.tolist() == [[0, 2], [0, 2], [1, 3], [1, 3]]


def test_loops_rejected():
    with pytest.raises(GraphError):
        MultiGraph(3, [(0, 0)])


def test_out_of_range_rejected():
    with pytest.raises(GraphError):
        MultiGraph(3, [(0, 3)])
    with pytest.raises(GraphError):
        edge_boundary(cycle(4), [5])


def test_equality_is_multiset_equality():
    a = MultiGraph(3, [(0, 1), (1, 2), (0, 1)])
    b = MultiGraph(3, [(1, 0), (0, 1), (2, 1)])
    c = MultiGraph(3, [(0, 1), (1, 2)])
    assert a == b
    assert a != c


def test_degree_check_regular_and_not():
    w = degree_check(cycle(5))
    assert w.valid and w.degree == 2
    irr = MultiGraph(3, [(0, 1)])
    w2 = degree_check(irr)
    assert not w2.valid and w2.degree == 1


def test_parallel_edges_count_in_degrees():
    g = MultiGraph(2, [(0, 1), (0, 1)])
    assert degree_check(g) == degree_check(cycle(4)).__class__(2, True)
    assert g.degrees.tolist() == [2, 2]


def test_edge_boundary_counts_multiplicity():
    g = MultiGraph(4, [(0, 1), (0, 1), (1, 2), (2, 3)])
    assert edge_boundary(g, [0]) == 2
    assert edge_boundary(g, [0, 1]) == 1
    assert edge_boundary(g, []) == 0
    assert edge_boundary(g, range(4)) == 0


def test_edge_boundary_symmetric_under_complement():
    g = petersen()
    rng = np.random.default_rng(7)
    for _ in range(20):
        s = set(rng.choice(10, size=rng.integers(1, 9), replace=False).tolist())
        comp = set(range(10)) - s
        assert edge_boundary(g, s) == edge_boundary(g, comp)


def test_vertex_set_mass_exact():
    vs = VertexSet.of(6, [0, 3])
    assert vs.mass == Fraction(1, 3)
    assert len(vs.complement()) == 4


def test_petersen_expansion_constant_matches_brute_force():
    g = petersen()
    # oracle: enumeration over all subsets up to complement, frozen value 1/3
    assert brute_expansion(g) == Fraction(1, 3)
    assert edge_expansion_constant(g) == Fraction(1, 3)
    ok, worst = is_gamma_expander(g, 1.0 / 3.0)
    assert ok
    bd = edge_boundary(g, worst)
    assert Fraction(bd, 3 * len(worst)) == Fraction(1, 3)
    ok2, witness = is_gamma_expander(g, 0.34)
    assert not ok2
    assert Fraction(edge_boundary(g, witness), 3 * len(witness)) < Fraction(34, 100)


def test_expansion_scan_agrees_with_brute_force_randomly():
    for seed in range(6):
        g = random_regular(10, 3, seed=seed)
        assert edge_expansion_constant(g) == brute_expansion(g)


def test_gamma_zero_always_true_connected():
    for g in (cycle(5), complete(6), petersen()):
        ok, _ = is_gamma_expander(g, 0.0)
        assert ok


def test_disconnected_fails_any_positive_gamma():
    tri2 = MultiGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    ok, witness = is_gamma_expander(tri2, 1e-9)
    assert not ok
    assert edge_boundary(tri2, witness) == 0


def test_exact_mode_size_gate():
    g = cycle(30)
    with pytest.raises(GraphError):
        is_gamma_expander(g, 0.1)
    # explicit larger limit works
    ok, _ = is_gamma_expander(cycle(21), 0.01, exact_limit=21)
    assert ok


def test_c8_expansion_constant():
    # bisecting arc of C8: boundary 2, d=2, |S|=4 -> 2/(2*4) = 1/4
    assert edge_expansion_constant(cycle(8)) == Fraction(1, 4)


def test_k4_expansion_constant():
    # |S|=2 halves: boundary 4, d=3 -> 4/6 = 2/3
    assert edge_expansion_constant(complete(4)) == Fraction(2, 3)


def test_edit_distance_c6_vs_two_triangles():
    # symmetric difference {23, 05, 02, 35} has size 4 -> 4/6
    c6 = cycle(6)
    tri2 = MultiGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert edit_distance(c6, tri2) == pytest.approx(4 / 6, abs=1e-15)


def test_edit_distance_counts_parallel_multiplicity():
    a = MultiGraph(2, [(0, 1), (0, 1)])
    b = MultiGraph(2, [(0, 1)])
    assert edit_distance(a, b) == pytest.approx(0.5)
    assert edit_distance(a, a) == 0.0


def test_edit_distance_requires_same_vertex_count():
    with pytest.raises(GraphError):
        edit_distance(cycle(4), cycle(5))


def test_induced_subgraph_keeps_multiplicity():
    g = MultiGraph(5, [(0, 1), (0, 1), (1, 2), (3, 4)])
    sub, verts = g.induced([0, 1, 2])
    assert verts.tolist() == [0, 1, 2]
    assert sub.edges.tolist() == [[0, 1], [0, 1], [1, 2]]


def test_components_and_bfs():
    g = MultiGraph(6, [(0, 1), (1, 2), (3, 4)])
    comps = g.components()
    assert comps == [[0, 1, 2], [3, 4], [5]]
    order, dist = cycle(6).bfs_order(0)
    assert order[0] == 0 and dist[3] == 3
    _, dist2 = cycle(6).bfs_order(0, max_depth=1)
    assert dist2[2] == -1 and dist2[1] == 0 + 1
