import numpy as np
import pytest

from expandec.generators import (
    circulant,
    complete,
    cycle,
    generate,
    petersen,
    random_regular,
)
from expandec.multigraph import GraphError, degree_check, edge_boundary


def test_cycle_structure():
    g = cycle(5)
    assert g.n == 5 and g.m == 5
    assert degree_check(g).degree == 2
    assert g.components() == [[0, 1, 2, 3, 4]]


def test_two_cycle_is_doubled_edge():
    g = cycle(2)
    assert g.m == 2 and degree_check(g) .valid
    assert g.edges.tolist() == [[0, 1], [0, 1]]


def test_complete_graph():
    g = complete(6)
    assert g.m == 15
    w = degree_check(g)
    assert w.valid and w.degree == 5


def test_circulant_degree_and_example():
    g = circulant(10, {1, 2})
    w = degree_check(g)
    assert w.valid and w.degree == 4
    assert g.m == 20


def test_circulant_half_offset_single_instance():
    # offset n/2 pairs antipodes once: circulant(4, {1,2}) is K4
    g = circulant(4, {1, 2})
    assert g == complete(4)


def test_circulant_small_n_parallel():
    g = circulant(4, {2})
    # two antipodal pairs, one instance each: 1-regular matching
    assert g.m == 2 and degree_check(g).degree == 1


def test_circulant_rejects_bad_offsets():
    with pytest.raises(GraphError):
        circulant(10, {0})
    with pytest.raises(GraphError):
        circulant(10, {6})
    with pytest.raises(GraphError):
        circulant(10, [])


def test_petersen_is_3_regular_girth5():
    g = petersen()
    assert g.n == 10 and g.m == 15
    assert degree_check(g).degree == 3
    # no two adjacent vertices share a neighbor (girth 5)
    for u, v in g.edges.tolist():
        common = set(g.neighbors(u).tolist()) & set(g.neighbors(v).tolist())
        assert not common


def test_random_regular_is_simple_and_regular():
    for (n, d) in [(12, 3), (20, 4), (15, 6)]:
        g = random_regular(n, d, seed=11)
        w = degree_check(g)
        assert w.valid and w.degree == d
        # simple: no repeated canonical rows
        rows = set(map(tuple, g.edges.tolist()))
        assert len(rows) == g.m


def test_random_regular_deterministic_per_seed():
    a = random_regular(30, 3, seed=5)
    b = random_regular(30, 3, seed=5)
    c = random_regular(30, 3, seed=6)
    assert a == b
    assert a != c


def test_random_regular_parity_validation():
    with pytest.raises(GraphError):
        random_regular(5, 3, seed=0)
    with pytest.raises(GraphError):
        random_regular(4, 4, seed=0)


def test_generate_dispatch():
    assert generate("cycle", 7) == cycle(7)
    assert generate("complete", 5) == complete(5)
    assert generate("circulant", 9, offsets=[1, 2]) == circulant(9, [1, 2])
    assert generate("random_regular", 10, d=3, seed=3) == random_regular(10, 3, seed=3)
    assert generate("petersen", 10) == petersen()
    with pytest.raises(GraphError):
        generate("moebius", 8)


def test_connected_random_regular_usually():
    # d >= 3 random regular graphs at this scale are connected with high
    # probability; a fixed seed keeps this deterministic
    g = random_regular(50, 3, seed=1)
    assert len(g.components()) == 1
    assert edge_boundary(g, range(25)) > 0
