import pytest

from expandec.edgelist import EdgeListError, read_edge_list, write_edge_list
from expandec.generators import cycle, petersen, random_regular
from expandec.multigraph import MultiGraph


def test_round_trip_regular(tmp_path):
    g = petersen()
    p = tmp_path / "g.el"
    write_edge_list(g, p)
    text = p.read_text()
    assert text.splitlines()[0] == "10 15 3"
    assert read_edge_list(p) == g


def test_round_trip_irregular_degree_flag(tmp_path):
    g = MultiGraph(3, [(0, 1)])
    p = tmp_path / "g.el"
    write_edge_list(g, p)
    assert p.read_text().splitlines()[0] == "3 1 -1"
    assert read_edge_list(p) == g


def test_round_trip_parallel_edges(tmp_path):
    g = MultiGraph(2, [(0, 1), (0, 1)])
    p = tmp_path / "g.el"
    write_edge_list(g, p)
    assert read_edge_list(p) == g
    assert p.read_text() == "2 2 2\n0 1\n0 1\n"


def test_reject_wrong_edge_count(tmp_path):
    p = tmp_path / "bad.el"
    p.write_text("3 2 -1\n0 1\n")
    with pytest.raises(EdgeListError):
        read_edge_list(p)


def test_reject_loop(tmp_path):
    p = tmp_path / "bad.el"
    p.write_text("3 1 -1\n1 1\n")
    with pytest.raises(EdgeListError):
        read_edge_list(p)


def test_reject_out_of_range(tmp_path):
    p = tmp_path / "bad.el"
    p.write_text("3 1 -1\n0 3\n")
    with pytest.raises(EdgeListError):
        read_edge_list(p)


def test_reject_degree_mismatch(tmp_path):
    p = tmp_path / "bad.el"
    p.write_text("3 2 2\n0 1\n1 2\n")
    with pytest.raises(EdgeListError):
        read_edge_list(p)


def test_reject_garbage_fields(tmp_path):
    p = tmp_path / "bad.el"
    p.write_text("3 one -1\n")
    with pytest.raises(EdgeListError):
        read_edge_list(p)
    p.write_text("3 1 -1\n0 1 2\n")
    with pytest.raises(EdgeListError):
        read_edge_list(p)


def test_reject_empty(tmp_path):
    p = tmp_path / "bad.el"
    p.write_text("")
    with pytest.raises(EdgeListError):
        read_edge_list(p)


def test_trailing_newline_tolerated(tmp_path):
    p = tmp_path / "g.el"
    p.write_text("3 2 -1\n0 1\n1 2\n\n")
    g = read_edge_list(p)
    assert g.m == 2


def test_large_round_trip_deterministic_bytes(tmp_path):
    g = random_regular(60, 4, seed=9)
    p1 = tmp_path / "a.el"
    p2 = tmp_path / "b.el"
    write_edge_list(g, p1)
    write_edge_list(read_edge_list(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()
