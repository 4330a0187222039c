"""Plain-text edge list files.

Format: UTF-8, LF line endings. The first line is ``n m d`` where n is the
vertex count, m the number of edge instances, and d the common degree, or
-1 when the graph is irregular. Each of the following m lines is ``u v``
with 0 <= u, v < n and u != v. Parallel edges appear as repeated lines.
Files are written in the graph's canonical edge order, so writing and
re-reading reproduces the same graph and the same instance order.
"""
from __future__ import annotations

from .multigraph import GraphError, MultiGraph, degree_check


class EdgeListError(GraphError):
    """Malformed edge-list or weighting file."""


def _ints(line: str, count: int, path, lineno: int):
    parts = line.split()
    if len(parts) != count:
        raise EdgeListError(f"{path}:{lineno}: expected {count} fields, got {len(parts)}")
    try:
        return [int(p) for p in parts]
    except ValueError as exc:
        raise EdgeListError(f"{path}:{lineno}: non-integer field ({exc})") from None


def read_edge_list(path) -> MultiGraph:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise EdgeListError(f"{path}: empty file")
    n, m, d = _ints(lines[0], 3, path, 1)
    if n < 0 or m < 0:
        raise EdgeListError(f"{path}:1: negative vertex or edge count")
    body = [ln for ln in lines[1:]]
    # trailing blank lines are tolerated, interior ones are not
    while body and body[-1].strip() == "":
        body.pop()
    if len(body) != m:
        raise EdgeListError(f"{path}: header says m={m} but found {len(body)} edge lines")
    edges = []
    for i, ln in enumerate(body, start=2):
        u, v = _ints(ln, 2, path, i)
        edges.append((u, v))
    try:
        g = MultiGraph(n, edges)
    except GraphError as exc:
        raise EdgeListError(f"{path}: {exc}") from None
    if d >= 0:
        w = degree_check(g)
        if not (w.valid and w.degree == d):
            raise EdgeListError(f"{path}: declared degree {d} but graph is "
                                f"{'irregular' if not w.valid else f'{w.degree}-regular'}")
    return g


def write_edge_list(g: MultiGraph, path) -> None:
    w = degree_check(g)
    d = w.degree if w.valid else -1
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{g.n} {g.m} {d}\n")
        for u, v in g.edges.tolist():
            fh.write(f"{u} {v}\n")
