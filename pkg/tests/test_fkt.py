"""Pfaffian, orientation, and matching-sum tests."""

import math
import random

import numpy as np
import pytest

from quoncs.fkt import (WeightedPlanarGraph, enumerate_matchings,
                        graph_from_edge_list, graph_to_edge_list,
                        perfect_matching_sum, pfaffian, pfaffian_orientation,
                        skew_adjacency)


def test_pfaffian_2x2():
    a = np.array([[0, 3 + 1j], [-(3 + 1j), 0]])
    assert pfaffian(a) == pytest.approx(3 + 1j)


def test_pfaffian_4x4_formula():
    rng = random.Random(0)
    for _ in range(10):
        v = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(6)]
        a12, a13, a14, a23, a24, a34 = v
        a = np.zeros((4, 4), dtype=complex)
        for (i, j), x in zip(((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)), v):
            a[i, j] = x
            a[j, i] = -x
        assert pfaffian(a) == pytest.approx(a12 * a34 - a13 * a24 + a14 * a23)


def test_pfaffian_squared_is_det():
    rng = np.random.default_rng(7)
    for n in (2, 4, 6, 8, 12, 20, 40):
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a = m - m.T
        pf = pfaffian(a)
        det = np.linalg.det(a)
        assert abs(pf * pf - det) <= 1e-9 * max(1.0, abs(det))


def test_pfaffian_odd_and_singular():
    assert pfaffian(np.zeros((3, 3))) == 0
    assert pfaffian(np.zeros((4, 4))) == 0


def cycle_graph(k, weight=1.0 + 0j):
    g = WeightedPlanarGraph()
    for _ in range(k):
        g.add_vertex()
    for i in range(k):
        g.add_edge(i, (i + 1) % k, weight)
    return g


def test_single_edge():
    g = WeightedPlanarGraph()
    g.add_vertex()
    g.add_vertex()
    g.add_edge(0, 1, 2.5 + 0.5j)
    assert perfect_matching_sum(g) == pytest.approx(2.5 + 0.5j)
    assert enumerate_matchings(g) == pytest.approx(2.5 + 0.5j)


def test_four_cycle():
    g = cycle_graph(4)
    assert enumerate_matchings(g) == pytest.approx(2.0)
    assert perfect_matching_sum(g) == pytest.approx(2.0)


def test_orientation_odd_clockwise():
    from quoncs.fkt import graph_faces
    g = cycle_graph(4)
    orientation = pfaffian_orientation(g)
    faces = graph_faces(g)
    outer = max(range(len(faces)), key=lambda i: len(faces[i]))
    for i, face in enumerate(faces):
        if i == outer:
            continue
        cw = 0
        for eid, end in face:
            follows = (orientation[eid] == 1) == (end == 0)
            if not follows:
                cw += 1
        assert cw % 2 == 1


def grid_graph(rows, cols):
    g = WeightedPlanarGraph()
    idx = {}
    for r in range(rows):
        for c in range(cols):
            idx[(r, c)] = g.add_vertex()
    # rotation order: E, N, W, S gives a planar rotation for grids
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                g.add_edge(idx[(r, c)], idx[(r, c + 1)])
    for r in range(rows):
        for c in range(cols):
            if r + 1 < rows:
                g.add_edge(idx[(r, c)], idx[(r + 1, c)])
    # rebuild rotations in planar order
    for (r, c), v in idx.items():
        order = []
        for eid, (a, b, _) in enumerate(g.edges):
            pass
        g.rotation[v] = []
    for v in range(g.n):
        g.rotation[v] = []
    def add_rot(v, eid, end):
        g.rotation[v].append((eid, end))
    for eid, (a, b, _) in enumerate(g.edges):
        pass
    # direction-sorted rotation: for each vertex list edges by compass
    coords = {v: rc for rc, v in idx.items()}
    def angle(u, v):
        (r1, c1), (r2, c2) = coords[u], coords[v]
        return math.atan2(r2 - r1, c2 - c1)
    per_vertex = {v: [] for v in range(g.n)}
    for eid, (a, b, _) in enumerate(g.edges):
        per_vertex[a].append((angle(a, b), eid, 0))
        per_vertex[b].append((angle(b, a), eid, 1))
    for v in range(g.n):
        g.rotation[v] = [(eid, end) for _, eid, end in sorted(per_vertex[v])]
    return g


def test_grid_3x4_matches_enumeration():
    g = grid_graph(3, 4)
    want = enumerate_matchings(g)
    got = perfect_matching_sum(g)
    assert got == pytest.approx(want)
    assert want == pytest.approx(11.0)  # classical 3x4 dimer count


def test_random_planar_corpus_fkt_vs_enumeration():
    rng = random.Random(5)
    count = 0
    for trial in range(80):
        rows = rng.choice([2, 3])
        cols = rng.choice([2, 3, 4])
        if rows * cols % 2 == 1 or rows * cols > 16:
            continue
        g = grid_graph(rows, cols)
        # random complex weights
        g.edges = [(u, v, complex(rng.uniform(-1, 1), rng.uniform(-1, 1)))
                   for u, v, _ in g.edges]
        want = enumerate_matchings(g)
        got = perfect_matching_sum(g)
        assert abs(got - want) < 1e-12 * max(1.0, abs(want)), (rows, cols, trial)
        count += 1
    assert count >= 50


def test_edge_list_roundtrip():
    g = grid_graph(2, 3)
    lines = graph_to_edge_list(g)
    g2 = graph_from_edge_list(lines)
    assert g2.n == g.n
    assert g2.edges == g.edges
    assert perfect_matching_sum(g2) == pytest.approx(perfect_matching_sum(g))
