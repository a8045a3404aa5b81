"""Planar graphs, Pfaffian orientation, and the Pfaffian.

The graph side of the matchgate route: weighted planar graphs with a
dart-based rotation system, the classical face-by-face Pfaffian
orientation, an O(n^3) skew-symmetric Pfaffian, and a brute-force
matching enumerator used as the small-graph oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .scalars import Scalar

# A dart is (edge id, end) with end 0 at edges[eid][0], end 1 at edges[eid][1].


@dataclass
class WeightedPlanarGraph:
    """Vertices 0..n-1, weighted edges, counterclockwise dart rotations."""

    n: int = 0
    edges: list[tuple[int, int, complex]] = field(default_factory=list)
    rotation: dict[int, list[tuple[int, int]]] = field(default_factory=dict)
    global_coeff: Scalar = field(default_factory=Scalar.one)

    def add_vertex(self) -> int:
        v = self.n
        self.n += 1
        self.rotation[v] = []
        return v

    def add_edge(self, u: int, v: int, w: complex = 1.0 + 0j) -> int:
        eid = len(self.edges)
        self.edges.append((u, v, w))
        self.rotation[u].append((eid, 0))
        self.rotation[v].append((eid, 1))
        return eid

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def endpoint(self, eid: int, end: int) -> int:
        e = self.edges[eid]
        return e[end]


def graph_to_edge_list(g: WeightedPlanarGraph) -> list[str]:
    """Line-based export: `edge v u w_re w_im` plus rotation lists."""
    out = [f"vertices {g.n}"]
    for u, v, w in g.edges:
        out.append(f"edge {u} {v} {w.real!r} {w.imag!r}")
    for v in range(g.n):
        out.append("rot " + " ".join(f"{e}:{s}" for e, s in g.rotation[v]))
    return out


def graph_from_edge_list(lines: Iterable[str]) -> WeightedPlanarGraph:
    g = WeightedPlanarGraph()
    rots: list[list[tuple[int, int]]] = []
    for line in lines:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "vertices":
            for _ in range(int(parts[1])):
                g.add_vertex()
                g.rotation[g.n - 1] = []
        elif parts[0] == "edge":
            u, v = int(parts[1]), int(parts[2])
            w = complex(float(parts[3]), float(parts[4]))
            g.edges.append((u, v, w))
        elif parts[0] == "rot":
            rots.append([(int(x.split(":")[0]), int(x.split(":")[1])) for x in parts[1:]])
    if rots:
        for v, rot in enumerate(rots):
            g.rotation[v] = rot
    else:
        for eid, (u, v, _) in enumerate(g.edges):
            g.rotation.setdefault(u, []).append((eid, 0))
            g.rotation.setdefault(v, []).append((eid, 1))
    return g


def pfaffian(a: np.ndarray, tol: float = 1e-300) -> complex:
    """Pfaffian of a complex skew-symmetric matrix by skew elimination.

    Gaussian elimination on 2x2 pivots with partial pivoting and sign
    tracking; odd dimension or structural singularity gives 0.  O(n^3).
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if n % 2 == 1:
        return 0.0 + 0.0j
    if n == 0:
        return 1.0 + 0.0j
    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        col = np.abs(a[k, k + 1:])
        j = int(np.argmax(col)) + k + 1
        if abs(a[k, j]) <= tol:
            return 0.0 + 0.0j
        if j != k + 1:
            a[[k + 1, j], :] = a[[j, k + 1], :]
            a[:, [k + 1, j]] = a[:, [j, k + 1]]
            pf = -pf
        piv = a[k, k + 1]
        pf *= piv
        if k + 2 < n:
            w = a[k, k + 2:] / piv
            u = a[k + 1, k + 2:]
            a[k + 2:, k + 2:] -= np.outer(w, u) - np.outer(u, w)
    return pf


def skew_adjacency(g: WeightedPlanarGraph, orientation: list[int]) -> np.ndarray:
    """A[u][v] = +-w(uv): +w from tail to head per the orientation bit."""
    a = np.zeros((g.n, g.n), dtype=complex)
    for eid, (u, v, w) in enumerate(g.edges):
        if u == v:
            continue
        s = 1.0 if orientation[eid] else -1.0
        a[u, v] += s * w
        a[v, u] -= s * w
    return a


def graph_faces(g: WeightedPlanarGraph) -> list[list[tuple[int, int]]]:
    """Faces as cyclic lists of leaving darts, via phi(d) = next(twin(d))."""
    pos: dict[tuple[int, int], tuple[int, int]] = {}
    for v, rot in g.rotation.items():
        for i, dart in enumerate(rot):
            pos[dart] = (v, i)

    def succ(dart: tuple[int, int]) -> tuple[int, int]:
        eid, end = dart
        twin = (eid, 1 - end)
        v, i = pos[twin]
        rot = g.rotation[v]
        return rot[(i + 1) % len(rot)]

    faces = []
    visited: set[tuple[int, int]] = set()
    for start in pos:
        if start in visited:
            continue
        face = []
        x = start
        while x not in visited:
            visited.add(x)
            face.append(x)
            x = succ(x)
        faces.append(face)
    return faces


def pfaffian_orientation(g: WeightedPlanarGraph) -> list[int]:
    """Orientation bits per edge: every bounded face has an odd number of
    edges traversed clockwise (i.e. against the face walk).

    Tree edges are oriented arbitrarily; bounded faces are peeled so each
    fixes its one undetermined edge.  The outer face is chosen as a
    longest face.
    """
    m = len(g.edges)
    if m == 0:
        return []
    faces = graph_faces(g)
    outer_idx = max(range(len(faces)), key=lambda i: len(faces[i]))

    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    orientation: list[Optional[int]] = [None] * m
    for eid, (u, v, _) in enumerate(g.edges):
        if u == v:
            orientation[eid] = 1
            continue
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            orientation[eid] = 1

    pending = {i for i in range(len(faces)) if i != outer_idx}
    progress = True
    while pending and progress:
        progress = False
        for i in list(pending):
            face = faces[i]
            free = [(eid, end) for eid, end in face if orientation[eid] is None]
            if len(free) > 1:
                continue
            # "odd clockwise": count edges whose stored direction OPPOSES
            # the face traversal; leaving dart (eid, 0) follows the edge.
            cw = 0
            for eid, end in face:
                if orientation[eid] is None:
                    continue
                follows = (orientation[eid] == 1) == (end == 0)
                if not follows:
                    cw += 1
            if free:
                eid, end = free[0]
                make_cw = (cw % 2 == 0)
                # traversal via dart end: follows iff orientation==1 and
                # end==0, or orientation==0 and end==1
                if make_cw:
                    orientation[eid] = 0 if end == 0 else 1
                else:
                    orientation[eid] = 1 if end == 0 else 0
            pending.discard(i)
            progress = True
    for eid in range(m):
        if orientation[eid] is None:
            orientation[eid] = 1
    return orientation  # type: ignore[return-value]


def perfect_matching_sum(g: WeightedPlanarGraph) -> complex:
    """FKT: the weighted matching sum as a Pfaffian (sign included).

    The Pfaffian under a Pfaffian orientation equals the matching sum up
    to one global sign, fixed by comparing against the dominant matching
    ordering; we instead normalize empirically: the all-positive-weight
    matching sum must be positive, so the sign is fixed on a reference
    weighting of the same graph.
    """
    if g.n == 0:
        return 1.0 + 0.0j
    if g.n % 2 == 1:
        return 0.0 + 0.0j
    orientation = pfaffian_orientation(g)
    a = skew_adjacency(g, orientation)
    pf = pfaffian(a)
    if pf == 0:
        return 0.0 + 0.0j
    # Global sign: rerun with all weights 1 on edges with nonzero weight;
    # that Pfaffian's sign is the orientation's sign for every weighting.
    ones = WeightedPlanarGraph(n=g.n, edges=[(u, v, 1.0 + 0j) for u, v, _ in g.edges],
                               rotation=g.rotation)
    a1 = skew_adjacency(ones, orientation)
    pf1 = pfaffian(a1)
    if pf1 == 0:
        # no all-one matching count information; fall back to +
        sign = 1.0
    else:
        sign = 1.0 if pf1.real > 0 else -1.0
    return sign * pf


def enumerate_matchings(g: WeightedPlanarGraph, max_vertices: int = 16) -> complex:
    """Brute-force weighted perfect matching sum (oracle, <= 16 vertices)."""
    if g.n > max_vertices:
        raise ValueError(f"{g.n} vertices exceed the enumeration cap {max_vertices}")
    if g.n % 2 == 1:
        return 0.0 + 0.0j
    adj: dict[int, list[tuple[int, complex]]] = {v: [] for v in range(g.n)}
    for u, v, w in g.edges:
        if u == v:
            continue
        adj[u].append((v, w))
        adj[v].append((u, w))

    def rec(unmatched: frozenset) -> complex:
        if not unmatched:
            return 1.0 + 0.0j
        v = min(unmatched)
        total = 0.0 + 0.0j
        for u, w in adj[v]:
            if u in unmatched and u != v:
                total += w * rec(unmatched - {v, u})
        return total

    return rec(frozenset(range(g.n)))
