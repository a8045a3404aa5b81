"""Evaluate hole-free diagrams through planar perfect matchings.

The pipeline: normalize the diagram (braids and charge rungs become
crossings), two-color the faces, read each fragment as an interaction
model on its black faces (the crossing's two smoothings either merge or
separate its black corners), expand into an even-subgraph sum, and
realize that sum as perfect matchings of a planar city graph evaluated
by the FKT Pfaffian.

Exact bookkeeping: with u = coefficient of the black-merging smoothing
and v of the separating one, a fragment with V_B black faces satisfies

    Z = sqrt2^{V_B} * (prod_e a_e) * EvenSubgraphSum(x_e),
    a_e = v_e + u_e/sqrt2,  x_e = (u_e/sqrt2) / a_e,

since a configuration A of merged crossings draws |A| - V_B + 2c(A)
loops.  Edges with a_e = 0 are forced (their endpoints' parity flips),
which is exactly how charge pairs enter.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .diagram import (BRAID, CHARGE, CROSS, VERT, Diagram, DiagramError,
                      FIXED1, Node)
from .fkt import WeightedPlanarGraph, enumerate_matchings, perfect_matching_sum
from .rewrite import (braid_to_crossing, drop_fixed_zero_wires,
                      expand_wire_circles, fragment_charge_parity_zero,
                      remove_contractible_loops, total_charge_parity_zero)
from .scalars import Scalar

SQRT2 = math.sqrt(2.0)


class OddCycle(DiagramError):
    pass


def face_two_coloring(diag: Diagram) -> dict[int, int]:
    """Color every face 0/1 so adjacent faces differ; outer faces get 0.

    Works per fragment; raises OddCycle if the dual has an odd cycle
    (impossible for even-degree maps, kept as a sanity check).
    """
    faces = diag.faces()
    frags = diag.fragments()
    color: dict[int, int] = {}
    outer_by_frag = {}
    for frag in set(frags.values()):
        outer_by_frag[frag] = diag.outer_face_of_fragment(frag)
    adj: dict[int, set[int]] = {}
    for d, t in diag.twin.items():
        if d < t:
            f1, f2 = faces[d], faces[t]
            adj.setdefault(f1, set()).add(f2)
            adj.setdefault(f2, set()).add(f1)
    for f in set(faces.values()):
        adj.setdefault(f, set())
    for frag, outer in outer_by_frag.items():
        if outer in color:
            continue
        color[outer] = 0
        queue = deque([outer])
        while queue:
            f = queue.popleft()
            for g in adj[f]:
                if g in color:
                    if color[g] != 1 - color[f]:
                        raise OddCycle(f"faces {f}, {g} frustrate the coloring")
                else:
                    color[g] = 1 - color[f]
                    queue.append(g)
    return color


def rungs_to_crossings(diag: Diagram) -> None:
    """Replace every Fixed(1) charge-pair rung by a two-parameter crossing.

    A rung between two strands equals sqrt2*(surgery) - (delete), which is
    the crossing with (plain, rung) parameters (1, -1) whose parameter
    corners face the wire's region.
    """
    for wid in [w for w, ww in diag.wires.items()
                if ww.endpoints is not None and ww.label == FIXED1]:
        w = diag.wires.pop(wid)
        c1, c2 = w.endpoints  # type: ignore[misc]
        n1, n2 = diag.nodes[c1], diag.nodes[c2]
        s1, s2 = n1.side % 2, n2.side % 2
        # counterclockwise around the new node: charge-1 down, charge-2
        # down, charge-2 up, charge-1 up (sides face each other across the
        # rung's region, which the node splits into corners 0 and 2)
        old = [n1.darts[s1], n2.darts[(s2 + 1) % 2],
               n2.darts[s2], n1.darts[(s1 + 1) % 2]]
        targets = [diag.twin[d] for d in old]
        for d in old:
            t = diag.twin.pop(d, None)
            if t is not None:
                diag.twin.pop(t, None)
        for cid in (c1, c2):
            node = diag.nodes.pop(cid)
            for dd in node.darts:
                del diag.nxt[dd], diag.dart_node[dd]
        nid = diag.add_node(CROSS, 4, alpha=1.0 + 0j, beta=-1.0 + 0j, axis=1)
        legs = diag.nodes[nid].darts
        remap = dict(zip(old, legs))
        welded = set()
        for leg, tgt in zip(legs, targets):
            if leg in welded:
                continue
            tgt = remap.get(tgt, tgt)
            diag.connect(leg, tgt)
            welded.add(leg)
            welded.add(tgt)
        diag.dirty()


@dataclass
class FragmentForm:
    black_faces: list[int]
    # per crossing: (black face A, black face B, u, v, terminal slots)
    edges: list[tuple[int, int, complex, complex]]
    # rotation of edge indices around each black face, from the face walk
    rotation: dict[int, list[int]]


@dataclass
class StandardForm:
    scalar: Scalar
    fragments: list[FragmentForm]
    zero: bool = False


def to_standard_form(diagram: Diagram) -> StandardForm:
    """Normalize a closed hole-free diagram and carve its matching model."""
    d = diagram.copy()
    if d.holes:
        raise DiagramError("to_standard_form needs a hole-free diagram")
    expand_wire_circles(d)
    drop_fixed_zero_wires(d)
    for nid in list(d.nodes):
        node = d.nodes.get(nid)
        if node is not None and node.kind == BRAID:
            braid_to_crossing(d, nid)
    if total_charge_parity_zero(d) or fragment_charge_parity_zero(d):
        return StandardForm(scalar=Scalar.zero(), fragments=[], zero=True)
    rungs_to_crossings(d)
    remove_contractible_loops(d)
    for node in d.nodes.values():
        if node.kind != CROSS:
            raise DiagramError(f"unexpected {node.kind} node after normalization")

    sf = StandardForm(scalar=d.scalar.copy(), fragments=[])
    if not d.nodes:
        return sf
    coloring = face_two_coloring(d)
    faces = d.faces()
    frags = d.fragments()
    per_frag: dict[int, list[int]] = {}
    for nid, node in d.nodes.items():
        per_frag.setdefault(frags[node.darts[0]], []).append(nid)

    for frag, nids in per_frag.items():
        blacks: set[int] = set()
        edges: list[tuple[int, int, complex, complex]] = []
        edge_corner_dart: list[tuple[int, int]] = []  # witness darts at each end
        for nid in sorted(nids):
            node = d.nodes[nid]
            plain, rung = (node.alpha, node.beta) if node.beta is not None \
                else (1.0 + 0j, node.alpha)
            k = node.axis % 2
            merge_coeff = (plain - rung) / SQRT2
            sep_coeff = rung
            cK = coloring[faces[node.darts[(k + 1) % 4]]]
            if cK == 1:
                # parameter corners are black: merging them merges blacks
                u, v = merge_coeff, sep_coeff
                fa = faces[node.darts[(k + 1) % 4]]
                fb = faces[node.darts[(k + 3) % 4]]
                da, db = node.darts[(k + 1) % 4], node.darts[(k + 3) % 4]
            else:
                u, v = sep_coeff, merge_coeff
                fa = faces[node.darts[(k + 2) % 4]]
                fb = faces[node.darts[k % 4]]
                da, db = node.darts[(k + 2) % 4], node.darts[k % 4]
            blacks.add(fa)
            blacks.add(fb)
            edges.append((fa, fb, u, v))
            edge_corner_dart.append((da, db))
        # rotation of edge-ends around each black face, via the face walk
        rotation: dict[int, list[int]] = {f: [] for f in blacks}
        for f in blacks:
            # find a dart on this face
            start = None
            for (da, db), ei in zip(edge_corner_dart, range(len(edges))):
                if faces[da] == f:
                    start = da
                    break
                if faces[db] == f:
                    start = db
                    break
            if start is None:
                rotation[f] = []
                continue
            cyc = d.face_cycle(start)
            slots = []
            by_dart: dict[int, list[int]] = {}
            for ei, (da, db) in enumerate(edge_corner_dart):
                if faces[da] == f:
                    by_dart.setdefault(da, []).append(ei)
                if faces[db] == f:
                    by_dart.setdefault(db, []).append(ei)
            for dd in cyc:
                for ei in by_dart.get(dd, []):
                    slots.append(ei)
            rotation[f] = slots
        sf.fragments.append(FragmentForm(black_faces=sorted(blacks),
                                         edges=edges, rotation=rotation))
    return sf


def dictionary_F(sf: StandardForm) -> WeightedPlanarGraph:
    """Convert a standard form into the weighted planar matching graph.

    Each black face becomes a parity city (degree-1: a pendant edge,
    degree-2: an edge or path, degree >= 3: a chain of star-triangle
    gadgets); each crossing becomes an inter-city edge of weight x_e;
    forced edges (a_e = 0) flip the parity of both cities.  The global
    coefficient collects sqrt2^{V_B} and the a_e / b_e factors.
    """
    g = WeightedPlanarGraph()
    g.global_coeff = sf.scalar.copy()
    if sf.zero:
        g.global_coeff = Scalar.zero()
        return g
    for frag in sf.fragments:
        vb = len(frag.black_faces)
        g.global_coeff.mul_sqrt2_power(vb)
        parity: dict[int, int] = {f: 0 for f in frag.black_faces}
        x: list[Optional[complex]] = []
        for fa, fb, u, v in frag.edges:
            b = u / SQRT2
            a = v + b
            if abs(a) < 1e-12 * max(1.0, abs(u), abs(v)):
                g.global_coeff.mul_complex(b)
                parity[fa] ^= 1
                parity[fb] ^= 1
                x.append(None)
            else:
                g.global_coeff.mul_complex(a)
                x.append(b / a)
        # terminals per (edge, occurrence) in rotation order around cities
        terminal: dict[tuple[int, int], int] = {}
        for f in frag.black_faces:
            slots = [ei for ei in frag.rotation[f] if x[ei] is not None]
            terms = _build_city(g, len(slots), parity[f])
            seen: dict[int, int] = {}
            for s, ei in zip(terms, slots):
                occ = seen.get(ei, 0)
                seen[ei] = occ + 1
                fa, fb = frag.edges[ei][0], frag.edges[ei][1]
                if fa == fb:
                    end = occ
                else:
                    end = 0 if f == fa else 1
                terminal[(ei, end)] = s
        for ei, xe in enumerate(x):
            if xe is None:
                continue
            t0 = terminal.get((ei, 0))
            t1 = terminal.get((ei, 1))
            if t0 is None or t1 is None:
                raise DiagramError("edge terminal missing")
            g.add_edge(t0, t1, xe)
    return g


def _build_city(g: WeightedPlanarGraph, d: int, parity: int) -> list[int]:
    """A planar parity city: matchings of the city minus an externally
    matched terminal subset S count 1 when |S| = parity (mod 2), else 0.
    Returns the d terminals in rotation order."""
    if d == 0:
        if parity == 1:
            g.global_coeff.mul_complex(0.0)
        return []
    if d == 1:
        t = g.add_vertex()
        if parity == 0:
            u = g.add_vertex()
            g.add_edge(t, u)
        return [t]
    if d == 2:
        t1, t2 = g.add_vertex(), g.add_vertex()
        if parity == 0:
            g.add_edge(t1, t2)
        else:
            u = g.add_vertex()
            g.add_edge(t1, u)
            g.add_edge(u, t2)
        return [t1, t2]
    if d == 3:
        return _build_tri(g, parity)
    head = _build_tri(g, parity)
    terms = [head[0], head[1]]
    carry = head[2]
    remaining = d - 2
    while remaining > 2:
        nxt = _build_tri(g, 0)
        g.add_edge(carry, nxt[0])
        terms.append(nxt[1])
        carry = nxt[2]
        remaining -= 1
    # last gadget offers its final two terminals
    nxt = _build_tri(g, 0)
    g.add_edge(carry, nxt[0])
    terms.append(nxt[1])
    terms.append(nxt[2])
    return terms


def _build_tri(g: WeightedPlanarGraph, parity: int) -> list[int]:
    """Even (star-triangle) or odd (plain triangle) 3-terminal parity gadget."""
    if parity == 0:
        t = [g.add_vertex() for _ in range(3)]
        w = [g.add_vertex() for _ in range(3)]
        te = [g.add_edge(t[i], w[i]) for i in range(3)]
        ring = [g.add_edge(w[0], w[1]), g.add_edge(w[1], w[2]), g.add_edge(w[2], w[0])]
        # rotations: at w_i ccw: [toward t_i, toward w_{i+1}, toward w_{i-1}]
        for i in range(3):
            e_next = ring[i]          # (w_i, w_{i+1})
            e_prev = ring[(i - 1) % 3]  # (w_{i-1}, w_i)
            g.rotation[w[i]] = [(te[i], 1), (e_next, 0), (e_prev, 1)]
        return t
    t = [g.add_vertex() for _ in range(3)]
    ring = [g.add_edge(t[0], t[1]), g.add_edge(t[1], t[2]), g.add_edge(t[2], t[0])]
    for i in range(3):
        e_next = ring[i]
        e_prev = ring[(i - 1) % 3]
        g.rotation[t[i]] = [(e_next, 0), (e_prev, 1)]
    return t


def evaluate_via_fkt(diagram: Diagram) -> complex:
    """Value of a closed hole-free diagram through the matching route."""
    sf = to_standard_form(diagram)
    if sf.zero:
        return 0.0 + 0.0j
    g = dictionary_F(sf)
    if g.global_coeff.is_zero():
        return 0.0 + 0.0j
    pm = perfect_matching_sum(g)
    return g.global_coeff.value() * pm
