"""Planar diagram model: a combinatorial map with decorated nodes.

A diagram is a disjoint union of plane fragments.  Each fragment is a
connected multigraph with a rotation system (``nxt`` gives the
counterclockwise successor of a dart around its node).  Faces are orbits
of ``d -> nxt[twin[d]]``.  Embedding data that a rotation system cannot
carry -- which face of which fragment contains each other item -- lives
in a nesting map from items (fragments, free loops, wire circles, hole
markers) to regions.

Wires (epsilon lines) are kept *short*: a wire either joins two charge
nodes whose attachment corners share a region, or is a closed circle.
Long "bar" wires produced by genus cuts are represented as chains of
short labelled rungs, one rung per consecutive pair of crossed strands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .scalars import Scalar

# Node kinds.
CROSS = "cross"      # parameterized crossing, 4 darts
BRAID = "braid"      # Kauffman braid, 4 darts
CHARGE = "charge"    # wire endpoint on a string, 2 darts
VERT = "vert"        # featureless degree-2 vertex
BPOINT = "bpoint"    # boundary point, 1 dart

# Wire labels.
FIXED0 = ("fixed", 0)
FIXED1 = ("fixed", 1)
SUM = ("sum",)


def var_label(vid: int) -> tuple:
    return ("var", vid)


@dataclass
class Node:
    kind: str
    darts: list[int]
    alpha: complex = 0j              # CROSS: first parameter
    beta: Optional[complex] = None   # CROSS: second parameter (two-parameter form)
    axis: int = 0                    # CROSS: parameter corner between darts[axis], darts[axis+1]
    over: int = 0                    # BRAID: strand (darts[over], darts[over+2]) passes on top
    wire: int = -1                   # CHARGE: id of the wire this charge terminates
    side: int = 0                    # CHARGE: wire attaches in corner between darts[side], darts[side+1]
    disc: int = -1                   # BPOINT: boundary disc id
    slot: int = -1                   # BPOINT: position 0..3 on the disc


@dataclass
class Wire:
    """An epsilon line: either a short rung between two charges or a circle."""

    id: int
    endpoints: Optional[tuple[int, int]]  # charge node ids, or None for a circle
    label: tuple = FIXED1
    path: list[int] = field(default_factory=list)  # darts crossed transversally (bars only)
    region: Optional[tuple] = None    # circles: region the circle lives in
    enclosed: Optional[tuple] = None  # circles: what the circle encircles (e.g. hole id)


@dataclass
class BoundaryDisc:
    id: int
    points: list[int]  # four BPOINT node ids in cyclic order


# Region references.
OUTER = ("outer",)


def face_region(fid: int) -> tuple:
    return ("face", fid)


def inside_loop(loop_id: int) -> tuple:
    return ("loop", loop_id)


class DiagramError(Exception):
    pass


class InvalidDart(DiagramError):
    pass


class Diagram:
    def __init__(self) -> None:
        self.twin: dict[int, int] = {}
        self.nxt: dict[int, int] = {}
        self.dart_node: dict[int, int] = {}
        self.nodes: dict[int, Node] = {}
        self.loops: dict[int, tuple] = {}       # loop id -> region ref
        self.wires: dict[int, Wire] = {}
        self.holes: dict[int, tuple] = {}       # hole id -> region ref
        self.discs: dict[int, BoundaryDisc] = {}
        self.frag_parent: dict[int, tuple] = {}  # fragment id -> region ref outside it
        self.frag_outer: dict[int, int] = {}     # fragment id -> dart on its outer face
        self.scalar: Scalar = Scalar.one()
        self._next_dart = 0
        self._next_node = 0
        self._next_misc = 0
        self._faces_cache: Optional[dict[int, int]] = None
        self._frags_cache: Optional[dict[int, int]] = None

    # ---------------------------------------------------------------- ids

    def _new_dart_id(self) -> int:
        self._next_dart += 1
        return self._next_dart

    def _new_node_id(self) -> int:
        self._next_node += 1
        return self._next_node

    def new_misc_id(self) -> int:
        self._next_misc += 1
        return self._next_misc

    def dirty(self) -> None:
        self._faces_cache = None
        self._frags_cache = None

    # ------------------------------------------------------------ building

    def add_node(self, kind: str, degree: int, **kw) -> int:
        """Create a node with ``degree`` fresh darts, twins unset (open ends)."""
        nid = self._new_node_id()
        darts = []
        for _ in range(degree):
            d = self._new_dart_id()
            darts.append(d)
            self.dart_node[d] = nid
        for i, d in enumerate(darts):
            self.nxt[d] = darts[(i + 1) % degree]
        self.nodes[nid] = Node(kind=kind, darts=darts, **kw)
        self.dirty()
        return nid

    def connect(self, d1: int, d2: int) -> None:
        """Make darts ``d1`` and ``d2`` the two ends of one edge."""
        if d1 in self.twin or d2 in self.twin:
            raise DiagramError("dart already connected")
        if d1 == d2:
            raise DiagramError("a dart cannot be its own twin")
        self.twin[d1] = d2
        self.twin[d2] = d1
        self.dirty()

    def disconnect(self, d: int) -> int:
        """Open the edge at dart ``d``; returns the freed far dart."""
        t = self.twin.pop(d)
        del self.twin[t]
        self.dirty()
        return t

    def open_ends(self) -> list[int]:
        return [d for d in self.dart_node if d not in self.twin]

    def add_loop(self, region: tuple) -> int:
        lid = self.new_misc_id()
        self.loops[lid] = region
        return lid

    def remove_loop(self, lid: int) -> None:
        outside = self.loops.pop(lid)
        self.reparent(inside_loop(lid), outside)

    def add_hole(self, region: tuple) -> int:
        hid = self.new_misc_id()
        self.holes[hid] = region
        return hid

    def add_wire(self, c1: int, c2: int, label: tuple = FIXED1) -> int:
        wid = self.new_misc_id()
        self.wires[wid] = Wire(id=wid, endpoints=(c1, c2), label=label)
        self.nodes[c1].wire = wid
        self.nodes[c2].wire = wid
        return wid

    def add_wire_circle(self, region: tuple, enclosed: Optional[tuple],
                        label: tuple = FIXED1) -> int:
        wid = self.new_misc_id()
        self.wires[wid] = Wire(id=wid, endpoints=None, label=label,
                               region=region, enclosed=enclosed)
        return wid

    # ------------------------------------------------------------- queries

    def node_of(self, d: int) -> Node:
        return self.nodes[self.dart_node[d]]

    def other_dart(self, d: int) -> int:
        """For a degree-2 node dart, the other dart of the same node."""
        ds = self.node_of(d).darts
        return ds[1] if ds[0] == d else ds[0]

    def opposite_dart(self, d: int) -> int:
        """For a degree-4 node dart, the opposite dart (strand continuation)."""
        ds = self.node_of(d).darts
        return ds[(ds.index(d) + 2) % 4]

    def strand_continue(self, d: int) -> Optional[int]:
        """Walking away from a node along dart ``d``, the next outgoing dart.

        Crosses the edge to ``twin[d]`` and continues through that node
        (straight through 4-valent nodes, onward through 2-valent ones).
        Returns None at a boundary point.
        """
        e = self.twin[d]
        node = self.node_of(e)
        if node.kind in (CHARGE, VERT):
            return self.other_dart(e)
        if node.kind in (CROSS, BRAID):
            return self.opposite_dart(e)
        return None  # BPOINT

    def strand_cycle(self, d: int) -> Optional[list[int]]:
        """Darts of the closed strand through ``d`` (None if it hits a boundary)."""
        out = [d]
        x = self.strand_continue(d)
        while x is not None and x != d:
            out.append(x)
            x = self.strand_continue(x)
        return out if x == d else None

    def faces(self) -> dict[int, int]:
        """dart -> face id; faces are orbits of ``d -> nxt[twin[d]]``."""
        if self._faces_cache is None:
            seen: dict[int, int] = {}
            for d in self.dart_node:
                if d in seen or d not in self.twin:
                    continue
                orbit = []
                x = d
                while x not in seen:
                    seen[x] = -1
                    orbit.append(x)
                    x = self.nxt[self.twin[x]]
                fid = min(orbit)
                for y in orbit:
                    seen[y] = fid
            self._faces_cache = seen
        return self._faces_cache

    def face_cycle(self, d: int) -> list[int]:
        out = [d]
        x = self.nxt[self.twin[d]]
        while x != d:
            out.append(x)
            x = self.nxt[self.twin[x]]
        return out

    def fragments(self) -> dict[int, int]:
        """dart -> fragment id (min dart in its connected component)."""
        if self._frags_cache is None:
            parent: dict[int, int] = {d: d for d in self.dart_node}

            def find(x: int) -> int:
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            def union(a: int, b: int) -> None:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)

            for d, t in self.twin.items():
                union(d, t)
            for node in self.nodes.values():
                for a, b in zip(node.darts, node.darts[1:]):
                    union(a, b)
            self._frags_cache = {d: find(d) for d in self.dart_node}
        return self._frags_cache

    def fragment_of(self, d: int) -> int:
        return self.fragments()[d]

    def fragment_ids(self) -> set[int]:
        return set(self.fragments().values())

    def outer_face_of_fragment(self, frag: int) -> int:
        faces = self.faces()
        hint = self.frag_outer.get(frag)
        if hint is not None and hint in faces and self.fragments().get(hint) == frag:
            return faces[hint]
        # Unknown: pick the largest face.  Only hit for fragments whose
        # nesting has stopped mattering (pure evaluation paths).
        counts: dict[int, int] = {}
        for d, f in faces.items():
            if self.fragments()[d] == frag:
                counts[f] = counts.get(f, 0) + 1
        return max(counts, key=lambda f: (counts[f], -f))

    def set_fragment_parent(self, any_dart: int, region: tuple,
                            outer_dart: Optional[int] = None) -> None:
        frag = self.fragment_of(any_dart)
        self.frag_parent[frag] = region
        if outer_dart is not None:
            self.frag_outer[frag] = outer_dart

    def region_of_face_dart(self, d: int) -> tuple:
        """Resolve the global region of the face on the orbit of dart ``d``."""
        faces = self.faces()
        frag = self.fragment_of(d)
        fid = faces[d]
        if fid == self.outer_face_of_fragment(frag):
            return self.resolve_region(self.frag_parent.get(frag, OUTER))
        return ("face", fid)

    def resolve_region(self, region: tuple) -> tuple:
        if region is None or region == OUTER or region[0] == "loop":
            return region if region is not None else OUTER
        if region[0] == "face":
            d = region[1]
            if d not in self.dart_node or d not in self.twin:
                return OUTER
            return self.region_of_face_dart(d)
        return region

    def corner_region(self, nid: int, corner: int) -> tuple:
        """Region of the corner between darts[corner] and darts[corner+1] of node nid."""
        node = self.nodes[nid]
        d = node.darts[(corner + 1) % len(node.darts)]
        # The face orbit entered by walking d's face cycle contains this corner:
        # the corner between darts[c] and darts[c+1] lies on the face whose
        # cycle contains darts[c+1] immediately after twin(darts[c])... use
        # the orbit of darts[c+1].
        return self.region_of_face_dart(d)

    # ------------------------------------------------------------- surgery

    def splice_edge(self, d: int, kind: str, **kw) -> int:
        """Insert a degree-2 node of ``kind`` into the edge of dart ``d``.

        Returns the new node id; its darts are [toward d's node, toward the
        old twin's node].
        """
        if d not in self.twin:
            raise InvalidDart(f"dart {d} does not exist or is open")
        t = self.twin[d]
        nid = self.add_node(kind, 2, **kw)
        a, b = self.nodes[nid].darts
        del self.twin[d], self.twin[t]
        self.connect(d, a)
        self.connect(b, t)
        self.dirty()
        return nid

    def remove_vert(self, nid: int) -> bool:
        """Remove a degree-2 node, merging its edges.

        Returns True normally; returns False when the node sat alone on a
        closed string (the caller must then add a free loop in the right
        region -- the two incident darts have been removed).
        """
        node = self.nodes[nid]
        if len(node.darts) != 2:
            raise DiagramError("remove_vert needs a degree-2 node")
        a, b = node.darts
        ta, tb = self.twin[a], self.twin[b]
        for dd in (a, b):
            t = self.twin.pop(dd, None)
            if t is not None:
                self.twin.pop(t, None)
        for dd in (a, b):
            del self.nxt[dd], self.dart_node[dd]
        del self.nodes[nid]
        self.dirty()
        if ta == b:  # node was alone on a circle
            return False
        self.connect(ta, tb)
        return True

    def detach_node(self, nid: int) -> list[Optional[int]]:
        """Delete a node; per dart, return the far end of its edge (now open).

        The entry is None if that edge joined the node to itself (the edge
        vanishes entirely).
        """
        node = self.nodes[nid]
        own = set(node.darts)
        ends: list[Optional[int]] = []
        for d in node.darts:
            t = self.twin.get(d)
            ends.append(None if t is None or t in own else t)
        for d in node.darts:
            t = self.twin.pop(d, None)
            if t is not None and t not in own:
                self.twin.pop(t, None)
        for d in node.darts:
            del self.nxt[d], self.dart_node[d]
        del self.nodes[nid]
        self.dirty()
        return ends

    # ----------------------------------------------------------- reparent

    def reparent(self, old_region: tuple, new_region: tuple) -> None:
        for h, r in list(self.holes.items()):
            if r == old_region:
                self.holes[h] = new_region
        for l, r in list(self.loops.items()):
            if r == old_region:
                self.loops[l] = new_region
        for w in self.wires.values():
            if w.endpoints is None and w.region == old_region:
                w.region = new_region
        for f, r in list(self.frag_parent.items()):
            if r == old_region:
                self.frag_parent[f] = new_region

    # ------------------------------------------------------------- copying

    def copy(self) -> "Diagram":
        d = Diagram()
        d.twin = dict(self.twin)
        d.nxt = dict(self.nxt)
        d.dart_node = dict(self.dart_node)
        d.nodes = {
            nid: Node(kind=n.kind, darts=list(n.darts), alpha=n.alpha, beta=n.beta,
                      axis=n.axis, over=n.over, wire=n.wire, side=n.side,
                      disc=n.disc, slot=n.slot)
            for nid, n in self.nodes.items()
        }
        d.loops = dict(self.loops)
        d.wires = {
            wid: Wire(id=w.id, endpoints=w.endpoints, label=w.label,
                      path=list(w.path), region=w.region, enclosed=w.enclosed)
            for wid, w in self.wires.items()
        }
        d.holes = dict(self.holes)
        d.discs = {i: BoundaryDisc(id=b.id, points=list(b.points)) for i, b in self.discs.items()}
        d.frag_parent = dict(self.frag_parent)
        d.frag_outer = dict(self.frag_outer)
        d.scalar = self.scalar.copy()
        d._next_dart = self._next_dart
        d._next_node = self._next_node
        d._next_misc = self._next_misc
        return d

    # ------------------------------------------------------------ validate

    def validate(self) -> list[str]:
        """Return a list of structural invariant violations (empty if valid)."""
        problems: list[str] = []
        for d, t in self.twin.items():
            if d == t:
                problems.append(f"dart {d} is its own twin")
            elif self.twin.get(t) != d:
                problems.append(f"twin not involutive at dart {d}")
        for d in self.dart_node:
            if d not in self.twin:
                problems.append(f"dart {d} has no twin (open end)")
            if d not in self.nxt:
                problems.append(f"dart {d} missing from rotation")
        want_degree = {CROSS: 4, BRAID: 4, CHARGE: 2, VERT: 2, BPOINT: 1}
        for nid, node in self.nodes.items():
            deg = len(node.darts)
            if deg != want_degree[node.kind]:
                problems.append(f"{node.kind} node {nid} has degree {deg}")
                continue
            for d in node.darts:
                if self.dart_node.get(d) != nid:
                    problems.append(f"node {nid} dart {d} back-reference broken")
            if deg > 1:
                seen = {node.darts[0]}
                x = self.nxt.get(node.darts[0])
                ok = True
                for _ in range(deg - 1):
                    if x is None or x in seen:
                        ok = False
                        break
                    seen.add(x)
                    x = self.nxt.get(x)
                if not ok or seen != set(node.darts):
                    problems.append(f"rotation at node {nid} does not match darts")
            if node.kind == CHARGE and node.wire not in self.wires:
                problems.append(f"charge {nid} references missing wire {node.wire}")
        for wid, w in self.wires.items():
            if w.endpoints is not None:
                for c in w.endpoints:
                    if c not in self.nodes or self.nodes[c].kind != CHARGE:
                        problems.append(f"wire {wid} endpoint {c} is not a charge")
                    elif self.nodes[c].wire != wid:
                        problems.append(f"wire {wid} endpoint {c} back-reference broken")
        for b in self.discs.values():
            if len(b.points) != 4:
                problems.append(f"disc {b.id} has {len(b.points)} marked points")
            for p in b.points:
                if p not in self.nodes or self.nodes[p].kind != BPOINT:
                    problems.append(f"disc {b.id} point {p} is not a boundary point")
        if not problems and self.dart_node:
            frags = self.fragments()
            faces = self.faces()
            by_frag: dict[int, list[int]] = {}
            for d in self.dart_node:
                by_frag.setdefault(frags[d], []).append(d)
            for frag, ds in by_frag.items():
                v = len({self.dart_node[d] for d in ds})
                e = len({min(d, self.twin[d]) for d in ds})
                f = len({faces[d] for d in ds})
                if v - e + f != 2:
                    problems.append(f"fragment {frag}: V-E+F = {v}-{e}+{f} != 2")
        for hid, region in self.holes.items():
            if self.resolve_region(region) == OUTER:
                problems.append(f"hole {hid} marks the outer region")
        return problems

    # ---------------------------------------------------------------- dump

    def dump(self) -> str:
        """Deterministic text serialization for golden tests."""
        lines = [f"scalar {self.scalar.mantissa!r} p={self.scalar.sqrt2_power} q={self.scalar.phase16}"]
        for nid in sorted(self.nodes):
            n = self.nodes[nid]
            extra = ""
            if n.kind == CROSS:
                extra = f" alpha={n.alpha!r} beta={n.beta!r} axis={n.axis}"
            elif n.kind == BRAID:
                extra = f" over={n.over}"
            elif n.kind == CHARGE:
                extra = f" wire={n.wire} side={n.side}"
            elif n.kind == BPOINT:
                extra = f" disc={n.disc} slot={n.slot}"
            lines.append(f"node {nid} {n.kind} darts={n.darts}{extra} nxt={[self.nxt[d] for d in n.darts]}")
        for d in sorted(self.twin):
            if d < self.twin[d]:
                lines.append(f"edge {d}-{self.twin[d]}")
        for lid in sorted(self.loops):
            lines.append(f"loop {lid} region={self.loops[lid]}")
        for wid in sorted(self.wires):
            w = self.wires[wid]
            lines.append(f"wire {wid} ends={w.endpoints} label={w.label} region={w.region}")
        for hid in sorted(self.holes):
            lines.append(f"hole {hid} region={self.holes[hid]}")
        return "\n".join(lines)

    def graph_description(self) -> list[tuple]:
        """Node/edge list with kinds, for external visualization."""
        out: list[tuple] = []
        for nid in sorted(self.nodes):
            out.append(("node", nid, self.nodes[nid].kind))
        for d in sorted(self.twin):
            if d < self.twin[d]:
                out.append(("edge", self.dart_node[d], self.dart_node[self.twin[d]]))
        return out


# --------------------------------------------------------------- helpers


def is_clifford(alpha: complex, tol: float = 1e-9) -> bool:
    return any(abs(alpha - c) <= tol for c in (1, -1, 1j, -1j))


def clifford_strand_pairs(node: Node, tol: float = 1e-9) -> Optional[list[tuple[int, int]]]:
    """How strands pass through a Clifford crossing; None if not Clifford.

    alpha = +1 degenerates to the smoothing separating the parameter
    corner, alpha = -1 to the merging smoothing (plus a charge pair),
    and alpha = +-i to a braid whose strands pass diagonally.
    """
    if node.kind == BRAID:
        return [(node.darts[0], node.darts[2]), (node.darts[1], node.darts[3])]
    if node.kind != CROSS or node.beta is not None or not is_clifford(node.alpha, tol):
        return None
    ds, k = node.darts, node.axis
    if is_clifford(node.alpha, tol) and abs(node.alpha.imag) < tol:
        # alpha = +-1: the separating smoothing (with a rung for -1)
        return [(ds[(k + 2) % 4], ds[(k + 3) % 4]), (ds[k % 4], ds[(k + 1) % 4])]
    return [(ds[0], ds[2]), (ds[1], ds[3])]


def component_split(diag: Diagram) -> list[set[int]]:
    """Partition nodes into string-connected components.

    A generic crossing connects all four legs; Clifford crossings and
    braids let the two strands pass independently; charges and verts
    continue the strand; wires do not connect.  Boundary points on one
    disc are all connected.
    """
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for d in diag.dart_node:
        parent[d] = d
    for d, t in diag.twin.items():
        union(d, t)
    for node in diag.nodes.values():
        ds = node.darts
        if node.kind in (CROSS, BRAID):
            pairs = clifford_strand_pairs(node)
            if pairs is None:
                for a, b in zip(ds, ds[1:]):
                    union(a, b)
            else:
                for a, b in pairs:
                    union(a, b)
        elif node.kind in (CHARGE, VERT):
            union(ds[0], ds[1])
    for disc in diag.discs.values():
        ds = [diag.nodes[p].darts[0] for p in disc.points]
        for a, b in zip(ds, ds[1:]):
            union(a, b)

    groups: dict[int, set[int]] = {}
    for d in diag.dart_node:
        groups.setdefault(find(d), set()).add(diag.dart_node[d])
    return list(groups.values())


def make_circle(diag: Diagram, kinds: list[str], region: tuple = OUTER) -> list[int]:
    """Build a closed string through degree-2 nodes of the given kinds.

    The circle is laid out counterclockwise: walking node i -> i+1 along
    darts[1], the enclosed side is to the left (the face of the darts[1]
    orbit); the face of the darts[0] orbit touches ``region``.
    """
    if not kinds:
        raise DiagramError("use add_loop for a featureless circle")
    nids = [diag.add_node(k, 2) for k in kinds]
    n = len(nids)
    for i, nid in enumerate(nids):
        diag.connect(diag.nodes[nid].darts[1], diag.nodes[nids[(i + 1) % n]].darts[0])
    d0 = diag.nodes[nids[0]].darts[0]
    diag.set_fragment_parent(d0, region, outer_dart=d0)
    return nids
