"""Sweep builder for plane diagrams.

Diagrams are assembled bottom-to-top like a tangle: cups open strand
pairs, gates act on adjacent strands of the current front, caps close
pairs.  The rotation orders produced this way always embed in the plane
(validated by the Euler check in Diagram.validate).

Front positions are 0-based from the left.  A 4-valent node created by
``cross``/``braid`` has darts [bottom-left, bottom-right, top-right,
top-left] in counterclockwise order, so corner ``axis=0`` is the bottom
(equivalently top) corner and ``axis=1`` the side corner.
"""

from __future__ import annotations

from typing import Optional

from .diagram import (BRAID, CHARGE, CROSS, VERT, Diagram, FIXED1, OUTER)

# Corner conventions for builder-made 4-valent nodes.
AXIS_TOP = 0   # parameter written in the top/bottom corner
AXIS_SIDE = 1  # parameter written in the left/right corner

# Braid over-strand selectors (darts [bl, br, tr, tl]).
OVER_NWSE = 1  # strand (br, tl) on top: the sigma_+ of the Kauffman definition
OVER_NESW = 0  # strand (bl, tr) on top


class Builder:
    def __init__(self, diagram: Optional[Diagram] = None) -> None:
        self.d = diagram if diagram is not None else Diagram()
        self.front: list[int] = []
        self._cup_darts: list[int] = []

    # ------------------------------------------------------------- strands

    def cup(self, i: int) -> int:
        """Open a new strand pair at front position ``i``; returns the vert id."""
        v = self.d.add_node(VERT, 2)
        dl, dr = self.d.nodes[v].darts
        self.front[i:i] = [dl, dr]
        self._cup_darts.append(dr)
        return v

    def cap(self, i: int) -> None:
        """Close front strands i and i+1 into each other."""
        a = self.front.pop(i + 1)
        b = self.front.pop(i)
        self.d.connect(a, b)

    def vert(self, i: int) -> int:
        v = self.d.add_node(VERT, 2)
        din, dout = self.d.nodes[v].darts
        self.d.connect(din, self.front[i])
        self.front[i] = dout
        return v

    # --------------------------------------------------------------- gates

    def cross(self, i: int, alpha: complex, axis: int = AXIS_TOP,
              beta: Optional[complex] = None) -> int:
        """Crossing on front strands (i, i+1)."""
        n = self.d.add_node(CROSS, 4, alpha=alpha, beta=beta, axis=axis)
        bl, br, tr, tl = self.d.nodes[n].darts
        self.d.connect(bl, self.front[i])
        self.d.connect(br, self.front[i + 1])
        self.front[i] = tl
        self.front[i + 1] = tr
        return n

    def braid(self, i: int, over: int = OVER_NWSE) -> int:
        """Braid on front strands (i, i+1); ``over`` picks the top strand."""
        n = self.d.add_node(BRAID, 4, over=over)
        bl, br, tr, tl = self.d.nodes[n].darts
        self.d.connect(bl, self.front[i])
        self.d.connect(br, self.front[i + 1])
        self.front[i] = tl
        self.front[i + 1] = tr
        return n

    def charge_pair(self, i: int, j: Optional[int] = None,
                    label: tuple = FIXED1) -> tuple[int, int, int]:
        """Charge pair joined by a rung between front strands i and j=i+1.

        The rung crosses the region between the two strands, so the wire
        corners face each other.  Returns (left charge, right charge, wire).
        """
        if j is None:
            j = i + 1
        if j != i + 1:
            raise ValueError("rungs join adjacent strands")
        c1 = self.d.add_node(CHARGE, 2, side=0)
        c2 = self.d.add_node(CHARGE, 2, side=1)
        b1, t1 = self.d.nodes[c1].darts
        b2, t2 = self.d.nodes[c2].darts
        self.d.connect(b1, self.front[i])
        self.d.connect(b2, self.front[j])
        self.front[i] = t1
        self.front[j] = t2
        # Left charge: wire sweeps ccw from the down-dart through east to
        # the up-dart: corner (darts[0], darts[1]) -> side 0.  Right charge
        # mirrors to side 1.
        wid = self.d.add_wire(c1, c2, label)
        return c1, c2, wid

    def charge_on(self, i: int, side: int) -> int:
        """A lone charge on strand i (wire must be attached by the caller)."""
        c = self.d.add_node(CHARGE, 2, side=side)
        b, t = self.d.nodes[c].darts
        self.d.connect(b, self.front[i])
        self.front[i] = t
        return c

    # ---------------------------------------------------------------- end

    def close(self) -> Diagram:
        if self.front:
            raise ValueError(f"{len(self.front)} strands still open")
        # Per fragment, the outer face touches the region swept below the
        # fragment's earliest cup: its boundary contains that cup's right
        # dart.  Fragment nesting (which region contains which fragment)
        # defaults to the outer region; callers override where it matters.
        seen: set[int] = set()
        for dr in self._cup_darts:
            frag = self.d.fragment_of(dr)
            if frag in seen:
                continue
            seen.add(frag)
            if frag not in self.d.frag_parent:
                self.d.set_fragment_parent(dr, OUTER, outer_dart=dr)
            else:
                self.d.frag_outer.setdefault(frag, dr)
        return self.d
