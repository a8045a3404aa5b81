"""Checkerboard face coloring of a diagram.

Regions of a closed diagram admit an alternating 2-coloring (every node
has even string-degree).  The color of the region a charge-pair rung
crosses selects which of the two elimination rules applies, so the
coloring is the backbone of all exact evaluation in this package.

Convention: the outer region has color 0.
"""

from __future__ import annotations

from collections import deque

from .diagram import Diagram, OUTER, inside_loop


class ColoringError(Exception):
    pass


def region_coloring(diag: Diagram) -> dict[tuple, int]:
    """Map every resolved region of ``diag`` to a color in {0, 1}.

    Adjacent regions (sharing a strand edge, or separated by a free loop)
    get opposite colors; the outer region gets 0.
    """
    adj: dict[tuple, set[tuple]] = {OUTER: set()}

    def touch(r: tuple) -> None:
        adj.setdefault(r, set())

    def link(r1: tuple, r2: tuple) -> None:
        touch(r1)
        touch(r2)
        adj[r1].add(r2)
        adj[r2].add(r1)

    seen_edges = set()
    for d, t in diag.twin.items():
        key = min(d, t)
        if key in seen_edges:
            continue
        seen_edges.add(key)
        link(diag.region_of_face_dart(d), diag.region_of_face_dart(t))
    for lid, parent in diag.loops.items():
        link(diag.resolve_region(parent), inside_loop(lid))

    color: dict[tuple, int] = {OUTER: 0}
    queue = deque([OUTER])
    while queue:
        r = queue.popleft()
        for s in adj[r]:
            if s in color:
                if color[s] != 1 - color[r]:
                    raise ColoringError(f"regions {r} and {s} frustrate 2-coloring")
            else:
                color[s] = 1 - color[r]
                queue.append(s)
    for r in adj:
        if r not in color:
            # A component whose nesting is unknown floats in the outer
            # region; color it independently starting from its own outer
            # face, which resolve_region maps to OUTER already.  Anything
            # left is unreachable decoration -- color from parity 0.
            color[r] = 1
            queue.append(r)
            while queue:
                x = queue.popleft()
                for s in adj[x]:
                    if s not in color:
                        color[s] = 1 - color[x]
                        queue.append(s)
    return color


def region_color(diag: Diagram, region: tuple, coloring: dict[tuple, int]) -> int:
    r = diag.resolve_region(region)
    if r in coloring:
        return coloring[r]
    raise ColoringError(f"region {r} not colored")


# Rung elimination rule: a charge-pair rung through a region of color c
# rewrites [S + rung] = a * (surgery along the rung) + b * S.
# rule(color 1) fixes adjacent-pair annihilation to exactly 1;
# rule(color 0) is forced by the braid definition closing Reidemeister 2.
RUNG_RULE = {0: (-1.0 + 0.0j, complex(2.0 ** 0.5)),
             1: (complex(2.0 ** 0.5), -1.0 + 0.0j)}
