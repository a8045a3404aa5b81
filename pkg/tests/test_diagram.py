"""Structural tests for the combinatorial map core."""

import math

import pytest

from quoncs.build import Builder
from quoncs.diagram import (CHARGE, CROSS, VERT, Diagram, OUTER,
                            component_split, inside_loop)
from quoncs.scalars import Scalar


def test_scalar_value_cases():
    assert Scalar(1, -1, 0).value() == pytest.approx(0.7071067811865476)
    assert Scalar(1, 0, 2).value() == pytest.approx(complex(math.cos(math.pi / 4), math.sin(math.pi / 4)))
    assert Scalar(2, -2, 8).value() == pytest.approx(-1.0)


def test_scalar_multiplication_exact_integers():
    s = Scalar.one()
    s.mul_sqrt2_power(-3)
    s.mul_phase16(5)
    t = Scalar(2.0, 1, 13)
    u = s * t
    assert u.sqrt2_power == -2
    assert u.phase16 == 2
    assert u.mantissa == 2.0


def test_empty_diagram_valid():
    d = Diagram()
    assert d.validate() == []
    assert d.scalar.value() == 1


def test_single_circle_euler():
    b = Builder()
    b.cup(0)
    b.cap(0)
    d = b.close()
    assert d.validate() == []
    faces = d.faces()
    assert len(set(faces.values())) == 2


def test_crossing_degree_enforced():
    d = Diagram()
    nid = d.add_node(CROSS, 4, alpha=0.5 + 0j)
    # mangle: drop one dart
    node = d.nodes[nid]
    bad = node.darts.pop()
    del d.dart_node[bad], d.nxt[bad]
    problems = d.validate()
    assert any("degree" in p or "rotation" in p for p in problems)


def test_splice_and_remove_roundtrip():
    b = Builder()
    b.cup(0)
    b.cap(0)
    d = b.close()
    before = d.dump()
    some_dart = next(iter(d.twin))
    v = d.splice_edge(some_dart, VERT)
    assert d.validate() == []
    assert len(d.nodes) == 2
    ok = d.remove_vert(v)
    assert ok
    assert d.validate() == []
    assert d.dump() == before


def test_splice_preserves_face_count():
    b = Builder()
    b.cup(0)
    b.cross(0, 0.3 + 0.4j)
    b.cap(0)
    d = b.close()
    faces_before = len(set(d.faces().values()))
    d.splice_edge(next(iter(d.twin)), VERT)
    assert len(set(d.faces().values())) == faces_before
    assert d.validate() == []


def test_component_split_disjoint_circles():
    b = Builder()
    b.cup(0)
    b.cap(0)
    b.cup(0)
    b.cap(0)
    d = b.close()
    assert len(component_split(d)) == 2


def test_component_split_generic_crossing_connects():
    b = Builder()
    b.cup(0)
    b.cup(2)
    b.cross(1, 0.5 + 0j)  # alpha not in {1,-1,i,-i}: connects
    b.cap(1)
    b.cap(0)
    d = b.close()
    assert len(component_split(d)) == 1


def test_component_split_braid_keeps_strands_apart():
    b = Builder()
    b.cup(0)
    b.cup(2)
    b.braid(1)
    b.braid(1)
    b.cap(0)
    b.cap(0)
    d = b.close()
    # Two braids: strands pass diagonally through both, so the two circles
    # remain separate components (a Hopf link).
    assert len(component_split(d)) == 2


def test_component_split_clifford_crossing_keeps_strands_apart():
    b = Builder()
    b.cup(0)
    b.cup(2)
    b.cross(1, 1j)
    b.cross(1, 1j)
    b.cap(0)
    b.cap(0)
    d = b.close()
    assert len(component_split(d)) == 2


def test_free_loop_table_and_regions():
    d = Diagram()
    l1 = d.add_loop(OUTER)
    h = d.add_hole(inside_loop(l1))
    assert d.validate() == []
    d.remove_loop(l1)
    # hole spilled into the outer region: now invalid
    assert any("outer" in p for p in d.validate())


def test_dump_deterministic():
    def make():
        b = Builder()
        b.cup(0)
        b.cross(0, 0.25 + 0j)
        b.charge_pair(0)
        b.cap(0)
        return b.close()

    assert make().dump() == make().dump()
