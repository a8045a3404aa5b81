"""Matching-route evaluation against the reference and the YB route."""

import math

import pytest

from quoncs.build import Builder
from quoncs.matchgate import (dictionary_F, evaluate_via_fkt,
                              face_two_coloring, rungs_to_crossings,
                              to_standard_form)
from quoncs.reference import reference_value
from quoncs.rewrite import reduce_bigons
from quoncs.fkt import enumerate_matchings, perfect_matching_sum

from test_rewrite_rules import random_word_diagram

SQRT2 = math.sqrt(2.0)


def test_golden_circle_sqrt2():
    b = Builder()
    b.cup(0)
    b.cap(0)
    d = b.close()
    sf = to_standard_form(d)
    assert sf.scalar.sqrt2_power == 1 and sf.scalar.mantissa == 1.0
    assert evaluate_via_fkt(d) == pytest.approx(SQRT2)


def test_face_two_coloring_simple():
    b = Builder()
    b.cup(0)
    b.cross(0, 0.5 + 0.1j)
    b.cap(0)
    d = b.close()
    colors = face_two_coloring(d)
    faces = d.faces()
    for dd, t in d.twin.items():
        assert colors[faces[dd]] != colors[faces[t]] or faces[dd] == faces[t]


def test_charge_circle_via_fkt():
    b = Builder()
    b.cup(0)
    b.charge_pair(0)
    b.cap(0)
    d = b.close()
    assert evaluate_via_fkt(d) == pytest.approx(SQRT2)


def test_rung_conversion_preserves_value():
    for seed in range(12):
        d = random_word_diagram(seed, n_ops=6)
        want = reference_value(d)
        rungs_to_crossings(d)
        assert d.validate() == []
        assert reference_value(d) == pytest.approx(want, abs=1e-9), seed


def test_fkt_matches_reference_small():
    for seed in range(40):
        d = random_word_diagram(seed, n_ops=7)
        want = reference_value(d)
        got = evaluate_via_fkt(d)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want)), seed


def test_fkt_matches_reduce_bigons_large():
    for seed in range(60):
        d = random_word_diagram(seed, n_ops=16)
        yb = reduce_bigons(d, seed=seed).value()
        fk = evaluate_via_fkt(d)
        assert abs(yb - fk) <= 1e-9 * max(1.0, abs(fk)), seed


def test_dictionary_graph_matches_enumeration():
    for seed in (3, 6, 7):
        d = random_word_diagram(seed, n_ops=5, allow_charges=False)
        sf = to_standard_form(d)
        g = dictionary_F(sf)
        if 0 < g.n <= 16:
            assert perfect_matching_sum(g) == pytest.approx(enumerate_matchings(g))
