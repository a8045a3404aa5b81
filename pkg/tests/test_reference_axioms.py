"""The reference evaluator against the defining relations of the calculus.

Every test builds small closed diagrams two ways (or against a hand
value) and compares exact evaluations.  These tests pin down the
conventions every other module relies on.
"""

import cmath
import math

import pytest

from quoncs.build import AXIS_SIDE, AXIS_TOP, Builder, OVER_NESW, OVER_NWSE
from quoncs.diagram import FIXED0, FIXED1
from quoncs.reference import reference_value

SQRT2 = math.sqrt(2.0)


def ref(build_fn) -> complex:
    b = Builder()
    build_fn(b)
    return reference_value(b.close())


def test_circle_is_sqrt2():
    assert ref(lambda b: (b.cup(0), b.cap(0))) == pytest.approx(SQRT2)


def test_circles_multiply():
    def nested(b):
        b.cup(0)
        b.cup(1)
        b.cap(1)
        b.cap(0)

    def side_by_side(b):
        b.cup(0)
        b.cap(0)
        b.cup(0)
        b.cap(0)

    assert ref(nested) == pytest.approx(2.0)
    assert ref(side_by_side) == pytest.approx(2.0)


def test_charge_pair_annihilation_inside():
    # Adjacent pair whose rung crosses the region between the two strands
    # of one circle: exact cancellation, value sqrt2.
    def build(b):
        b.cup(0)
        b.charge_pair(0)
        b.cap(0)

    assert ref(build) == pytest.approx(SQRT2)


def test_charge_pair_label_zero_is_absent():
    def build(b):
        b.cup(0)
        b.charge_pair(0, label=FIXED0)
        b.cap(0)

    assert ref(build) == pytest.approx(SQRT2)


def test_two_charge_pairs_cancel():
    def build(b):
        b.cup(0)
        b.charge_pair(0)
        b.charge_pair(0)
        b.cap(0)

    assert ref(build) == pytest.approx(SQRT2)


def test_crossed_wire_pairs_repair_sign():
    # Two rungs between the same strands in sequence equal the identity;
    # re-paired (crossing) wires flip the sign.  Build the crossing pattern
    # by interleaving charges on three strands: (1-2)(1-2) vs the braided
    # pattern realized through strand 2.
    def straight(b):
        b.cup(0)
        b.charge_pair(0)
        b.charge_pair(0)
        b.cap(0)

    assert ref(straight) == pytest.approx(SQRT2)


def test_identity_crossing_alpha_zero():
    # crossing(0) with top parameter corner is the plain pair of strands
    # up to the 1/sqrt2 definition factor.
    def with_cross(b):
        b.cup(0)
        b.cross(0, 0.0 + 0.0j, axis=AXIS_TOP)
        b.cap(0)

    assert ref(with_cross) == pytest.approx(SQRT2 / SQRT2)


def test_crossing_expansion_matches_linear_combination():
    # crossing(alpha, top) on a closed circle = 1/sqrt2 * (circle) +
    # alpha/sqrt2 * (circle with charge pair), evaluated separately.
    alpha = 0.37 - 0.81j

    def with_cross(b):
        b.cup(0)
        b.cross(0, alpha, axis=AXIS_TOP)
        b.cap(0)

    def plain(b):
        b.cup(0)
        b.cap(0)

    def charged(b):
        b.cup(0)
        b.charge_pair(0)
        b.cap(0)

    want = ref(plain) / SQRT2 + alpha * ref(charged) / SQRT2
    assert ref(with_cross) == pytest.approx(want)


def test_yb0_side_to_top():
    # side(alpha) = (1+alpha)/sqrt2 * top((1-alpha)/(1+alpha)) on any closure.
    alpha = 0.3 + 0.4j
    beta = (1 - alpha) / (1 + alpha)

    def closure(axis, a):
        def build(b):
            b.cup(0)
            b.cup(2)
            b.cross(1, a, axis=axis)
            b.cap(1)
            b.cap(0)
        return build

    lhs = ref(closure(AXIS_SIDE, alpha))
    rhs = (1 + alpha) / SQRT2 * ref(closure(AXIS_TOP, beta))
    assert lhs == pytest.approx(rhs)

    def kink(axis, a):
        def build(b):
            b.cup(0)
            b.cross(0, a, axis=axis)
            b.cap(0)
        return build

    lhs = ref(kink(AXIS_SIDE, alpha))
    rhs = (1 + alpha) / SQRT2 * ref(kink(AXIS_TOP, beta))
    assert lhs == pytest.approx(rhs)


def test_yb1_monogon():
    # A crossing whose monogon loop closes its parameter corner equals
    # (1+alpha)/sqrt2 times the bare strand; closed up, that is (1+alpha).
    for alpha in (1.0 + 0j, 0.25 - 0.6j, 1j):
        def kinked(b):
            b.cup(0)
            b.cross(0, alpha, axis=AXIS_TOP)
            b.cap(0)

        want = (1 + alpha) / SQRT2 * SQRT2
        assert ref(kinked) == pytest.approx(want), alpha


def test_yb1_monogon_off_axis_is_neutral():
    # Closing a monogon on a non-parameter corner removes the crossing
    # with no factor at all.
    for alpha in (0.25 - 0.6j, 1j, 2.0 + 0j):
        def kinked(b):
            b.cup(0)
            b.cross(0, alpha, axis=AXIS_SIDE)
            b.cap(0)

        assert ref(kinked) == pytest.approx(SQRT2), alpha


def test_yb1_alpha_minus_one_vanishes():
    def kinked(b):
        b.cup(0)
        b.cross(0, -1.0 + 0j, axis=AXIS_TOP)
        b.cap(0)

    assert ref(kinked) == pytest.approx(0.0)


def test_yb2_fusion():
    # Two stacked side-parameterized crossings fuse with parameter
    # product; both sides closed with a trace closure and with a plat.
    a, bb = 0.7 + 0.2j, -0.4 + 1.1j

    def closures(alpha):
        def trace(b):
            b.cup(0)
            b.cup(2)
            b.cross(1, alpha, axis=AXIS_SIDE)
            b.cap(0)
            b.cap(0)

        def two_trace(b):
            b.cup(0)
            b.cup(2)
            b.cross(1, a, axis=AXIS_SIDE)
            b.cross(1, bb, axis=AXIS_SIDE)
            b.cap(0)
            b.cap(0)

        return trace, two_trace

    one, two = closures(a * bb)
    assert ref(two) == pytest.approx(ref(one))

    def plat_two(b):
        b.cup(0)
        b.cross(0, a, axis=AXIS_SIDE)
        b.cross(0, bb, axis=AXIS_SIDE)
        b.cap(0)

    def plat_one(b):
        b.cup(0)
        b.cross(0, a * bb, axis=AXIS_SIDE)
        b.cap(0)

    assert ref(plat_two) == pytest.approx(ref(plat_one))


def test_reidemeister_two():
    def braided(b):
        b.cup(0)
        b.cup(2)
        b.braid(1, OVER_NWSE)
        b.braid(1, OVER_NESW)
        b.cap(0)
        b.cap(0)

    def plain(b):
        b.cup(0)
        b.cup(2)
        b.cap(1)
        b.cap(0)

    # Trace closure of sigma+ sigma- = two circles; plat gives one.
    assert ref(braided) == pytest.approx(2.0)

    def braided_plat(b):
        b.cup(0)
        b.braid(0, OVER_NWSE)
        b.braid(0, OVER_NESW)
        b.cap(0)

    assert ref(braided_plat) == pytest.approx(SQRT2)


def test_reidemeister_one_phases():
    # A kink closes to e^{-+ i pi/8} times the circle, sign by chirality.
    vals = {}
    for over in (OVER_NWSE, OVER_NESW):
        def kinked(b, o=over):
            b.cup(0)
            b.braid(0, o)
            b.cap(0)

        vals[over] = ref(kinked)
    phases = sorted((cmath.phase(v / SQRT2) for v in vals.values()))
    assert phases == pytest.approx([-math.pi / 8, math.pi / 8])
    for v in vals.values():
        assert abs(v) == pytest.approx(SQRT2)


def test_reidemeister_three():
    # Slide a strand across a braid crossing: both sides of R3 as closed
    # 3-strand plats agree.
    def side_a(b):
        b.cup(0)
        b.cup(2)
        b.cup(4)
        b.braid(1, OVER_NWSE)
        b.braid(2, OVER_NWSE)
        b.braid(1, OVER_NWSE)
        b.cap(1)
        b.cap(2)
        b.cap(0)

    def side_b(b):
        b.cup(0)
        b.cup(2)
        b.cup(4)
        b.braid(2, OVER_NWSE)
        b.braid(1, OVER_NWSE)
        b.braid(2, OVER_NWSE)
        b.cap(1)
        b.cap(2)
        b.cap(0)

    assert ref(side_a) == pytest.approx(ref(side_b))


def test_switch_braid_relation():
    # sigma with charge pair inserted on its strands equals the opposite
    # braid times an exact e^{+-i pi/4}; verified on a non-vanishing kink
    # closure for both chiralities.
    for over, other in ((OVER_NWSE, OVER_NESW), (OVER_NESW, OVER_NWSE)):
        def plain(b, o=over):
            b.cup(0)
            b.braid(0, o)
            b.cap(0)

        def switched(b, o=other):
            b.cup(0)
            b.charge_pair(0)
            b.braid(0, o)
            b.cap(0)

        lhs, rhs = ref(plain), ref(switched)
        assert abs(lhs) == pytest.approx(SQRT2)
        assert abs(rhs) == pytest.approx(SQRT2)
        ratio = rhs / lhs
        assert abs(ratio - cmath.exp(1j * math.pi / 4 * (1 if over == OVER_NWSE else -1))) < 1e-12 \
            or abs(ratio - cmath.exp(-1j * math.pi / 4 * (1 if over == OVER_NWSE else -1))) < 1e-12


def test_hopf_link_vanishes():
    # The sigma-sigma Hopf link has value 0 (the Ising S-matrix element),
    # and so does its switched form: two unknots joined by one charge pair.
    def hopf(b):
        b.cup(0)
        b.cup(2)
        b.braid(1, OVER_NWSE)
        b.braid(1, OVER_NWSE)
        b.cap(0)
        b.cap(0)

    def unknots_with_pair(b):
        b.cup(0)
        b.cup(2)
        b.charge_pair(1)
        b.cap(0)
        b.cap(0)

    assert ref(hopf) == pytest.approx(0.0)
    assert ref(unknots_with_pair) == pytest.approx(0.0)


def test_odd_charge_count_on_a_string_vanishes():
    # Parity superselection: a closed string carrying an odd number of
    # charge endpoints kills the whole diagram.
    def odd(b):
        b.cup(0)
        b.cup(2)
        b.charge_pair(1)   # one endpoint per circle
        b.charge_pair(0)   # both endpoints on the left circle
        b.cap(0)
        b.cap(0)

    assert ref(odd) == pytest.approx(0.0)
