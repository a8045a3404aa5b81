"""Circuit IR, text parser, and the gate-to-diagram translation.

Translation conventions (one global dictionary; phases pinned against
the dense oracle in the test suite):

  * each qubit owns four strands; computational kets/bras are nested cup
    or cap pairs (x 1/sqrt2 each), X-basis ones are adjacent pairs;
  * RZ(t) is a crossing on the inner strand pair, RX(t) on the upper
    pair, both with parameter i*tan(t) and prefactor sqrt2*cos(t); at the
    tangent pole the gate degenerates to an exact charge pair times -+i;
  * Z is a charge pair on the inner pair, X on the upper pair;
  * RXX(t) on neighbors is the junction: the facing boundary strands
    bridge around a crossing between the facing inner strands;
  * everything else decomposes exactly: H = -i RZ(pi/4) RX(pi/4) RZ(pi/4),
    S = e^{i pi/4} RZ(-pi/4), RZZ = (H x H) RXX (H x H),
    CZ = e^{i pi/4} RZ x RZ RZZ(pi/4), CX/SWAP/GHZ/Max/W by standard
    compositions.

Holes are marked constructively: a pocket closes whenever two junction
structures on the same neighboring pair follow each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .build import AXIS_TOP, Builder
from .diagram import Diagram, FIXED1
from .scalars import Scalar

SQRT2 = math.sqrt(2.0)
PI = math.pi


class SyntaxErr(ValueError):
    def __init__(self, line: int, col: int, message: str) -> None:
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class SemanticError(ValueError):
    pass


@dataclass
class Gate:
    kind: str                 # x|y|z|h|s|sdg|rx|rz|rzz|rxx|cz|swap
    targets: tuple
    theta: float = 0.0


@dataclass
class Circuit:
    n_qubits: int
    prep: list[str] = field(default_factory=list)    # per qubit: 0|1|+|-
    joint_preps: list[tuple[str, tuple[int, int, int]]] = field(default_factory=list)
    gates: list[Gate] = field(default_factory=list)
    meas: list[str] = field(default_factory=list)    # per qubit: 0|1|+|-

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, list(self.prep),
                       [(k, tuple(q)) for k, q in self.joint_preps],
                       [Gate(g.kind, tuple(g.targets), g.theta) for g in self.gates],
                       list(self.meas))


_GATE_ARITY = {"x": 1, "y": 1, "z": 1, "h": 1, "s": 1, "sdg": 1,
               "rx": 1, "rz": 1, "rzz": 2, "rxx": 2, "cz": 2, "swap": 2}
_PARAM_GATES = {"rx", "rz", "rzz", "rxx"}


def parse_circuit(text: str) -> Circuit:
    """Parse the line-oriented circuit grammar.

    qubits N
    ket 0 1 + -            # one symbol per qubit, or:
    ket ghz 0 1 2          # joint preparation on a qubit triple
    gate rz(0.5) 1
    gate cz 0 1
    bra 0 0 0 0 [basis=x]
    """
    n: Optional[int] = None
    prep: Optional[list[str]] = None
    joint: list[tuple[str, tuple[int, int, int]]] = []
    gates: list[Gate] = []
    meas: Optional[list[str]] = None
    joint_qubits: set[int] = set()

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0].lower()
        if head == "qubits":
            if len(parts) != 2 or not parts[1].isdigit():
                raise SyntaxErr(ln, len(parts[0]) + 2, "qubits needs a count")
            n = int(parts[1])
        elif head in ("ket", "bra"):
            if n is None:
                raise SyntaxErr(ln, 1, "qubits must come first")
            body = parts[1:]
            basis_x = False
            if body and body[-1].lower() in ("basis=x", "basis=z"):
                basis_x = body[-1].lower() == "basis=x"
                body = body[:-1]
            if head == "ket" and body and body[0].lower() in ("ghz", "max", "w"):
                qs = body[1:]
                if len(qs) != 3 or not all(q.isdigit() for q in qs):
                    raise SyntaxErr(ln, 5, f"{body[0]} preparation needs three qubit indices")
                qq = tuple(int(q) for q in qs)
                for q in qq:
                    if q >= n:
                        raise SemanticError(f"line {ln}: qubit {q} out of range")
                    if q in joint_qubits:
                        raise SemanticError(f"line {ln}: qubit {q} prepared twice")
                    joint_qubits.add(q)
                joint.append((body[0].lower(), qq))  # type: ignore[arg-type]
                continue
            if len(body) != n:
                raise SyntaxErr(ln, 5, f"expected {n} symbols")
            syms = []
            for col, s in enumerate(body):
                if s not in ("0", "1", "+", "-"):
                    raise SyntaxErr(ln, 5 + col, f"bad basis symbol {s!r}")
                if basis_x:
                    s = "+" if s == "0" else "-" if s == "1" else s
                syms.append(s)
            if head == "ket":
                prep = syms
            else:
                meas = syms
        elif head == "gate":
            if n is None:
                raise SyntaxErr(ln, 1, "qubits must come first")
            if len(parts) < 2:
                raise SyntaxErr(ln, 6, "gate needs a name")
            name = parts[1]
            theta = 0.0
            if "(" in name:
                if not name.endswith(")"):
                    raise SyntaxErr(ln, 6 + len(name), "unbalanced parenthesis")
                base, arg = name[:-1].split("(", 1)
                try:
                    theta = float(arg)
                except ValueError:
                    raise SyntaxErr(ln, 7 + len(base), f"bad parameter {arg!r}")
                name = base
            name = name.lower()
            if name not in _GATE_ARITY:
                raise SyntaxErr(ln, 6, f"unknown gate {name!r}")
            if name in _PARAM_GATES and "(" not in parts[1]:
                raise SyntaxErr(ln, 6, f"gate {name} needs a parameter")
            qs = parts[2:]
            if len(qs) != _GATE_ARITY[name]:
                raise SemanticError(f"line {ln}: gate {name} takes {_GATE_ARITY[name]} qubits")
            targets = []
            for q in qs:
                qt = q[1:] if q.startswith("q") else q
                if not qt.isdigit():
                    raise SyntaxErr(ln, 6, f"bad qubit {q!r}")
                qi = int(qt)
                if qi >= n:
                    raise SemanticError(f"line {ln}: qubit {qi} out of range")
                targets.append(qi)
            if len(set(targets)) != len(targets):
                raise SemanticError(f"line {ln}: repeated target")
            gates.append(Gate(kind=name, targets=tuple(targets), theta=theta))
        else:
            raise SyntaxErr(ln, 1, f"unknown directive {head!r}")

    if n is None:
        raise SemanticError("missing qubits header")
    if prep is None:
        prep = ["0"] * n
    if meas is None:
        meas = ["0"] * n
    return Circuit(n_qubits=n, prep=prep, joint_preps=joint, gates=gates, meas=meas)


# ----------------------------------------------------------- translation


def _is_pole(theta: float) -> Optional[int]:
    """None off the tangent pole; else +-1 with e^{i t P} = +-i P."""
    m = math.remainder(theta, PI)
    if abs(abs(m) - PI / 2) < 1e-12:
        return 1 if m > 0 else -1
    return None


class _Translator:
    """Builds the closed diagram bottom-to-top (time order)."""

    def __init__(self, circuit: Circuit) -> None:
        self.c = circuit
        self.b = Builder()
        self.d = self.b.d
        self.n = circuit.n_qubits
        # pending pocket witness dart per neighboring pair index a (pair
        # (a, a+1)); holes close at the next junction on the same pair
        self.pending: dict[int, Optional[int]] = {}

    # positions: qubit q strands at 4q .. 4q+3 (lines 1..4 top-down)

    def line(self, q: int, k: int) -> int:
        return 4 * q + (k - 1)

    # ---- elementary structures ------------------------------------

    def ket(self, q: int, sym: str) -> None:
        b = self.b
        base = 4 * q
        if sym in ("0", "1"):
            b.cup(base)       # outer pair (lines 1,4)
            b.cup(base + 1)   # inner pair (lines 2,3)
            self.d.scalar.mul_sqrt2_power(-1)
            if sym == "1":
                self.gate_x(q)
        else:
            b.cup(base)       # lines 1,2 adjacent
            b.cup(base + 2)   # lines 3,4 adjacent
            self.d.scalar.mul_sqrt2_power(-1)
            if sym == "-":
                self.gate_z(q)

    def bra(self, q: int, sym: str) -> None:
        b = self.b
        base = 4 * q
        if sym == "1":
            self.gate_x(q)
        if sym == "-":
            self.gate_z(q)
        if sym in ("0", "1"):
            b.cap(base + 1)   # inner pair
            b.cap(base)       # outer pair
        else:
            b.cap(base + 2)
            b.cap(base)
        self.d.scalar.mul_sqrt2_power(-1)

    def gate_z(self, q: int) -> None:
        self.b.charge_pair(self.line(q, 2), label=FIXED1)

    def gate_x(self, q: int) -> None:
        self.b.charge_pair(self.line(q, 1), label=FIXED1)

    def gate_y(self, q: int) -> None:
        # Y = i X Z as operators applied Z first
        self.gate_z(q)
        self.gate_x(q)
        self.d.scalar.mul_i_power(1)

    def gate_rz(self, q: int, theta: float) -> None:
        pole = _is_pole(theta)
        if pole is not None:
            self.gate_z(q)
            self.d.scalar.mul_i_power(pole)
            return
        self.b.cross(self.line(q, 2), 1j * math.tan(theta), axis=AXIS_TOP)
        self.d.scalar.mul_complex(SQRT2 * math.cos(theta))

    def gate_rx(self, q: int, theta: float) -> None:
        pole = _is_pole(theta)
        if pole is not None:
            self.gate_x(q)
            self.d.scalar.mul_i_power(pole)
            return
        self.b.cross(self.line(q, 1), 1j * math.tan(theta), axis=AXIS_TOP)
        self.d.scalar.mul_complex(SQRT2 * math.cos(theta))

    def gate_h(self, q: int) -> None:
        # H = -i RZ(pi/4) RX(pi/4) RZ(pi/4) with sqrt2 cos(pi/4) = 1 each
        self.gate_rz(q, PI / 4)
        self.gate_rx(q, PI / 4)
        self.gate_rz(q, PI / 4)
        self.d.scalar.mul_i_power(-1)

    def gate_s(self, q: int) -> None:
        self.gate_rz(q, -PI / 4)
        self.d.scalar.mul_phase16(4)   # e^{i pi/4}

    def gate_sdg(self, q: int) -> None:
        self.gate_rz(q, PI / 4)
        self.d.scalar.mul_phase16(-4)

    def junction(self, a: int, theta: Optional[float]) -> None:
        """The RXX structure between neighbors (a, a+1).

        theta None means the tangent pole: a plain charge-pair rung.
        Marks a hole when this pair already carries an open pocket.
        """
        pos = self.line(a, 4)  # position of line 4 of qubit a
        if self.pending.get(a) is not None:
            self.d.add_hole(("face", self.pending[a]))
        self.b.cap(pos)
        if theta is None:
            self.b.charge_pair(pos - 1, label=FIXED1)
        else:
            self.b.cross(pos - 1, 1j * math.tan(theta), axis=AXIS_TOP)
            self.d.scalar.mul_complex(SQRT2 * math.cos(theta))
        v = self.b.cup(pos)
        # the pocket above this junction is the face north of the new cup:
        # the orbit of its left dart
        self.pending[a] = self.d.nodes[v].darts[0]

    def gate_rxx(self, a: int, b: int, theta: float) -> None:
        if abs(a - b) != 1:
            raise SemanticError("two-qubit gates need neighboring qubits "
                                "(insert swap gates)")
        lo = min(a, b)
        pole = _is_pole(theta)
        if pole is not None:
            self.junction(lo, None)
            self.d.scalar.mul_i_power(pole)
        else:
            self.junction(lo, theta)

    def gate_rzz(self, a: int, b: int, theta: float) -> None:
        self.gate_h(a)
        self.gate_h(b)
        self.gate_rxx(a, b, theta)
        self.gate_h(a)
        self.gate_h(b)

    def gate_cz(self, a: int, b: int) -> None:
        # CZ = e^{i pi/4} RZ_a(-pi/4) RZ_b(-pi/4) RZZ(pi/4)
        self.gate_rzz(a, b, PI / 4)
        self.gate_rz(a, -PI / 4)
        self.gate_rz(b, -PI / 4)
        self.d.scalar.mul_phase16(4)

    def gate_cx(self, control: int, target: int) -> None:
        self.gate_h(target)
        self.gate_cz(control, target)
        self.gate_h(target)

    def gate_swap(self, a: int, b: int) -> None:
        self.gate_cx(a, b)
        self.gate_cx(b, a)
        self.gate_cx(a, b)

    def prep_ghz(self, qs: tuple[int, int, int]) -> None:
        q0, q1, q2 = qs
        for q in qs:
            self.ket(q, "0")
        self.gate_h(q0)
        self.gate_cx(q0, q1)
        self.gate_cx(q1, q2)

    def prep_max(self, qs: tuple[int, int, int]) -> None:
        self.prep_ghz(qs)
        for q in qs:
            self.gate_h(q)

    def prep_w(self, qs: tuple[int, int, int]) -> None:
        """w = (|011>_X + |101>_X + |110>_X)/sqrt2: a scaled unitary prep.

        Ladder construction of (|100>+|010>+|001>)/sqrt3, then X and H on
        every leg, then the overall scale sqrt(3/2).
        """
        q0, q1, q2 = qs
        t0 = math.asin(1.0 / math.sqrt(3.0))
        self._ry(q0, t0)
        self._cry_on_zero(q0, q1, PI / 4)
        self._ccx_on_zero(q0, q1, q2)
        for q in qs:
            self.gate_x(q)
            self.gate_h(q)
        self.d.scalar.mul_complex(math.sqrt(1.5))

    def _ry(self, q: int, theta: float) -> None:
        # e^{i theta Y} = RZ(pi/4) RX(theta) RZ(-pi/4)
        self.gate_rz(q, -PI / 4)
        self.gate_rx(q, theta)
        self.gate_rz(q, PI / 4)

    def _cry_on_zero(self, ctrl: int, tgt: int, half: float) -> None:
        """RY(2*half) on tgt when ctrl is |0>."""
        self.gate_x(ctrl)
        self._ry(tgt, half)
        self.gate_cx(ctrl, tgt)
        self._ry(tgt, -half)
        self.gate_cx(ctrl, tgt)
        self.gate_x(ctrl)

    def gate_t(self, q: int) -> None:
        self.gate_rz(q, -PI / 8)
        self.d.scalar.mul_phase16(2)

    def gate_tdg(self, q: int) -> None:
        self.gate_rz(q, PI / 8)
        self.d.scalar.mul_phase16(-2)

    def _ccx_on_zero(self, c1: int, c2: int, tgt: int) -> None:
        self.gate_x(c1)
        self.gate_x(c2)
        self._toffoli(c1, c2, tgt)
        self.gate_x(c1)
        self.gate_x(c2)

    def _toffoli(self, a: int, b: int, t: int) -> None:
        self.gate_h(t)
        self.gate_cx(b, t)
        self.gate_tdg(t)
        self.gate_cx(a, t)
        self.gate_t(t)
        self.gate_cx(b, t)
        self.gate_tdg(t)
        self.gate_cx(a, t)
        self.gate_t(b)
        self.gate_t(t)
        self.gate_h(t)
        self.gate_cx(a, b)
        self.gate_t(a)
        self.gate_tdg(b)
        self.gate_cx(a, b)

    # ---- routing ----------------------------------------------------

    def _with_neighbors(self, method, a: int, b: int, *args) -> None:
        """Run a neighbor-only 2-qubit structure, routing with swaps."""
        if abs(a - b) == 1:
            method(a, b, *args)
            return
        step = 1 if b > a else -1
        self.gate_swap(b - step, b)
        self._with_neighbors(method, a, b - step, *args)
        self.gate_swap(b - step, b)

    # ---- main -------------------------------------------------------

    def run(self) -> Diagram:
        c = self.c
        jointed = {q for _, qs in c.joint_preps for q in qs}
        for q in range(self.n):
            self.ket(q, "0" if q in jointed else c.prep[q])
        for kind, qs in c.joint_preps:
            if tuple(sorted(qs)) != (min(qs), min(qs) + 1, min(qs) + 2):
                raise SemanticError("joint preparations need three neighboring qubits")
            getattr(self, "prep_" + kind)(tuple(qs))
        for gate in c.gates:
            args = [gate.theta] if gate.kind in _PARAM_GATES else []
            if _GATE_ARITY[gate.kind] == 2 and abs(gate.targets[0] - gate.targets[1]) != 1:
                self._with_neighbors(getattr(self, "gate_" + gate.kind),
                                     gate.targets[0], gate.targets[1], *args)
            else:
                getattr(self, "gate_" + gate.kind)(*gate.targets, *args)
        for q in range(self.n - 1, -1, -1):
            self.bra(q, c.meas[q])
        return self.b.close()


def circuit_to_cdm(circuit: Circuit) -> Diagram:
    return _Translator(circuit).run()
