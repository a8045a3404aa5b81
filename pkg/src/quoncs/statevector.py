"""Dense state-vector oracle.

Qubit 0 is the least significant amplitude index (little-endian).  Gate
conventions follow the rotation forms e^{i theta P}: RX(t) = e^{itX},
RZ(t) = e^{itZ}, RXX(t) = e^{it XX}, RZZ(t) = e^{it ZZ}.  Joint
preparations use the stated definitions: GHZ = (|000> + |111>)/sqrt2,
Max = H^x3 GHZ, and w = (|011>_X + |101>_X + |110>_X)/sqrt2 (an
intentionally non-unit vector).
"""

from __future__ import annotations

import math

import numpy as np

SQRT2 = math.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG = S.conj().T

KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / SQRT2,
    "-": np.array([1, -1], dtype=complex) / SQRT2,
}


def rx(theta: float) -> np.ndarray:
    return math.cos(theta) * I2 + 1j * math.sin(theta) * X


def rz(theta: float) -> np.ndarray:
    return math.cos(theta) * I2 + 1j * math.sin(theta) * Z


def ry(theta: float) -> np.ndarray:
    return math.cos(theta) * I2 + 1j * math.sin(theta) * Y


CZ4 = np.diag([1, 1, 1, -1]).astype(complex)
SWAP4 = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
                 dtype=complex)


def rxx(theta: float) -> np.ndarray:
    xx = np.kron(X, X)
    return math.cos(theta) * np.eye(4) + 1j * math.sin(theta) * xx


def rzz(theta: float) -> np.ndarray:
    zz = np.kron(Z, Z)
    return math.cos(theta) * np.eye(4) + 1j * math.sin(theta) * zz


def ghz_vector() -> np.ndarray:
    v = np.zeros(8, dtype=complex)
    v[0] = v[7] = 1 / SQRT2
    return v


def max_vector() -> np.ndarray:
    h3 = np.kron(np.kron(H, H), H)
    return h3 @ ghz_vector()


def w_vector() -> np.ndarray:
    """(|011>_X + |101>_X + |110>_X)/sqrt2 as a Z-basis vector.

    Index order matches the joint-prep qubit list (first listed qubit =
    leftmost label = most significant within the triple block here; the
    caller maps into the global little-endian register).
    """
    h3 = np.kron(np.kron(H, H), H)
    v = np.zeros(8, dtype=complex)
    for s in ("011", "101", "110"):
        v[int(s, 2)] = 1 / SQRT2
    return h3 @ v


class TooManyQubits(ValueError):
    pass


def apply_1q(state: np.ndarray, m: np.ndarray, q: int, n: int) -> np.ndarray:
    t = state.reshape([2] * n)
    axis = n - 1 - q  # little-endian: qubit 0 = last axis
    t = np.moveaxis(t, axis, -1)
    t = t @ m.T
    return np.moveaxis(t, -1, axis).reshape(-1)


def apply_2q(state: np.ndarray, m: np.ndarray, q1: int, q2: int, n: int) -> np.ndarray:
    """Apply a 4x4 matrix whose index order is (q1, q2) with q1 the
    most significant bit of the 4x4 block."""
    t = state.reshape([2] * n)
    a1, a2 = n - 1 - q1, n - 1 - q2
    t = np.moveaxis(t, (a1, a2), (-2, -1))
    shp = t.shape
    t = t.reshape(-1, 4) @ m.T
    t = t.reshape(shp)
    return np.moveaxis(t, (-2, -1), (a1, a2)).reshape(-1)


def statevector_amplitude(circuit) -> complex:
    """Exact ⟨meas|U|prep⟩ by dense contraction (n <= 14)."""
    from .circuits import Circuit  # local import to avoid a cycle

    c: Circuit = circuit
    n = c.n_qubits
    if n > 14:
        raise TooManyQubits(f"{n} qubits exceed the dense oracle cap")
    state = np.ones(1, dtype=complex)
    prepped = [False] * n
    # joint preparations first (each on a disjoint triple)
    joint_states: list[tuple[tuple[int, int, int], np.ndarray]] = []
    for kind, qubits in c.joint_preps:
        vec = {"ghz": ghz_vector, "max": max_vector, "w": w_vector}[kind]()
        joint_states.append((tuple(qubits), vec))
        for q in qubits:
            prepped[q] = True
    # build the full product state: iterate qubits little-endian
    state = np.zeros(2 ** n, dtype=complex)
    # assemble by kron over qubit blocks, qubit n-1 down to 0
    factors: list[np.ndarray] = []
    consumed: set[int] = set()
    q = n - 1
    blocks: list[np.ndarray] = []
    # map: joint prep vectors are given with first listed qubit as the most
    # significant of the triple; require the triples to be contiguous
    # descending when assembled -- handle the general case by building the
    # state index-by-index instead.
    amps = np.zeros(2 ** n, dtype=complex)
    single = {}
    for q in range(n):
        if not prepped[q]:
            single[q] = KETS[c.prep[q]]
    for idx in range(2 ** n):
        a = 1.0 + 0.0j
        ok = True
        for qubits, vec in joint_states:
            sub = 0
            for pos, qq in enumerate(qubits):
                bit = (idx >> qq) & 1
                sub = (sub << 1) | bit
            a *= vec[sub]
            if a == 0:
                ok = False
                break
        if not ok:
            continue
        for q, v in single.items():
            a *= v[(idx >> q) & 1]
            if a == 0:
                break
        amps[idx] = a
    state = amps

    for gate in c.gates:
        k = gate.kind
        if k in ("x", "y", "z", "h", "s", "sdg"):
            m = {"x": X, "y": Y, "z": Z, "h": H, "s": S, "sdg": SDG}[k]
            state = apply_1q(state, m, gate.targets[0], n)
        elif k == "rx":
            state = apply_1q(state, rx(gate.theta), gate.targets[0], n)
        elif k == "rz":
            state = apply_1q(state, rz(gate.theta), gate.targets[0], n)
        elif k == "cz":
            state = apply_2q(state, CZ4, gate.targets[0], gate.targets[1], n)
        elif k == "swap":
            state = apply_2q(state, SWAP4, gate.targets[0], gate.targets[1], n)
        elif k == "rxx":
            state = apply_2q(state, rxx(gate.theta), gate.targets[0], gate.targets[1], n)
        elif k == "rzz":
            state = apply_2q(state, rzz(gate.theta), gate.targets[0], gate.targets[1], n)
        else:
            raise ValueError(f"unknown gate {k}")

    bra = np.zeros(2 ** n, dtype=complex)
    for idx in range(2 ** n):
        a = 1.0 + 0.0j
        for q in range(n):
            a *= KETS[c.meas[q]][(idx >> q) & 1]
            if a == 0:
                break
        bra[idx] = a
    return complex(np.vdot(bra, state))
