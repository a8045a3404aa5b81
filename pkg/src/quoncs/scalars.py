"""Exact scalar arithmetic for diagram prefactors.

Almost every prefactor produced by a rewrite is of the form
``m * 2**(p/2) * exp(i*pi*q/8)`` with ``m`` a small complex number and
``p, q`` integers.  Keeping ``p`` and ``q`` as exact integers prevents
drift over long rewrite chains; only the mantissa is floating point.
"""

from __future__ import annotations

import cmath
import dataclasses
import math

SQRT2 = math.sqrt(2.0)

# exp(i*pi*q/8) for q = 0..15, precomputed once.
_PHASE16 = tuple(cmath.exp(1j * math.pi * q / 8) for q in range(16))


@dataclasses.dataclass
class Scalar:
    """A complex number factored as ``mantissa * 2**(sqrt2_power/2) * e^{i pi phase16/8}``."""

    mantissa: complex = 1.0 + 0.0j
    sqrt2_power: int = 0
    phase16: int = 0

    def __post_init__(self) -> None:
        self.phase16 %= 16

    @staticmethod
    def one() -> "Scalar":
        return Scalar(1.0 + 0.0j, 0, 0)

    @staticmethod
    def zero() -> "Scalar":
        return Scalar(0.0j, 0, 0)

    def copy(self) -> "Scalar":
        return Scalar(self.mantissa, self.sqrt2_power, self.phase16)

    def value(self) -> complex:
        """Collapse to a plain complex number."""
        return self.mantissa * (2.0 ** (self.sqrt2_power / 2.0)) * _PHASE16[self.phase16]

    def is_zero(self) -> bool:
        return self.mantissa == 0

    # In-place multiplicative updates.  Exact components stay integers.

    def mul_scalar(self, other: "Scalar") -> "Scalar":
        self.mantissa *= other.mantissa
        self.sqrt2_power += other.sqrt2_power
        self.phase16 = (self.phase16 + other.phase16) % 16
        return self

    def mul_complex(self, z: complex) -> "Scalar":
        """Fold a complex factor into the mantissa, extracting exact parts.

        Factors of the form i^k are recognized and moved into phase16 so
        that Clifford pipelines keep an exactly-integer phase.
        """
        if z == 1:
            return self
        if z == -1:
            self.phase16 = (self.phase16 + 8) % 16
            return self
        if z == 1j:
            self.phase16 = (self.phase16 + 4) % 16
            return self
        if z == -1j:
            self.phase16 = (self.phase16 + 12) % 16
            return self
        self.mantissa *= z
        return self

    def mul_i_power(self, k: int) -> "Scalar":
        self.phase16 = (self.phase16 + 4 * (k % 4)) % 16
        return self

    def mul_phase16(self, q: int) -> "Scalar":
        self.phase16 = (self.phase16 + q) % 16
        return self

    def mul_sqrt2_power(self, p: int) -> "Scalar":
        self.sqrt2_power += p
        return self

    def __mul__(self, other: "Scalar") -> "Scalar":
        return Scalar(
            self.mantissa * other.mantissa,
            self.sqrt2_power + other.sqrt2_power,
            (self.phase16 + other.phase16) % 16,
        )

    def __repr__(self) -> str:
        return f"Scalar({self.mantissa!r}, p={self.sqrt2_power}, q={self.phase16})"
