"""Physical constants and a small dimension-checked quantity type.

Numbers come from ``scipy.constants`` (CODATA). ``Quantity`` tracks
exponents over (length, mass, time, temperature) and is meant for tests:
every formula in :mod:`grsuper.physics` accepts a ``const`` argument, so
passing ``constants(dimensioned=True)`` together with ``Quantity`` inputs
checks the dimension of its result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import scipy.constants as sc

__all__ = [
    "PhysicalConstants",
    "Quantity",
    "DimensionError",
    "constants",
    "M_U_ROUNDED",
    "METER",
    "KILOGRAM",
    "SECOND",
    "KELVIN",
    "DIMENSIONLESS",
    "JOULE",
    "si_format",
]

# Rounded atomic mass unit as printed next to the nucleus model; kept for
# comparison only, CODATA is used in every computation.
M_U_ROUNDED = 1.7e-27

R0_FM = 0.9


class DimensionError(TypeError):
    """Raised when quantities of different dimensions are combined."""


_ZERO = (0, 0, 0, 0)


@dataclass(frozen=True)
class Quantity:
    """A real number with a dimension vector ``(L, M, T, Theta)``."""

    value: float
    dim: tuple = _ZERO

    def _coerce(self, other: Any) -> "Quantity":
        if isinstance(other, Quantity):
            return other
        return Quantity(float(other), _ZERO)

    def _same(self, other: "Quantity", op: str) -> None:
        if self.dim != other.dim:
            raise DimensionError(f"cannot {op} {self.dim} and {other.dim}")

    def __add__(self, other):
        o = self._coerce(other)
        self._same(o, "add")
        return Quantity(self.value + o.value, self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        self._same(o, "subtract")
        return Quantity(self.value - o.value, self.dim)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Quantity(-self.value, self.dim)

    def __mul__(self, other):
        o = self._coerce(other)
        return Quantity(self.value * o.value, tuple(a + b for a, b in zip(self.dim, o.dim)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return Quantity(self.value / o.value, tuple(a - b for a, b in zip(self.dim, o.dim)))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, p):
        if isinstance(p, Quantity):
            if p.dim != _ZERO:
                raise DimensionError("exponent must be dimensionless")
            p = p.value
        return Quantity(self.value**p, tuple(a * p for a in self.dim))

    def __rpow__(self, base):
        if self.dim != _ZERO:
            raise DimensionError("exponent must be dimensionless")
        return Quantity(float(base) ** self.value, _ZERO)

    def __float__(self):
        if self.dim != _ZERO:
            raise DimensionError(f"cannot convert quantity with dimension {self.dim} to float")
        return float(self.value)

    def _cmp(self, other: Any) -> float:
        # a bare zero compares against any dimension
        if not isinstance(other, Quantity) and other == 0:
            return self.value
        o = self._coerce(other)
        self._same(o, "compare")
        return self.value - o.value

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, Quantity):
            return self.dim == other.dim and self.value == other.value
        return self._cmp(other) == 0

    def __hash__(self):
        return hash((self.value, self.dim))

    def __abs__(self):
        return Quantity(abs(self.value), self.dim)


DIMENSIONLESS = Quantity(1.0, (0, 0, 0, 0))
METER = Quantity(1.0, (1, 0, 0, 0))
KILOGRAM = Quantity(1.0, (0, 1, 0, 0))
SECOND = Quantity(1.0, (0, 0, 1, 0))
KELVIN = Quantity(1.0, (0, 0, 0, 1))
JOULE = KILOGRAM * METER**2 / SECOND**2


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants used throughout the package.

    ``R0`` is the nucleon radius parameter in ``a = A**(1/3) * R0``.
    """

    G: Any
    c: Any
    hbar: Any
    h: Any
    k_B: Any
    m_u: Any
    R0: Any


_RAW = PhysicalConstants(
    G=sc.G,
    c=sc.c,
    hbar=sc.h / (2 * math.pi),
    h=sc.h,
    k_B=sc.k,
    m_u=sc.physical_constants["atomic mass constant"][0],
    R0=R0_FM * 1e-15,
)

_DIMENSIONED = PhysicalConstants(
    G=_RAW.G * METER**3 / KILOGRAM / SECOND**2,
    c=_RAW.c * METER / SECOND,
    hbar=_RAW.hbar * JOULE * SECOND,
    h=_RAW.h * JOULE * SECOND,
    k_B=_RAW.k_B * JOULE / KELVIN,
    m_u=_RAW.m_u * KILOGRAM,
    R0=_RAW.R0 * METER,
)


def constants(dimensioned: bool = False) -> PhysicalConstants:
    """Return the canonical constant table (raw floats unless ``dimensioned``)."""
    return _DIMENSIONED if dimensioned else _RAW


_PREFIXES = [
    (1e-18, "a"),
    (1e-15, "f"),
    (1e-12, "p"),
    (1e-9, "n"),
    (1e-6, "µ"),
    (1e-3, "m"),
    (1.0, ""),
    (1e3, "k"),
    (1e6, "M"),
    (1e9, "G"),
]


def si_format(value: float, unit: str, digits: int = 2) -> str:
    """Format ``value`` with an SI prefix, e.g. ``si_format(2e-15, "m") == "2.0 fm"``.

    Masses are given in kg but displayed with gram prefixes (``"500 ng"``).
    """
    if math.isinf(value):
        return "inf"
    if math.isnan(value):
        return "nan"
    if unit == "kg":
        value, unit = value * 1e3, "g"
    if value == 0:
        return f"0 {unit}"
    mag = abs(value)
    scale, prefix = _PREFIXES[0]
    for s, p in _PREFIXES:
        if mag >= s * (1 - 5e-13):
            scale, prefix = s, p
    scaled = value / scale
    if abs(scaled) >= 1e3 or abs(scaled) < 1:
        return f"{value:.{digits - 1}e} {unit}"
    text = f"{scaled:.{digits}g}"
    if "e" in text:
        text = f"{scaled:.0f}"
    return f"{text} {prefix}{unit}"
