"""Closed-form relations for gravitational time-scales of massive superpositions.

All functions are pure. Inputs are SI floats; each function also takes an
optional ``const`` table so that tests can push :class:`~grsuper.constants.Quantity`
values through the very same code and check dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .constants import PhysicalConstants, constants

__all__ = [
    "PhysicsDomainError",
    "SeparationError",
    "BallSuperposition",
    "NucleusModel",
    "OscillatorMode",
    "time_dilation_factor",
    "time_uncertainty",
    "phase_uncertainty",
    "heuristic_gr_time",
    "sphere_delta_E",
    "sphere_delta_E_limit",
    "penrose_gr_time",
    "nucleus_model",
    "gr_time_coefficient",
    "gr_time_nuclei",
    "zero_point_fluctuation",
    "thermal_occupation",
    "cat_coherence_time",
    "cat_separation",
]

CONST = constants()


class PhysicsDomainError(ValueError):
    """Input lies outside the domain where a formula is valid."""


class SeparationError(PhysicsDomainError):
    """Separation too small for the point-mass / disjoint-sphere approximation (dx < 2R)."""


@dataclass(frozen=True)
class BallSuperposition:
    """Uniform ball of mass ``m`` and radius ``R`` split over a distance ``dx``."""

    m: Any
    R: Any
    dx: Any = math.inf

    def __post_init__(self):
        if self.m < 0:
            raise PhysicsDomainError(f"mass must be non-negative, got {self.m}")
        if not self.R > 0:
            raise PhysicsDomainError(f"radius must be positive, got {self.R}")
        if self.dx < 0:
            raise PhysicsDomainError(f"separation must be non-negative, got {self.dx}")

    @property
    def weak_field_ok(self) -> bool:
        return self.m < 1e-3 * self.R * CONST.c**2 / CONST.G


@dataclass(frozen=True)
class NucleusModel:
    """Nucleus of mass number ``A`` modelled as a uniform ball."""

    A: int
    const: PhysicalConstants = CONST

    def __post_init__(self):
        if int(self.A) != self.A or self.A < 1:
            raise PhysicsDomainError(f"mass number must be an integer >= 1, got {self.A}")

    @property
    def a(self):
        """Nuclear radius ``A**(1/3) * R0``."""
        return self.A ** (1.0 / 3.0) * self.const.R0

    @property
    def m_a(self):
        """Nuclear mass ``A * m_u``."""
        return self.A * self.const.m_u


@dataclass(frozen=True)
class OscillatorMode:
    """Single mechanical mode: frequency (Hz), mass (kg), quality factor, bath temperature (K)."""

    f_m: Any
    m: Any
    Q: Any
    T: Any = 0.01

    def __post_init__(self):
        for name in ("f_m", "m", "Q"):
            if not getattr(self, name) > 0:
                raise PhysicsDomainError(f"{name} must be positive, got {getattr(self, name)}")
        if self.T < 0:
            raise PhysicsDomainError(f"temperature must be non-negative, got {self.T}")

    @property
    def omega_m(self):
        return 2 * math.pi * self.f_m

    @property
    def gamma_m(self):
        """Energy damping rate ``omega_m / Q``."""
        return self.omega_m / self.Q


def time_dilation_factor(m, r, const: PhysicalConstants = CONST):
    """Return ``(sqrt(1 - 2mG/rc^2), 1 - mG/rc^2)``, the exact and linearised clock-rate ratios."""
    if not r > 0:
        raise PhysicsDomainError(f"distance must be positive, got {r}")
    x = 2 * m * const.G / (r * const.c**2)
    if x >= 1:
        raise PhysicsDomainError("distance lies inside the Schwarzschild radius")
    return (1 - x) ** 0.5, 1 - x / 2


def _check_separation(dx, R):
    if dx < 2 * R:
        raise SeparationError(
            f"separation too small for point-mass approximation: dx={dx} < 2R={2 * R}"
        )


def time_uncertainty(ball: BallSuperposition, t_far, const: PhysicalConstants = CONST):
    """Proper-time mismatch ``t_far G m / (R c^2)`` between the two branches."""
    _check_separation(ball.dx, ball.R)
    return t_far * const.G * ball.m / (ball.R * const.c**2)


def phase_uncertainty(ball: BallSuperposition, t_far, const: PhysicalConstants = CONST):
    """Relative phase spread ``dt * m c^2 / hbar`` accumulated after ``t_far``."""
    return time_uncertainty(ball, t_far, const) * ball.m * const.c**2 / const.hbar


def heuristic_gr_time(ball: BallSuperposition, const: PhysicalConstants = CONST):
    """Time at which the phase spread reaches 2*pi: ``h R / (G m^2)``."""
    if not ball.m > 0:
        raise PhysicsDomainError("mass must be positive")
    return const.h * ball.R / (const.G * ball.m**2)


def sphere_delta_E(m, R, dx, const: PhysicalConstants = CONST):
    """Self-energy difference of a uniform ball displaced by ``dx >= 2R``.

    ``8 pi G m^2 (6/(5R) - 1/dx)``; pass ``dx=math.inf`` for the far limit.
    """
    if not R > 0:
        raise PhysicsDomainError(f"radius must be positive, got {R}")
    _check_separation(dx, R)
    return 8 * math.pi * const.G * m**2 * (6 / (5 * R) - 1 / dx)


def sphere_delta_E_limit(m, R, const: PhysicalConstants = CONST):
    return 48 * math.pi * const.G * m**2 / (5 * R)


def penrose_gr_time(delta_E, const: PhysicalConstants = CONST):
    """``hbar / dE``."""
    if not delta_E > 0:
        raise PhysicsDomainError(f"energy difference must be positive, got {delta_E}")
    return const.hbar / delta_E


def nucleus_model(A: int, const: PhysicalConstants = CONST) -> NucleusModel:
    return NucleusModel(A, const)


def gr_time_coefficient(nucleus: NucleusModel, radius=None, const: PhysicalConstants = CONST):
    """``t_GR * m`` in kg*s, i.e. ``5 hbar R / (48 pi G m_a)``.

    ``radius`` defaults to the nuclear radius; other values smear each
    nucleus' mass over a ball of that radius.
    """
    R = nucleus.a if radius is None else radius
    return 5 * const.hbar * R / (48 * math.pi * const.G * nucleus.m_a)


def gr_time_nuclei(total_mass, nucleus: NucleusModel, radius=None, const: PhysicalConstants = CONST):
    """GR time of an object made of ``total_mass / m_a`` independently displaced nuclei."""
    if not total_mass > 0:
        raise PhysicsDomainError(f"mass must be positive, got {total_mass}")
    return gr_time_coefficient(nucleus, radius, const) / total_mass


def zero_point_fluctuation(mode: OscillatorMode, const: PhysicalConstants = CONST):
    return (const.hbar / (2 * mode.omega_m * mode.m)) ** 0.5


def thermal_occupation(mode: OscillatorMode, const: PhysicalConstants = CONST) -> float:
    """Bose-Einstein occupation of the mode at the bath temperature."""
    if mode.T == 0:
        return 0.0
    x = float(const.hbar * mode.omega_m / (const.k_B * mode.T))
    if x > 700:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def cat_coherence_time(n, mode: OscillatorMode, const: PhysicalConstants = CONST):
    """Thermal decoherence time of a cat state of ``n`` phonons: ``1 / (2 (2 n_th + 1) n gamma_m)``."""
    if n < 1:
        raise PhysicsDomainError("cat size must be >= 1; the ground state is handled separately")
    n_th = thermal_occupation(mode, const)
    return 1 / (2 * (2 * n_th + 1) * n * mode.gamma_m)


def cat_separation(n, x_zpf):
    """Distance ``2 sqrt(n) x_zpf`` between the two branches at maximum displacement."""
    if n < 0:
        raise PhysicsDomainError(f"cat size must be non-negative, got {n}")
    return 2 * n**0.5 * x_zpf
