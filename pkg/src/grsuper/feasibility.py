"""Evaluation pipeline: zero-point spread -> cat size -> coherence time vs GR time.

Also the combined feasibility window on ``n/m`` and the minimum quality factor
for which that window opens.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .catalog import CatalogEntry, RModel, characteristic_size
from .constants import constants
from .physics import (
    cat_coherence_time,
    cat_separation,
    gr_time_coefficient,
    gr_time_nuclei,
    nucleus_model,
    thermal_occupation,
    zero_point_fluctuation,
)

__all__ = [
    "SuperpositionPlan",
    "FeasibilityReport",
    "Margins",
    "SweepTooLarge",
    "QUANTUM_NTH",
    "THERMAL_NTH",
    "required_cat_size",
    "ground_state_coherence_time",
    "evaluate",
    "inequality_margins",
    "separation_coefficient",
    "quantum_upper_coefficient",
    "thermal_upper_coefficient",
    "min_quality_factor",
    "min_quality_factor_bisect",
    "sweep",
]

CONST = constants()
NUCLEUS = RModel("nucleus")

# n_th below / above these selects the zero-temperature / high-temperature window
QUANTUM_NTH = 0.1
THERMAL_NTH = 10.0

DEFAULT_SWEEP_CAP = 1_000_000


class SweepTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SuperpositionPlan:
    n: int
    dx: float
    r_model: RModel
    required_dx: float
    R: float
    x_zpf: float

    @property
    def n_display(self) -> str:
        return "0/1" if self.n <= 1 else str(self.n)


def required_cat_size(entry: CatalogEntry, model: RModel = NUCLEUS) -> SuperpositionPlan:
    """Smallest cat state whose branch separation reaches ``2R``.

    The ground state (``dx = x_zpf``) is enough when ``x_zpf >= 2R``; otherwise
    ``n = ceil((R / x_zpf)**2)``.
    """
    x = zero_point_fluctuation(entry.mode)
    R = characteristic_size(entry, model)
    required = 2.0 * R
    if x >= required:
        return SuperpositionPlan(0, x, model, required, R, x)
    n = max(1, math.ceil((R / x) ** 2))
    # guard the ceiling against rounding in (R/x)**2; steps stay visible in float sqrt
    while cat_separation(n, x) < required:
        n += max(1, n >> 50)
    while 1 < n < 1 << 50 and cat_separation(n - 1, x) >= required:
        n -= 1
    return SuperpositionPlan(n, cat_separation(n, x), model, required, R, x)


def ground_state_coherence_time(entry: CatalogEntry) -> float:
    """``1 / (gamma_m n_th)``; infinite when the bath leaves the mode empty."""
    n_th = thermal_occupation(entry.mode)
    if n_th == 0:
        return math.inf
    return 1.0 / (entry.mode.gamma_m * n_th)


@dataclass(frozen=True)
class Margins:
    """Both sides of the window ``lower <= n_term <= upper`` (units kg^-1).

    ``lower_margin = n_term / lower`` and ``upper_margin = upper / n_term``;
    both above one means the chosen state sits inside an open window.
    """

    regime: str
    n_term: float
    lower: float
    upper: float
    lower_margin: float
    upper_margin: float

    @property
    def window_open(self) -> bool:
        return self.lower < self.upper


@dataclass(frozen=True)
class FeasibilityReport:
    id: str
    label: str
    f_m: float
    mass: float
    Q: float
    T_bath: float
    r_model: str
    x_zpf: float
    R: float
    n: int
    n_display: str
    n_th: float
    dx: float
    required_dx: float
    t_coh: float
    t_GR: float
    ratio: float
    verdict: str
    threshold: float
    margins: Margins

    @property
    def favorable(self) -> bool:
        return self.verdict == "favorable"


def separation_coefficient(R: float) -> float:
    """``4 pi R^2 / hbar`` (s/kg): the window's lower edge is this times ``f_m``."""
    return 4.0 * math.pi * R**2 / CONST.hbar


def quantum_upper_coefficient(A: int = 27, R: float | None = None) -> float:
    """``1 / (4 pi t_GR m)`` (Hz/kg): zero-temperature upper edge per unit ``Q/f_m``."""
    return 1.0 / (4.0 * math.pi * gr_time_coefficient(nucleus_model(A), R))


def thermal_upper_coefficient(T: float = 0.01, A: int = 27, R: float | None = None) -> float:
    """``hbar / (4 k_B T t_GR m)`` (1/kg): high-temperature upper edge per unit ``Q``."""
    return CONST.hbar / (4.0 * CONST.k_B * T * gr_time_coefficient(nucleus_model(A), R))


def _regime(n_th: float, regime: str) -> str:
    if regime != "auto":
        if regime not in ("quantum", "thermal", "exact"):
            raise ValueError(f"unknown regime {regime!r}")
        return regime
    if n_th < QUANTUM_NTH:
        return "quantum"
    if n_th > THERMAL_NTH:
        return "thermal"
    return "exact"


def inequality_margins(entry: CatalogEntry, n: int, model: RModel = NUCLEUS, regime: str = "auto") -> Margins:
    """Position of a cat of ``n`` phonons within the feasibility window.

    ``quantum`` uses the zero-temperature limit, ``thermal`` the
    ``k_B T >> hbar omega`` limit with ``n + 1/4``, ``exact`` the Bose-Einstein
    occupation (``n = 0`` meaning the ground state). ``auto`` picks by ``n_th``.
    """
    mode = entry.mode
    n_th = thermal_occupation(mode)
    R = characteristic_size(entry, model)
    C = gr_time_coefficient(entry.nucleus, R)
    lower = separation_coefficient(R) * entry.f_m
    chosen = _regime(n_th, regime)
    if chosen == "quantum":
        n_term = n / entry.mass
        upper = entry.Q / entry.f_m / (4.0 * math.pi * C)
    elif chosen == "thermal":
        n_term = (n + 0.25) / entry.mass
        upper = entry.Q * CONST.hbar / (4.0 * CONST.k_B * entry.T_bath * C)
    elif n >= 1:
        n_term = n / entry.mass
        upper = entry.Q / (4.0 * math.pi * entry.f_m * (2.0 * n_th + 1.0) * C)
    else:
        # ground state: dx = x_zpf behaves as n = 1/4 on the separation side
        n_term = 0.25 / entry.mass
        upper = math.inf if n_th == 0 else 0.25 / (mode.gamma_m * n_th * C)
    lower_margin = n_term / lower
    upper_margin = math.inf if n_term == 0 else upper / n_term
    return Margins(chosen, n_term, lower, upper, lower_margin, upper_margin)


def _verdict(ratio: float, dx_ok: bool, threshold: float) -> str:
    if ratio >= threshold and dx_ok:
        return "favorable"
    if threshold / 10.0 <= ratio:
        return "marginal"
    return "unfavorable"


def evaluate(
    entry: CatalogEntry,
    model: RModel = NUCLEUS,
    threshold: float = 1.0,
    ground_state: bool = False,
) -> FeasibilityReport:
    """Run the full pipeline for one oscillator.

    States with ``n <= 1`` are evaluated as a cat of size one. With
    ``ground_state=True`` an ``n = 0`` plan uses the ground-state coherence
    time ``1/(gamma_m n_th)`` instead (unbounded at ``n_th = 0``).
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    plan = required_cat_size(entry, model)
    mode = entry.mode
    n_th = thermal_occupation(mode)
    if ground_state and plan.n == 0:
        t_coh = ground_state_coherence_time(entry)
    else:
        t_coh = cat_coherence_time(max(plan.n, 1), mode)
    t_gr = gr_time_nuclei(entry.mass, entry.nucleus, plan.R)
    ratio = t_coh / t_gr
    dx_ok = plan.dx >= plan.required_dx
    margins = inequality_margins(entry, plan.n if ground_state else max(plan.n, 1), model)
    return FeasibilityReport(
        id=entry.id,
        label=entry.label,
        f_m=entry.f_m,
        mass=entry.mass,
        Q=entry.Q,
        T_bath=entry.T_bath,
        r_model=str(model),
        x_zpf=plan.x_zpf,
        R=plan.R,
        n=plan.n,
        n_display=plan.n_display,
        n_th=n_th,
        dx=plan.dx,
        required_dx=plan.required_dx,
        t_coh=t_coh,
        t_GR=t_gr,
        ratio=ratio,
        verdict=_verdict(ratio, dx_ok, threshold),
        threshold=threshold,
        margins=margins,
    )


def min_quality_factor(f_m: float, T: float = 0.01, material: str = "Si") -> float:
    """Smallest ``Q`` for which the feasibility window opens (mass drops out).

    Equates the separation edge ``4 pi a^2 f_m / hbar`` with the coherence edge
    ``Q / (4 pi f_m (2 n_th + 1) t_GR m)``.
    """
    probe = CatalogEntry("probe", "probe", f_m, 1.0, 1.0, material, T)
    n_th = thermal_occupation(probe.mode)
    a = probe.nucleus.a
    C = gr_time_coefficient(probe.nucleus)
    return separation_coefficient(a) * f_m * 4.0 * math.pi * f_m * (2.0 * n_th + 1.0) * C


def min_quality_factor_bisect(
    f_m: float, T: float = 0.01, material: str = "Si", rtol: float = 1e-10
) -> float:
    """Same threshold found by bisecting on ``Margins.window_open`` in the exact regime."""

    def is_open(Q):
        entry = CatalogEntry("probe", "probe", f_m, 1e-12, Q, material, T)
        return inequality_margins(entry, 1, regime="exact").window_open

    lo, hi = 1.0, 10.0
    while is_open(lo):
        lo /= 10.0
    while not is_open(hi):
        hi *= 10.0
    while hi - lo > rtol * hi:
        mid = math.sqrt(lo * hi) if hi / lo > 4 else 0.5 * (lo + hi)
        if is_open(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _sweep_point(args):
    entry, model, threshold = args
    return evaluate(entry, model, threshold)


def sweep(
    f_m,
    mass,
    Q,
    T,
    model: RModel = NUCLEUS,
    threshold: float = 1.0,
    material: str = "Si",
    workers: int = 1,
    cap: int = DEFAULT_SWEEP_CAP,
) -> list[FeasibilityReport]:
    """Evaluate every point of the grid ``f_m x mass x Q x T`` (row order lexicographic in that order)."""
    axes = {"f_m": list(f_m), "mass": list(mass), "Q": list(Q), "T": list(T)}
    for name, values in axes.items():
        if not values:
            raise ValueError(f"axis {name} is empty")
        if any(not (v > 0) for v in values):
            raise ValueError(f"axis {name} must be strictly positive")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError(f"axis {name} must be strictly increasing")
    size = math.prod(len(v) for v in axes.values())
    if size > cap:
        raise SweepTooLarge(f"grid has {size} points, cap is {cap}")
    jobs = []
    for i, (f, m, q, t) in enumerate(itertools.product(*axes.values())):
        entry = CatalogEntry(f"grid-{i}", f"grid point {i}", f, m, q, material, t)
        jobs.append((entry, model, threshold))
    if workers <= 1 or size < 2:
        return [_sweep_point(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_sweep_point, jobs, chunksize=max(1, size // (4 * workers))))
