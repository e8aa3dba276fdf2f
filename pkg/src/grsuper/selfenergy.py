"""Brute-force evaluation of gravitational pair energies.

For mass densities ``rho_i`` and ``rho_j`` the pair energy is

    E_ij = 4 pi G * integral integral rho_i(r1) rho_j(r2) / |r1 - r2| dr1 dr2

and the superposition energy is ``|E_11 + E_22 - 2 E_12|``. A distribution is a
collection of uniform components (balls or boxes). Energies are accumulated
over component pairs:

* pairs whose bounding balls overlap use importance sampling with a proposal
  proportional to ``1/|r1 - r2|`` inside a ball, which cancels the kernel
  singularity exactly (no softening);
* disjoint pairs are sampled uniformly (plain or stratified);
* for many-component distributions (nucleus lattices) distant pairs use the
  monopole term (exact for disjoint uniform balls) up to a shell radius and are
  dropped beyond it, with a bound on what the drop does to the energy difference.

Random streams are keyed by ``(seed, stream, pair, chunk)`` with a fixed chunk
size, and partial sums are reduced in that order, so results are bit-identical
for any number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .constants import constants
from .physics import nucleus_model

__all__ = [
    "Ball",
    "Box",
    "MassDistribution",
    "IntegrationConfig",
    "EnergyEstimate",
    "IntegrationError",
    "ConvergenceError",
    "uniform_sphere",
    "uniform_slab",
    "nucleus_lattice",
    "cubic_lattice_sites",
    "lattice_spacing",
    "pair_energy",
    "delta_E",
    "CUBE_SELF_INTEGRAL",
    "SuperpositionEnergy",
    "superposition_energy",
]

G = constants().G

CHUNK = 1 << 15
STRATEGIES = ("plain-MC", "stratified-MC", "grid")

# integral over the unit cube x unit cube of 1/|x - y|
CUBE_SELF_INTEGRAL = 1.8823126443896603

# component pairs closer than this many (radius sums) are integrated; farther ones use monopoles
NEAR_FACTOR = 20.0
# distributions with more components than this go through the neighbour search
SMALL = 8


class IntegrationError(ValueError):
    """Unsupported input for the integrator."""


class ConvergenceError(RuntimeError):
    """Error estimate stayed above target; ``estimate`` holds the partial result."""

    def __init__(self, message: str, estimate: "EnergyEstimate"):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float
    mass: float

    @property
    def bound(self) -> float:
        return self.radius

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3

    def sample(self, u: np.ndarray) -> np.ndarray:
        r = self.radius * np.cbrt(u[:, 0])
        cos_t = 2.0 * u[:, 1] - 1.0
        sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t**2))
        phi = 2.0 * math.pi * u[:, 2]
        pts = np.column_stack((r * sin_t * np.cos(phi), r * sin_t * np.sin(phi), r * cos_t))
        return pts + np.asarray(self.center)

    def inside(self, pts: np.ndarray) -> np.ndarray:
        d = pts - np.asarray(self.center)
        return np.einsum("ij,ij->i", d, d) <= self.radius**2

    def shifted(self, v) -> "Ball":
        return replace(self, center=tuple(np.add(self.center, v).tolist()))


@dataclass(frozen=True)
class Box:
    center: tuple
    half: tuple
    mass: float

    @property
    def bound(self) -> float:
        return float(np.linalg.norm(self.half))

    @property
    def volume(self) -> float:
        return 8.0 * float(np.prod(self.half))

    def sample(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self.center) + (2.0 * u[:, :3] - 1.0) * np.asarray(self.half)

    def inside(self, pts: np.ndarray) -> np.ndarray:
        return np.all(np.abs(pts - np.asarray(self.center)) <= np.asarray(self.half), axis=1)

    def shifted(self, v) -> "Box":
        return replace(self, center=tuple(np.add(self.center, v).tolist()))


@dataclass(frozen=True)
class MassDistribution:
    """A mass density made of uniform components.

    ``kind`` is one of ``uniform-sphere``, ``uniform-slab`` or ``nucleus-lattice``.
    Build instances with :func:`uniform_sphere`, :func:`uniform_slab` and
    :func:`nucleus_lattice`.
    """

    kind: str
    components: tuple
    shell_radius: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform-sphere", "uniform-slab", "nucleus-lattice"):
            raise IntegrationError(f"unsupported distribution kind {self.kind!r}")
        for c in self.components:
            if c.mass < 0:
                raise IntegrationError("density must be non-negative")

    @property
    def total_mass(self) -> float:
        return float(sum(c.mass for c in self.components))

    def displaced(self, v) -> "MassDistribution":
        return replace(self, components=tuple(c.shifted(v) for c in self.components))

    def scaled(self, factor: float) -> "MassDistribution":
        if factor < 0:
            raise IntegrationError("mass scale must be non-negative")
        return replace(self, components=tuple(replace(c, mass=c.mass * factor) for c in self.components))

    def density(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rho = np.zeros(len(pts))
        for c in self.components:
            rho += np.where(c.inside(pts), c.mass / c.volume, 0.0)
        return rho

    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.components], dtype=float)


def uniform_sphere(m: float, R: float, center=(0.0, 0.0, 0.0)) -> MassDistribution:
    if not (m >= 0 and R > 0):
        raise IntegrationError("sphere needs m >= 0 and R > 0")
    return MassDistribution("uniform-sphere", (Ball(tuple(map(float, center)), float(R), float(m)),))


def uniform_slab(extents, m: float, center=(0.0, 0.0, 0.0)) -> MassDistribution:
    """Uniform box with full side lengths ``extents``."""
    half = tuple(0.5 * float(e) for e in extents)
    if len(half) != 3 or min(half) <= 0 or m < 0:
        raise IntegrationError("slab needs three positive extents and m >= 0")
    return MassDistribution("uniform-slab", (Box(tuple(map(float, center)), half, float(m)),))


def lattice_spacing(A: int, density: float = 2330.0) -> float:
    """Cubic lattice constant giving one nucleus of mass number ``A`` per cell at ``density`` kg/m^3."""
    return (nucleus_model(A).m_a / density) ** (1.0 / 3.0)


def cubic_lattice_sites(n_side: int, spacing: float) -> np.ndarray:
    idx = np.arange(n_side, dtype=float)
    g = np.stack(np.meshgrid(idx, idx, idx, indexing="ij"), axis=-1).reshape(-1, 3)
    return (g - 0.5 * (n_side - 1)) * spacing


def nucleus_lattice(sites, A: int, displacement=(0.0, 0.0, 0.0), shell_radius: float | None = None) -> MassDistribution:
    """Nuclei of mass number ``A`` as uniform balls of radius ``a(A)`` at ``sites + displacement``.

    Cross-nucleus terms are kept for centre distances up to ``shell_radius``
    (default: twice the nearest-neighbour distance).
    """
    sites = np.asarray(sites, dtype=float).reshape(-1, 3) + np.asarray(displacement, dtype=float)
    nuc = nucleus_model(A)
    if shell_radius is None:
        if len(sites) > 1:
            d, _ = cKDTree(sites).query(sites, k=2)
            shell_radius = 2.0 * float(d[:, 1].min()) * (1 + 1e-9)
        else:
            shell_radius = 0.0
    comps = tuple(Ball(tuple(s), float(nuc.a), float(nuc.m_a)) for s in sites.tolist())
    return MassDistribution("nucleus-lattice", comps, float(shell_radius))


@dataclass(frozen=True)
class IntegrationConfig:
    """Sampling controls. ``sample_count`` is the total budget of the first pass;
    passes double until the error target is met or ``max_samples`` is spent."""

    sample_count: int = 200_000
    seed: int = 0
    strategy: str = "plain-MC"
    target_rel_error: float = 0.01
    max_samples: int | None = None

    def __post_init__(self):
        if self.sample_count < 1000:
            raise IntegrationError("sample_count must be >= 1000")
        if not 0 < self.target_rel_error < 0.5:
            raise IntegrationError("target_rel_error must lie in (0, 0.5)")
        if self.strategy not in STRATEGIES:
            raise IntegrationError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")

    @property
    def budget(self) -> int:
        return self.max_samples if self.max_samples is not None else 8 * self.sample_count


@dataclass(frozen=True)
class EnergyEstimate:
    """Energy in joules with a one-sigma error estimate.

    ``monopole`` is the part of ``value`` from far component pairs and
    ``truncation_bound`` bounds the contribution of pairs beyond the shell radius.
    """

    value: float
    error: float
    samples: int
    converged: bool = True
    monopole: float = 0.0
    truncation_bound: float = 0.0
    parts: dict = field(default_factory=dict, compare=False)

    def __iter__(self):
        yield self.value
        yield self.error


# -- per-chunk kernels ------------------------------------------------------


def _uniforms(rng: np.random.Generator, n: int, width: int, stratified: bool) -> np.ndarray:
    u = rng.random((n, width))
    if stratified:
        strata = n // 2
        k = np.repeat(np.arange(strata), 2)
        u[: 2 * strata, 0] = (k + u[: 2 * strata, 0]) / strata
    return u


def _reduce(y: np.ndarray, stratified: bool):
    n = len(y)
    s = float(np.sum(y))
    if stratified and n >= 2:
        m = n - n % 2
        d = y[0:m:2] - y[1:m:2]
        var_sum = float(np.dot(d, d))
        if n % 2:
            var_sum += float(np.var(y)) if n > 1 else 0.0
    else:
        var_sum = float(n * np.var(y, ddof=1)) if n > 1 else 0.0
    return s, n, var_sum


def _overlap(p, q) -> bool:
    return float(np.linalg.norm(np.subtract(p.center, q.center))) < p.bound + q.bound


def _mc_chunk(p, q, n: int, rng: np.random.Generator, stratified: bool):
    """Sum of ``n`` unbiased samples of ``integral integral rho_p rho_q / r`` (without 4 pi G)."""
    if _overlap(p, q):
        # proposal q(u) = 1 / (2 pi L^2 |u|) on |u| < L; the kernel cancels
        L = float(np.linalg.norm(np.subtract(p.center, q.center))) + p.bound + q.bound
        u = _uniforms(rng, n, 6, stratified)
        r1 = p.sample(u[:, :3])
        cos_t = 2.0 * u[:, 3] - 1.0
        sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t**2))
        phi = 2.0 * math.pi * u[:, 4]
        s = L * np.sqrt(u[:, 5])
        step = np.column_stack((s * sin_t * np.cos(phi), s * sin_t * np.sin(phi), s * cos_t))
        y = np.where(q.inside(r1 + step), p.mass * 2.0 * math.pi * L**2 * q.mass / q.volume, 0.0)
    else:
        u = _uniforms(rng, n, 6, stratified)
        r1 = p.sample(u[:, :3])
        r2 = q.sample(u[:, 3:])
        y = p.mass * q.mass / np.linalg.norm(r1 - r2, axis=1)
    return _reduce(y, stratified)


def _grid_cells(c, origin: np.ndarray, h: float, sub: int = 5):
    lo = np.floor((np.asarray(c.center) - c.bound - origin) / h).astype(int)
    hi = np.ceil((np.asarray(c.center) + c.bound - origin) / h).astype(int)
    axes = [np.arange(a, b) for a, b in zip(lo, hi)]
    idx = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    centers = origin + (idx + 0.5) * h
    if isinstance(c, Box):
        # exact overlap of each cell with the box
        lo_c = np.maximum(centers - 0.5 * h, np.subtract(c.center, c.half))
        hi_c = np.minimum(centers + 0.5 * h, np.add(c.center, c.half))
        ext = np.clip(hi_c - lo_c, 0.0, None)
        frac = np.prod(ext, axis=1) / h**3
        keep = frac > 0
        mass = frac[keep] * h**3 * c.mass / c.volume
        return idx[keep], 0.5 * (lo_c + hi_c)[keep], mass, frac[keep]
    offs = (np.arange(sub) + 0.5) / sub - 0.5
    sub_pts = np.stack(np.meshgrid(offs, offs, offs, indexing="ij"), axis=-1).reshape(-1, 3) * h
    frac = np.zeros(len(idx))
    centroid = centers.copy()
    for block in range(0, len(idx), 4096):
        pts = centers[block : block + 4096, None, :] + sub_pts[None, :, :]
        ins = c.inside(pts.reshape(-1, 3)).reshape(len(pts), -1)
        cnt = ins.sum(axis=1)
        frac[block : block + 4096] = cnt / len(sub_pts)
        # partially filled cells act at the centroid of their filled part
        num = np.einsum("ij,ijk->ik", ins, pts)
        centroid[block : block + 4096] = num / np.maximum(cnt, 1)[:, None]
    keep = frac > 0
    # sub-sampled fill fractions are quantized; restore the exact total mass
    mass = frac[keep] * c.mass / frac[keep].sum()
    return idx[keep], centroid[keep], mass, frac[keep]


def _grid_sum(p, q, n_side: int) -> float:
    h = 2.0 * max(p.bound, q.bound) / n_side
    origin = np.asarray(p.center, dtype=float)
    ip, cp, mp, fp = _grid_cells(p, origin, h)
    iq, cq, mq, fq = _grid_cells(q, origin, h)
    total = 0.0
    for b in range(0, len(cp), 1024):
        d = np.linalg.norm(cp[b : b + 1024, None, :] - cq[None, :, :], axis=2)
        same = np.all(ip[b : b + 1024, None, :] == iq[None, :, :], axis=2)
        mm = mp[b : b + 1024, None] * mq[None, :]
        # coincident cells: uniform-cube self term of a cube holding the filled volume
        side = h * np.minimum(fp[b : b + 1024, None], fq[None, :]) ** (1.0 / 3.0)
        kern = np.where(same, CUBE_SELF_INTEGRAL / side, 1.0 / np.where(same, 1.0, d))
        total += float(np.sum(mm * kern))
    return total


def _grid_pair(p, q, cells: int):
    fill = min(1.0, (p.volume / (8 * p.bound**3)))
    n_side = max(4, int(round((cells / fill) ** (1.0 / 3.0))))
    fine = _grid_sum(p, q, n_side)
    coarse = _grid_sum(p, q, max(2, n_side // 2))
    return fine, 1, (fine - coarse) ** 2


# -- pair enumeration ---------------------------------------------------------


def _classify(rho_i: MassDistribution, rho_j: MassDistribution):
    """Split component pairs into integrated pairs and monopole pairs; count dropped pairs."""
    ci, cj = rho_i.components, rho_j.components
    if len(ci) <= SMALL and len(cj) <= SMALL:
        return [(a, b) for a in range(len(ci)) for b in range(len(cj))], [], 0
    shell = max(rho_i.shell_radius, rho_j.shell_radius)
    bi = max(c.bound for c in ci)
    bj = max(c.bound for c in cj)
    near = NEAR_FACTOR * (bi + bj)
    ti, tj = cKDTree(rho_i.centers()), cKDTree(rho_j.centers())
    reach = max(near, shell)
    hits = ti.query_ball_tree(tj, reach)
    mc, mono = [], []
    kept = 0
    for a, row in enumerate(hits):
        for b in sorted(row):
            d = float(np.linalg.norm(np.subtract(ci[a].center, cj[b].center)))
            if d < NEAR_FACTOR * (ci[a].bound + cj[b].bound):
                mc.append((a, b))
            else:
                mono.append((a, b, d))
            kept += 1
    dropped = len(ci) * len(cj) - kept
    return mc, mono, dropped


def _run_units(units, workers: int):
    fn = lambda unit: unit[0](*unit[1:])  # noqa: E731
    if workers <= 1 or len(units) < 2:
        return [fn(u) for u in units]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, units))


def _rng(seed: int, stream: int, job: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream, job, chunk)))


def _mc_unit(p, q, n, seed, stream, job, chunk, stratified):
    return _mc_chunk(p, q, n, _rng(seed, stream, job, chunk), stratified)


def pair_energy(
    rho_i: MassDistribution,
    rho_j: MassDistribution,
    cfg: IntegrationConfig | None = None,
    workers: int = 1,
    stream: int = 0,
) -> EnergyEstimate:
    """Estimate ``E_ij`` with a one-sigma error.

    Raises :class:`ConvergenceError` (carrying the partial estimate) if the
    relative error is still above ``cfg.target_rel_error`` once ``cfg.budget``
    samples have been used.
    """
    cfg = cfg or IntegrationConfig()
    if not isinstance(rho_i, MassDistribution) or not isinstance(rho_j, MassDistribution):
        raise IntegrationError("pair_energy expects MassDistribution instances")
    ci, cj = rho_i.components, rho_j.components
    mc_pairs, mono_pairs, dropped = _classify(rho_i, rho_j)
    mono = math.fsum(ci[a].mass * cj[b].mass / d for a, b, d in mono_pairs)
    scale = 4.0 * math.pi * G

    if cfg.strategy == "grid":
        cells = max(64, int(math.sqrt(cfg.sample_count / max(1, len(mc_pairs)))))
        units = [(_grid_pair, ci[a], cj[b], cells) for a, b in mc_pairs]
        res = _run_units(units, workers)
        s = math.fsum(r[0] for r in res)
        var = math.fsum(r[2] for r in res)
        value = scale * (s + mono)
        est = EnergyEstimate(value, scale * math.sqrt(var), len(res) * cells**2, True, scale * mono)
        return _check(est, cfg)

    stratified = cfg.strategy == "stratified-MC"
    n_jobs = max(1, len(mc_pairs))
    per_job = max(256, cfg.sample_count // n_jobs)
    sums = [0.0] * len(mc_pairs)
    counts = [0] * len(mc_pairs)
    varsums = [0.0] * len(mc_pairs)
    next_chunk = [0] * len(mc_pairs)
    used = 0
    batch = per_job
    err = 0.0
    while True:
        units, owners = [], []
        for job, (a, b) in enumerate(mc_pairs):
            left = batch
            while left > 0:
                n = min(CHUNK, left)
                units.append((_mc_unit, ci[a], cj[b], n, cfg.seed, stream, job, next_chunk[job], stratified))
                owners.append(job)
                next_chunk[job] += 1
                left -= n
        for job, (s, n, v) in zip(owners, _run_units(units, workers)):
            sums[job] += s
            counts[job] += n
            varsums[job] += v
        used += batch * len(mc_pairs)
        # each pair contributes its own sample mean
        value_i = math.fsum(s / n for s, n in zip(sums, counts))
        var_i = math.fsum(v / n**2 for v, n in zip(varsums, counts))
        value = scale * (value_i + mono)
        err = scale * math.sqrt(var_i)
        converged = value == 0 or err <= cfg.target_rel_error * abs(value)
        if converged or 2 * used > cfg.budget:
            break
        batch = counts[0]
    est = EnergyEstimate(
        value, err, sum(counts), converged, scale * mono,
        parts={"dropped_pairs": dropped, "mc_pairs": len(mc_pairs), "monopole_pairs": len(mono_pairs)},
    )
    return _check(est, cfg)


def _check(est: EnergyEstimate, cfg: IntegrationConfig) -> EnergyEstimate:
    if est.value != 0 and est.error > cfg.target_rel_error * abs(est.value):
        est = replace(est, converged=False)
        raise ConvergenceError(
            f"relative error {est.error / abs(est.value):.3g} above target {cfg.target_rel_error}", est
        )
    return est


def _truncation_bound(rho_1: MassDistribution, rho_2: MassDistribution) -> float:
    """Bound on how much pairs beyond the shell radius change ``|E11 + E22 - 2 E12|``.

    For rigidly displaced copies, each dropped unordered pair at distance ``d``
    contributes ``2 m^2 (2/d - 1/|d+delta| - 1/|d-delta|)``, bounded by
    ``4 m^2 delta^2 / (d - delta)^3`` through the Hessian of ``1/r``.
    """
    if len(rho_1.components) <= SMALL or len(rho_1.components) != len(rho_2.components):
        return 0.0
    c1, c2 = rho_1.centers(), rho_2.centers()
    delta = float(np.max(np.linalg.norm(c2 - c1, axis=1)))
    shell = max(rho_1.shell_radius, rho_2.shell_radius)
    m = max(c.mass for c in rho_1.components)
    if len(c1) <= 6000:
        d = pdist(c1)
    else:
        # random subset, rescaled to the full pair count
        rng = np.random.default_rng(0)
        sub = c1[rng.choice(len(c1), 6000, replace=False)]
        d = pdist(sub)
        d = np.repeat(d, int(math.ceil(len(c1) * (len(c1) - 1) / (6000 * 5999))))
    d = d[d > shell]
    if len(d) == 0:
        return 0.0
    return 4.0 * math.pi * G * float(np.sum(4.0 * m**2 * delta**2 / (d - delta) ** 3))


def delta_E(
    rho_1: MassDistribution,
    rho_2: MassDistribution,
    cfg: IntegrationConfig | None = None,
    workers: int = 1,
) -> EnergyEstimate:
    """Self-energy difference ``|E_11 + E_22 - 2 E_12|`` of two superposed branches."""
    cfg = cfg or IntegrationConfig()
    e11 = pair_energy(rho_1, rho_1, cfg, workers, stream=1)
    e22 = pair_energy(rho_2, rho_2, cfg, workers, stream=2)
    e12 = pair_energy(rho_1, rho_2, cfg, workers, stream=3)
    value = abs(e11.value + e22.value - 2.0 * e12.value)
    err = math.sqrt(e11.error**2 + e22.error**2 + 4.0 * e12.error**2)
    mono = e11.monopole + e22.monopole - 2.0 * e12.monopole
    return EnergyEstimate(
        value,
        err,
        e11.samples + e22.samples + e12.samples,
        True,
        mono,
        _truncation_bound(rho_1, rho_2),
        parts={"E11": e11, "E22": e22, "E12": e12},
    )


@dataclass(frozen=True)
class SuperpositionEnergy:
    """Numeric and (when available) closed-form energy difference for a displaced geometry."""

    geometry: str
    dx: float
    numeric: EnergyEstimate
    analytic: float | None
    t_GR_P: float

    @property
    def rel_deviation(self) -> float | None:
        if self.analytic is None or self.analytic == 0:
            return None
        return (self.numeric.value - self.analytic) / self.analytic

    @property
    def resolved(self) -> bool:
        return math.isfinite(self.t_GR_P)


def superposition_energy(
    geometry: str,
    dx: float,
    mass: float | None = None,
    radius: float | None = None,
    A: int = 28,
    n_side: int = 10,
    cfg: IntegrationConfig | None = None,
    workers: int = 1,
) -> SuperpositionEnergy:
    """Energy difference for a body displaced by ``dx`` along z, and ``hbar / dE``.

    ``geometry`` is ``sphere`` (``mass``/``radius`` default to one nucleus of
    mass number ``A``), ``slab`` (a cube of side ``2 * radius``) or ``lattice``
    (``n_side**3`` nuclei at the bulk density of silicon). ``dx = inf`` drops the
    cross term. The time is reported as ``inf`` when the energy is not resolved
    above three standard errors.
    """
    from .physics import sphere_delta_E

    hbar = constants().hbar
    nuc = nucleus_model(A)
    m = nuc.m_a if mass is None else mass
    R = nuc.a if radius is None else radius
    analytic = None
    if geometry == "sphere":
        rho = uniform_sphere(m, R)
        if dx >= 2 * R:
            analytic = sphere_delta_E(m, R, dx)
    elif geometry == "slab":
        rho = uniform_slab((2 * R, 2 * R, 2 * R), m)
    elif geometry == "lattice":
        rho = nucleus_lattice(cubic_lattice_sites(n_side, lattice_spacing(A)), A)
        if dx >= 2 * nuc.a:
            analytic = len(rho.components) * sphere_delta_E(nuc.m_a, nuc.a, dx)
    else:
        raise IntegrationError(f"unknown geometry {geometry!r}; expected sphere, slab or lattice")
    if dx < 0:
        raise IntegrationError("dx must be non-negative")
    cfg = cfg or IntegrationConfig()
    if math.isinf(dx):
        e11 = pair_energy(rho, rho, cfg, workers, stream=1)
        est = EnergyEstimate(2 * e11.value, 2 * e11.error, e11.samples, True, 2 * e11.monopole, parts={"E11": e11})
    else:
        est = delta_E(rho, rho.displaced((0.0, 0.0, dx)), cfg, workers)
    t = hbar / est.value if est.value > 3 * est.error and est.value > 0 else math.inf
    return SuperpositionEnergy(geometry, dx, est, analytic, t)
