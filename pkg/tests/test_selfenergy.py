import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from grsuper.constants import constants
from grsuper.physics import nucleus_model, sphere_delta_E
from grsuper.selfenergy import (
    CUBE_SELF_INTEGRAL,
    ConvergenceError,
    EnergyEstimate,
    IntegrationConfig,
    IntegrationError,
    MassDistribution,
    cubic_lattice_sites,
    delta_E,
    lattice_spacing,
    nucleus_lattice,
    pair_energy,
    superposition_energy,
    uniform_slab,
    uniform_sphere,
)

G = constants().G
FAST = IntegrationConfig(sample_count=20_000, seed=3, target_rel_error=0.05)


def sphere_self(m, R):
    # 4 pi G times the double integral (6/5) m^2 / R of a uniform ball
    return 4 * math.pi * G * 6 * m**2 / (5 * R)


class TestOracles:
    def test_shell_theorem_disjoint_balls(self):
        a = uniform_sphere(2.0, 1.0)
        b = uniform_sphere(3.0, 0.5, (0, 0, 4.0))
        e = pair_energy(a, b, FAST)
        assert e.value == pytest.approx(4 * math.pi * G * 6.0 / 4.0, rel=0.01)
        assert abs(e.value - 4 * math.pi * G * 1.5) < 4 * e.error + 1e-12 * e.value

    def test_sphere_self_energy(self):
        e = pair_energy(uniform_sphere(1.0, 1.0), uniform_sphere(1.0, 1.0), IntegrationConfig(200_000, seed=1))
        assert e.value == pytest.approx(sphere_self(1.0, 1.0), rel=0.01)
        assert abs(e.value - sphere_self(1.0, 1.0)) < 4 * e.error

    @pytest.mark.parametrize("k", [2, 3, 10])
    def test_displaced_sphere_matches_closed_form(self, k):
        m, R = 1e-20, 1e-9
        res = superposition_energy("sphere", k * R, mass=m, radius=R, cfg=IntegrationConfig(200_000, seed=k))
        assert res.analytic == pytest.approx(sphere_delta_E(m, R, k * R), rel=1e-14)
        assert abs(res.rel_deviation) < 0.02

    def test_far_limit_is_twice_self_energy(self):
        res = superposition_energy("sphere", math.inf, mass=1.0, radius=1.0, cfg=FAST)
        assert res.numeric.value == pytest.approx(2 * sphere_self(1.0, 1.0), rel=0.03)


class TestIntegralProperties:
    def test_bilinear_in_mass(self):
        a, b = uniform_sphere(1.0, 1.0), uniform_sphere(1.0, 1.0, (0.3, 0, 0))
        e1 = pair_energy(a, b, FAST)
        e2 = pair_energy(a.scaled(2.0), b, FAST)
        e6 = pair_energy(a.scaled(2.0), b.scaled(3.0), FAST)
        assert e2.value == pytest.approx(2 * e1.value, rel=1e-12)
        assert e6.value == pytest.approx(6 * e1.value, rel=1e-12)

    def test_symmetric(self):
        a, b = uniform_sphere(1.0, 1.0), uniform_sphere(2.0, 0.7, (0.5, 0.2, 0))
        ab = pair_energy(a, b, FAST)
        ba = pair_energy(b, a, FAST)
        assert abs(ab.value - ba.value) < 4 * math.hypot(ab.error, ba.error)

    @settings(max_examples=15, deadline=None)
    @given(st.tuples(*[st.floats(-10, 10)] * 3))
    def test_translation_invariant(self, v):
        a, b = uniform_sphere(1.0, 1.0), uniform_sphere(1.0, 1.0, (1.2, 0, 0))
        e0 = pair_energy(a, b, FAST)
        e1 = pair_energy(a.displaced(v), b.displaced(v), FAST)
        assert e1.value == pytest.approx(e0.value, rel=1e-9)

    def test_nonnegative(self):
        a = uniform_slab((1, 2, 0.5), 1.0)
        assert pair_energy(a, a.displaced((0.4, 0, 0)), FAST).value > 0

    def test_estimate_unpacks(self):
        value, error = pair_energy(uniform_sphere(1.0, 1.0), uniform_sphere(1.0, 1.0), FAST)
        assert value > 0 and error > 0


class TestDeterminism:
    @pytest.mark.parametrize("strategy", ["plain-MC", "stratified-MC", "grid"])
    def test_worker_count_does_not_change_result(self, strategy):
        rho = nucleus_lattice(cubic_lattice_sites(3, lattice_spacing(28)), 28)
        cfg = IntegrationConfig(50_000, seed=11, strategy=strategy, target_rel_error=0.1)
        shifted = rho.displaced((0, 0, 3e-15))
        ref = delta_E(rho, shifted, cfg, workers=1)
        for w in (2, 4):
            assert delta_E(rho, shifted, cfg, workers=w) == ref

    def test_seed_changes_result(self):
        a = uniform_sphere(1.0, 1.0)
        e1 = pair_energy(a, a, IntegrationConfig(20_000, seed=1, target_rel_error=0.05))
        e2 = pair_energy(a, a, IntegrationConfig(20_000, seed=2, target_rel_error=0.05))
        assert e1.value != e2.value


def test_error_estimate_calibrated():
    # over many seeds the reported one-sigma error should cover about 68% of outcomes
    a = uniform_sphere(1.0, 1.0)
    b = uniform_sphere(1.0, 1.0, (0, 0, 1.0))
    exact_self = sphere_self(1.0, 1.0)
    z = []
    for seed in range(120):
        e = pair_energy(a, a, IntegrationConfig(2000, seed=seed, target_rel_error=0.2))
        z.append((e.value - exact_self) / e.error)
    z = np.array(z)
    assert 0.55 < np.mean(np.abs(z) < 1) < 0.8
    assert np.mean(np.abs(z) < 2) > 0.88
    assert abs(np.mean(z)) < 0.35
    # for a partly overlapping pair the seed-to-seed spread should match the reported error
    vals = [pair_energy(a, b, IntegrationConfig(2000, seed=s, target_rel_error=0.2)) for s in range(40)]
    mean = np.mean([v.value for v in vals])
    spread = np.std([v.value for v in vals])
    assert spread == pytest.approx(np.mean([v.error for v in vals]), rel=0.35)
    assert mean > 0


def test_colocated_branches_give_no_energy():
    res = superposition_energy("sphere", 0.0, mass=1.0, radius=1.0, cfg=FAST)
    assert res.numeric.value <= 4 * res.numeric.error
    assert res.t_GR_P == math.inf
    assert not res.resolved


class TestGrid:
    def test_cube_constant_independent_quadrature(self):
        # autocorrelation of the unit cube integrated against 1/|u| over [0,1]^3, times 8
        val, _ = integrate.tplquad(
            lambda z, y, x: (1 - x) * (1 - y) * (1 - z) / math.sqrt(x * x + y * y + z * z),
            0, 1, 0, 1, 0, 1,
            epsabs=1e-10, epsrel=1e-10,
        )
        assert 8 * val == pytest.approx(CUBE_SELF_INTEGRAL, rel=1e-7)

    def test_grid_sphere_self_energy(self):
        cfg = IntegrationConfig(200_000, strategy="grid")
        e = pair_energy(uniform_sphere(1.0, 1.0), uniform_sphere(1.0, 1.0), cfg)
        assert e.value == pytest.approx(sphere_self(1.0, 1.0), rel=0.01)

    def test_grid_slab_matches_monte_carlo(self):
        slab = uniform_slab((1.0, 1.0, 1.0), 1.0)
        grid = pair_energy(slab, slab, IntegrationConfig(200_000, strategy="grid"))
        mc = pair_energy(slab, slab, IntegrationConfig(400_000, seed=5))
        exact = 4 * math.pi * G * CUBE_SELF_INTEGRAL
        assert grid.value == pytest.approx(exact, rel=0.01)
        assert mc.value == pytest.approx(exact, rel=0.01)

    def test_stratified_agrees(self):
        a = uniform_sphere(1.0, 1.0)
        e = pair_energy(a, a.displaced((0, 0, 0.8)), IntegrationConfig(100_000, seed=2, strategy="stratified-MC"))
        p = pair_energy(a, a.displaced((0, 0, 0.8)), IntegrationConfig(100_000, seed=2))
        assert abs(e.value - p.value) < 4 * math.hypot(e.error, p.error)


class TestLattice:
    def test_lattice_sum_matches_independent_nuclei(self):
        A = 28
        nuc = nucleus_model(A)
        for k in (2, 10):
            res = superposition_energy("lattice", k * nuc.a, A=A, n_side=4, cfg=IntegrationConfig(50_000, seed=k))
            assert res.rel_deviation == pytest.approx(0.0, abs=0.02)
            assert abs(res.numeric.monopole) < 1e-3 * res.numeric.value
            assert res.numeric.truncation_bound < 1e-6 * res.numeric.value

    def test_shell_default(self):
        d = lattice_spacing(28)
        rho = nucleus_lattice(cubic_lattice_sites(3, d), 28)
        assert rho.shell_radius == pytest.approx(2 * d, rel=1e-8)
        assert rho.total_mass == pytest.approx(27 * nucleus_model(28).m_a)

    def test_lattice_spacing_silicon(self):
        # one nucleus of mass 28 u per cell at 2330 kg/m^3
        assert lattice_spacing(28) ** 3 * 2330 == pytest.approx(nucleus_model(28).m_a, rel=1e-12)


class TestErrors:
    def test_convergence_error_carries_estimate(self):
        a = uniform_sphere(1.0, 1.0)
        cfg = IntegrationConfig(1000, target_rel_error=1e-4, max_samples=4000)
        with pytest.raises(ConvergenceError) as info:
            pair_energy(a, a, cfg)
        assert isinstance(info.value.estimate, EnergyEstimate)
        assert not info.value.estimate.converged
        assert info.value.estimate.value > 0

    @pytest.mark.parametrize(
        "kwargs",
        [dict(sample_count=10), dict(strategy="bogus"), dict(target_rel_error=0.0), dict(target_rel_error=0.7)],
    )
    def test_invalid_config(self, kwargs):
        with pytest.raises(IntegrationError):
            IntegrationConfig(**kwargs)

    def test_unsupported_kind(self):
        with pytest.raises(IntegrationError, match="unsupported"):
            MassDistribution("gaussian", ())

    def test_negative_density(self):
        with pytest.raises(IntegrationError):
            uniform_sphere(-1.0, 1.0)
        with pytest.raises(IntegrationError):
            uniform_sphere(1.0, 1.0).scaled(-1.0)

    def test_unknown_geometry(self):
        with pytest.raises(IntegrationError):
            superposition_energy("torus", 1.0)

    def test_density_integrates_to_mass(self):
        rho = uniform_sphere(2.0, 1.0)
        pts = np.random.default_rng(0).uniform(-1, 1, size=(200_000, 3))
        assert 8 * rho.density(pts).mean() == pytest.approx(2.0, rel=0.01)
