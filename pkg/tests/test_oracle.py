"""Independent numerical routes: grid diagonalization of the reduced
second-order problem and two-sided shooting on the first-order system.
These share no algebra with the matching construction they check."""

import math

import numpy as np
import pytest

from diracwell import (
    FieldConfig,
    Linear,
    Lorentzian,
    QuantumLabel,
    dirac_shooting,
    find_roots,
    grid_eigenvalues,
    landau_levels_proportional,
    partner_potentials,
    proportional_oscillator_levels,
    shooting_bound_states,
    square_well,
    square_well_config,
    square_well_secular,
)
from diracwell.errors import GridTooCoarse, NonDecayingExterior, UnsupportedRegime
from diracwell.oracle import GridSpec

WELL22_ROOTS = (0.35427361798250695, 1.1335605119300567, 1.9258300731147544)
# shooting zero set of the Lorentzian well, strength -2, k = 2, step 0.01
LORENTZ_ROOTS = (0.567247, 1.304795, 1.696057, 1.881440, 1.957666)


class TestGridSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(1.0, 1.0, 100)
        with pytest.raises(ValueError):
            GridSpec(0.0, 1.0, 2)
        with pytest.raises(ValueError):
            GridSpec(0.0, 1.0, 100, boundary="periodic")

    def test_spacing_and_refinement(self):
        spec = GridSpec(0.0, 1.0, 11)
        assert spec.spacing == pytest.approx(0.1)
        fine = spec.refined()
        assert fine.points == 21
        assert fine.spacing == pytest.approx(0.05)


class TestGridEigenvalues:
    def test_particle_in_a_box(self):
        spec = GridSpec(0.0, math.pi, 4001)
        vals = grid_eigenvalues(lambda x: 0.0 * x, spec, 3)
        assert vals == pytest.approx([1.0, 4.0, 9.0], abs=1e-4)

    def test_shifted_oscillator(self):
        # u = x^2 - 1 has exact levels 0, 2, 4, ...
        spec = GridSpec(-12.0, 12.0, 4001)
        vals = grid_eigenvalues(lambda x: x * x - 1.0, spec, 3)
        assert vals == pytest.approx([0.0, 2.0, 4.0], abs=1e-4)

    def test_convergence_control(self):
        spec = GridSpec(-12.0, 12.0, 41)
        with pytest.raises(GridTooCoarse):
            grid_eigenvalues(lambda x: x * x - 1.0, spec, 3, tol=1e-6)

    def test_tol_path_returns_refined_values(self):
        spec = GridSpec(-12.0, 12.0, 2001)
        checked = grid_eigenvalues(lambda x: x * x - 1.0, spec, 2, tol=1.0)
        refined = grid_eigenvalues(lambda x: x * x - 1.0, spec.refined(), 2)
        np.testing.assert_allclose(checked, refined, atol=0.0)


class TestFactorizationPartners:
    def test_partner_spectra_are_degenerate_above_ground(self):
        # w = x: partners x^2 - 1 and x^2 + 1 with spectra {0,2,4,...} and
        # {2,4,6,...}; the upper partner reproduces the base spectrum from
        # its first level shifted by one index
        minus, plus = partner_potentials(lambda x: x, lambda x: np.ones_like(x))
        spec = GridSpec(-12.0, 12.0, 8001)
        base = grid_eigenvalues(minus, spec, 4)
        mate = grid_eigenvalues(plus, spec, 3)
        assert base == pytest.approx([0.0, 2.0, 4.0, 6.0], abs=1e-4)
        np.testing.assert_allclose(mate, base[1:], atol=1e-4)


class TestProportionalOscillator:
    def test_levels_match_closed_form(self):
        b = 1.0 * math.sqrt(1.0 - 0.25)
        levels = proportional_oscillator_levels(0.5, 1.0, 3)
        assert levels == pytest.approx([0.0, 2.0 * b, 4.0 * b], abs=1e-8)

    def test_matches_dispersive_formula(self):
        # the level formula and the oscillator reduction agree through
        # mu = (eps + alpha k)^2 / (1 - alpha^2)
        alpha, beta, k = 0.5, 1.0, 2.0
        levels = proportional_oscillator_levels(alpha, beta, 4)
        for n in range(4):
            eps_plus, eps_minus = landau_levels_proportional(alpha, beta, k, n)
            for eps in (eps_plus, eps_minus):
                mu = (eps + alpha * k) ** 2 / (1.0 - alpha * alpha)
                assert mu == pytest.approx(levels[n], abs=1e-7)

    def test_richardson_tightens_the_levels(self):
        plain = proportional_oscillator_levels(0.3, 1.0, 3, points=1501, richardson=False)
        extrap = proportional_oscillator_levels(0.3, 1.0, 3, points=1501, richardson=True)
        b = math.sqrt(1.0 - 0.09)
        exact = np.array([0.0, 2.0 * b, 4.0 * b])
        assert np.max(np.abs(extrap - exact)) < np.max(np.abs(plain - exact))

    def test_error_paths(self):
        with pytest.raises(UnsupportedRegime):
            proportional_oscillator_levels(1.0, 1.0, 3)
        with pytest.raises(ValueError):
            proportional_oscillator_levels(0.5, 0.0, 3)


class TestDiracShooting:
    def test_square_well_zero_set(self):
        roots = shooting_bound_states(
            square_well_config(2.0), 2.0, scan_points=500, tol=1e-9, step=2e-3
        )
        assert len(roots) == 3
        for got, want in zip(roots, WELL22_ROOTS):
            assert got == pytest.approx(want, abs=1e-5)

    def test_determinant_changes_sign_across_root(self):
        config = square_well_config(2.0)
        lo = dirac_shooting(config, QuantumLabel(2.0, WELL22_ROOTS[0] - 0.05))
        hi = dirac_shooting(config, QuantumLabel(2.0, WELL22_ROOTS[0] + 0.05))
        assert lo * hi < 0.0

    def test_batch_equals_scalar(self):
        config = square_well_config(2.0)
        grid = np.linspace(0.1, 1.9, 7)
        batch = dirac_shooting(config, QuantumLabel(2.0, grid))
        for i, eps in enumerate(grid):
            scalar = dirac_shooting(config, QuantumLabel(2.0, float(eps)))
            assert batch[i] == pytest.approx(scalar, rel=1e-12)

    def test_match_point_invariance(self):
        sets = [
            shooting_bound_states(
                square_well_config(2.0), 2.0,
                scan_points=500, tol=1e-9, step=2e-3, x_match=xm,
            )
            for xm in (-0.5, 0.0, 0.7)
        ]
        for other in sets[1:]:
            assert other == pytest.approx(sets[0], abs=1e-8)

    def test_step_refinement_is_converged(self):
        coarse = shooting_bound_states(
            square_well_config(2.0), 2.0, scan_points=500, tol=1e-9, step=4e-3
        )
        fine = shooting_bound_states(
            square_well_config(2.0), 2.0, scan_points=500, tol=1e-9, step=2e-3
        )
        assert coarse == pytest.approx(fine, abs=1e-8)

    def test_zero_field_has_no_bound_states(self):
        config = FieldConfig(electric=square_well(0.0))
        assert shooting_bound_states(config, 2.0, scan_points=200) == []

    def test_zero_momentum_band_is_empty(self):
        assert shooting_bound_states(square_well_config(2.0), 0.0) == []

    def test_smooth_well_spectrum(self):
        # smooth path: Lorentzian well, moderate resolution
        roots = shooting_bound_states(
            FieldConfig(electric=Lorentzian(-2.0)), 2.0,
            scan_points=150, tol=1e-5, step=0.02,
        )
        assert len(roots) == len(LORENTZ_ROOTS)
        for got, want in zip(roots, LORENTZ_ROOTS):
            assert got == pytest.approx(want, abs=1e-3)
        assert all(-2.0 < r < 2.0 for r in roots)

    def test_rejects_non_decaying_energy(self):
        with pytest.raises(NonDecayingExterior):
            dirac_shooting(square_well_config(2.0), QuantumLabel(2.0, 2.5))

    def test_rejects_linear_electric(self):
        with pytest.raises(NonDecayingExterior):
            dirac_shooting(FieldConfig(electric=Linear(1.0)), QuantumLabel(2.0, 0.5))

    def test_rejects_linear_magnetic(self):
        # uniform field has no asymptotically constant window; the grid
        # route covers it instead
        config = FieldConfig(electric=None, magnetic=Linear(1.0))
        with pytest.raises(UnsupportedRegime):
            dirac_shooting(config, QuantumLabel(0.0, 1.0))

    def test_match_point_must_lie_in_window(self):
        with pytest.raises(ValueError):
            dirac_shooting(
                square_well_config(2.0), QuantumLabel(2.0, 0.5), x_match=7.0
            )

    def test_agrees_with_secular_route(self):
        for k, v0 in ((1.5, 3.0), (2.5, 6.0)):
            secular = find_roots(square_well_secular(k, v0))
            shot = shooting_bound_states(
                square_well_config(v0), k, scan_points=500, tol=1e-9, step=2e-3
            )
            assert len(secular) == len(shot)
            for a, b in zip(secular, shot):
                assert abs(a - b) < 1e-5
