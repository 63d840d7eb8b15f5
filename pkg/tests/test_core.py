"""Unit conversion, potential families, classification, and the reduced
first-order system building blocks."""

import json
import math

import numpy as np
import pytest

from diracwell import (
    CaseClass,
    CoulombLike,
    FieldConfig,
    Linear,
    Lorentzian,
    PiecewiseConstant,
    QuantumLabel,
    ReducedUnits,
    Tanh,
    build_M,
    classify_case,
    effective_energy,
    effective_potential_electric,
    evaluate_potential,
    potential_derivative,
    potential_from_json,
    potential_to_json,
    square_well,
    superpotential_proportional,
)
from diracwell.errors import (
    ConfigError,
    DiscontinuityPoint,
    SingularPoint,
    UnsupportedRegime,
)


class TestReducedUnits:
    def test_defaults_are_identity(self):
        units = ReducedUnits()
        assert units.reduced_energy(1.7) == 1.7
        assert units.energy(1.7) == 1.7
        assert units.reduced_scalar_potential(-3.0) == -3.0
        assert units.reduced_vector_potential(0.25) == 0.25

    def test_round_trip(self):
        units = ReducedUnits(fermi_velocity=1e6, hbar=1.054571817e-34)
        e = 3.2e-20
        assert units.energy(units.reduced_energy(e)) == pytest.approx(e, rel=1e-14)

    def test_scaling_direction(self):
        # doubling hbar*v_F halves the reduced energy
        assert ReducedUnits(fermi_velocity=2.0).reduced_energy(4.0) == 2.0

    def test_charge_factor(self):
        units = ReducedUnits(hbar=2.0)
        assert units.reduced_vector_potential(3.0, charge=-1.0) == -1.5

    def test_rejects_nonpositive_constants(self):
        with pytest.raises(ConfigError):
            ReducedUnits(fermi_velocity=0.0)
        with pytest.raises(ConfigError):
            ReducedUnits(hbar=-1.0)


class TestPiecewiseConstant:
    def test_square_well_values(self):
        well = square_well(2.0)
        assert well.breakpoints == (-1.0, 1.0)
        assert well.values == (0.0, -2.0, 0.0)
        assert evaluate_potential(well, 0.0) == -2.0
        assert evaluate_potential(well, 5.0) == 0.0
        assert evaluate_potential(well, -5.0) == 0.0

    def test_right_limit_at_step(self):
        well = square_well(2.0)
        # value on the right side of each breakpoint
        assert evaluate_potential(well, -1.0) == -2.0
        assert evaluate_potential(well, 1.0) == 0.0

    def test_vectorized_evaluate(self):
        well = square_well(3.0, half_width=0.5)
        xs = np.array([-2.0, -0.25, 0.25, 2.0])
        np.testing.assert_allclose(evaluate_potential(well, xs), [0.0, -3.0, -3.0, 0.0])

    def test_derivative_zero_between_steps(self):
        well = square_well(2.0)
        assert potential_derivative(well, 0.5) == 0.0
        np.testing.assert_allclose(potential_derivative(well, np.array([-3.0, 0.0, 3.0])), 0.0)

    def test_derivative_raises_on_step(self):
        well = square_well(2.0)
        with pytest.raises(DiscontinuityPoint):
            potential_derivative(well, 1.0)
        with pytest.raises(DiscontinuityPoint):
            potential_derivative(well, np.array([0.0, -1.0]))

    def test_validation(self):
        with pytest.raises(ConfigError):
            PiecewiseConstant((0.0,), (1.0,))  # lengths off by two
        with pytest.raises(ConfigError):
            PiecewiseConstant((1.0, 0.0), (0.0, 1.0, 0.0))  # not increasing
        with pytest.raises(ConfigError):
            PiecewiseConstant((0.0, math.inf), (0.0, 1.0, 0.0))
        with pytest.raises(ConfigError):
            square_well(1.0, half_width=0.0)

    def test_is_zero(self):
        assert PiecewiseConstant((0.0,), (0.0, 0.0)).is_zero()
        assert not square_well(1.0).is_zero()


class TestSmoothFamilies:
    def test_linear(self):
        assert evaluate_potential(Linear(1.0), 0.5) == 0.5
        assert potential_derivative(Linear(2.5), -3.0) == 2.5
        assert Linear(0.0).is_zero()

    def test_lorentzian(self):
        pot = Lorentzian(-2.0)
        assert evaluate_potential(pot, 0.0) == -2.0
        assert evaluate_potential(pot, 1.0) == -1.0
        # derivative matches a central difference
        h = 1e-6
        fd = (evaluate_potential(pot, 0.7 + h) - evaluate_potential(pot, 0.7 - h)) / (2 * h)
        assert potential_derivative(pot, 0.7) == pytest.approx(fd, abs=1e-8)

    def test_tanh(self):
        pot = Tanh(1.5)
        assert evaluate_potential(pot, 0.0) == 0.0
        assert evaluate_potential(pot, 20.0) == pytest.approx(1.5)
        assert potential_derivative(pot, 0.0) == 1.5

    def test_coulomb_singularity(self):
        bare = CoulombLike(1.0)
        with pytest.raises(SingularPoint):
            evaluate_potential(bare, 0.0)
        with pytest.raises(SingularPoint):
            potential_derivative(bare, np.array([1.0, 0.0]))
        assert evaluate_potential(bare, 2.0) == 0.5

    def test_coulomb_cutoff_clamps(self):
        reg = CoulombLike(1.0, cutoff=0.1)
        assert evaluate_potential(reg, 0.0) == 10.0
        assert evaluate_potential(reg, 0.05) == 10.0
        assert evaluate_potential(reg, 0.5) == 2.0
        assert potential_derivative(reg, 0.05) == 0.0
        with pytest.raises(DiscontinuityPoint):
            potential_derivative(reg, 0.1)
        with pytest.raises(ConfigError):
            CoulombLike(1.0, cutoff=-0.1)


class TestPotentialJson:
    @pytest.mark.parametrize(
        "pot",
        [
            square_well(2.0),
            PiecewiseConstant((-1.0, 0.0, 1.0), (0.0, -1.0, 2.0, 0.0)),
            Linear(0.5),
            CoulombLike(-1.0),
            CoulombLike(-1.0, cutoff=0.2),
            Lorentzian(-2.0),
            Tanh(3.0),
        ],
    )
    def test_round_trip(self, pot):
        assert potential_from_json(potential_to_json(pot)) == pot

    def test_rejects_garbage(self):
        with pytest.raises(ConfigError):
            potential_from_json("not json")
        with pytest.raises(ConfigError):
            potential_from_json('{"no_family": 1}')
        with pytest.raises(ConfigError):
            potential_from_json('{"family": "cubic"}')
        with pytest.raises(ConfigError):
            potential_from_json('{"family": "linear"}')  # missing slope

    def test_json_is_sorted_and_stable(self):
        text = potential_to_json(square_well(2.0))
        assert text == json.dumps(json.loads(text), sort_keys=True)


class TestClassifyCase:
    def test_pure_magnetic(self):
        case = classify_case(FieldConfig(electric=None, magnetic=Linear(1.0)))
        assert case == CaseClass("pure_magnetic")

    def test_zero_electric_is_still_pure_magnetic(self):
        config = FieldConfig(electric=Linear(0.0), magnetic=Linear(1.0))
        assert classify_case(config).kind == "pure_magnetic"

    def test_pure_electric(self):
        case = classify_case(FieldConfig(electric=square_well(2.0)))
        assert case == CaseClass("pure_electric")

    def test_proportional_declared(self):
        config = FieldConfig(
            electric=Linear(0.5), magnetic=Linear(1.0), proportionality=0.5
        )
        case = classify_case(config)
        assert case.kind == "proportional"
        assert case.alpha == pytest.approx(0.5)
        assert case.regime == "trigonometric"

    def test_proportional_alpha_estimated(self):
        config = FieldConfig(electric=Lorentzian(-1.0), magnetic=Lorentzian(-2.0))
        case = classify_case(config)
        assert case.kind == "proportional"
        assert case.alpha == pytest.approx(0.5)

    def test_regime_labels(self):
        for alpha, regime in ((0.3, "trigonometric"), (2.0, "hyperbolic"), (1.0, "parabolic")):
            config = FieldConfig(
                electric=Linear(alpha), magnetic=Linear(1.0), proportionality=alpha
            )
            assert classify_case(config).regime == regime

    def test_unsupported_mixture(self):
        config = FieldConfig(electric=square_well(2.0), magnetic=Linear(1.0))
        assert classify_case(config).kind == "unsupported"

    def test_declared_proportionality_is_checked(self):
        with pytest.raises(ConfigError):
            FieldConfig(electric=Linear(1.0), magnetic=Linear(1.0), proportionality=0.5)

    def test_needs_some_profile(self):
        with pytest.raises(ConfigError):
            FieldConfig(electric=None, magnetic=None)


class TestReducedSystem:
    def test_build_M_square_well_inside(self):
        config = FieldConfig(electric=square_well(2.0))
        m = build_M(config, QuantumLabel(k=2.0, epsilon=-1.0), 0.0)
        np.testing.assert_allclose(m, [[2.0, -1.0], [1.0, -2.0]])

    def test_build_M_with_vector_part(self):
        config = FieldConfig(electric=square_well(2.0), magnetic=Linear(1.0))
        m = build_M(config, QuantumLabel(k=1.0, epsilon=0.0), 1.0)
        # outside the well: W = k + x, Delta = eps
        np.testing.assert_allclose(m, [[2.0, 0.0], [0.0, -2.0]])

    def test_M_algebra(self):
        # trace zero, and M^2 = (W^2 - Delta^2) I everywhere
        rng = np.random.default_rng(7)
        config = FieldConfig(electric=Lorentzian(-2.0), magnetic=Tanh(0.5))
        for _ in range(200):
            k, eps, x = rng.uniform(-3, 3, size=3)
            m = build_M(config, QuantumLabel(k=float(k), epsilon=float(eps)), float(x))
            assert m[0, 0] + m[1, 1] == 0.0
            w = k + config.magnetic.evaluate(float(x))
            delta = eps - config.electric.evaluate(float(x))
            np.testing.assert_allclose(m @ m, (w * w - delta * delta) * np.eye(2), atol=1e-12)

    def test_effective_potential_square_well(self):
        well = square_well(2.0)
        assert effective_potential_electric(well, 1.0, 0.0) == pytest.approx(-8.0)
        assert effective_potential_electric(well, 1.0, 3.0) == 0.0

    def test_effective_potential_imaginary_part(self):
        # i v' contributes the imaginary part for a smooth profile
        val = effective_potential_electric(Tanh(1.0), 0.0, 0.0)
        assert val == pytest.approx(1j)

    def test_effective_energy(self):
        assert effective_energy(QuantumLabel(k=2.0, epsilon=0.0)) == -4.0
        assert effective_energy(QuantumLabel(k=1.0, epsilon=1.0)) == 0.0
        assert effective_energy(QuantumLabel(k=2.0, epsilon=0.354274)) == pytest.approx(
            -3.874490, abs=1e-5
        )

    def test_superpotential_zero_alpha(self):
        label = QuantumLabel(k=1.5, epsilon=0.7)
        w, mu = superpotential_proportional(0.0, label, Linear(2.0), 0.3)
        assert w == pytest.approx(1.5 + 2.0 * 0.3)
        assert mu == pytest.approx(0.7**2)

    def test_superpotential_values(self):
        label = QuantumLabel(k=0.0, epsilon=1.0)
        w, mu = superpotential_proportional(0.6, label, Linear(0.0), 0.0)
        assert w == pytest.approx(0.75)
        assert mu == pytest.approx(1.5625)

    def test_superpotential_rejects_steep_mixing(self):
        label = QuantumLabel(k=1.0, epsilon=0.0)
        for alpha in (1.0, -1.0, 1.5):
            with pytest.raises(UnsupportedRegime):
                superpotential_proportional(alpha, label, Linear(1.0), 0.0)
