"""Unit tests for model currents, weights and their parsers."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from lelong.current_model import (
    CurrentKind,
    ModelCurrent,
    RadialDensity,
    RestrictionForm,
    SignClass,
    Weight,
    WeightKind,
    check_radius,
    domain_radius,
    laplacian_decomposition,
    parse_current,
    parse_weight,
    powers_domain,
    restrict_weight,
    validate_psh,
)
from lelong.error_handling import InvalidInputError
from lelong.schemas import CurrentSpec, WeightSpec
from tests.factories import line, s_eps, s_eps_spec, smooth


class TestRadialDensity:
    """Test RadialDensity evaluation."""

    def test_value(self):
        d = RadialDensity(monomials=((2.0, 1.0), (-1.0, 0.0)), log_coeff=1.0)
        rho = 0.5
        assert float(d.value(rho)) == pytest.approx(2 * rho**2 - 1 + math.log(rho**2), rel=1e-14)

    def test_log_power_value(self):
        d = RadialDensity(log_powers=((3.0, 0.5),))
        assert float(d.value(0.1)) == pytest.approx(-3.0 * (-math.log(0.01)) ** 0.5, rel=1e-14)

    def test_duplicate_exponents_rejected(self):
        with pytest.raises(ValidationError):
            RadialDensity(monomials=((1.0, 1.0), (2.0, 1.0)))

    def test_delta_range(self):
        with pytest.raises(ValidationError):
            RadialDensity(log_powers=((1.0, 1.5),))

    def test_atom_weight_counts_delta_one(self):
        d = RadialDensity(log_coeff=0.5, log_powers=((2.0, 1.0), (1.0, 0.5)))
        assert d.atom_weight == 2.5

    def test_zero(self):
        assert RadialDensity().is_zero
        assert RadialDensity(monomials=((0.0, 1.0),)).is_zero


class TestLaplacianDecomposition:
    """Test the atom/density split of the Laplacian."""

    def test_log_atom_on_line(self):
        atom, _ = laplacian_decomposition(RadialDensity(log_coeff=1.0), 1)
        assert atom == 2.0

    def test_log_power_one_is_a_log(self):
        atom, _ = laplacian_decomposition(RadialDensity(log_powers=((1.0, 1.0),)), 1)
        assert atom == 2.0

    def test_no_atom_in_higher_dimension(self):
        atom, density = laplacian_decomposition(RadialDensity(log_coeff=1.0), 2)
        assert atom == 0.0
        assert np.all(density(np.array([0.1, 0.5])) > 0)

    def test_log_power_density_at_unit_radius(self):
        """The flux of −(−log ρ²)^(1/2) is infinite at ρ = 1; on ℝ² the density is +∞, not nan."""
        _, density = laplacian_decomposition(RadialDensity(log_powers=((1.0, 0.5),)), 1)
        values = density(np.array([0.5, 1.0]))
        assert values[0] > 0
        assert values[1] == np.inf

    def test_log_power_density_at_unit_radius_in_higher_dimension(self):
        _, density = laplacian_decomposition(RadialDensity(log_powers=((1.0, 0.5),)), 2)
        assert float(density(1.0)) == np.inf

    def test_monomial_density(self):
        """Δ ρ^(2a) on ℝ² is 4a²ρ^(2a−2)."""
        _, density = laplacian_decomposition(RadialDensity(monomials=((1.0, 1.5),)), 1)
        assert float(density(0.5)) == pytest.approx(4 * 1.5**2 * 0.5 ** (2 * 1.5 - 2), rel=1e-12)


class TestModelCurrent:
    """Test ModelCurrent.build and the psh check."""

    def test_s_eps_is_nonpositive(self):
        T = s_eps(0.5)
        assert T.sign_class is SignClass.NONPOSITIVE
        assert T.psh.passed
        assert T.codim == 0 and T.support_dim == 1

    def test_sign_classes(self):
        assert line((1.0, 0.5)).sign_class is SignClass.NONNEGATIVE
        assert line((1.0, 1.0), (-0.5, 0.0)).sign_class is SignClass.MIXED
        zero = line()
        assert zero.sign_class is SignClass.ZERO
        assert zero.sign_class.is_nonpositive and zero.sign_class.is_nonnegative

    def test_not_psh_rejected(self):
        with pytest.raises(InvalidInputError, match="not plurisubharmonic"):
            line((-1.0, 1.0))

    def test_not_psh_allowed_without_check(self):
        T = ModelCurrent.build(RadialDensity(monomials=((-1.0, 1.0),)), require_psh=False)
        assert not T.psh.passed
        assert T.psh.first_failure_rho is not None

    def test_negative_atom_rejected(self):
        with pytest.raises(InvalidInputError):
            line(log_coeff=-1.0)

    def test_subspace_dimension(self):
        with pytest.raises(InvalidInputError):
            ModelCurrent.build(RadialDensity(), ambient_dim=2, bidim=2)

    def test_log_needs_unit_ball(self):
        with pytest.raises(InvalidInputError):
            ModelCurrent.build(RadialDensity(log_coeff=1.0), ball_radius=2.0)

    def test_smooth_codim(self):
        T = smooth((1.0, 1.0), (-1.0, 0.0))
        assert T.kind is CurrentKind.SMOOTH
        assert T.codim == 1 and T.support_dim == 2

    def test_validate_psh_matches_build(self):
        T = line(log_coeff=1.0)
        report = validate_psh(T)
        assert report.passed and report.atom_mass == 2.0

    def test_log_power_half_on_unit_ball_is_psh(self):
        """−(−log|z₂|²)^(1/2) on the unit ball passes, with the grid reaching ρ = 1."""
        T = parse_current({"n": 2, "subspace_dim": 1, "ball_radius": 1.0, "log_powers": [[1.0, 0.5]]})
        assert T.psh.passed
        assert T.psh.min_ac_density > 0
        assert T.psh.complex_hessian_ok
        assert T.sign_class is SignClass.NONPOSITIVE


class TestParseCurrent:
    """Test parse_current."""

    def test_placeholder(self):
        T = parse_current(s_eps_spec(), {"eps": 0.25})
        assert T.density.monomials == ((1.0, 0.25), (-1.0, 0.0))

    def test_unresolved_placeholder(self):
        with pytest.raises(InvalidInputError, match="placeholder"):
            parse_current(s_eps_spec())

    def test_json_text(self):
        T = parse_current('{"n": 3, "subspace_dim": 2, "log_coeff": 1.0}')
        assert T.bidim == 2 and T.ambient_dim == 3

    def test_invalid_json(self):
        with pytest.raises(InvalidInputError, match="JSON"):
            parse_current("{not json")

    def test_schema_violation(self):
        with pytest.raises(InvalidInputError):
            parse_current({"n": 2, "subspace_dim": 1, "colour": "red"})

    def test_current_spec_rejects_large_ball_with_logs(self):
        with pytest.raises(ValidationError):
            CurrentSpec(n=2, subspace_dim=1, ball_radius=2.0, log_coeff=1.0)


class TestWeight:
    """Test Weight radii and derived weights."""

    def test_isotropic_radius(self):
        assert Weight.isotropic(2.0).domain_radius(1.0) == pytest.approx(0.99**4, rel=1e-15)

    def test_power_and_scale_radii(self):
        phi = Weight.isotropic(1.5)
        R = phi.domain_radius(1.0)
        assert phi.power(2.0).domain_radius(1.0) == pytest.approx(R**2, rel=1e-12)
        assert phi.scaled(3.0).domain_radius(1.0) == pytest.approx(3 * R, rel=1e-12)

    def test_anisotropic_radius_contains_polydisc(self):
        phi = Weight.anisotropic([1.0, 2.0])
        R = phi.domain_radius(1.0)
        assert R**1.0 + R**0.5 == pytest.approx(0.99**2, rel=1e-10)

    def test_shifted_radius(self):
        phi = Weight.shifted([0.2, 0.0])
        assert phi.domain_radius(1.0) == pytest.approx((0.99 * 0.8) ** 2, rel=1e-12)

    def test_shifted_center_outside(self):
        with pytest.raises(InvalidInputError):
            Weight.shifted([1.5, 0.0]).domain_radius(1.0)

    def test_explicit_radius_must_fit(self):
        assert Weight(kind=WeightKind.ISOTROPIC, radius=0.5).domain_radius(1.0) == 0.5
        with pytest.raises(InvalidInputError):
            Weight(kind=WeightKind.ISOTROPIC, radius=2.0).domain_radius(1.0)

    def test_label_round_trip(self):
        phi = Weight.anisotropic([1.0, 2.0], k=0.5, scale=2.0)
        assert parse_weight(phi.label()) == phi

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            domain_radius(Weight.anisotropic([1.0, 2.0, 3.0]), s_eps(0.5))

    def test_check_radius(self):
        T = s_eps(0.5)
        assert check_radius(Weight.isotropic(), T, 0.5) == pytest.approx(0.9801)
        with pytest.raises(InvalidInputError, match="out of range"):
            check_radius(Weight.isotropic(), T, 0.99)


class TestParseWeight:
    """Test the weight micro-syntax and JSON forms."""

    def test_pow(self):
        assert parse_weight("pow:k=2") == Weight.isotropic(2.0)

    def test_aniso(self):
        phi = parse_weight("aniso:b=1,2,k=0.5")
        assert phi.b == (1.0, 2.0) and phi.k == 0.5

    def test_shifted_complex_center(self):
        phi = parse_weight("shifted:k=1,c=0,0.1j")
        assert np.allclose(phi.center_vector, [0, 0.1j])

    def test_json(self):
        assert parse_weight('{"kind": "pow", "k": 3, "s": 2}') == Weight.isotropic(3.0, scale=2.0)

    def test_bad_number(self):
        with pytest.raises(InvalidInputError):
            parse_weight("pow:k=two")

    def test_unknown_kind(self):
        with pytest.raises(InvalidInputError):
            parse_weight("cubic:k=1")

    def test_aniso_requires_b(self):
        with pytest.raises(ValidationError):
            WeightSpec(kind="aniso")


class TestRestriction:
    """Test restrict_weight and powers_domain."""

    def test_aniso_on_axis_is_pure_power(self):
        restricted = restrict_weight(Weight.anisotropic([1.0, 2.0]), s_eps(0.5))
        assert restricted.form is RestrictionForm.PURE_POWER
        assert restricted.k == 2.0

    def test_shifted_on_smooth_is_general(self):
        restricted = restrict_weight(Weight.shifted([0.2, 0.0]), smooth((1.0, 1.0), (-1.0, 0.0)))
        assert restricted.form is RestrictionForm.GENERAL
        assert restricted.offset == 0.0

    def test_sublevel_polydisc(self):
        restricted = restrict_weight(Weight.isotropic(2.0), s_eps(0.5))
        center, radii = restricted.sublevel_polydisc(0.0625)
        assert radii == pytest.approx([0.5])
        assert not np.any(center)

    def test_pure_power_domain_is_unbounded(self):
        domain = powers_domain(s_eps(0.5), Weight.isotropic())
        assert domain.unbounded and domain.contains(0.01) and domain.contains(50.0)
        assert not domain.contains(0.0)
        assert domain.method == "pure_power"

    def test_general_profile_domain(self):
        """A shifted center on the support leaves every k > 0 admissible."""
        domain = powers_domain(smooth((1.0, 1.0), (-1.0, 0.0)), Weight.shifted([0.2, 0.0]))
        assert domain.method == "local_mass_exponent"
        assert domain.k_min == 0.0 and domain.unbounded
        assert domain.contains(0.5) and domain.contains(3.0)

    def test_off_support_center_domain(self):
        domain = powers_domain(s_eps(0.5), Weight.shifted([0.2, 0.0]))
        assert domain.method == "no_zero_set"
        assert domain.contains(0.25)
