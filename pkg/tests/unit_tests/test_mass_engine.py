"""Unit tests for the deterministic mass engine."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lelong.current_model import Weight
from lelong.error_handling import InvalidInputError, UnsupportedConfigurationError
from lelong.mass_engine import (
    Engine,
    Kernel,
    MassMethod,
    ddc_expansion,
    kernel_integral,
    lelong_jensen_ddc_part,
    mass_T,
    nu_ddc,
    nu_ddc_estimate,
    nu_estimate,
    nu_value,
    radial_reduction,
    ring_alpha_mass,
)
from tests.factories import line, plane, s_eps, s_eps_nu, smooth

EXAMPLE_GRID = [(eps, k) for eps in (0.25, 0.5, 1.0) for k in (1.0, 2.0, 3.0)]


class TestRadialReduction:
    """Test the radial reduction constants."""

    def test_subspace_constants(self):
        red = radial_reduction(plane((1.0, 1.0), (-1.0, 0.0)), Weight.isotropic(2.0))
        assert (red.mass_coeff, red.mass_exponent) == (16.0, 4.0)
        assert (red.ddc_coeff, red.ddc_exponent) == (4.0, 2.0)
        assert not red.has_closed_mass

    def test_smooth_constants(self):
        red = radial_reduction(smooth((1.0, 1.0), (-1.0, 0.0)), Weight.isotropic())
        assert red.codim == 1
        assert red.mass_coeff == 4.0 and red.mass_exponent == 2.0

    def test_shifted_weight_has_no_reduction(self):
        assert radial_reduction(smooth((1.0, 1.0), (-1.0, 0.0)), Weight.shifted([0.2, 0.0])) is None


class TestNu:
    """Test ν(S, φ, r) on the model family."""

    @pytest.mark.parametrize(("eps", "k"), EXAMPLE_GRID)
    def test_closed_form_matches_formula(self, eps, k):
        S, phi = s_eps(eps), Weight.isotropic(k)
        for r in (1e-6, 1e-3, 0.1, 0.5):
            estimate = nu_estimate(S, phi, r)
            assert estimate.method is MassMethod.CLOSED_FORM
            assert estimate.value == pytest.approx(s_eps_nu(eps, k, r), rel=1e-12)

    @pytest.mark.parametrize(("eps", "k"), EXAMPLE_GRID)
    def test_quadrature_agrees(self, eps, k):
        S, phi = s_eps(eps), Weight.isotropic(k)
        for r in (1e-4, 0.3):
            estimate = nu_estimate(S, phi, r, engine="quad")
            assert estimate.method is MassMethod.QUADRATURE
            assert estimate.value == pytest.approx(s_eps_nu(eps, k, r), rel=1e-8, abs=1e-10)

    def test_log_line(self):
        T = line(log_coeff=1.0)
        for r in (1e-8, 1e-2, 0.5):
            assert nu_value(T, Weight.isotropic(), r) == pytest.approx(2 * (math.log(r) - 1), rel=1e-12)

    def test_log_line_quadrature(self):
        T = line(log_coeff=1.0)
        assert nu_value(T, Weight.isotropic(), 0.01, "quad") == pytest.approx(2 * (math.log(0.01) - 1), rel=1e-8)

    def test_transform_matches_quadrature(self):
        """A plane with k = 2 goes through the power-scaling transform."""
        T, phi = plane((1.0, 1.0), (-1.0, 0.0)), Weight.isotropic(2.0)
        for r in (1e-3, 0.2):
            transformed = nu_estimate(T, phi, r)
            assert transformed.method is MassMethod.TRANSFORM
            assert transformed.value == pytest.approx(nu_value(T, phi, r, "quad"), rel=1e-8)

    def test_zero_current(self):
        assert nu_value(line(), Weight.isotropic(2.0), 0.1) == 0.0

    def test_mass_is_nu_times_r_power(self):
        T, r = plane((1.0, 1.0), (-1.0, 0.0)), 0.3
        assert mass_T(T, Weight.isotropic(), r).value == pytest.approx(nu_value(T, Weight.isotropic(), r) * r**2)

    def test_closed_engine_on_smooth_current(self):
        with pytest.raises(UnsupportedConfigurationError):
            nu_estimate(smooth((1.0, 1.0), (-1.0, 0.0)), Weight.isotropic(), 0.1, engine="closed")

    def test_radius_out_of_range(self):
        with pytest.raises(InvalidInputError, match="out of range"):
            nu_value(s_eps(0.5), Weight.isotropic(), 1.0)

    def test_unknown_engine(self):
        with pytest.raises(InvalidInputError, match="unknown engine"):
            nu_value(s_eps(0.5), Weight.isotropic(), 0.1, "simpson")

    def test_general_profile_needs_monte_carlo(self):
        with pytest.raises(UnsupportedConfigurationError):
            nu_estimate(smooth((1.0, 1.0), (-1.0, 0.0)), Weight.shifted([0.2, 0.0]), 0.1, engine="quad")


class TestNuProperties:
    """Property-based checks of ν."""

    @settings(max_examples=30, deadline=None)
    @given(
        eps=st.floats(0.1, 2.0),
        k=st.floats(0.5, 3.0),
        c=st.floats(0.1, 10.0),
        x=st.floats(1e-6, 0.9),
    )
    def test_homogeneous_in_the_current(self, eps, k, c, x):
        S = s_eps(eps)
        phi = Weight.isotropic(k)
        r = x * phi.domain_radius(1.0)
        scaled = S.with_density(S.density.scaled(c))
        assert nu_value(scaled, phi, r) == pytest.approx(c * nu_value(S, phi, r), rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(a=st.floats(0.1, 2.0), b=st.floats(2.5, 4.0), x=st.floats(1e-6, 0.9))
    def test_additive_in_the_current(self, a, b, x):
        S1, S2 = line((1.0, a), (-1.0, 0.0)), line((2.0, b), (-2.0, 0.0))
        total = S1.with_density(S1.density + S2.density)
        phi = Weight.isotropic(1.5)
        r = x * phi.domain_radius(1.0)
        assert nu_value(total, phi, r) == pytest.approx(nu_value(S1, phi, r) + nu_value(S2, phi, r), rel=1e-10, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(s=st.floats(0.1, 10.0), x=st.floats(1e-6, 0.9))
    def test_scaled_weight_invariance(self, s, x):
        """ν(S, sφ, sr) = ν(S, φ, r)."""
        S, phi = s_eps(0.5), Weight.isotropic(2.0)
        r = x * phi.domain_radius(1.0)
        assert nu_value(S, phi.scaled(s), s * r) == pytest.approx(nu_value(S, phi, r), rel=1e-10)


class TestNuDdc:
    """Test ν(dd^cT, φ, t)."""

    @pytest.mark.parametrize(("eps", "k"), EXAMPLE_GRID)
    def test_closed_form(self, eps, k):
        for t in (1e-5, 0.1, 0.5):
            assert nu_ddc(s_eps(eps), Weight.isotropic(k), t) == pytest.approx(2 * eps * t ** (eps / k), rel=1e-12)

    def test_quadrature_agrees(self):
        T, phi = s_eps(0.5), Weight.isotropic(2.0)
        estimate = nu_ddc_estimate(T, phi, 0.1, engine="quad")
        assert estimate.method is MassMethod.QUADRATURE
        assert estimate.value == pytest.approx(2 * 0.5 * 0.1**0.25, rel=1e-8)

    def test_log_line_has_constant_rate(self):
        """dd^c log|z₂|² is twice the point mass at the origin."""
        expansion = ddc_expansion(line(log_coeff=1.0), Weight.isotropic())
        assert expansion.has_constant_rate
        assert float(expansion.value(0.01)) == pytest.approx(2.0)

    def test_log_line_quadrature_includes_atom(self):
        assert nu_ddc(line(log_coeff=1.0), Weight.isotropic(), 0.1, "quad") == pytest.approx(2.0, rel=1e-8)

    def test_min_exponent(self):
        expansion = ddc_expansion(s_eps(0.5), Weight.isotropic(2.0))
        assert expansion.min_exponent == pytest.approx(0.25)
        assert not expansion.has_constant_rate


class TestRingAlphaMass:
    """Test the mass of T ∧ (dd^c log φ)^p on rings."""

    def test_subspace_ring_is_empty(self):
        assert ring_alpha_mass(s_eps(0.5), Weight.isotropic(), 0.01, 0.5).value == 0.0

    def test_equal_radii(self):
        assert ring_alpha_mass(smooth((1.0, 1.0)), Weight.isotropic(), 0.2, 0.2).value == 0.0

    def test_smooth_ring_is_additive(self):
        T, phi = smooth((1.0, 1.0)), Weight.isotropic()
        inner = ring_alpha_mass(T, phi, 0.1, 0.2)
        outer = ring_alpha_mass(T, phi, 0.2, 0.4)
        whole = ring_alpha_mass(T, phi, 0.1, 0.4)
        assert whole.method is MassMethod.QUADRATURE
        assert whole.value > 0
        assert whole.value == pytest.approx(inner.value + outer.value, rel=1e-8)

    def test_bad_radii(self):
        with pytest.raises(InvalidInputError, match="ring radii"):
            ring_alpha_mass(smooth((1.0, 1.0)), Weight.isotropic(), 0.4, 0.1)


class TestKernelIntegral:
    """Test kernel integrals and their divergence flags."""

    def test_f_correction_closed_form(self):
        """With ν_dd = 2εt^ε the f-correction is 2(r^ε/(ε+1) − 1)."""
        eps, r = 0.5, 0.2
        result = kernel_integral(s_eps(eps), Weight.isotropic(), r, Kernel.f_correction())
        assert not result.diverged
        expected = 2 * eps * r**eps * (1 / (1 + eps) - 1 / eps)
        assert result.value == pytest.approx(expected, rel=1e-12)

    def test_quadrature_agrees(self):
        T, phi = s_eps(0.5), Weight.isotropic(2.0)
        closed = kernel_integral(T, phi, 0.1, Kernel.power_scaling(2.0))
        quadrature = kernel_integral(T, phi, 0.1, Kernel.power_scaling(2.0), engine="quad")
        assert quadrature.value == pytest.approx(closed.value, rel=1e-8)

    def test_log_current_diverges(self):
        result = kernel_integral(line(log_coeff=1.0), Weight.isotropic(), 0.1, Kernel.f_correction())
        assert result.diverged and result.value is None

    def test_mass_bound_is_finite_for_logs(self):
        result = kernel_integral(line(log_coeff=1.0), Weight.isotropic(), 0.1, Kernel.mass_bound())
        assert result.value == pytest.approx(2.0)

    def test_lelong_jensen_equal_radii(self):
        assert lelong_jensen_ddc_part(s_eps(0.5), Weight.isotropic(), 0.2, 0.2).value == 0.0

    def test_lelong_jensen_is_finite(self):
        result = lelong_jensen_ddc_part(line(log_coeff=1.0), Weight.isotropic(), 0.1, 0.3)
        assert not result.diverged
        assert np.isfinite(result.value)

    def test_engine_enum_accepted(self):
        result = kernel_integral(s_eps(0.5), Weight.isotropic(), 0.1, Kernel.mass_bound(), engine=Engine.CLOSED)
        assert result.method is MassMethod.CLOSED_FORM
