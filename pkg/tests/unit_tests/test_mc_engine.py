"""Unit tests for the Monte Carlo engine."""

import numpy as np
import pytest

from lelong.cache import get_cache
from lelong.current_model import Weight
from lelong.error_handling import InvalidInputError
from lelong.mass_engine import MassMethod, nu_ddc_estimate, nu_estimate
from lelong.mc_engine import Form, mc_mass, mc_ring_mass, mixed_discriminant
from tests.factories import s_eps, s_eps_nu, smooth


class TestMixedDiscriminant:
    """Test m!·D(H_1, ..., H_m)."""

    def test_identities(self):
        eye = np.eye(2)[None]
        assert mixed_discriminant([eye, eye]) == pytest.approx([2.0])

    def test_split_diagonals(self):
        h1 = np.diag([1.0, 0.0])[None]
        h2 = np.diag([0.0, 1.0])[None]
        assert mixed_discriminant([h1, h2]) == pytest.approx([1.0])

    def test_repeated_matrix_is_determinant(self):
        h = np.array([[[2.0, 1j], [-1j, 3.0]]])
        assert mixed_discriminant([h, h]) == pytest.approx([2 * 5.0])

    def test_one_dimensional(self):
        h = np.array([[[3.0]], [[0.5]]])
        assert mixed_discriminant([h]) == pytest.approx([3.0, 0.5])


class TestMonteCarlo:
    """Test seeded Monte Carlo masses."""

    def test_seed_reproducibility(self):
        T, phi = s_eps(0.5), Weight.isotropic()
        first = mc_mass(T, phi, 0.25, n_samples=20000, seed=7)
        get_cache().clear()
        second = mc_mass(T, phi, 0.25, n_samples=20000, seed=7)
        assert first == second

    def test_seeds_differ(self):
        T, phi = s_eps(0.5), Weight.isotropic()
        assert mc_mass(T, phi, 0.25, n_samples=20000, seed=1).value != mc_mass(T, phi, 0.25, n_samples=20000, seed=2).value

    def test_agrees_with_closed_form(self):
        T, phi, r = s_eps(0.5), Weight.isotropic(), 0.25
        estimate = nu_estimate(T, phi, r, engine="mc", n_samples=200000, seed=3)
        assert estimate.method is MassMethod.MONTE_CARLO
        assert estimate.std_error > 0
        assert abs(estimate.value - s_eps_nu(0.5, 1.0, r)) < 5 * estimate.std_error

    def test_ddc_agrees_with_closed_form(self):
        T, phi, t = s_eps(0.5), Weight.isotropic(2.0), 0.2
        estimate = nu_ddc_estimate(T, phi, t, engine="mc", n_samples=200000, seed=5)
        assert abs(estimate.value - 2 * 0.5 * t**0.25) < 5 * estimate.std_error

    def test_smooth_current_agrees_with_quadrature(self):
        T, phi, r = smooth((1.0, 1.0), (-1.0, 0.0)), Weight.isotropic(), 0.3
        estimate = nu_estimate(T, phi, r, engine="mc", n_samples=200000, seed=11)
        assert abs(estimate.value - nu_estimate(T, phi, r, engine="quad").value) < 5 * estimate.std_error

    def test_too_few_samples(self):
        with pytest.raises(InvalidInputError, match="n_samples"):
            mc_mass(s_eps(0.5), Weight.isotropic(), 0.25, n_samples=10)

    def test_ring_on_a_line_is_empty(self):
        estimate = mc_ring_mass(s_eps(0.5), Weight.isotropic(), 0.01, 0.5, n_samples=1000)
        assert estimate.value == 0.0 and estimate.std_error == 0.0

    def test_form_names(self):
        assert Form("alpha") is Form.ALPHA
