"""Tests for spinbath.steady module."""

import math

import numpy as np
import pytest

from spinbath.closed_form import boundary_local_states, closed_form_stationary
from spinbath.exception import ContractViolation, SiteError, UnsupportedModelError
from spinbath.lindblad import apply_schrodinger
from spinbath.model import BathSpec, ChainParams, LindbladModel, gibbs_qubit, product_gibbs
from spinbath.operators import PAULI, max_norm, random_density_matrix
from spinbath.steady import (
    approach_to_equilibrium,
    closed_form_discrepancy,
    commutant_dimension,
    commutation_residual,
    decay_rate_fit,
    liouvillian_spectrum,
    local_state,
    local_state_report,
    local_states,
    spectral_gap,
    stationary_state,
    uniqueness_certificate,
)


def two_bath(n: int, beta: float = 0.5, beta_prime: float = 1.0) -> LindbladModel:
    return LindbladModel.two_bath(ChainParams.paper_default(n), beta, beta_prime)


class TestStationaryState:
    """The kernel of the Schrodinger generator."""

    def test_single_site_is_gibbs(self):
        model = LindbladModel(ChainParams(1), (BathSpec(1, 0.7),))
        report = stationary_state(model)
        assert report.unique
        assert report.state is not None
        assert report.state.allclose(gibbs_qubit(0.7), 1e-10)
        assert report.faithful

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("beta", [0.2, 2.0])
    def test_equal_temperature_product_gibbs(self, n, beta):
        """Equal bath temperatures relax to the product Gibbs state."""
        model = LindbladModel.equal_temperature(ChainParams.paper_default(n), beta, [1])
        report = stationary_state(model, with_gap=False)
        assert report.state is not None
        assert report.state.allclose(product_gibbs(beta, n), 1e-9)

    @pytest.mark.parametrize("b_field", [0.0, 0.5, 2.5])
    def test_product_gibbs_stationary_for_any_field(self, b_field):
        model = LindbladModel.equal_temperature(ChainParams(3, b_field, 1.0, 1.0), 0.8, [1, 3])
        assert max_norm(apply_schrodinger(model, product_gibbs(0.8, 3)).data) <= 1e-11

    @pytest.mark.parametrize("betas", [(0.5, 1.0), (0.3, 2.0)])
    def test_two_sites_match_closed_form(self, betas):
        report = stationary_state(two_bath(2, *betas))
        assert report.state is not None
        assert report.state.allclose(closed_form_stationary(*betas, 2), 1e-8)
        assert report.residual <= 1e-11

    def test_state_properties(self):
        report = stationary_state(two_bath(3))
        assert report.state is not None
        rho = report.state.data
        assert abs(np.trace(rho) - 1) <= 1e-12
        assert max_norm(rho - rho.conj().T) <= 1e-12
        assert report.min_eigenvalue is not None and report.min_eigenvalue > 0
        assert max_norm(apply_schrodinger(two_bath(3), rho).data) <= 1e-10

    def test_degenerate_kernel(self):
        """Without hopping a bath cannot reach site 2, so the kernel is not one dimensional."""
        model = LindbladModel(ChainParams(2, 0.0, 0.0, 0.0), (BathSpec(1, 0.5),))
        report = stationary_state(model)
        assert report.kernel_dimension == 4
        assert report.state is None
        assert len(report.kernel_basis) == 4
        assert report.gap == 0.0
        assert spectral_gap(model) == 0.0


class TestUniqueness:
    """Commutant certificates."""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_end_baths_trivial(self, n):
        cert = uniqueness_certificate(two_bath(n))
        assert cert.trivial
        assert cert.span_self_adjoint
        assert cert.generator_labels[0] == "H_S"

    @pytest.mark.parametrize(("b_field", "dimension"), [(0.0, 4), (1.0, 2)])
    def test_decoupled_chain(self, b_field, dimension):
        """With J = 0 site 2 is never touched; a field on it shrinks the commutant from 4 to 2."""
        model = LindbladModel(ChainParams(2, b_field, 0.0, 0.0), (BathSpec(1, 0.5),))
        assert uniqueness_certificate(model).commutant_dimension == dimension
        assert stationary_state(model, with_gap=False).kernel_dimension == dimension
        assert len(uniqueness_certificate(model).witness) == dimension
        assert spectral_gap(model) == 0.0

    def test_commutant_of_pauli(self):
        """Only scalars commute with both sigma_x and sigma_z."""
        assert commutant_dimension([PAULI.sigma_x, PAULI.sigma_z]).commutant_dimension == 1
        assert commutant_dimension([PAULI.sigma_z]).commutant_dimension == 2

    def test_empty_set(self):
        with pytest.raises(UnsupportedModelError):
            commutant_dimension([])


class TestSpectrum:
    """Liouvillian spectrum and decay."""

    def test_single_site_gap(self):
        """Eigenvalues 0, -4 and -2 +/- 2i: the gap is 2."""
        model = LindbladModel(ChainParams(1), (BathSpec(1, math.log(3) / 2),))
        evals = liouvillian_spectrum(model)
        assert abs(evals[0]) <= 1e-12
        assert evals[-1] == pytest.approx(-4, abs=1e-10)
        for expected in (0, -4, -2 + 2j, -2 - 2j):
            assert np.min(np.abs(evals - expected)) <= 1e-10
        assert spectral_gap(model) == pytest.approx(2, abs=1e-10)

    def test_gap_positive_for_chain(self):
        assert spectral_gap(two_bath(3)) > 0

    def test_approach_to_equilibrium(self, rng):
        model = two_bath(3)
        rho0 = random_density_matrix(model.dim, rng)
        gap = spectral_gap(model)
        d = approach_to_equilibrium(model, rho0, [0.0, 1.0, 50 / gap])
        assert d[0] > d[1]
        assert d[-1] <= 1e-6

    def test_decay_rate_matches_gap(self, rng):
        """The fitted exponential rate of ||rho(t) - rho_inf||_1 approaches the gap."""
        model = LindbladModel(ChainParams(1), (BathSpec(1, 0.4),))
        rho0 = random_density_matrix(2, rng)
        times = np.linspace(0, 10, 101)
        distances = approach_to_equilibrium(model, rho0, times)
        assert decay_rate_fit(times, distances) == pytest.approx(2, rel=0.05)

    def test_decay_rate_needs_points(self):
        with pytest.raises(ContractViolation):
            decay_rate_fit([0, 1], [1.0, 0.5])


class TestLocalStates:
    """Partial traces of the stationary state against the boundary profile."""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_boundary_profile(self, n):
        report = stationary_state(two_bath(n), with_gap=False)
        assert report.state is not None
        numeric = local_states(report.state)
        for got, expected in zip(numeric, boundary_local_states(0.5, 1.0, n), strict=True):
            assert max_norm(got - expected) <= 1e-8

    def test_middle_is_average_of_ends(self):
        report = stationary_state(two_bath(3), with_gap=False)
        assert report.state is not None
        ends = (local_state(report.state, 1) + local_state(report.state, 3)) / 2
        assert max_norm(local_state(report.state, 2) - ends) <= 1e-8

    def test_report_proven(self):
        report = stationary_state(two_bath(4), with_gap=False)
        assert report.state is not None
        profile = local_state_report(0.5, 1.0, report.state)
        assert not profile.conjectural
        assert profile.max_deviation <= 1e-8

    def test_report_conjectural(self):
        report = stationary_state(two_bath(5, 0.3, 2.0), with_gap=False)
        assert report.state is not None
        profile = local_state_report(0.3, 2.0, report.state)
        assert profile.conjectural
        assert len(profile.deviations) == 5
        assert profile.endpoint_average_residual <= 1e-8

    def test_single_site_rejected(self):
        with pytest.raises(SiteError):
            local_state_report(0.5, 1.0, gibbs_qubit(0.5))


class TestClosedFormDiscrepancy:
    """Entry-by-entry comparison against the transcribed closed forms."""

    def test_two_sites_agree(self):
        report = stationary_state(two_bath(2), with_gap=False)
        assert report.state is not None
        disc = closed_form_discrepancy(0.5, 1.0, report.state)
        assert disc.agrees
        assert disc.entries == ()

    @pytest.mark.parametrize("betas", [(0.5, 1.0), (0.3, 2.0)])
    def test_three_sites_agree(self, betas):
        report = stationary_state(two_bath(3, *betas), with_gap=False)
        assert report.state is not None
        disc = closed_form_discrepancy(*betas, report.state)
        assert disc.n_sites == 3
        assert disc.agrees
        assert disc.entries == ()

    @pytest.mark.parametrize("betas", [(0.5, 1.0), (0.3, 2.0)])
    def test_four_sites_deviation_listed(self, betas):
        """The printed four-site form misses the kernel by about 1e-2; the mismatch is listed."""
        report = stationary_state(two_bath(4, *betas), with_gap=False)
        assert report.state is not None
        disc = closed_form_discrepancy(*betas, report.state)
        assert disc.n_sites == 4
        assert disc.agrees is False
        assert len(disc.entries) > 0
        assert 1e-3 < disc.max_deviation < 1e-1
        for _row, _col, expected, actual in disc.entries:
            assert abs(expected - actual) > disc.tolerance

    def test_max_entries(self):
        report = stationary_state(two_bath(4), with_gap=False)
        assert report.state is not None
        disc = closed_form_discrepancy(0.5, 1.0, report.state, max_entries=2)
        assert len(disc.entries) == 2
        assert disc.agrees is False


def test_commutation_residual_at_equilibrium():
    """[H_S, rho^beta] vanishes."""
    model = LindbladModel.equal_temperature(ChainParams.paper_default(3), 0.6)
    assert commutation_residual(model.hs, product_gibbs(0.6, 3)) <= 1e-12
