"""Acceptance sweeps over longer chains and many random states.

Run with: pytest -m "slow or integration" tests/integration/
"""

import json

import numpy as np
import pytest
from typer.testing import CliRunner

from spinbath.closed_form import boundary_local_states
from spinbath.main import app
from spinbath.model import BathSpec, ChainParams, LindbladModel, product_gibbs
from spinbath.operators import max_norm, random_density_matrix, site_product
from spinbath.rqi import convergence_probe
from spinbath.steady import (
    approach_to_equilibrium,
    local_state_report,
    local_states,
    spectral_gap,
    stationary_state,
    uniqueness_certificate,
)
from spinbath.sweep import task_rng
from spinbath.thermo import (
    detailed_balance_certificate,
    entropy_production_closed,
    entropy_production_def,
)

runner = CliRunner(env={"NO_COLOR": "1"})

pytestmark = [pytest.mark.slow, pytest.mark.integration]

BETA_PAIRS = [(0.5, 1.0), (0.3, 2.0), (1.0, 0.1)]


def two_bath(n: int, beta: float, beta_prime: float) -> LindbladModel:
    return LindbladModel.two_bath(ChainParams.paper_default(n), beta, beta_prime)


class TestStationaryStates:
    """Kernels of the generator for chains up to six sites."""

    @pytest.mark.parametrize("n", range(1, 7))
    @pytest.mark.parametrize("beta", [0.1, 0.5, 1.0, 2.0])
    def test_equal_temperature_is_product_gibbs(self, n, beta):
        model = LindbladModel.equal_temperature(ChainParams.paper_default(n), beta, [1])
        report = stationary_state(model, with_gap=False)
        assert report.unique
        assert report.state is not None
        assert report.state.allclose(product_gibbs(beta, n), 1e-9)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_two_bath_unique(self, n):
        report = stationary_state(two_bath(n, 0.5, 1.0), with_gap=False)
        assert report.unique
        assert report.faithful
        assert report.residual <= 1e-9

    @pytest.mark.parametrize("n", range(2, 6))
    def test_commutant_trivial(self, n):
        assert uniqueness_certificate(two_bath(n, 0.5, 1.0)).trivial

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("betas", BETA_PAIRS)
    def test_boundary_profile(self, n, betas):
        report = stationary_state(two_bath(n, *betas), with_gap=False)
        assert report.state is not None
        for got, expected in zip(local_states(report.state), boundary_local_states(*betas, n), strict=True):
            assert max_norm(got - expected) <= 1e-8

    @pytest.mark.parametrize("n", [5, 6])
    def test_conjectured_profile_reported(self, n):
        report = stationary_state(two_bath(n, 0.5, 1.0), with_gap=False)
        assert report.state is not None
        profile = local_state_report(0.5, 1.0, report.state)
        assert profile.conjectural
        assert len(profile.deviations) == n


class TestApproachToEquilibrium:
    """Trace distance to the stationary state contracts and vanishes by t = 50/gap."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_random_states(self, n):
        if n == 1:
            model = LindbladModel(ChainParams.paper_default(1), (BathSpec(1, 0.5),))
        else:
            model = two_bath(n, 0.5, 1.0)
        gap = spectral_gap(model)
        assert gap > 0
        times = np.linspace(0, 50 / gap, 51)
        target = stationary_state(model, with_gap=False).state
        for index in range(20):
            rho0 = random_density_matrix(model.dim, task_rng(n, index))
            d = approach_to_equilibrium(model, rho0, times, target)
            assert all(b <= a + 1e-12 for a, b in zip(d, d[1:], strict=False))
            assert d[-1] <= 1e-6


class TestEntropyProduction:
    """The definition against the closed form over many random states."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_two_hundred_states(self, n):
        beta = 0.7
        model = LindbladModel.equal_temperature(ChainParams.paper_default(n), beta)
        ref = product_gibbs(beta, n)
        for index in range(200):
            rho = random_density_matrix(model.dim, task_rng(n, index))
            by_def = entropy_production_def(model, rho, ref)
            closed = entropy_production_closed(model, rho)
            assert by_def.sigma_total == pytest.approx(closed.sigma_total, abs=1e-9)
            assert by_def.sigma_total >= -1e-10

    @pytest.mark.parametrize("n", range(1, 6))
    def test_detailed_balance_at_gibbs(self, n):
        model = LindbladModel.equal_temperature(ChainParams.paper_default(n), 0.4)
        assert detailed_balance_certificate(model, product_gibbs(0.4, n)).satisfied


RQI_MODELS = {
    "one-bath-N1": (1, (BathSpec(1, 0.5),)),
    "one-bath-N2": (2, (BathSpec(1, 0.5),)),
    "two-baths-N2": (2, (BathSpec(1, 0.5), BathSpec(2, 1.0))),
    "two-baths-N3": (3, (BathSpec(1, 0.5), BathSpec(3, 1.0))),
}


class TestRepeatedInteractions:
    """Convergence of the discrete dynamics for several chains and observables."""

    @pytest.mark.parametrize("name", list(RQI_MODELS))
    @pytest.mark.parametrize("expr", ["n_plus:1", "z:1", "x:1*x:2"])
    def test_observables(self, name, expr):
        n, baths = RQI_MODELS[name]
        if expr == "x:1*x:2" and n < 2:
            pytest.skip("needs two sites")
        model = LindbladModel(ChainParams.paper_default(n), baths)
        table = convergence_probe(model, site_product(expr, n))
        assert table.h_grid == (1e-1, 1e-2, 1e-3, 1e-4)
        assert table.strictly_decreasing
        assert table.endpoint_ok
        assert max(table.isometry_residuals) <= 1e-11

    def test_three_baths(self):
        model = LindbladModel.equal_temperature(ChainParams.paper_default(3), 0.8)
        assert convergence_probe(model, site_product("x:1*x:2", 3)).passed


def test_cli_pipeline_is_reproducible(write_config, setup_test_environment):
    """Every report command run twice with --no-timing gives identical files."""
    tmp = setup_test_environment["tmp_path"]
    path = str(write_config(n_sites=3, analysis={"entropy": {"n_states": 10}}))
    for command in ("build", "stationary", "entropy", "detailed-balance", "local-states", "rqi-converge"):
        outputs = []
        for attempt in range(2):
            out = tmp / f"{command}-{attempt}.json"
            result = runner.invoke(app, ["--no-timing", command, "-c", path, "-o", str(out)])
            assert result.exit_code == 0, result.output
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        assert json.loads(outputs[0])["command"] == command
