"""Tests for spinbath.operators module."""

import math

import numpy as np
import pytest

from spinbath.exception import (
    ConfigError,
    NotDensityMatrixError,
    NotHermitianError,
    NotPositiveError,
    ShapeMismatchError,
    SiteError,
)
from spinbath.model import gibbs_qubit, product_gibbs
from spinbath.operators import (
    PAULI,
    ChainOperator,
    anticommutator,
    check_density_matrix,
    commutator,
    embed_site,
    gns_inner,
    herm_eig,
    kron,
    matrix_exp,
    matrix_log_psd,
    max_norm,
    partial_trace_keep,
    random_density_matrix,
    site_product,
    tensor,
    trace_norm,
    unvec,
    vec,
)

I2 = np.eye(2)


def random_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    m = random_matrix(rng, n)
    return (m + m.conj().T) / 2


class TestPauliSet:
    """The single-spin operators in the (Omega, X) basis."""

    def test_raising_lowering_products(self):
        """sigma_+ sigma_- = n_+ and sigma_- sigma_+ = n_-."""
        assert np.array_equal(PAULI.sigma_plus @ PAULI.sigma_minus, PAULI.n_plus)
        assert np.array_equal(PAULI.sigma_minus @ PAULI.sigma_plus, PAULI.n_minus)

    def test_pauli_decomposition(self):
        """sigma_x, sigma_y and sigma_z are built from the raising/lowering operators."""
        sp, sm = PAULI.sigma_plus, PAULI.sigma_minus
        assert np.array_equal(PAULI.sigma_x, sp + sm)
        assert np.array_equal(PAULI.sigma_y, -1j * sp + 1j * sm)
        assert np.array_equal(PAULI.sigma_z, PAULI.n_plus - PAULI.n_minus)

    def test_constants_are_read_only(self):
        """The shared constants cannot be mutated by accident."""
        with pytest.raises(ValueError):
            PAULI.sigma_z[0, 0] = 5

    def test_by_name_aliases(self):
        """Short names resolve to the same matrices."""
        assert PAULI.by_name("z") is PAULI.sigma_z
        assert PAULI.by_name("n_plus") is PAULI.n_plus
        with pytest.raises(KeyError):
            PAULI.by_name("w")


class TestKronAndEmbedding:
    """Kronecker products and single-site embedding."""

    def test_kron_identity(self):
        """kron(I_2, I_2) = I_4."""
        assert np.array_equal(kron(I2, I2), np.eye(4))

    def test_kron_sigma_z(self):
        """kron(sigma_z, sigma_z) = diag(1, -1, -1, 1)."""
        assert np.array_equal(kron(PAULI.sigma_z, PAULI.sigma_z), np.diag([1, -1, -1, 1]))

    def test_kron_raising_lowering(self):
        """kron(sigma_+, sigma_-) has a single 1 at (1, 2)."""
        expected = np.zeros((4, 4))
        expected[1, 2] = 1
        assert np.array_equal(kron(PAULI.sigma_plus, PAULI.sigma_minus), expected)

    def test_kron_associative(self, rng):
        """kron is associative up to rounding on random 2x2 inputs."""
        a, b, c = (random_matrix(rng, 2) for _ in range(3))
        assert max_norm(kron(kron(a, b), c) - kron(a, kron(b, c))) <= 1e-14

    def test_embed_single_site(self):
        """A one-site chain embeds as the operator itself."""
        assert np.array_equal(embed_site(PAULI.sigma_z, 1, 1).data, PAULI.sigma_z)

    def test_embed_second_site(self):
        """Site 2 of 2 is the right Kronecker factor."""
        assert np.array_equal(embed_site(PAULI.sigma_z, 2, 2).data, np.diag([1, -1, 1, -1]))
        assert np.array_equal(embed_site(PAULI.n_plus, 1, 2).data, np.diag([1, 1, 0, 0]))

    @pytest.mark.parametrize("site", [0, 3, -1])
    def test_embed_site_out_of_range(self, site):
        """Sites outside 1..N raise SiteError."""
        with pytest.raises(SiteError):
            embed_site(PAULI.sigma_z, site, 2)

    def test_embed_rejects_non_qubit_operator(self):
        """Only 2x2 operators can be embedded."""
        with pytest.raises(ShapeMismatchError):
            embed_site(np.eye(3), 1, 2)

    def test_distinct_sites_commute(self, rng):
        """Operators embedded on different sites commute."""
        a = embed_site(random_matrix(rng, 2), 1, 3)
        b = embed_site(random_matrix(rng, 2), 3, 3)
        assert max_norm(commutator(a, b)) <= 1e-14

    def test_tensor_matches_embedding(self):
        """tensor(I, op, I) is embed_site(op, 2, 3)."""
        assert np.array_equal(tensor(I2, PAULI.sigma_x, I2), embed_site(PAULI.sigma_x, 2, 3).data)


class TestSiteProduct:
    """Parsing observable expressions."""

    def test_single_factor(self):
        """A single factor is the embedded operator."""
        assert site_product("n_plus:1", 2).allclose(embed_site(PAULI.n_plus, 1, 2))

    def test_product_of_factors(self):
        """Factors joined by '*' multiply."""
        expected = tensor(PAULI.sigma_x, PAULI.sigma_x)
        assert site_product("x:1 * x:2", 2).allclose(expected)

    @pytest.mark.parametrize("expr", ["x", "x:a", "w:1"])
    def test_malformed(self, expr):
        """Malformed factors are config errors."""
        with pytest.raises(ConfigError):
            site_product(expr, 2)


class TestCommutators:
    """Commutator and anticommutator."""

    def test_commutator_self(self):
        assert max_norm(commutator(PAULI.sigma_z, PAULI.sigma_z)) == 0

    def test_commutator_raising_lowering(self):
        """[sigma_+, sigma_-] = sigma_z."""
        assert np.array_equal(commutator(PAULI.sigma_plus, PAULI.sigma_minus), PAULI.sigma_z)

    def test_anticommutator_identity(self):
        """{n_-, I} = 2 n_-."""
        assert np.array_equal(anticommutator(PAULI.n_minus, I2), 2 * PAULI.n_minus)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            commutator(np.eye(2), np.eye(4))


class TestPartialTrace:
    """Reduced single-site states."""

    def test_product_state_factor(self):
        """The partial trace of a product state is the factor."""
        rho = tensor(gibbs_qubit(0.5), gibbs_qubit(1.0))
        assert max_norm(partial_trace_keep(rho, 2) - gibbs_qubit(1.0)) <= 1e-15
        assert max_norm(partial_trace_keep(rho, 1) - gibbs_qubit(0.5)) <= 1e-15

    def test_maximally_mixed(self):
        assert max_norm(partial_trace_keep(np.eye(4) / 4, 1) - I2 / 2) <= 1e-15

    def test_bell_state(self):
        """The Bell state reduces to the maximally mixed qubit."""
        phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
        assert max_norm(partial_trace_keep(np.outer(phi, phi), 1) - I2 / 2) <= 1e-15

    def test_trace_preserved(self, rng):
        """Every reduced state has the trace of the full operator."""
        rho = random_density_matrix(8, rng)
        for i in (1, 2, 3):
            assert abs(np.trace(partial_trace_keep(rho, i)) - 1) <= 1e-12

    def test_site_out_of_range(self):
        with pytest.raises(SiteError):
            partial_trace_keep(np.eye(4) / 4, 3)


class TestHermEig:
    """Hermitian eigendecomposition."""

    def test_diagonal(self):
        spec = herm_eig(np.diag([0.25, 0.75]))
        assert np.allclose(spec.eigenvalues, [0.25, 0.75])
        assert max_norm(np.abs(spec.eigenvectors) - np.eye(2)) <= 1e-15

    def test_sigma_x(self):
        assert np.allclose(herm_eig(PAULI.sigma_x).eigenvalues, [-1, 1])

    def test_product_gibbs(self):
        """The spectrum of rho_beta kron rho_beta is the products of Gibbs weights."""
        q = np.diag(gibbs_qubit(0.7)).real
        expected = sorted([q[0] ** 2, q[0] * q[1], q[0] * q[1], q[1] ** 2])
        assert np.allclose(herm_eig(product_gibbs(0.7, 2)).eigenvalues, expected, atol=1e-15)

    @pytest.mark.parametrize("dim", [2, 8, 64])
    def test_reconstruction(self, rng, dim):
        """U diag(lambda) U* reproduces the input and U is unitary."""
        m = random_hermitian(rng, dim)
        spec = herm_eig(m)
        assert max_norm(spec.reconstruct() - m) <= 1e-11
        v = spec.eigenvectors
        assert max_norm(v.conj().T @ v - np.eye(dim)) <= 1e-11
        assert np.all(np.diff(spec.eigenvalues) >= 0)

    def test_degenerate_is_deterministic(self):
        """Degenerate eigenspaces come back identically on repeated calls."""
        h = product_gibbs(0.3, 3).data
        a, b = herm_eig(h), herm_eig(h.copy())
        assert np.array_equal(a.eigenvectors, b.eigenvectors)

    def test_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            herm_eig(PAULI.sigma_plus)


class TestExpLog:
    """Matrix exponential and logarithm."""

    def test_exp_zero(self):
        assert np.array_equal(matrix_exp(np.zeros((2, 2))), I2)

    def test_exp_diagonal(self):
        """exp(-i pi sigma_z / 2) = diag(-i, i)."""
        out = matrix_exp(-1j * math.pi * PAULI.sigma_z / 2)
        assert max_norm(out - np.diag([-1j, 1j])) <= 1e-15

    def test_exp_inverse(self, rng):
        m = random_matrix(rng, 4)
        m = 2 * m / np.linalg.norm(m, 2)
        assert max_norm(matrix_exp(m) @ matrix_exp(-m) - np.eye(4)) <= 1e-10

    def test_exp_of_skew_hermitian_is_unitary(self, rng):
        h = random_hermitian(rng, 8)
        u = matrix_exp(-10j * h / np.linalg.norm(h, 2))
        assert max_norm(u @ u.conj().T - np.eye(8)) <= 1e-10

    def test_log_diagonal(self):
        assert max_norm(matrix_log_psd(np.diag([math.e, 1])) - np.diag([1, 0])) <= 1e-15

    def test_log_singular_error(self):
        """A zero eigenvalue is an error unless projecting to the support."""
        with pytest.raises(NotPositiveError):
            matrix_log_psd(np.diag([1.0, 0.0]))
        projected = matrix_log_psd(np.diag([math.e, 0.0]), support_rule="project")
        assert max_norm(projected - np.diag([1, 0])) <= 1e-15

    def test_log_negative(self):
        with pytest.raises(NotPositiveError):
            matrix_log_psd(np.diag([1.0, -0.5]), support_rule="project")


class TestInnerProductsAndNorms:
    """GNS inner product and trace norm."""

    def test_gns_unit(self):
        assert gns_inner(gibbs_qubit(0.4), I2, I2) == pytest.approx(1)

    def test_gns_gram_positive(self, rng):
        """A faithful state gives a positive definite Gram matrix on a random basis."""
        rho = random_density_matrix(4, rng)
        basis = [random_matrix(rng, 4) for _ in range(16)]
        gram = np.array([[gns_inner(rho, a, b) for b in basis] for a in basis])
        assert np.linalg.eigvalsh((gram + gram.conj().T) / 2)[0] > 0

    def test_trace_norm(self):
        assert trace_norm(np.zeros((2, 2))) == 0
        assert trace_norm(PAULI.sigma_z) == pytest.approx(2)

    def test_trace_norm_of_gibbs_difference(self):
        """||rho_beta - rho_beta'||_1 = 2 |beta_0 - beta_0'|."""
        a, b = gibbs_qubit(0.5), gibbs_qubit(1.0)
        assert trace_norm(a - b) == pytest.approx(2 * abs(a[0, 0].real - b[0, 0].real))

    def test_vec_column_stacking(self, rng):
        """vec(A X B) = (B^T kron A) vec(X)."""
        a, x, b = (random_matrix(rng, 4) for _ in range(3))
        assert max_norm(vec(a @ x @ b) - np.kron(b.T, a) @ vec(x)) <= 1e-12
        assert np.array_equal(unvec(vec(x)), x)


class TestChainOperator:
    """The chain operator value type."""

    def test_shape_validated(self):
        with pytest.raises(ShapeMismatchError):
            ChainOperator(2, np.eye(2))

    def test_from_matrix_infers_sites(self):
        assert ChainOperator.from_matrix(np.eye(8)).n_sites == 3
        with pytest.raises(ShapeMismatchError):
            ChainOperator.from_matrix(np.eye(3))

    def test_data_is_copied_and_frozen(self):
        source = np.eye(2, dtype=np.complex128)
        op = ChainOperator(1, source)
        source[0, 0] = 7
        assert op.data[0, 0] == 1
        with pytest.raises(ValueError):
            op.data[0, 0] = 3

    def test_arithmetic(self):
        z = ChainOperator(1, PAULI.sigma_z)
        assert (z @ z).allclose(I2)
        assert (z + z).allclose(2 * PAULI.sigma_z)
        assert (2 * z - z).allclose(z)
        assert z.dagger().allclose(z)
        assert z.trace() == 0


class TestCheckDensityMatrix:
    """Validation of density matrices."""

    def test_accepts_state(self, rng):
        rho = random_density_matrix(4, rng)
        assert np.array_equal(check_density_matrix(rho), rho)

    @pytest.mark.parametrize(
        "bad",
        [np.eye(2), np.diag([1.5, -0.5]), np.array([[0.5, 1], [0, 0.5]])],
        ids=["trace", "negative", "non-hermitian"],
    )
    def test_rejects(self, bad):
        with pytest.raises(NotDensityMatrixError):
            check_density_matrix(bad)
