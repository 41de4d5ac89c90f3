"""Relative entropy, entropy production and the quantum detailed balance certificate.

Sign conventions: S(rho|sigma) = Tr(rho (log sigma - log rho)) <= 0.  Along the flow S(rho(t)|rho^beta)
increases towards 0, and the entropy production sigma(rho) = Tr(L*(rho)(log rho_ref - log rho)) is its
time derivative, which is nonnegative.
"""

import logging
import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike

from spinbath import Matrix
from spinbath.exception import NotFaithfulError, UnsupportedModelError
from spinbath.lindblad import (
    Picture,
    bath_dissipator,
    hamiltonian_part,
    propagator,
    superoperator,
)
from spinbath.model import LindbladModel
from spinbath.operators import (
    DEFAULT_TOL,
    PAULI,
    SUPPORT_FLOOR,
    ChainOperator,
    SpectralDecomposition,
    check_density_matrix,
    commutator,
    embed_site,
    herm_eig,
    max_norm,
    unvec,
    vec,
)
from spinbath.sweep import task_rng

logger = logging.getLogger(__name__)

PAIR_FLOOR = 1e-14  # eigen-pairs with both |rho_k - rho_j| and the matrix element below this give 0
EXHAUSTIVE_SITES = 3  # detailed balance checks every matrix-unit pair up to this chain length
SAMPLED_PAIRS = 4096

__all__ = [
    "ProductionMethod",
    "EntropyReport",
    "DetailedBalanceReport",
    "relative_entropy",
    "relative_entropy_rate",
    "entropy_production_def",
    "entropy_production_closed",
    "detailed_balance_certificate",
]


class ProductionMethod(StrEnum):
    DEFINITION = "definition"
    CLOSED_FORM = "closed-form"


@dataclass(frozen=True)
class EntropyReport:
    sigma_total: float
    per_bath: tuple[float, ...]  # ordered like model.baths
    method: ProductionMethod
    support_warnings: tuple[tuple[int, int], ...] = ()
    hamiltonian_part: float = 0.0  # vanishes when rho_ref commutes with H_S

    @property
    def additivity_residual(self) -> float:
        if math.isinf(self.sigma_total):
            return 0.0
        return abs(self.sigma_total - self.hamiltonian_part - sum(self.per_bath))


def _faithful_spectrum(rho: Matrix, what: str) -> SpectralDecomposition:
    spec = herm_eig(rho)
    if spec.eigenvalues[0] < SUPPORT_FLOOR:
        raise NotFaithfulError(
            f"{what} is not faithful (smallest eigenvalue {spec.eigenvalues[0]:.3g})"
        )
    return spec


def relative_entropy(rho: ChainOperator | ArrayLike, sigma: ChainOperator | ArrayLike) -> float:
    """Tr(rho (log sigma - log rho)) on the supports; -inf when supp(rho) is not inside supp(sigma)."""
    r = check_density_matrix(rho)
    s = check_density_matrix(sigma)
    rs, ss = herm_eig(r), herm_eig(s)

    lam = rs.eigenvalues
    pos = lam > SUPPORT_FLOOR
    rho_log_rho = float(np.sum(lam[pos] * np.log(lam[pos])))

    # weights of rho on the eigenvectors of sigma
    weights = np.real(np.einsum("ij,jk,ki->i", ss.eigenvectors.conj().T, r, ss.eigenvectors))
    mu = ss.eigenvalues
    on_support = mu > SUPPORT_FLOOR
    if np.any(weights[~on_support] > SUPPORT_FLOOR):
        return -math.inf
    rho_log_sigma = float(np.sum(weights[on_support] * np.log(mu[on_support])))
    value = rho_log_sigma - rho_log_rho
    if value > SUPPORT_FLOOR:
        logger.warning(
            f"Relative entropy came out positive ({value:.3g}); numerical trouble in the inputs"
        )
        return value
    return min(0.0, value)


def _trace_against_log(
    a: Matrix, spec: SpectralDecomposition, tol: float
) -> tuple[float, list[int]]:
    """Tr(a log rho) with the 0 * log 0 = 0 and x * log 0 = -inf conventions.

    Returns the value and the eigen-indices where a nonzero diagonal element met a zero eigenvalue.
    """
    v = spec.eigenvectors
    diag = np.real(np.einsum("ij,jk,ki->i", v.conj().T, a, v))
    lam = spec.eigenvalues
    total = 0.0
    singular: list[int] = []
    for j, (x, l) in enumerate(zip(diag, lam, strict=True)):
        if l > SUPPORT_FLOOR:
            total += x * math.log(l)
        elif abs(x) > tol:
            singular.append(j)
    if singular:
        # diagonal elements on the kernel of a state are >= 0 under a CPTP flow
        return -math.inf, singular
    return total, singular


def entropy_production_def(
    model: LindbladModel,
    rho: ChainOperator | ArrayLike,
    rho_ref: ChainOperator | ArrayLike,
    tol: float = DEFAULT_TOL,
) -> EntropyReport:
    """Tr(L*(rho)(log rho_ref - log rho)), split into the Hamiltonian part and one term per bath."""
    r = check_density_matrix(rho)
    ref = check_density_matrix(rho_ref)
    ref_spec = _faithful_spectrum(ref, "Reference state")
    log_ref = ref_spec.apply(np.log)
    rho_spec = herm_eig(r)

    def production(gen: Matrix) -> tuple[float, list[int]]:
        against_log_rho, singular = _trace_against_log(gen, rho_spec, tol)
        if singular:
            return math.inf, singular
        return float(np.real(np.trace(gen @ log_ref))) - against_log_rho, singular

    warnings: list[tuple[int, int]] = []
    ham, _ = production(hamiltonian_part(model, r, Picture.SCHRODINGER))
    per_bath: list[float] = []
    for bath in model.baths:
        value, singular = production(bath_dissipator(bath, model.n_sites, r, Picture.SCHRODINGER))
        per_bath.append(value)
        warnings.extend((j, j) for j in singular)
    total = ham + sum(per_bath)
    if warnings:
        logger.warning(f"Entropy production is infinite: rho is singular on {len(warnings)} directions")
    return EntropyReport(
        total, tuple(per_bath), ProductionMethod.DEFINITION, tuple(sorted(set(warnings))), ham
    )


def entropy_production_closed(
    model: LindbladModel, rho: ChainOperator | ArrayLike
) -> EntropyReport:
    """Per-bath sums 4 beta_0 sum_{j,k} |<Psi_k, sigma_+ Psi_j>|^2 (e^{2 beta} rho_k - rho_j)(log rho_k - log rho_j + 2 beta).

    Needs one finite beta for all baths, J_x = J_y and a faithful rho.
    """
    beta = model.common_beta
    if beta is None or not math.isfinite(beta):
        raise UnsupportedModelError(
            "The closed-form entropy production needs every bath at one finite temperature"
        )
    if not model.params.is_isotropic:
        raise UnsupportedModelError("The closed-form entropy production needs J_x == J_y")
    r = check_density_matrix(rho)
    spec = _faithful_spectrum(r, "State")
    lam = spec.eigenvalues
    v = spec.eigenvectors
    log_lam = np.log(lam)

    per_bath: list[float] = []
    for bath in model.baths:
        sp = embed_site(PAULI.sigma_plus, bath.site, model.n_sites).data
        amp = np.abs(v.conj().T @ sp @ v) ** 2  # amp[k, j] = |<Psi_k, sigma_+ Psi_j>|^2
        # 4 beta_0 e^{2 beta} = 4 beta_1
        flux = 4 * bath.beta1 * lam[:, None] - 4 * bath.beta0 * lam[None, :]
        force = log_lam[:, None] - log_lam[None, :] + 2 * beta
        terms = amp * flux * force
        negligible = (np.abs(lam[:, None] - lam[None, :]) < PAIR_FLOOR) & (amp < PAIR_FLOOR)
        terms[negligible] = 0.0
        per_bath.append(float(np.sum(terms)))
    return EntropyReport(sum(per_bath), tuple(per_bath), ProductionMethod.CLOSED_FORM)


@dataclass(frozen=True)
class DetailedBalanceReport:
    commutation_residual: float  # ||[H_S, rho]||_max
    symmetry_residual: float  # max |<L_d(A), B>_rho - <A, L_d(B)>_rho| over matrix units
    satisfied: bool
    pairs_checked: int
    exhaustive: bool
    threshold: float = DEFAULT_TOL


def detailed_balance_certificate(
    model: LindbladModel,
    rho: ChainOperator | ArrayLike,
    threshold: float = DEFAULT_TOL,
    seed: int = 0,
) -> DetailedBalanceReport:
    """[H_S, rho] = 0 and self-adjointness of the Heisenberg dissipator for <A, B>_rho = Tr(rho A* B)."""
    r = check_density_matrix(rho)
    _faithful_spectrum(r, "State")
    comm = max_norm(commutator(model.hs, r))
    d = model.dim

    if model.n_sites <= EXHAUSTIVE_SITES:
        # <X, Y>_rho = vec(X)* (rho^T kron I) vec(Y), so the residual matrix is S* W - W S
        s = superoperator(model, Picture.HEISENBERG, part="dissipative").matrix
        w = np.kron(r.T, np.eye(d))
        sym = max_norm(s.conj().T @ w - w @ s)
        pairs, exhaustive = (d * d) ** 2, True
    else:
        rng = task_rng(seed, 0)
        idx = rng.integers(0, d * d, size=(SAMPLED_PAIRS, 2))
        cache: dict[int, tuple[Matrix, Matrix]] = {}

        def unit_and_image(k: int) -> tuple[Matrix, Matrix]:
            if k not in cache:
                e = np.zeros((d, d), dtype=np.complex128)
                e[k % d, k // d] = 1
                image = np.zeros_like(e)
                for bath in model.baths:
                    image += bath_dissipator(bath, model.n_sites, e, Picture.HEISENBERG)
                cache[k] = (e, image)
            return cache[k]

        sym = 0.0
        for a_idx, b_idx in idx:
            a, la = unit_and_image(int(a_idx))
            b, lb = unit_and_image(int(b_idx))
            lhs = np.trace(r @ la.conj().T @ b)
            rhs = np.trace(r @ a.conj().T @ lb)
            sym = max(sym, abs(lhs - rhs))
        pairs, exhaustive = SAMPLED_PAIRS, False

    satisfied = comm <= threshold and sym <= threshold
    logger.debug(f"Detailed balance: [H_S, rho] {comm:.3g}, symmetry {sym:.3g} over {pairs} pairs")
    return DetailedBalanceReport(comm, sym, satisfied, pairs, exhaustive, threshold)


def relative_entropy_rate(
    model: LindbladModel,
    rho: ChainOperator | ArrayLike,
    rho_ref: ChainOperator | ArrayLike,
    dt: float = 1e-5,
) -> float:
    """d/dt S(rho(t)|rho_ref) at t = 0 by a one-sided second order difference along e^{t L*}."""
    r = check_density_matrix(rho)
    step = propagator(model, dt)
    r1 = unvec(step @ vec(r), model.dim)
    r2 = unvec(step @ vec(r1), model.dim)
    s0, s1, s2 = (relative_entropy(x, rho_ref) for x in (r, r1, r2))
    return (-3 * s0 + 4 * s1 - s2) / (2 * dt)
