"""Chain parameters, bath attachments and the Hamiltonians of the XY chain."""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import expit

from spinbath import Matrix
from spinbath.exception import ConfigError, SiteError
from spinbath.operators import PAULI, ChainOperator, embed_site, tensor

logger = logging.getLogger(__name__)

__all__ = [
    "ChainParams",
    "BathSpec",
    "LindbladModel",
    "gibbs_weights",
    "gibbs_qubit",
    "product_gibbs",
    "build_hs",
    "build_free_hamiltonian",
    "excitation_number",
]


@dataclass(frozen=True)
class ChainParams:
    """N spins with field B and nearest-neighbour XY couplings J_x, J_y."""

    n_sites: int
    b_field: float = 1.0
    jx: float = 1.0
    jy: float = 1.0

    def __post_init__(self) -> None:
        if isinstance(self.n_sites, bool) or not isinstance(self.n_sites, int) or self.n_sites < 1:
            raise ConfigError(f"n_sites must be an integer >= 1, got {self.n_sites!r}")
        for name in ("b_field", "jx", "jy"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")

    @classmethod
    def paper_default(cls, n_sites: int) -> "ChainParams":
        """B = J_x = J_y = 1."""
        return cls(n_sites, 1.0, 1.0, 1.0)

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    @property
    def is_isotropic(self) -> bool:
        """J_x == J_y, the case where H_S commutes with the free Hamiltonian."""
        return self.jx == self.jy


def gibbs_weights(beta: float) -> tuple[float, float]:
    """(beta_0, beta_1) = (e^-beta, e^beta) / (e^-beta + e^beta), stable for large |beta| and beta = +inf."""
    if math.isnan(beta):
        raise ConfigError("Inverse temperature is NaN")
    if beta == -math.inf:
        raise ConfigError("Inverse temperature -inf is not supported")
    return float(expit(-2.0 * beta)), float(expit(2.0 * beta))


@dataclass(frozen=True)
class BathSpec:
    """A heat bath at inverse temperature beta attached to one site (1-based)."""

    site: int
    beta: float
    beta0: float = field(init=False)
    beta1: float = field(init=False)

    def __post_init__(self) -> None:
        if isinstance(self.site, bool) or not isinstance(self.site, int) or self.site < 1:
            raise SiteError(f"Bath site must be a positive integer, got {self.site!r}")
        b0, b1 = gibbs_weights(self.beta)
        object.__setattr__(self, "beta0", b0)
        object.__setattr__(self, "beta1", b1)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.beta)

    def gibbs(self) -> Matrix:
        return gibbs_qubit(self.beta)


def gibbs_qubit(beta: float) -> Matrix:
    """e^{-beta sigma_z} / Tr(e^{-beta sigma_z}) = diag(beta_0, beta_1)."""
    b0, b1 = gibbs_weights(beta)
    return np.diag([b0, b1]).astype(np.complex128)


def product_gibbs(beta: float, n: int) -> ChainOperator:
    """The n-fold tensor power of gibbs_qubit(beta)."""
    if n < 1:
        raise ConfigError(f"Chain needs at least one site, got {n}")
    q = gibbs_qubit(beta)
    return ChainOperator(n, tensor(*([q] * n)))


def build_hs(params: ChainParams) -> ChainOperator:
    """H_S = B sum_k sigma_z^(k) + sum_k (J_x sigma_x^(k) sigma_x^(k+1) + J_y sigma_y^(k) sigma_y^(k+1))."""
    n = params.n_sites
    h = np.zeros((params.dim, params.dim), dtype=np.complex128)
    for k in range(1, n + 1):
        h += params.b_field * embed_site(PAULI.sigma_z, k, n).data
    for k in range(1, n):
        h += params.jx * (embed_site(PAULI.sigma_x, k, n) @ embed_site(PAULI.sigma_x, k + 1, n)).data
        h += params.jy * (embed_site(PAULI.sigma_y, k, n) @ embed_site(PAULI.sigma_y, k + 1, n)).data
    return ChainOperator(n, h)


def build_free_hamiltonian(n: int) -> ChainOperator:
    """H^(S) = sum_k sigma_z^(k); diagonal with entries N - 2 * popcount(index)."""
    if n < 1:
        raise ConfigError(f"Chain needs at least one site, got {n}")
    diag = [n - 2 * int(i).bit_count() for i in range(1 << n)]
    return ChainOperator(n, np.diag(diag).astype(np.complex128))


def excitation_number(n: int) -> ChainOperator:
    """sum_k n_-^(k), conserved by the isotropic XY chain."""
    total = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    for k in range(1, n + 1):
        total += embed_site(PAULI.n_minus, k, n).data
    return ChainOperator(n, total)


@dataclass(frozen=True)
class LindbladModel:
    """A chain together with the heat baths attached to it."""

    params: ChainParams
    baths: tuple[BathSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "baths", tuple(self.baths))
        n = self.params.n_sites
        if not self.baths:
            raise ConfigError("At least one bath required")
        if len(self.baths) > n:
            raise ConfigError(f"{len(self.baths)} baths cannot attach to {n} sites")
        sites = [b.site for b in self.baths]
        for s in sites:
            if not 1 <= s <= n:
                raise SiteError(f"Bath site {s} is outside 1..{n}")
        if len(set(sites)) != len(sites):
            raise ConfigError(f"Bath sites must be distinct, got {sites}")

    @classmethod
    def two_bath(cls, params: ChainParams, beta: float, beta_prime: float) -> "LindbladModel":
        """Baths at inverse temperatures beta on site 1 and beta' on site N (N >= 2)."""
        if params.n_sites < 2:
            raise ConfigError("A two-bath chain needs at least two sites")
        return cls(params, (BathSpec(1, beta), BathSpec(params.n_sites, beta_prime)))

    @classmethod
    def equal_temperature(
        cls, params: ChainParams, beta: float, sites: list[int] | None = None
    ) -> "LindbladModel":
        """Baths at one common beta on the given sites (every site when omitted)."""
        chosen = sites if sites is not None else list(range(1, params.n_sites + 1))
        return cls(params, tuple(BathSpec(s, beta) for s in chosen))

    @property
    def n_sites(self) -> int:
        return self.params.n_sites

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def common_beta(self) -> float | None:
        """The shared inverse temperature when all baths agree, else None."""
        betas = {b.beta for b in self.baths}
        return betas.pop() if len(betas) == 1 else None

    @cached_property
    def hs(self) -> ChainOperator:
        return build_hs(self.params)

    @cached_property
    def free_hamiltonian(self) -> ChainOperator:
        return build_free_hamiltonian(self.n_sites)

    def describe(self) -> str:
        baths = ", ".join(f"site {b.site} @ beta={b.beta:g}" for b in self.baths)
        p = self.params
        return f"N={p.n_sites} B={p.b_field:g} Jx={p.jx:g} Jy={p.jy:g} baths=[{baths}]"
