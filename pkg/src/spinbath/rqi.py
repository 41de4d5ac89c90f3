"""Repeated quantum interactions: the chain meets fresh thermal bath spins for a time h each step.

The coupling scales as 1/sqrt(h), so the reduced one-step map L_h satisfies (L_h(X) - X)/h -> L(X)
as h -> 0, where L is the Heisenberg generator of spinbath.lindblad.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from spinbath import Matrix
from spinbath.exception import (
    DegenerateBasisError,
    ShapeMismatchError,
    SizeGuardError,
    UserHandledError,
)
from spinbath.lindblad import apply_heisenberg, choi_matrix, evolve_heisenberg
from spinbath.model import BathSpec, ChainParams, LindbladModel, build_hs
from spinbath.operators import (
    PAULI,
    ChainOperator,
    as_matrix,
    embed_site,
    gns_inner,
    max_norm,
    vec,
)
from spinbath.sweep import parallel_map

logger = logging.getLogger(__name__)

MAX_PROBE_SITES = 4
MAX_PROBE_BATHS = 3
DEFAULT_H_GRID = (1e-1, 1e-2, 1e-3, 1e-4)
TRIVIAL_GENERATOR = 1e-11  # below this L(X) counts as zero and residuals must vanish too
ENDPOINT_FRACTION = 1e-2

__all__ = [
    "InteractionSetup",
    "GnsBasis",
    "RqiBlocks",
    "ConvergenceTable",
    "EffectiveHamiltonian",
    "DEFAULT_H_GRID",
    "build_interaction_hamiltonian",
    "one_step_unitary",
    "gns_blocks",
    "discrete_map",
    "discrete_choi",
    "repeated_evolution",
    "shadowing_error",
    "convergence_probe",
    "effective_hamiltonian",
]


@dataclass(frozen=True)
class InteractionSetup:
    """A chain, the bath spins it meets at each step, and the interaction time h."""

    params: ChainParams
    baths: tuple[BathSpec, ...]
    h: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "baths", tuple(self.baths))
        if not (math.isfinite(self.h) and self.h > 0):
            raise UserHandledError(f"Interaction time h must be positive and finite, got {self.h}")
        LindbladModel(self.params, self.baths)  # same site rules as the continuous model
        for bath in self.baths:
            if not bath.is_finite:
                raise DegenerateBasisError(
                    f"Bath at site {bath.site} has beta = +inf; its GNS basis degenerates"
                )

    @classmethod
    def from_model(cls, model: LindbladModel, h: float) -> "InteractionSetup":
        return cls(model.params, model.baths, h)

    def with_h(self, h: float) -> "InteractionSetup":
        return InteractionSetup(self.params, self.baths, h)

    @property
    def model(self) -> LindbladModel:
        return LindbladModel(self.params, self.baths)

    @property
    def n_baths(self) -> int:
        return len(self.baths)

    @property
    def total_sites(self) -> int:
        """Chain sites followed by one bath spin per bath."""
        return self.params.n_sites + self.n_baths


@dataclass(frozen=True)
class GnsBasis:
    """X_0 = I, X_1 = sigma_-/sqrt(beta_0), X_2 = sigma_+/sqrt(beta_1), X_3 = diag(beta_1, -beta_0)/sqrt(beta_0 beta_1)."""

    bath: BathSpec

    @classmethod
    def for_beta(cls, beta: float) -> "GnsBasis":
        bath = BathSpec(1, beta)
        if not bath.is_finite:
            raise DegenerateBasisError("The GNS basis degenerates at beta = +inf")
        return cls(bath)

    @cached_property
    def elements(self) -> tuple[Matrix, Matrix, Matrix, Matrix]:
        b0, b1 = self.bath.beta0, self.bath.beta1
        return (
            PAULI.identity,
            PAULI.sigma_minus / math.sqrt(b0),
            PAULI.sigma_plus / math.sqrt(b1),
            np.diag([b1, -b0]).astype(np.complex128) / math.sqrt(b0 * b1),
        )

    def gram(self) -> Matrix:
        rho = self.bath.gibbs()
        return np.array([[gns_inner(rho, a, b) for b in self.elements] for a in self.elements])

    def unit_coefficients(self) -> Matrix:
        """c[i, a, b] = <X_i, E_ab>_beta = beta_b conj(X_i[a, b])."""
        weights = np.array([self.bath.beta0, self.bath.beta1])
        return np.stack([x.conj() * weights[None, :] for x in self.elements])


def build_interaction_hamiltonian(setup: InteractionSetup) -> Matrix:
    """H_S kron I + sum_j sigma_z(bath j) + h^-1/2 sum_j (sigma_x^(k_j) sigma_x(bath j) + sigma_y^(k_j) sigma_y(bath j))."""
    n, total = setup.params.n_sites, setup.total_sites
    r_dim = 1 << setup.n_baths
    h_full = np.kron(build_hs(setup.params).data, np.eye(r_dim, dtype=np.complex128))
    coupling = 1 / math.sqrt(setup.h)
    for j, bath in enumerate(setup.baths, start=1):
        spin = n + j
        h_full += embed_site(PAULI.sigma_z, spin, total).data
        for pauli in (PAULI.sigma_x, PAULI.sigma_y):
            h_full += coupling * (
                embed_site(pauli, bath.site, total) @ embed_site(pauli, spin, total)
            ).data
    return h_full


def _check_probe_size(setup: InteractionSetup) -> None:
    if setup.params.n_sites > MAX_PROBE_SITES or setup.n_baths > MAX_PROBE_BATHS:
        raise SizeGuardError(
            f"Repeated-interaction work is limited to N <= {MAX_PROBE_SITES} and "
            f"r <= {MAX_PROBE_BATHS}, got N={setup.params.n_sites}, r={setup.n_baths}"
        )


def one_step_unitary(setup: InteractionSetup) -> Matrix:
    """e^{-i h H} by exact matrix exponential."""
    _check_probe_size(setup)
    return linalg.expm(-1j * setup.h * build_interaction_hamiltonian(setup))


@dataclass(frozen=True, eq=False)
class RqiBlocks:
    """Operators B_i on the chain with L_h(X) = sum_i B_i* X B_i; i runs over {0,1,2,3}^r."""

    h: float
    n_sites: int
    indices: tuple[tuple[int, ...], ...]
    blocks: Matrix  # shape (4^r, 2^N, 2^N), ordered like indices

    def block(self, index: Sequence[int]) -> Matrix:
        return self.blocks[self.indices.index(tuple(index))]

    def isometry_residual(self) -> float:
        """max-norm of sum_i B_i* B_i - I."""
        total = np.einsum("iba,ibc->ac", self.blocks.conj(), self.blocks)
        return max_norm(total - np.eye(total.shape[0]))


def gns_blocks(setup: InteractionSetup) -> RqiBlocks:
    """Blocks from the Omega_R column of the GNS-lifted one-step unitary.

    With U = sum_{A,B} M_AB kron E_AB over bath matrix units, B_I = sum_{A,B} <X_I, E_AB>_beta M_AB where
    X_I and the inner product are tensor products over the baths.
    """
    d, r = setup.params.dim, setup.n_baths
    r_dim = 1 << r
    u4 = one_step_unitary(setup).reshape(d, r_dim, d, r_dim)

    coeffs = GnsBasis(setup.baths[0]).unit_coefficients()
    for bath in setup.baths[1:]:
        c = GnsBasis(bath).unit_coefficients()
        coeffs = np.einsum("IAB,iab->IiAaBb", coeffs, c).reshape(
            coeffs.shape[0] * 4, coeffs.shape[1] * 2, coeffs.shape[2] * 2
        )
    blocks = np.einsum("IAB,sAtB->Ist", coeffs, u4)
    indices = tuple(product(range(4), repeat=r))
    return RqiBlocks(setup.h, setup.params.n_sites, indices, blocks)


def discrete_map(blocks: RqiBlocks, x: ChainOperator | ArrayLike) -> ChainOperator:
    """L_h(X) = sum_i B_i* X B_i."""
    xm = as_matrix(x)
    if xm.shape != blocks.blocks.shape[1:]:
        raise ShapeMismatchError(f"Operator of shape {xm.shape} does not match the blocks")
    out = np.einsum("iba,bc,icd->ad", blocks.blocks.conj(), xm, blocks.blocks)
    return ChainOperator(blocks.n_sites, out)


def discrete_choi(blocks: RqiBlocks) -> Matrix:
    """Choi matrix of L_h."""
    d = blocks.blocks.shape[1]
    columns = []
    for k in range(d * d):
        unit = np.zeros(d * d, dtype=np.complex128)
        unit[k] = 1
        columns.append(vec(discrete_map(blocks, unit.reshape((d, d), order="F"))))
    return choi_matrix(np.column_stack(columns), d)


def repeated_evolution(blocks: RqiBlocks, x: ChainOperator | ArrayLike, n: int) -> ChainOperator:
    """L_h^n(X)."""
    if n < 0:
        raise UserHandledError(f"Number of steps must be >= 0, got {n}")
    out = ChainOperator(blocks.n_sites, as_matrix(x))
    for _ in range(n):
        out = discrete_map(blocks, out)
    return out


def shadowing_error(
    blocks: RqiBlocks, model: LindbladModel, x: ChainOperator | ArrayLike, n: int
) -> float:
    """max-norm of L_h^n(X) - e^{n h L}(X)."""
    discrete = repeated_evolution(blocks, x, n)
    continuous = evolve_heisenberg(model, x, n * blocks.h)
    return max_norm(discrete.data - continuous.data)


@dataclass(frozen=True)
class ConvergenceTable:
    h_grid: tuple[float, ...]
    residuals: tuple[float, ...]  # max-norm of (L_h(X) - X)/h - L(X)
    isometry_residuals: tuple[float, ...]
    generator_norm: float  # max-norm of L(X)
    empirical_order: float | None  # slope of log residual against log h

    @property
    def trivial(self) -> bool:
        return self.generator_norm <= TRIVIAL_GENERATOR

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.residuals, self.residuals[1:], strict=False))

    @property
    def endpoint_ok(self) -> bool:
        return self.residuals[-1] <= ENDPOINT_FRACTION * self.generator_norm

    @property
    def passed(self) -> bool:
        if self.trivial:
            return all(r <= TRIVIAL_GENERATOR for r in self.residuals)
        return self.strictly_decreasing and self.endpoint_ok


def _empirical_order(h_grid: Sequence[float], residuals: Sequence[float]) -> float | None:
    pairs = [(h, r) for h, r in zip(h_grid, residuals, strict=True) if r > 0]
    if len(pairs) < 2:
        return None
    hs, rs = zip(*pairs, strict=True)
    slope, _ = np.polyfit(np.log(hs), np.log(rs), 1)
    return float(slope)


def convergence_probe(
    model: LindbladModel,
    x: ChainOperator | ArrayLike,
    h_grid: Sequence[float] = DEFAULT_H_GRID,
) -> ConvergenceTable:
    """Residuals of the difference quotient (L_h(X) - X)/h against the Lindblad generator."""
    grid = tuple(float(h) for h in h_grid)
    if not grid or any(b >= a for a, b in zip(grid, grid[1:], strict=False)):
        raise UserHandledError(f"The h grid must be nonempty and strictly decreasing, got {grid}")
    xm = as_matrix(x)
    target = apply_heisenberg(model, xm).data
    setups = [InteractionSetup.from_model(model, h) for h in grid]
    _check_probe_size(setups[0])

    def one(setup: InteractionSetup) -> tuple[float, float]:
        blocks = gns_blocks(setup)
        quotient = (discrete_map(blocks, xm).data - xm) / setup.h
        return max_norm(quotient - target), blocks.isometry_residual()

    results = parallel_map(one, setups)
    residuals = tuple(r for r, _ in results)
    table = ConvergenceTable(
        grid,
        residuals,
        tuple(i for _, i in results),
        max_norm(target),
        _empirical_order(grid, residuals),
    )
    logger.info(
        f"Convergence probe: residuals {', '.join(f'{r:.3g}' for r in residuals)}, "
        f"empirical order {table.empirical_order}"
    )
    return table


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """i times the anti-Hermitian part of (B_0 - I)/h, split as H_S + c I plus a remainder."""

    h: float
    scalar_shift: float  # c
    expected_shift: float  # sum over baths of beta_0 - beta_1
    traceless_deviation: float  # max-norm of (K - c I) - H_S
    hs_norm: float


def effective_hamiltonian(blocks: RqiBlocks, model: LindbladModel) -> EffectiveHamiltonian:
    b0 = blocks.blocks[0]
    d = b0.shape[0]
    a = (b0 - np.eye(d)) / blocks.h
    k = 1j * (a - a.conj().T) / 2
    c = float(np.real(np.trace(k))) / d
    hs = model.hs.data
    deviation = max_norm(k - c * np.eye(d) - hs)
    expected = sum(b.beta0 - b.beta1 for b in model.baths)
    return EffectiveHamiltonian(blocks.h, c, expected, deviation, max_norm(hs))
