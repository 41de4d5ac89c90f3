"""The Lindblad generator of the chain in both pictures, as maps and as superoperator matrices.

The Schrodinger-picture jump family {2 sqrt(beta_0) sigma_+^(k), 2 sqrt(beta_1) sigma_-^(k)} of every
bath is the single source of truth; the Heisenberg generator is its dual:

    L(X)  = i[H_S, X] + sum_V (V* X V - 1/2 {V* V, X})
    L*(r) = -i[H_S, r] + sum_V (V r V* - 1/2 {V* V, r})
"""

import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg
from scipy.integrate import solve_ivp

from spinbath import Matrix
from spinbath.exception import (
    ContractViolation,
    ShapeMismatchError,
    SizeGuardError,
    UserHandledError,
)
from spinbath.model import BathSpec, LindbladModel
from spinbath.operators import (
    DEFAULT_TOL,
    PAULI,
    ChainOperator,
    anticommutator,
    as_matrix,
    check_density_matrix,
    commutator,
    embed_site,
    unvec,
    vec,
)

logger = logging.getLogger(__name__)

MAX_SUPEROPERATOR_SITES = 7  # 4^7 x 4^7 complex doubles is already ~4 GiB

type GeneratorPart = Literal["full", "hamiltonian", "dissipative"]

__all__ = [
    "Picture",
    "EvolveMethod",
    "JumpOperator",
    "JumpOperatorFamily",
    "SuperOperator",
    "MAX_SUPEROPERATOR_SITES",
    "check_size",
    "jump_operators",
    "lindblad_v_form",
    "hamiltonian_part",
    "bath_dissipator",
    "dissipator",
    "apply_heisenberg",
    "apply_schrodinger",
    "dissipation_function",
    "superoperator",
    "propagator",
    "evolve",
    "evolve_heisenberg",
    "choi_matrix",
]


class Picture(StrEnum):
    HEISENBERG = "heisenberg"
    SCHRODINGER = "schrodinger"


class EvolveMethod(StrEnum):
    EXACT_EXPM = "exact-expm"
    RK_ADAPTIVE = "rk-adaptive"


@dataclass(frozen=True)
class JumpOperator:
    label: str  # e.g. "up@1"
    site: int
    operator: ChainOperator


@dataclass(frozen=True)
class JumpOperatorFamily:
    """Jump operators ordered by bath list, then (up, down)."""

    operators: tuple[JumpOperator, ...]

    def __iter__(self):
        return iter(self.operators)

    def __len__(self) -> int:
        return len(self.operators)

    @property
    def labels(self) -> list[str]:
        return [j.label for j in self.operators]

    def matrices(self) -> list[Matrix]:
        return [j.operator.data for j in self.operators]

    def rate_sum(self) -> Matrix:
        """sum_V V* V."""
        mats = self.matrices()
        return sum((v.conj().T @ v for v in mats), np.zeros_like(mats[0]))


def _bath_jumps(bath: BathSpec, n: int) -> tuple[JumpOperator, JumpOperator]:
    up = embed_site(PAULI.sigma_plus, bath.site, n) * (2 * math.sqrt(bath.beta0))
    down = embed_site(PAULI.sigma_minus, bath.site, n) * (2 * math.sqrt(bath.beta1))
    return (
        JumpOperator(f"up@{bath.site}", bath.site, up),
        JumpOperator(f"down@{bath.site}", bath.site, down),
    )


def jump_operators(model: LindbladModel) -> JumpOperatorFamily:
    ops: list[JumpOperator] = []
    for bath in model.baths:
        ops.extend(_bath_jumps(bath, model.n_sites))
    return JumpOperatorFamily(tuple(ops))


def _check_shape(model: LindbladModel, x: Matrix) -> None:
    if x.shape != (model.dim, model.dim):
        raise ShapeMismatchError(
            f"Operator of shape {x.shape} does not act on a {model.n_sites}-site chain"
        )


def lindblad_v_form(
    h: ArrayLike, jumps: list[Matrix], x: ArrayLike, picture: Picture
) -> Matrix:
    """The generic Lindblad form with Hamiltonian h and jump operators V."""
    hm, xm = as_matrix(h), as_matrix(x)
    sign = 1j if picture == Picture.HEISENBERG else -1j
    out = sign * commutator(hm, xm)
    for v in jumps:
        vd = v.conj().T
        sandwich = vd @ xm @ v if picture == Picture.HEISENBERG else v @ xm @ vd
        out += sandwich - 0.5 * anticommutator(vd @ v, xm)
    return out


def hamiltonian_part(model: LindbladModel, x: ArrayLike, picture: Picture) -> Matrix:
    """i[H_S, X] in the Heisenberg picture, -i[H_S, rho] in the Schrodinger picture."""
    xm = as_matrix(x)
    _check_shape(model, xm)
    sign = 1j if picture == Picture.HEISENBERG else -1j
    return sign * commutator(model.hs, xm)


def bath_dissipator(bath: BathSpec, n: int, x: ArrayLike, picture: Picture) -> Matrix:
    """One bath's dissipator written with the spin operators of its site.

    Heisenberg: 2 beta_0 [2 sigma_- X sigma_+ - {n_-, X}] + 2 beta_1 [2 sigma_+ X sigma_- - {n_+, X}]
    Schrodinger: 2 beta_0 [2 sigma_+ r sigma_- - {n_-, r}] + 2 beta_1 [2 sigma_- r sigma_+ - {n_+, r}]
    """
    xm = as_matrix(x)
    sp = embed_site(PAULI.sigma_plus, bath.site, n).data
    sm = embed_site(PAULI.sigma_minus, bath.site, n).data
    npl = embed_site(PAULI.n_plus, bath.site, n).data
    nmi = embed_site(PAULI.n_minus, bath.site, n).data
    if picture == Picture.HEISENBERG:
        gain, loss = sm @ xm @ sp, sp @ xm @ sm
    else:
        gain, loss = sp @ xm @ sm, sm @ xm @ sp
    return 2 * bath.beta0 * (2 * gain - anticommutator(nmi, xm)) + 2 * bath.beta1 * (
        2 * loss - anticommutator(npl, xm)
    )


def dissipator(model: LindbladModel, x: ArrayLike, picture: Picture) -> Matrix:
    """Sum of bath_dissipator over the model's baths."""
    xm = as_matrix(x)
    _check_shape(model, xm)
    out = np.zeros_like(xm)
    for bath in model.baths:
        out += bath_dissipator(bath, model.n_sites, xm, picture)
    return out


def apply_heisenberg(model: LindbladModel, x: ChainOperator | ArrayLike) -> ChainOperator:
    """L(X) = i[H_S, X] + per-bath dissipators."""
    xm = as_matrix(x)
    out = hamiltonian_part(model, xm, Picture.HEISENBERG) + dissipator(
        model, xm, Picture.HEISENBERG
    )
    return ChainOperator(model.n_sites, out)


def apply_schrodinger(model: LindbladModel, rho: ChainOperator | ArrayLike) -> ChainOperator:
    """L*(rho) = -i[H_S, rho] + per-bath dissipators."""
    rm = as_matrix(rho)
    out = hamiltonian_part(model, rm, Picture.SCHRODINGER) + dissipator(
        model, rm, Picture.SCHRODINGER
    )
    return ChainOperator(model.n_sites, out)


def dissipation_function(model: LindbladModel, a: ChainOperator | ArrayLike) -> Matrix:
    """L(A*A) - L(A*)A - A*L(A), which equals sum_V [V, A]*[V, A] and is positive semidefinite."""
    am = as_matrix(a)
    ad = am.conj().T
    return (
        apply_heisenberg(model, ad @ am).data
        - apply_heisenberg(model, ad).data @ am
        - ad @ apply_heisenberg(model, am).data
    )


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """A generator as a 4^N x 4^N matrix acting on column-stacked operators."""

    n_sites: int
    picture: Picture
    matrix: Matrix

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def apply(self, x: ChainOperator | ArrayLike) -> ChainOperator:
        return ChainOperator(self.n_sites, unvec(self.matrix @ vec(x), self.dim))

    def adjoint(self) -> "SuperOperator":
        """The dual generator with respect to the Hilbert-Schmidt pairing."""
        other = Picture.SCHRODINGER if self.picture == Picture.HEISENBERG else Picture.HEISENBERG
        return SuperOperator(self.n_sites, other, self.matrix.conj().T)


def check_size(n_sites: int, limit: int = MAX_SUPEROPERATOR_SITES) -> None:
    if n_sites > limit:
        raise SizeGuardError(
            f"A {n_sites}-site chain exceeds the dense superoperator limit of {limit} sites"
        )


def superoperator(
    model: LindbladModel, picture: Picture, part: GeneratorPart = "full"
) -> SuperOperator:
    """Matrix form under vec(A X B) = (B^T kron A) vec(X)."""
    check_size(model.n_sites)
    d = model.dim
    eye = np.eye(d, dtype=np.complex128)
    total = np.zeros((d * d, d * d), dtype=np.complex128)
    if part in ("full", "hamiltonian"):
        h = model.hs.data
        sign = 1j if picture == Picture.HEISENBERG else -1j
        total += sign * (np.kron(eye, h) - np.kron(h.T, eye))
    if part in ("full", "dissipative"):
        for v in jump_operators(model).matrices():
            vdv = v.conj().T @ v
            if picture == Picture.HEISENBERG:
                total += np.kron(v.T, v.conj().T)  # V* X V
            else:
                total += np.kron(v.conj(), v)  # V X V*
            total -= 0.5 * (np.kron(eye, vdv) + np.kron(vdv.T, eye))
    return SuperOperator(model.n_sites, picture, total)


def propagator(model: LindbladModel, t: float, picture: Picture = Picture.SCHRODINGER) -> Matrix:
    """e^{t L} (or e^{t L*}) as a 4^N x 4^N matrix."""
    if t < 0:
        raise UserHandledError(f"Negative time {t}")
    return linalg.expm(t * superoperator(model, picture).matrix)


def _rk_evolve(model: LindbladModel, rho0: Matrix, t: float, tol: float) -> Matrix:
    d = model.dim

    def rhs(_t: float, y: Matrix) -> Matrix:
        return apply_schrodinger(model, y.reshape(d, d)).data.ravel()

    sol = solve_ivp(rhs, (0.0, t), rho0.ravel(), method="RK45", rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise ContractViolation(f"Adaptive integration failed: {sol.message}")
    return sol.y[:, -1].reshape(d, d)


def evolve(
    model: LindbladModel,
    rho0: ChainOperator | ArrayLike,
    t: float,
    method: EvolveMethod = EvolveMethod.EXACT_EXPM,
    tol: float = 1e-10,
) -> ChainOperator:
    """rho(t) = e^{t L*}(rho0).  Trace drift is logged, never renormalized away."""
    rho = check_density_matrix(rho0, max(tol, DEFAULT_TOL))
    _check_shape(model, rho)
    if t < 0:
        raise UserHandledError(f"Negative time {t}")
    if t == 0:
        return ChainOperator(model.n_sites, rho)
    if method == EvolveMethod.EXACT_EXPM:
        out = unvec(propagator(model, t) @ vec(rho), model.dim)
    else:
        out = _rk_evolve(model, rho.astype(np.complex128), t, tol)
    drift = abs(np.trace(out) - 1)
    if drift > tol:
        logger.warning(f"Trace drift {drift:.3g} after evolving to t={t:g} ({method})")
    else:
        logger.debug(f"Trace drift {drift:.3g} after evolving to t={t:g} ({method})")
    return ChainOperator(model.n_sites, out)


def evolve_heisenberg(model: LindbladModel, x: ChainOperator | ArrayLike, t: float) -> ChainOperator:
    """e^{t L}(X) via the exact exponential of the Heisenberg superoperator."""
    xm = as_matrix(x)
    _check_shape(model, xm)
    out = propagator(model, t, Picture.HEISENBERG) @ vec(xm)
    return ChainOperator(model.n_sites, unvec(out, model.dim))


def choi_matrix(map_matrix: ArrayLike, dim: int) -> Matrix:
    """Choi matrix sum_ab E_ab kron Phi(E_ab) of a map given as a column-stacking matrix."""
    m = np.asarray(map_matrix, dtype=np.complex128)
    if m.shape != (dim * dim, dim * dim):
        raise ShapeMismatchError(f"Map of shape {m.shape} does not act on {dim}x{dim} matrices")
    choi = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for b in range(dim):
        for a in range(dim):
            unit = np.zeros((dim, dim), dtype=np.complex128)
            unit[a, b] = 1
            choi += np.kron(unit, unvec(m[:, b * dim + a], dim))
    return choi
