"""Stationary states, uniqueness certificates, spectral gaps and local states."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from spinbath import Matrix, RealVector
from spinbath.closed_form import (
    boundary_local_states,
    closed_form_stationary,
    conjectured_local_states,
)
from spinbath.exception import ContractViolation, SiteError, UnsupportedModelError
from spinbath.lindblad import (
    Picture,
    apply_schrodinger,
    check_size,
    jump_operators,
    propagator,
    superoperator,
)
from spinbath.model import LindbladModel
from spinbath.operators import (
    DEFAULT_TOL,
    ChainOperator,
    as_matrix,
    check_density_matrix,
    commutator,
    max_norm,
    partial_trace_keep,
    trace_norm,
    unvec,
    vec,
)

logger = logging.getLogger(__name__)

KERNEL_RTOL = 1e-10  # singular values below KERNEL_RTOL * sigma_max count as zero
FAITHFUL_TOL = 1e-10
ZERO_EIGENVALUE_TOL = 1e-9
FIT_WINDOW = (1e-8, 1e-2)

__all__ = [
    "StationaryReport",
    "CommutantReport",
    "DiscrepancyReport",
    "LocalStateReport",
    "stationary_state",
    "commutant_dimension",
    "uniqueness_certificate",
    "liouvillian_spectrum",
    "spectral_gap",
    "approach_to_equilibrium",
    "decay_rate_fit",
    "local_state",
    "local_states",
    "closed_form_stationary",
    "closed_form_discrepancy",
    "conjectured_local_states",
    "local_state_report",
    "commutation_residual",
]


@dataclass(frozen=True)
class StationaryReport:
    kernel_dimension: int
    state: ChainOperator | None  # only when the kernel is one dimensional
    kernel_basis: tuple[ChainOperator, ...]
    residual: float  # max-norm of L*(state)
    gap: float | None
    faithful: bool
    min_eigenvalue: float | None

    @property
    def unique(self) -> bool:
        return self.kernel_dimension == 1


def _kernel(matrix: Matrix, rtol: float = KERNEL_RTOL) -> Matrix:
    """Orthonormal null-space columns, by singular value thresholding relative to sigma_max."""
    _, s, vh = linalg.svd(matrix, full_matrices=matrix.shape[0] < matrix.shape[1])
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * smax)) if smax > 0 else 0
    return vh[rank:].conj().T


def stationary_state(model: LindbladModel, with_gap: bool = True) -> StationaryReport:
    """The kernel of the Schrodinger generator, normalized to a state when it is one dimensional."""
    sup = superoperator(model, Picture.SCHRODINGER)
    null = _kernel(sup.matrix)
    dim = null.shape[1]
    if dim == 0:
        raise ContractViolation("The Liouvillian kernel is numerically empty")
    basis = tuple(ChainOperator(model.n_sites, unvec(null[:, i], model.dim)) for i in range(dim))
    gap = _gap_from_spectrum(np.linalg.eigvals(sup.matrix)) if with_gap else None

    if dim > 1:
        logger.info(f"Stationary states are not unique: kernel dimension {dim}")
        return StationaryReport(dim, None, basis, 0.0, gap, False, None)

    raw = unvec(null[:, 0], model.dim)
    rho = raw / np.trace(raw)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    residual = max_norm(apply_schrodinger(model, rho).data)
    min_eig = float(linalg.eigvalsh(rho)[0])
    logger.debug(f"Stationary state residual {residual:.3g}, min eigenvalue {min_eig:.3g}")
    state = ChainOperator(model.n_sites, rho)
    return StationaryReport(1, state, basis, residual, gap, min_eig > FAITHFUL_TOL, min_eig)


@dataclass(frozen=True)
class CommutantReport:
    generator_labels: tuple[str, ...]
    commutant_dimension: int
    witness: tuple[ChainOperator, ...] = ()  # a basis of the commutant when it is nontrivial
    span_self_adjoint: bool | None = None

    @property
    def trivial(self) -> bool:
        return self.commutant_dimension == 1


def commutant_dimension(
    ops: Sequence[ChainOperator | ArrayLike], labels: Sequence[str] | None = None
) -> CommutantReport:
    """Dimension of {A : [A, M] = 0 for every M in ops}, as the null space of A -> AM - MA stacked."""
    mats = [as_matrix(o) for o in ops]
    if not mats:
        raise UnsupportedModelError("The commutant of an empty set is not computed")
    d = mats[0].shape[0]
    n_sites = d.bit_length() - 1
    eye = np.eye(d, dtype=np.complex128)
    stacked = np.vstack([np.kron(m.T, eye) - np.kron(eye, m) for m in mats])
    null = _kernel(stacked)
    dim = null.shape[1]
    witness: tuple[ChainOperator, ...] = ()
    if dim > 1:
        witness = tuple(ChainOperator(n_sites, unvec(null[:, i], d)) for i in range(dim))
    names = tuple(labels) if labels is not None else tuple(f"M{i}" for i in range(len(mats)))
    return CommutantReport(names, dim, witness)


def _span_is_self_adjoint(mats: list[Matrix], tol: float = DEFAULT_TOL) -> bool:
    """True when every adjoint V* lies in the linear span of the family."""
    cols = np.column_stack([vec(m) for m in mats])
    for m in mats:
        target = vec(m.conj().T)
        coeffs, *_ = np.linalg.lstsq(cols, target, rcond=None)
        if max_norm(cols @ coeffs - target) > tol:
            return False
    return True


def uniqueness_certificate(model: LindbladModel) -> CommutantReport:
    """Commutant of {H_S} together with the jump family and its adjoints."""
    family = jump_operators(model)
    mats = [model.hs.data]
    labels = ["H_S"]
    for j in family:
        mats += [j.operator.data, j.operator.data.conj().T]
        labels += [j.label, f"{j.label}*"]
    report = commutant_dimension(mats, labels)
    return CommutantReport(
        report.generator_labels,
        report.commutant_dimension,
        report.witness,
        _span_is_self_adjoint(family.matrices()),
    )


def liouvillian_spectrum(model: LindbladModel) -> Matrix:
    """Eigenvalues of the Schrodinger generator, sorted by decreasing real part."""
    evals = np.linalg.eigvals(superoperator(model, Picture.SCHRODINGER).matrix)
    return evals[np.lexsort((evals.imag, -evals.real))]


def _gap_from_spectrum(evals: Matrix) -> float:
    near_zero = np.abs(evals) <= ZERO_EIGENVALUE_TOL
    # a degenerate kernel means no relaxation to a single state
    if np.count_nonzero(near_zero) > 1:
        return 0.0
    nonzero = evals[~near_zero]
    if nonzero.size == 0:
        return 0.0
    return max(0.0, float(np.min(-nonzero.real)))


def spectral_gap(model: LindbladModel) -> float:
    """Smallest decay rate -Re(lambda) over the nonzero Liouvillian eigenvalues.

    Zero when the kernel is more than one dimensional.
    """
    check_size(model.n_sites)
    return _gap_from_spectrum(liouvillian_spectrum(model))


def approach_to_equilibrium(
    model: LindbladModel,
    rho0: ChainOperator | ArrayLike,
    times: Sequence[float],
    target: ChainOperator | ArrayLike | None = None,
) -> RealVector:
    """Trace distances ||rho(t) - rho_inf||_1 on a time grid (rho_inf from the kernel when omitted)."""
    rho = check_density_matrix(rho0)
    if target is None:
        report = stationary_state(model, with_gap=False)
        if report.state is None:
            raise UnsupportedModelError("Approach to equilibrium needs a unique stationary state")
        target = report.state
    tgt = as_matrix(target)
    out = []
    for t in times:
        rho_t = unvec(propagator(model, t) @ vec(rho), model.dim)
        out.append(trace_norm(rho_t - tgt))
    return np.asarray(out, dtype=np.float64)


def decay_rate_fit(
    times: ArrayLike, distances: ArrayLike, window: tuple[float, float] = FIT_WINDOW
) -> float:
    """Exponential decay rate from a least squares line through log(distance) inside the window."""
    t = np.asarray(times, dtype=np.float64)
    d = np.asarray(distances, dtype=np.float64)
    mask = (d >= window[0]) & (d <= window[1])
    if mask.sum() < 2:
        raise ContractViolation(
            f"Only {int(mask.sum())} distances fall inside the fit window {window}"
        )
    slope, _ = np.polyfit(t[mask], np.log(d[mask]), 1)
    return float(-slope)


def local_state(rho: ChainOperator | ArrayLike, i: int) -> Matrix:
    return partial_trace_keep(rho, i)


def local_states(rho: ChainOperator | ArrayLike) -> list[Matrix]:
    m = as_matrix(rho)
    n = m.shape[0].bit_length() - 1
    return [partial_trace_keep(m, i) for i in range(1, n + 1)]


@dataclass(frozen=True)
class DiscrepancyReport:
    """Entries where a transcribed state differs from the numerical one."""

    n_sites: int
    max_deviation: float
    tolerance: float
    entries: tuple[tuple[int, int, complex, complex], ...] = field(default=())  # row, col, expected, actual

    @property
    def agrees(self) -> bool:
        return self.max_deviation <= self.tolerance


def closed_form_discrepancy(
    beta: float,
    beta_prime: float,
    numeric: ChainOperator | ArrayLike,
    tol: float = 1e-8,
    max_entries: int = 64,
) -> DiscrepancyReport:
    """Compare closed_form_stationary against a numerical stationary state entry by entry."""
    actual = as_matrix(numeric)
    n = actual.shape[0].bit_length() - 1
    expected = closed_form_stationary(beta, beta_prime, n).data
    diff = np.abs(expected - actual)
    rows, cols = np.nonzero(diff > tol)
    order = np.argsort(-diff[rows, cols], kind="stable")[:max_entries]
    entries = tuple(
        (int(rows[k]), int(cols[k]), complex(expected[rows[k], cols[k]]), complex(actual[rows[k], cols[k]]))
        for k in order
    )
    report = DiscrepancyReport(n, max_norm(diff), tol, entries)
    if not report.agrees:
        logger.warning(
            f"Closed form for N={n} deviates from the kernel state by {report.max_deviation:.3g} "
            f"in {len(rows)} entries"
        )
    return report


@dataclass(frozen=True)
class LocalStateReport:
    """Numerical local states next to the expected boundary profile."""

    numeric: tuple[Matrix, ...]
    expected: tuple[Matrix, ...]
    deviations: tuple[float, ...]  # max-norm per site
    conjectural: bool  # True for N >= 5, where the profile is not proven

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)

    @property
    def endpoint_average_residual(self) -> float:
        """|| (rho^(1) + rho^(N))/2 - rho^(2) || for the expected profile."""
        e = self.expected
        return max_norm((e[0] + e[-1]) / 2 - e[1]) if len(e) > 2 else 0.0


def local_state_report(
    beta: float, beta_prime: float, rho: ChainOperator | ArrayLike
) -> LocalStateReport:
    numeric = local_states(rho)
    n = len(numeric)
    if n < 2:
        raise SiteError("A two-bath local-state profile needs at least two sites")
    conjectural = n >= 5
    expected = (
        conjectured_local_states(beta, beta_prime, n)
        if conjectural
        else boundary_local_states(beta, beta_prime, n)
    )
    deviations = tuple(max_norm(a - b) for a, b in zip(numeric, expected, strict=True))
    report = LocalStateReport(tuple(numeric), tuple(expected), deviations, conjectural)
    level = logging.INFO if report.max_deviation <= 1e-8 else logging.WARNING
    logger.log(level, f"Local-state profile for N={n}: max deviation {report.max_deviation:.3g}")
    return report


def commutation_residual(h: ChainOperator | ArrayLike, rho: ChainOperator | ArrayLike) -> float:
    return max_norm(commutator(h, rho))
