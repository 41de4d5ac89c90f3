"""Dense complex-matrix algebra for N-qubit chains.

Conventions used everywhere in spinbath:

* the single-spin basis is Omega = (1, 0) first and X = (0, 1) second,
* site 1 is the leftmost Kronecker factor,
* operators are vectorized by column stacking, vec(A X B) = (B^T kron A) vec(X).
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Any, Literal

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from spinbath import Matrix, RealVector
from spinbath.exception import (
    ConfigError,
    NotDensityMatrixError,
    NotHermitianError,
    NotPositiveError,
    ShapeMismatchError,
    SiteError,
)

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
SUPPORT_FLOOR = 1e-12  # eigenvalues below this are outside the support
DEFAULT_TOL = 1e-9

type SupportRule = Literal["error", "project"]

__all__ = [
    "HERMITIAN_TOL",
    "SUPPORT_FLOOR",
    "DEFAULT_TOL",
    "ChainOperator",
    "PauliSet",
    "PAULI",
    "SpectralDecomposition",
    "as_matrix",
    "kron",
    "embed_site",
    "site_product",
    "commutator",
    "anticommutator",
    "partial_trace_keep",
    "is_hermitian",
    "herm_eig",
    "matrix_exp",
    "matrix_log_psd",
    "gns_inner",
    "trace_norm",
    "max_norm",
    "vec",
    "unvec",
    "check_density_matrix",
    "random_density_matrix",
]


def _sites_for_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise ShapeMismatchError(f"Dimension {dim} is not 2^N for a chain of N >= 1 sites")
    return n


@dataclass(frozen=True, eq=False)
class ChainOperator:
    """An operator on the 2^N dimensional Hilbert space of an N-site chain.

    The wrapped matrix is copied and made read-only, so a ChainOperator can be shared between threads.
    Comparison is entrywise within a tolerance via allclose(); == is identity.
    """

    n_sites: int
    data: Matrix

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=np.complex128, copy=True)
        side = 1 << self.n_sites if self.n_sites >= 1 else 0
        if self.n_sites < 1 or data.shape != (side, side):
            raise ShapeMismatchError(
                f"Chain operator for {self.n_sites} sites must be {side}x{side}, got {data.shape}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_matrix(cls, data: ArrayLike) -> "ChainOperator":
        """Wrap a square matrix, inferring the number of sites from its side."""
        m = np.asarray(data, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeMismatchError(f"Expected a square matrix, got shape {m.shape}")
        return cls(_sites_for_dim(m.shape[0]), m)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype: Any = None, copy: bool | None = None) -> Matrix:
        if dtype is None or np.dtype(dtype) == self.data.dtype:
            return self.data.copy() if copy else self.data
        return self.data.astype(dtype)

    def dagger(self) -> "ChainOperator":
        return ChainOperator(self.n_sites, self.data.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return is_hermitian(self.data, tol)

    def allclose(self, other: "ChainOperator | ArrayLike", tol: float = DEFAULT_TOL) -> bool:
        """Entrywise comparison within an absolute tolerance."""
        o = as_matrix(other)
        return o.shape == self.data.shape and max_norm(self.data - o) <= tol

    def __add__(self, other: "ChainOperator") -> "ChainOperator":
        return ChainOperator(self.n_sites, self.data + as_matrix(other))

    def __sub__(self, other: "ChainOperator") -> "ChainOperator":
        return ChainOperator(self.n_sites, self.data - as_matrix(other))

    def __matmul__(self, other: "ChainOperator") -> "ChainOperator":
        return ChainOperator(self.n_sites, self.data @ as_matrix(other))

    def __mul__(self, scalar: complex) -> "ChainOperator":
        return ChainOperator(self.n_sites, self.data * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"ChainOperator(n_sites={self.n_sites})"


def as_matrix(op: ChainOperator | ArrayLike) -> Matrix:
    """The dense complex matrix behind an operator-like value."""
    if isinstance(op, ChainOperator):
        return op.data
    return np.asarray(op, dtype=np.complex128)


@dataclass(frozen=True)
class PauliSet:
    """The single-spin operators in the (Omega, X) basis."""

    sigma_x: Matrix
    sigma_y: Matrix
    sigma_z: Matrix
    sigma_plus: Matrix
    sigma_minus: Matrix
    n_plus: Matrix
    n_minus: Matrix
    identity: Matrix

    @classmethod
    def standard(cls) -> "PauliSet":
        sp = np.array([[0, 1], [0, 0]], dtype=np.complex128)
        sm = np.array([[0, 0], [1, 0]], dtype=np.complex128)
        ops = {
            "sigma_x": sp + sm,
            "sigma_y": -1j * sp + 1j * sm,
            "sigma_z": np.diag([1.0, -1.0]).astype(np.complex128),
            "sigma_plus": sp,
            "sigma_minus": sm,
            "n_plus": np.diag([1.0, 0.0]).astype(np.complex128),
            "n_minus": np.diag([0.0, 1.0]).astype(np.complex128),
            "identity": np.eye(2, dtype=np.complex128),
        }
        for m in ops.values():
            m.setflags(write=False)
        return cls(**ops)

    def by_name(self, name: str) -> Matrix:
        """Look up an operator by its short name (x, y, z, plus, minus, n_plus, n_minus, identity)."""
        aliases = {
            "x": "sigma_x",
            "y": "sigma_y",
            "z": "sigma_z",
            "plus": "sigma_plus",
            "minus": "sigma_minus",
            "i": "identity",
        }
        key = aliases.get(name, name)
        if key not in self.__dataclass_fields__:
            raise KeyError(f"Unknown single-spin operator '{name}'")
        return getattr(self, key)


PAULI = PauliSet.standard()


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""

    eigenvalues: RealVector
    eigenvectors: Matrix

    def reconstruct(self) -> Matrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply(self, fn: Any) -> Matrix:
        """V f(diag(lambda)) V* for a scalar function applied to the eigenvalues."""
        v = self.eigenvectors
        return (v * fn(self.eigenvalues)) @ v.conj().T


def kron(a: ArrayLike, b: ArrayLike) -> Matrix:
    return np.kron(as_matrix(a), as_matrix(b))


def embed_site(op: ArrayLike, k: int, n: int) -> ChainOperator:
    """I^(k-1) kron op kron I^(n-k), site 1 leftmost."""
    if n < 1 or not 1 <= k <= n:
        raise SiteError(f"Site {k} is outside 1..{n}")
    m = as_matrix(op)
    if m.shape != (2, 2):
        raise ShapeMismatchError(f"Single-site operator must be 2x2, got {m.shape}")
    left = np.eye(1 << (k - 1), dtype=np.complex128)
    right = np.eye(1 << (n - k), dtype=np.complex128)
    return ChainOperator(n, np.kron(np.kron(left, m), right))


def tensor(*factors: ArrayLike) -> Matrix:
    """Kronecker product of several factors, leftmost first."""
    return reduce(np.kron, (as_matrix(f) for f in factors))


def site_product(expr: str, n: int) -> ChainOperator:
    """Parse a product of single-site operators such as "x:1*x:2" or "n_plus:1" on an n-site chain."""
    total = ChainOperator(n, np.eye(1 << n, dtype=np.complex128))
    for factor in expr.replace(" ", "").split("*"):
        name, sep, site = factor.partition(":")
        if not sep or not site.isdigit():
            raise ConfigError(f"Observable factor '{factor}' must look like name:site")
        try:
            op = PAULI.by_name(name)
        except KeyError as e:
            raise ConfigError(str(e.args[0])) from e
        total = total @ embed_site(op, int(site), n)
    return total


def _same_shape(a: Matrix, b: Matrix) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"Operator shapes differ: {a.shape} vs {b.shape}")


def commutator(a: ChainOperator | ArrayLike, b: ChainOperator | ArrayLike) -> Matrix:
    ma, mb = as_matrix(a), as_matrix(b)
    _same_shape(ma, mb)
    return ma @ mb - mb @ ma


def anticommutator(a: ChainOperator | ArrayLike, b: ChainOperator | ArrayLike) -> Matrix:
    ma, mb = as_matrix(a), as_matrix(b)
    _same_shape(ma, mb)
    return ma @ mb + mb @ ma


def partial_trace_keep(rho: ChainOperator | ArrayLike, i: int) -> Matrix:
    """The 2x2 reduced operator on site i (all other sites traced out)."""
    m = as_matrix(rho)
    n = _sites_for_dim(m.shape[0])
    if not 1 <= i <= n:
        raise SiteError(f"Site {i} is outside 1..{n}")
    left, right = 1 << (i - 1), 1 << (n - i)
    t = m.reshape(left, 2, right, left, 2, right)
    return np.einsum("aibajb->ij", t)


def max_norm(m: ArrayLike) -> float:
    """Largest absolute entry."""
    a = np.asarray(m)
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_hermitian(m: ChainOperator | ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    a = as_matrix(m)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and max_norm(a - a.conj().T) <= tol


def _require_hermitian(m: Matrix) -> None:
    if not is_hermitian(m):
        raise NotHermitianError(
            f"Matrix is not Hermitian (max |M - M*| = {max_norm(m - m.conj().T):.3g})"
        )


def _canonical_eigenspace(block: Matrix) -> Matrix:
    """A deterministic orthonormal basis for the span of block's columns.

    Columns of the (unique) projector onto the span are Gram-Schmidt orthonormalized in index order,
    so the result does not depend on the rotation the solver happened to return.
    """
    m = block.shape[1]
    proj = block @ block.conj().T
    basis: list[Matrix] = []
    for col in proj.T:
        v = col.copy()
        for _ in range(2):  # re-orthogonalize once
            for b in basis:
                v -= (b.conj() @ v) * b
        norm = np.linalg.norm(v)
        if norm > 1e-3:
            basis.append(v / norm)
            if len(basis) == m:
                return np.column_stack(basis)
    # Pathological projector: fall back on the solver's own vectors.
    q, _ = np.linalg.qr(block)
    return q


def herm_eig(m: ChainOperator | ArrayLike, cluster_tol: float = 1e-9) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix, ascending, with deterministic eigenvectors.

    Eigenvalues closer than cluster_tol (relative to max(1, |lambda|)) share one eigenspace whose basis
    is fixed by _canonical_eigenspace.  This also fixes the phase of non-degenerate eigenvectors.
    """
    a = as_matrix(m)
    _require_hermitian(a)
    a = (a + a.conj().T) / 2
    evals, evecs = linalg.eigh(a)
    out = np.empty_like(evecs)
    start = 0
    count = len(evals)
    while start < count:
        stop = start + 1
        while stop < count and abs(evals[stop] - evals[start]) <= cluster_tol * max(
            1.0, abs(evals[start])
        ):
            stop += 1
        out[:, start:stop] = _canonical_eigenspace(evecs[:, start:stop])
        start = stop
    return SpectralDecomposition(np.asarray(evals, dtype=np.float64), out)


def matrix_exp(m: ChainOperator | ArrayLike) -> Matrix:
    return linalg.expm(as_matrix(m))


def matrix_log_psd(m: ChainOperator | ArrayLike, support_rule: SupportRule = "error") -> Matrix:
    """Logarithm of a positive semidefinite Hermitian matrix via its eigen-decomposition.

    Eigenvalues below SUPPORT_FLOOR are outside the support: with support_rule="error" they raise,
    with support_rule="project" the logarithm is taken on the support only (zero on the kernel).
    """
    spec = herm_eig(m)
    lam = spec.eigenvalues
    if lam[0] < -HERMITIAN_TOL:
        raise NotPositiveError(f"Matrix has a negative eigenvalue {lam[0]:.3g}")
    on_support = lam >= SUPPORT_FLOOR
    if not on_support.all() and support_rule == "error":
        raise NotPositiveError(
            f"Matrix is singular (smallest eigenvalue {lam[0]:.3g}); its logarithm is unbounded"
        )
    logs = np.zeros_like(lam)
    logs[on_support] = np.log(lam[on_support])
    return spec.apply(lambda _: logs)


def gns_inner(rho: ChainOperator | ArrayLike, a: ArrayLike, b: ArrayLike) -> complex:
    """The weighted inner product <a, b>_rho = Tr(rho a* b)."""
    r, ma, mb = as_matrix(rho), as_matrix(a), as_matrix(b)
    _same_shape(r, ma)
    _same_shape(r, mb)
    return complex(np.trace(r @ ma.conj().T @ mb))


def trace_norm(m: ChainOperator | ArrayLike) -> float:
    """Sum of singular values."""
    a = as_matrix(m)
    if not a.size:
        return 0.0
    return float(np.sum(linalg.svdvals(a)))


def vec(x: ChainOperator | ArrayLike) -> Matrix:
    """Column-stacking vectorization."""
    return as_matrix(x).flatten(order="F")


def unvec(v: ArrayLike, dim: int | None = None) -> Matrix:
    """Inverse of vec()."""
    a = np.asarray(v, dtype=np.complex128)
    d = dim if dim is not None else int(round(np.sqrt(a.size)))
    if d * d != a.size:
        raise ShapeMismatchError(f"A vector of length {a.size} is not a vectorized square matrix")
    return a.reshape((d, d), order="F")


def check_density_matrix(rho: ChainOperator | ArrayLike, tol: float = DEFAULT_TOL) -> Matrix:
    """Return rho as a matrix after checking trace one, Hermitian and min eigenvalue >= -tol."""
    m = as_matrix(rho)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotDensityMatrixError(f"Density matrix must be square, got shape {m.shape}")
    if not is_hermitian(m, max(tol, HERMITIAN_TOL)):
        raise NotDensityMatrixError("Density matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1) > tol:
        raise NotDensityMatrixError(f"Density matrix has trace {tr.real:.12g}, expected 1")
    min_eig = float(linalg.eigvalsh((m + m.conj().T) / 2)[0])
    if min_eig < -tol:
        raise NotDensityMatrixError(f"Density matrix has a negative eigenvalue {min_eig:.3g}")
    return m


def random_density_matrix(dim: int, rng: np.random.Generator) -> Matrix:
    """A random full-rank density matrix from the Ginibre construction G G* / Tr(G G*)."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real
