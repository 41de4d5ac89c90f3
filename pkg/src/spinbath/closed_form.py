"""Transcribed closed forms of the two-bath stationary state for N = 2, 3, 4 and the local-state conjecture.

Notation inside this module: rb, rbp are the Gibbs qubits at beta and beta', m = (rb + rbp)/2,
dl = (rb - rbp)/2 and d0 = beta_0 - beta_0'.  Each term is written in the order it is printed, so a
typo in the source can be found by comparing term by term against the numerical kernel.
"""

from dataclasses import dataclass

from spinbath import Matrix
from spinbath.exception import ConfigError
from spinbath.model import gibbs_qubit, gibbs_weights
from spinbath.operators import PAULI, ChainOperator, tensor

__all__ = ["closed_form_stationary", "conjectured_local_states", "boundary_local_states"]

I = PAULI.identity
sp, sm = PAULI.sigma_plus, PAULI.sigma_minus
npl, nmi = PAULI.n_plus, PAULI.n_minus
sz = PAULI.sigma_z


@dataclass(frozen=True)
class _Pair:
    rb: Matrix
    rbp: Matrix
    b0: float
    b0p: float
    b1: float
    b1p: float

    @classmethod
    def of(cls, beta: float, beta_prime: float) -> "_Pair":
        b0, b1 = gibbs_weights(beta)
        b0p, b1p = gibbs_weights(beta_prime)
        return cls(gibbs_qubit(beta), gibbs_qubit(beta_prime), b0, b0p, b1, b1p)

    @property
    def m(self) -> Matrix:
        return (self.rb + self.rbp) / 2

    @property
    def dl(self) -> Matrix:
        return (self.rb - self.rbp) / 2

    @property
    def d0(self) -> float:
        return self.b0 - self.b0p


def _two_sites(p: _Pair) -> Matrix:
    m, d0 = p.m, p.d0
    return (
        tensor(m, m)
        - (d0**2 / 8) * tensor(sz, sz)
        + (d0 / 4) * (tensor(npl, nmi) - tensor(nmi, npl))
        + 1j * (d0 / 4) * (tensor(sp, sm) - tensor(sm, sp))
    )


def _three_sites(p: _Pair) -> Matrix:
    m, dl, rb, rbp, d0 = p.m, p.dl, p.rb, p.rbp, p.d0
    return (
        tensor(m, m, m)
        - (3 / 4) * tensor(dl, m, dl)
        + (3 / 4) * (tensor(dl, m, m) - tensor(m, m, dl))
        + (d0 / 8)
        * (
            (tensor(rb, nmi, npl) - tensor(rb, npl, nmi))
            + (tensor(nmi, npl, rbp) - tensor(npl, nmi, rbp))
        )
        + 1j * (d0 / 8) * (tensor(sp, sm, m) - tensor(sm, sp, m))
        + 1j * (d0 / 8) * (tensor(m, sp, sm) - tensor(m, sm, sp))
        + 1j * (d0 / 8) * (tensor(rb, sp, sm) - tensor(rb, sm, sp))
        + 1j * (d0 / 8) * (tensor(sp, sm, rbp) - tensor(sm, sp, rbp))
        - (d0**2 / 16) * (tensor(sp, I, sm) + tensor(sm, I, sp))
    )


def _four_sites_diagonal(p: _Pair) -> Matrix:
    m, dl, rb, rbp, d0 = p.m, p.dl, p.rb, p.rbp, p.d0
    q = d0**2
    return (
        tensor(m, m, m, m)
        - (7 / 8) * tensor(dl, m, m, dl)
        + (1 / 2) * (tensor(dl, m, m, m) - tensor(m, m, m, dl))
        - (1 / 8) * tensor(rb, dl, dl, rbp)
        - (q / 32) * (tensor(nmi, m, I, npl) + tensor(npl, I, m, nmi))
        - (q / 16) * (tensor(m, npl, npl, nmi) + tensor(m, nmi, nmi, npl))
        - (q / 16) * (tensor(nmi, npl, npl, m) + tensor(npl, nmi, nmi, m))
        + (q / 16) * (tensor(nmi, m, npl, nmi) + tensor(npl, nmi, m, npl))
        + (q / 32) * (tensor(rb, nmi, npl, nmi) + tensor(npl, npl, nmi, rb))
        + (q / 32) * (tensor(rbp, nmi, npl, npl) + tensor(nmi, npl, nmi, rbp))
        + (q / 32) * (p.b0 + p.b0p) * tensor(npl, npl, nmi, npl)
        + (q / 32) * (p.b1 + p.b1p) * tensor(nmi, npl, nmi, nmi)
        + (3 * q / 32) * (tensor(npl, nmi, nmi, npl) + tensor(nmi, npl, npl, nmi))
        - (q / 16) * (tensor(npl, npl, nmi, nmi) + tensor(nmi, nmi, npl, npl))
    )


def _four_sites_currents(p: _Pair) -> Matrix:
    m, rb, rbp, d0 = p.m, p.rb, p.rbp, p.d0
    q = d0**2

    def hop(*left_and_right: Matrix, at: int) -> Matrix:
        """sigma_+ sigma_- minus sigma_- sigma_+ inserted at sites (at, at+1)."""
        factors = list(left_and_right)
        fwd = factors[:at] + [sp, sm] + factors[at:]
        bwd = factors[:at] + [sm, sp] + factors[at:]
        return tensor(*fwd) - tensor(*bwd)

    return (
        1j * (d0 / 32) * tensor(m, m, sp, sm)
        - 1j * (d0 / 32) * tensor(m, m, sm, sp)
        + 1j * (d0 / 32) * tensor(sp, sm, m, m)
        - 1j * (d0 / 32) * tensor(sm, sp, m, m)
        + 1j * (d0 / 16) * hop(rb, rbp, at=2)
        + 1j * (d0 / 16) * hop(rb, rbp, at=0)
        + 1j * (d0 / 8) * hop(m, rbp, at=0)
        + 1j * (d0 / 8) * hop(rb, m, at=2)
        + 1j * (3 * d0 / 32) * tensor(m, sp, sm, m)
        - 1j * (3 * d0 / 32) * tensor(m, sm, sp, m)
        - 1j * (q / 32) * hop(npl, nmi, at=2)
        + 1j * (q / 32) * hop(nmi, npl, at=2)
        - 1j * (q / 32) * hop(npl, nmi, at=0)
        - 1j * (q / 32) * hop(nmi, npl, at=0)
        + 1j * (q / 32) * hop(npl, nmi, at=1)
        + 1j * (q / 32) * hop(nmi, npl, at=1)
    )


def _four_sites_long_range(p: _Pair) -> Matrix:
    d0, b0, b0p = p.d0, p.b0, p.b0p
    q = d0**2
    left = ((b0 + b0p) ** 2 / 64 - b0**2 / 16) * d0
    right = ((b0 + b0p) ** 2 / 64 - b0p**2 / 16) * d0
    return (
        left * (tensor(sz, sp, I, sm) + tensor(sz, sm, I, sp))
        - right * (tensor(sp, I, sm, sz) + tensor(sm, I, sp, sz))
        - (q / 16) * (tensor(nmi, sp, I, sm) + tensor(nmi, sm, I, sp))
        - (q / 16) * (tensor(sp, I, sm, nmi) + tensor(sm, I, sp, nmi))
        + (d0**3 / 64) * (tensor(I, sp, sm, I) + tensor(I, sm, sp, I))
        + (q / 16) * (tensor(sp, sm, sp, sm) + tensor(sm, sp, sm, sp))
        - (q / 16) * (tensor(sp, sm, sm, sp) + tensor(sm, sp, sp, sm))
    )


def closed_form_stationary(beta: float, beta_prime: float, n: int) -> ChainOperator:
    """The published two-bath stationary state for N in {2, 3, 4} at B = J_x = J_y = 1."""
    p = _Pair.of(beta, beta_prime)
    match n:
        case 2:
            data = _two_sites(p)
        case 3:
            data = _three_sites(p)
        case 4:
            data = _four_sites_diagonal(p) + _four_sites_currents(p) + _four_sites_long_range(p)
        case _:
            raise ConfigError(f"No closed form is known for N={n}; only N in {{2, 3, 4}}")
    return ChainOperator(n, data)


def boundary_local_states(beta: float, beta_prime: float, n: int) -> list[Matrix]:
    """(3 rb + rbp)/4 on site 1, (rb + rbp)/2 inside, (rb + 3 rbp)/4 on site N."""
    if n < 2:
        raise ConfigError(f"Local states of a two-bath chain need N >= 2, got {n}")
    p = _Pair.of(beta, beta_prime)
    first = p.m + p.dl / 2
    last = p.m - p.dl / 2
    return [first] + [p.m] * (n - 2) + [last]


def conjectured_local_states(beta: float, beta_prime: float, n: int) -> list[Matrix]:
    """The boundary profile extended to chains with N >= 5."""
    if n < 5:
        raise ConfigError(f"The local-state conjecture concerns N >= 5, got {n}")
    return boundary_local_states(beta, beta_prime, n)
