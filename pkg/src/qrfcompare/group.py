"""The cyclic group Z_N acting diagonally by shifts on every register.

Charge convention: sector ``k`` collects the vectors with
``U_g v = omega**(k*g) v``, ``omega = exp(2πi/N)``. Group elements and charge
labels are plain ints, always reduced mod N.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import EPS, DensityOperator, Operator, RegisterLayout, StateVector


class NotInvariantError(ValueError):
    """Raised when an operation needs a globally invariant state and did not get one."""


#: Tolerance on max_g ||U_g rho U_g† - rho||_F for invariance preconditions.
INVARIANCE_TOL = 1e-8


@dataclass(frozen=True)
class CyclicGroup:
    order: int

    def __post_init__(self) -> None:
        if int(self.order) < 2:
            raise ValueError(f"group order must be >= 2, got {self.order}")
        object.__setattr__(self, "order", int(self.order))

    @classmethod
    def of(cls, layout: RegisterLayout) -> CyclicGroup:
        return cls(layout.local_dim)

    @property
    def omega(self) -> complex:
        return complex(np.exp(2j * np.pi / self.order))

    def elements(self) -> range:
        return range(self.order)

    def reduce(self, g: int) -> int:
        return int(g) % self.order

    def character(self, k: int, g: int) -> complex:
        """omega**(k*g); exact ±1 where the exponent allows it."""
        e = (k * g) % self.order
        if e == 0:
            return 1.0 + 0j
        if 2 * e == self.order:
            return -1.0 + 0j
        return complex(np.exp(2j * np.pi * e / self.order))


@lru_cache(maxsize=None)
def _shift_matrix(n: int) -> np.ndarray:
    m = np.roll(np.eye(n), 1, axis=0)
    m.setflags(write=False)
    return m


def shift_matrix(order: int, power: int = 1) -> np.ndarray:
    """X**power as an N×N permutation matrix, X|i> = |i+1 mod N>."""
    power %= order
    if power == 0:
        return np.eye(order)
    return np.linalg.matrix_power(_shift_matrix(order), power)


def shift_operator(group: CyclicGroup) -> Operator:
    return Operator(RegisterLayout((group.order,)), _shift_matrix(group.order))


def global_unitary(g: int, layout: RegisterLayout) -> Operator:
    """(X**g) on every register."""
    return _global_unitary(g % layout.local_dim, layout)


@lru_cache(maxsize=1024)
def _global_unitary(g: int, layout: RegisterLayout) -> Operator:
    x = shift_matrix(layout.local_dim, g)
    m = np.ones((1, 1))
    for _ in range(layout.n):
        m = np.kron(m, x)
    return Operator(layout, m)


def charge_projector(k: int, layout: RegisterLayout) -> Operator:
    """Orthogonal projector onto charge sector ``k``: (1/N) Σ_g omega**(-k g) U_g."""
    return _charge_projector(k % layout.local_dim, layout)


@lru_cache(maxsize=1024)
def _charge_projector(k: int, layout: RegisterLayout) -> Operator:
    group = CyclicGroup.of(layout)
    m = sum(
        group.character(-k, g) * global_unitary(g, layout).matrix for g in group.elements()
    ) / group.order
    return Operator(layout, m)


def invariance_residual(rho: Operator) -> float:
    """max_g ||U_g rho U_g† - rho||_F."""
    group = CyclicGroup.of(rho.layout)
    worst = 0.0
    for g in group.elements():
        u = global_unitary(g, rho.layout).matrix
        worst = max(worst, float(np.linalg.norm(u @ rho.matrix @ u.conj().T - rho.matrix)))
    return worst


def require_invariant(rho: Operator, tol: float = INVARIANCE_TOL) -> None:
    res = invariance_residual(rho)
    if res > tol:
        raise NotInvariantError(
            f"state is not invariant under the global action (residual {res:.3g}); twirl it first"
        )


def charge_weights(rho: DensityOperator, tol: float = INVARIANCE_TOL) -> np.ndarray:
    """p_k = Tr(Π_k rho) for an invariant state."""
    require_invariant(rho, tol)
    N = rho.layout.local_dim
    p = np.array(
        [np.trace(charge_projector(k, rho.layout).matrix @ rho.matrix).real for k in range(N)]
    )
    p[np.abs(p) < EPS] = 0.0
    return p


def fourier_vector(k: int, group: CyclicGroup) -> StateVector:
    """Unit vector of charge ``k`` on one register: X v = omega**k v.

    Amplitudes are (1/√N) omega**(-k j). For N=2 this gives |+> (k=0) and |-> (k=1).
    """
    N = group.order
    amps = np.array([group.character(-k, j) for j in range(N)]) / np.sqrt(N)
    return StateVector(RegisterLayout((N,)), amps)
