"""Group averages producing invariant states.

The incoherent twirl averages a state over the group orbit and keeps every
charge sector; the coherent twirl projects vectors onto a single sector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, TypeVar

import numpy as np

from .group import CyclicGroup, charge_projector, global_unitary, invariance_residual
from .linalg import EPS, Operator, StateVector

Op = TypeVar("Op", bound=Operator)


def incoherent_twirl(rho: Op) -> Op:
    """(1/N) Σ_g U_g rho U_g†. Accepts any operator, returns the same kind."""
    group = CyclicGroup.of(rho.layout)
    acc = np.zeros_like(rho.matrix)
    for g in group.elements():
        u = global_unitary(g, rho.layout).matrix
        acc = acc + u @ rho.matrix @ u.conj().T
    return type(rho)(rho.layout, acc / group.order)


def coherent_twirl(psi: StateVector, k: int = 0) -> StateVector:
    """Π_k psi, left unnormalized (possibly zero)."""
    return charge_projector(k, psi.layout).apply(psi)


def sector_compress(op: Operator, k: int = 0) -> Operator:
    """Π_k op Π_k; trace-decreasing, so the result is a plain operator."""
    p = charge_projector(k, op.layout).matrix
    return Operator(op.layout, p @ op.matrix @ p)


def is_invariant_state(rho: Operator, tol: float = EPS) -> tuple[bool, float]:
    res = invariance_residual(rho)
    return res <= tol, res


def is_invariant_vector(psi: StateVector, tol: float = EPS) -> bool:
    group = CyclicGroup.of(psi.layout)
    return all(
        np.linalg.norm(global_unitary(g, psi.layout).apply(psi).amplitudes - psi.amplitudes) <= tol
        for g in group.elements()
    )


@dataclass(frozen=True)
class Twirl:
    """Either the incoherent twirl or the coherent compression onto sector ``k``."""

    kind: Literal["incoherent", "coherent"]
    sector: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("incoherent", "coherent"):
            raise ValueError(f"unknown twirl kind {self.kind!r}")
        if self.sector < 0:
            raise ValueError("charge sector must be non-negative")

    def __call__(self, op: Operator) -> Operator:
        if self.kind == "incoherent":
            return incoherent_twirl(op)
        N = op.layout.local_dim
        if self.sector >= N:
            raise ValueError(f"sector {self.sector} out of range for Z_{N}")
        return sector_compress(op, self.sector)
