"""Ideal reference frames for Z_N acting on a register stack.

A frame is one register together with a seed vector whose shift orbit
``{X**g seed}`` is orthonormal. Conditioning a globally invariant state on the
frame sitting at its seed gives the relative state of the remaining
registers; ``relativize`` is the matching map on observables.

Relative states remember which original registers they describe, so changes
of frame can be written in terms of the original register indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log
from typing import Union

import numpy as np

from .group import (
    INVARIANCE_TOL,
    CyclicGroup,
    NotInvariantError,
    global_unitary,
    require_invariant,
    shift_matrix,
)
from .linalg import (
    EPS,
    DensityOperator,
    Operator,
    RegisterLayout,
    StateVector,
    bra_contract,
    bra_sandwich,
    dephase_register,
    insert_register,
    permute_registers,
)
from .twirl import coherent_twirl


class NonIdealFrameError(ValueError):
    """The seed's shift orbit is not orthonormal."""


class DegenerateFrameError(ValueError):
    """Conditioning on the frame seed annihilated the state."""


@dataclass(frozen=True)
class FrameSpec:
    """A frame register and its seed; ``seed=None`` means |0>."""

    register: int
    seed: tuple[complex, ...] | None = None

    def __post_init__(self) -> None:
        if self.register < 0:
            raise ValueError("frame register must be non-negative")
        if self.seed is not None:
            object.__setattr__(self, "seed", tuple(complex(a) for a in self.seed))

    @property
    def has_default_seed(self) -> bool:
        return self.seed is None or np.allclose(self.seed, np.eye(len(self.seed))[0], atol=EPS)

    def seed_vector(self, N: int) -> StateVector:
        if self.seed is None:
            amps = np.eye(N)[0]
        else:
            if len(self.seed) != N:
                raise ValueError(f"seed has dimension {len(self.seed)}, frame register has {N}")
            amps = np.array(self.seed)
            nrm = np.linalg.norm(amps)
            if abs(nrm - 1) > EPS:
                raise ValueError("frame seed must be a unit vector")
        return StateVector(RegisterLayout((N,)), amps)

    def coherent_basis(self, N: int) -> np.ndarray:
        """Columns X**g seed for g = 0..N-1; checked orthonormal."""
        s = self.seed_vector(N).amplitudes
        basis = np.stack([shift_matrix(N, g) @ s for g in range(N)], axis=1)
        if np.abs(basis.conj().T @ basis - np.eye(N)).max() > EPS:
            raise NonIdealFrameError("the seed's orbit under the shift is not orthonormal")
        return basis

    def coherent_state(self, g: int, N: int) -> StateVector:
        return StateVector(RegisterLayout((N,)), self.coherent_basis(N)[:, g % N])

    def charge_state(self, k: int, N: int) -> StateVector:
        """(1/√N) Σ_g omega**(-k g) X**g seed; equals ``fourier_vector(k)`` for seed |0>."""
        group = CyclicGroup(N)
        basis = self.coherent_basis(N)
        amps = sum(group.character(-k, g) * basis[:, g] for g in range(N)) / np.sqrt(N)
        return StateVector(RegisterLayout((N,)), amps)


Body = Union[StateVector, DensityOperator]


@dataclass(frozen=True)
class RelativeState:
    """State of the non-frame registers, conditioned on the frame at its seed.

    ``registers[i]`` is the original index of register ``i`` of ``body``.
    """

    frame: FrameSpec
    registers: tuple[int, ...]
    body: Body = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "registers", tuple(int(r) for r in self.registers))
        if len(self.registers) != self.body.layout.n:
            raise ValueError("one original index per residual register required")
        if self.frame.register in self.registers:
            raise ValueError("the frame register cannot be part of its own relative state")

    @property
    def is_pure(self) -> bool:
        return isinstance(self.body, StateVector)

    @property
    def layout(self) -> RegisterLayout:
        return self.body.layout

    def density(self) -> DensityOperator:
        return self.body.projector() if isinstance(self.body, StateVector) else self.body

    def purity(self) -> float:
        return self.density().purity()

    def position(self, register: int) -> int:
        """Index inside ``body`` of original register ``register``."""
        try:
            return self.registers.index(register)
        except ValueError:
            raise ValueError(f"register {register} is not part of this relative state") from None


def residual_registers(n: int, frame_register: int) -> tuple[int, ...]:
    return tuple(r for r in range(n) if r != frame_register)


def reduce(state: StateVector | DensityOperator, frame: FrameSpec, tol: float = INVARIANCE_TOL) -> RelativeState:
    """Relative state of an invariant global state with respect to ``frame``.

    Vectors: √N <seed|_frame psi. Densities: N <seed|_frame rho |seed>_frame.
    Non-invariant input raises ``NotInvariantError``; it is never renormalized.
    """
    layout = state.layout
    layout.check_register(frame.register)
    N = layout.local_dim
    seed = frame.seed_vector(N)
    frame.coherent_basis(N)
    regs = residual_registers(layout.n, frame.register)

    if isinstance(state, StateVector):
        if abs(state.norm - 1) > tol:
            raise ValueError("reduce expects a normalized vector")
        _require_invariant_vector(state, tol)
        body = bra_contract(state, frame.register, seed)
        body = StateVector(body.layout, np.sqrt(N) * body.amplitudes)
        if body.norm < EPS:
            raise DegenerateFrameError("the seed has no overlap with the state")
        if abs(body.norm - 1) > tol:
            raise ValueError(f"relative state has norm {body.norm:.6g}; frame is not ideal")
        return RelativeState(frame, regs, body)

    require_invariant(state, tol)
    m = N * bra_sandwich(state, frame.register, seed).matrix
    if abs(np.trace(m)) < EPS:
        raise DegenerateFrameError("the seed has no overlap with the state")
    m = (m + m.conj().T) / 2
    return RelativeState(frame, regs, DensityOperator(layout.without(frame.register), m))


def _require_invariant_vector(psi: StateVector, tol: float) -> None:
    # ||Uψψ†U† - ψψ†||_F <= 2 ||Uψ - cψ|| for the best phase c; the
    # closed form sqrt(2 - 2|<ψ|Uψ>|²) cancels catastrophically near 1
    group = CyclicGroup.of(psi.layout)
    for g in group.elements():
        phi = global_unitary(g, psi.layout).apply(psi).amplitudes
        overlap = np.vdot(psi.amplitudes, phi)
        c = overlap / abs(overlap) if abs(overlap) > EPS else 1.0
        res = 2 * float(np.linalg.norm(phi - c * psi.amplitudes))
        if res > tol:
            raise NotInvariantError(
                f"vector is not invariant as a state (residual {res:.3g}); project onto a sector first"
            )


def reconstruct(rel: RelativeState, k: int = 0) -> StateVector:
    """√N Π_k(seed ⊗ rel): the sector-``k`` global vector whose reduction is ``rel``."""
    if not rel.is_pure:
        raise ValueError("reconstruct needs a pure relative state")
    N = rel.layout.local_dim
    seed = rel.frame.seed_vector(N)
    rel.frame.coherent_basis(N)
    product = insert_register(rel.body, rel.frame.register, seed)
    out = coherent_twirl(product, k)
    out = StateVector(out.layout, np.sqrt(N) * out.amplitudes)
    assert out.norm > EPS, "charge projection annihilated seed ⊗ relative state"
    return out


def relativize(op: Operator, frame: FrameSpec) -> Operator:
    """Σ_g |g><g|_frame ⊗ V_g op V_g†, with V_g the shift on the residual registers.

    ``op`` lives on the residual layout; the frame register is inserted at
    ``frame.register``.
    """
    residual = op.layout
    N = residual.local_dim
    if not 0 <= frame.register <= residual.n:
        raise IndexError(f"frame register {frame.register} out of range")
    basis = frame.coherent_basis(N)
    acc = np.zeros((N * residual.total_dim,) * 2, dtype=complex)
    full = RegisterLayout(residual.dims[: frame.register] + (N,) + residual.dims[frame.register:])
    for g in range(N):
        v = global_unitary(g, residual).matrix
        proj = np.outer(basis[:, g], basis[:, g].conj())
        block = Operator(RegisterLayout((N,)) + residual, np.kron(proj, v @ op.matrix @ v.conj().T))
        acc = acc + permute_registers(block, _insert_order(residual.n, frame.register)).matrix
    return Operator(full, acc)


def _insert_order(rest_n: int, position: int) -> list[int]:
    """Order that moves register 0 of ``[new] + rest`` to ``position``."""
    order = list(range(1, rest_n + 1))
    order.insert(position, 0)
    return order


def predual_reduce(rho: DensityOperator, frame: FrameSpec, tol: float = INVARIANCE_TOL) -> DensityOperator:
    """Dual of ``relativize``: Tr(rho relativize(T)) = Tr(predual_reduce(rho) T)."""
    return reduce(rho, frame, tol).density()


@dataclass(frozen=True)
class FramedObservable:
    """Σ_i |i><i|_inner ⊗ C_i, diagonal in the inner frame's basis.

    ``inner`` is the position of the inner frame within the layout the
    observable acts on; ``blocks[i]`` acts jointly on the other registers.
    """

    inner: int
    blocks: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self) -> None:
        blocks = tuple(np.array(b, dtype=complex) for b in self.blocks)
        if not blocks:
            raise ValueError("a framed observable needs at least one block")
        shape = blocks[0].shape
        if any(b.shape != shape or b.ndim != 2 or b.shape[0] != b.shape[1] for b in blocks):
            raise ValueError("blocks must be square and share one shape")
        for b in blocks:
            b.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)


def framed_to_operator(f: FramedObservable, N: int | None = None) -> Operator:
    """Assemble the block operator; ``N`` (the frame dimension) defaults to the block count."""
    N = len(f.blocks) if N is None else N
    if len(f.blocks) != N:
        raise ValueError(f"expected {N} blocks, got {len(f.blocks)}")
    d_rest = f.blocks[0].shape[0]
    rest_n = 0 if d_rest == 1 else round(log(d_rest) / log(N))
    if N**rest_n != d_rest:
        raise ValueError(f"block dimension {d_rest} is not a power of {N}")
    if not 0 <= f.inner <= rest_n:
        raise IndexError(f"inner position {f.inner} out of range")
    m = sum(np.kron(np.diag(np.eye(N)[i]), c) for i, c in enumerate(f.blocks))
    layout = RegisterLayout.uniform(N, rest_n + 1)
    return permute_registers(Operator(layout, m), _insert_order(rest_n, f.inner))


def dephase_toward_frame(rel: RelativeState, inner_frame: int) -> RelativeState:
    """Non-selective measurement of the inner frame in its computational basis.

    Projects onto the algebra of observables framed by ``inner_frame`` (an
    original register index) and leaves all their expectations unchanged.
    """
    if inner_frame == rel.frame.register:
        raise ValueError("the inner frame must differ from the outer frame")
    pos = rel.position(inner_frame)
    return RelativeState(rel.frame, rel.registers, dephase_register(rel.density(), pos))


def expectation(rel: RelativeState, op: Operator) -> complex:
    return complex(np.trace(rel.density().matrix @ op.matrix))


__all__ = [
    "DegenerateFrameError",
    "FrameSpec",
    "FramedObservable",
    "NonIdealFrameError",
    "RelativeState",
    "dephase_toward_frame",
    "expectation",
    "framed_to_operator",
    "predual_reduce",
    "reconstruct",
    "reduce",
    "relativize",
    "residual_registers",
]
