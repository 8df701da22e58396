"""Changes of reference frame in three frameworks.

* perspective-neutral: global states are restricted to charge sector 0, where
  reduction is invertible, so the change is reduce ∘ reconstruct;
* extra-particle: the global charge is kept as an extra register next to the
  relative state, which makes the change invertible on every sector;
* operational: relative states are identified when no framed observable tells
  them apart, and the change acts on those classes.

Every change goes from the frame of ``rel.frame`` to a target frame; register
indices always refer to the original global layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .frames import (
    FramedObservable,
    FrameSpec,
    RelativeState,
    dephase_toward_frame,
    framed_to_operator,
    reconstruct,
    reduce,
    residual_registers,
)
from .group import shift_matrix
from .linalg import (
    EPS,
    DensityOperator,
    Operator,
    RegisterLayout,
    StateVector,
    dephase_register,
    permutation_matrix,
    permute_registers,
)
from .twirl import is_invariant_vector


class NotPhysicalStateError(ValueError):
    """The global state lies outside charge sector 0."""


class MultiSectorError(ValueError):
    """The global state does not factor into a single charge and a relative state."""


#: Tolerance on the second Schmidt coefficient when splitting off the charge register.
SCHMIDT_TOL = 1e-8


def _rest_shift(N: int, power: int, registers: int) -> np.ndarray:
    x = shift_matrix(N, power)
    m = np.ones((1, 1))
    for _ in range(registers):
        m = np.kron(m, x)
    return m


def _check_frames(n: int, source: FrameSpec, target: FrameSpec) -> None:
    for f in (source, target):
        if not 0 <= f.register < n:
            raise IndexError(f"frame register {f.register} out of range for {n} registers")


# perspective-neutral --------------------------------------------------------


def frame_change_matrix(source: FrameSpec, target: FrameSpec, N: int, n: int, k: int = 0) -> np.ndarray:
    """Matrix of φ ↦ reduce(reconstruct(φ, k), target).body on the residual spaces.

    Columns are obtained by pushing residual basis vectors through the
    reconstruct route; the result is unitary for ideal frames.
    """
    return _frame_change_matrix(source, target, N, n, k % N)


@lru_cache(maxsize=256)
def _frame_change_matrix(source: FrameSpec, target: FrameSpec, N: int, n: int, k: int) -> np.ndarray:
    _check_frames(n, source, target)
    residual = RegisterLayout.uniform(N, n - 1)
    regs = residual_registers(n, source.register)
    d = residual.total_dim
    cols = []
    for j in range(d):
        rel = RelativeState(source, regs, StateVector(residual, np.eye(d)[j]))
        cols.append(reduce(reconstruct(rel, k), target).body.amplitudes)
    m = np.stack(cols, axis=1)
    m.setflags(write=False)
    return m


def pn_change(rel: RelativeState, target: FrameSpec, *, sector: int = 0) -> RelativeState:
    """Perspective-neutral change of frame.

    ``sector`` states which charge sector the underlying global state lives
    in; anything but 0 is not a physical state in this framework.
    """
    if sector % rel.layout.local_dim != 0:
        raise NotPhysicalStateError(
            f"global state in charge sector {sector} is not a physical state; "
            "the perspective-neutral change is only defined on sector 0"
        )
    if rel.is_pure:
        return reduce(reconstruct(rel, 0), target)
    N, n = rel.layout.local_dim, rel.layout.n + 1
    w = frame_change_matrix(rel.frame, target, N, n, 0)
    rho = rel.body.matrix
    out = DensityOperator(rel.layout, w @ rho @ w.conj().T)
    return RelativeState(target, residual_registers(n, target.register), out)


def pn_change_global(psi: StateVector, source: FrameSpec, target: FrameSpec) -> RelativeState:
    """Perspective-neutral change starting from a global vector, which must lie in sector 0."""
    if not is_invariant_vector(psi, tol=1e-8):
        raise NotPhysicalStateError("global vector is not invariant as a vector; not a physical state")
    return pn_change(reduce(psi, source), target)


# extra-particle -------------------------------------------------------------


def disentangler(frame: FrameSpec, layout: RegisterLayout) -> Operator:
    """Σ_g |g><g|_frame ⊗ X**(-g) on every other register.

    On a sector-k vector ψ it returns charge_state(k) ⊗ reduce(ψ), with the
    charge state sitting in the frame's slot.
    """
    N = layout.local_dim
    layout.check_register(frame.register)
    basis = frame.coherent_basis(N)
    rest = layout.n - 1
    head = RegisterLayout((N,)) + RegisterLayout.uniform(N, rest) if rest else RegisterLayout((N,))
    m = sum(np.kron(np.outer(basis[:, g], basis[:, g].conj()), _rest_shift(N, -g, rest)) for g in range(N))
    order = list(range(1, layout.n))
    order.insert(frame.register, 0)
    return permute_registers(Operator(head, m), order)


@dataclass(frozen=True)
class ExtraParticleState:
    """A pure relative state together with the register carrying the global charge."""

    charge_register: StateVector = field(repr=False)
    relative: RelativeState

    def __post_init__(self) -> None:
        N = self.relative.layout.local_dim
        if self.charge_register.layout.dims != (N,):
            raise ValueError("charge register must be a single register of the group's dimension")
        if not self.relative.is_pure:
            raise ValueError("extra-particle states carry a pure relative state")
        self.charge  # validates

    @property
    def charge(self) -> int:
        N = self.relative.layout.local_dim
        for k in range(N):
            c = self.relative.frame.charge_state(k, N)
            if abs(abs(c.inner(self.charge_register)) - 1) < SCHMIDT_TOL:
                return k
        raise MultiSectorError("charge register is not a definite charge state")

    def joint(self) -> StateVector:
        """charge_register ⊗ relative body, charge register first."""
        return StateVector(
            RegisterLayout((self.charge_register.layout.dims[0],)) + self.relative.layout,
            np.kron(self.charge_register.amplitudes, self.relative.body.amplitudes),
        )


def _split_charge(joint: np.ndarray, N: int, frame: FrameSpec) -> tuple[int, np.ndarray]:
    """Factor a vector on [charge] + rest into charge_state(k) ⊗ body."""
    m = joint.reshape(N, -1)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size > 1 and s[1] > SCHMIDT_TOL:
        raise MultiSectorError(
            f"state spans several charge sectors (second Schmidt coefficient {s[1]:.3g})"
        )
    for k in range(N):
        c = frame.charge_state(k, N).amplitudes
        body = c.conj() @ m
        if abs(np.linalg.norm(body) - s[0]) < SCHMIDT_TOL:
            return k, body
    raise MultiSectorError("charge register is not a definite charge state")


def extract_extra_particle(psi: StateVector, frame: FrameSpec) -> ExtraParticleState:
    """Disentangle ``frame`` from a single-sector global vector."""
    layout = psi.layout
    N = layout.local_dim
    out = disentangler(frame, layout).apply(psi)
    regs = residual_registers(layout.n, frame.register)
    front = permute_registers(out, [frame.register, *regs])
    k, body = _split_charge(front.amplitudes, N, frame)
    rel = RelativeState(frame, regs, StateVector(layout.without(frame.register), body))
    return ExtraParticleState(frame.charge_state(k, N), rel)


def controlled_change_matrix(source: FrameSpec, target: FrameSpec, n: int, k: int) -> np.ndarray:
    """Z_2 relative-state change for charge ``k`` written as a controlled shift.

    On the source-relative registers: |0><0|_target ⊗ I + (-1)**k |1><1|_target ⊗ X
    on the remaining registers, after which the target's slot is relabelled as
    the source register and the registers are put back in original order.
    Only defined for N=2 with seed |0>.
    """
    _check_frames(n, source, target)
    if not (source.has_default_seed and target.has_default_seed):
        raise ValueError("the controlled form assumes seed |0> on both frames")
    regs = residual_registers(n, source.register)
    p = regs.index(target.register)
    rest = n - 2
    sign = -1.0 if k % 2 else 1.0
    proj0, proj1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    u = np.kron(proj0, np.eye(2**rest)) + sign * np.kron(proj1, _rest_shift(2, 1, rest))
    head = RegisterLayout.uniform(2, n - 1)
    order = list(range(1, n - 1))
    order.insert(p, 0)
    u = permute_registers(Operator(head, u), order).matrix
    labels = list(regs)
    labels[p] = source.register
    relabel = permutation_matrix(head, list(np.argsort(labels)))
    return relabel @ u


def ep_change_operator(
    source: FrameSpec,
    target: FrameSpec,
    layout: RegisterLayout,
    route: Literal["reconstruct", "controlled"] = "reconstruct",
) -> Operator:
    """Σ_k |charge_k>_target<charge_k|_source ⊗ W_k on [charge register] + residual."""
    N, n = layout.local_dim, layout.n
    if route == "controlled" and N != 2:
        raise ValueError("the controlled-shift form of the change is only given for Z_2")
    residual = RegisterLayout.uniform(N, n - 1)
    joint = RegisterLayout((N,)) + residual
    m = np.zeros((joint.total_dim,) * 2, dtype=complex)
    for k in range(N):
        ket = target.charge_state(k, N).amplitudes
        bra = source.charge_state(k, N).amplitudes.conj()
        if route == "controlled":
            w = controlled_change_matrix(source, target, n, k)
        else:
            w = frame_change_matrix(source, target, N, n, k)
        m += np.kron(np.outer(ket, bra), w)
    return Operator(joint, m)


def ep_change(
    x: ExtraParticleState,
    target: FrameSpec,
    route: Literal["reconstruct", "controlled"] = "reconstruct",
) -> ExtraParticleState:
    """Extra-particle change of frame; the charge label is carried over unchanged."""
    rel = x.relative
    N, n = rel.layout.local_dim, rel.layout.n + 1
    k = x.charge
    regs = residual_registers(n, target.register)
    if route == "reconstruct":
        body = reduce(reconstruct(rel, k), target).body
        return ExtraParticleState(target.charge_state(k, N), RelativeState(target, regs, body))
    full = RegisterLayout.uniform(N, n)
    s = ep_change_operator(rel.frame, target, full, route)
    out = s.matrix @ x.joint().amplitudes
    k_out, body = _split_charge(out, N, target)
    assert k_out == k, "charge label changed under the frame change"
    return ExtraParticleState(
        target.charge_state(k, N), RelativeState(target, regs, StateVector(rel.layout, body))
    )


# operational ----------------------------------------------------------------


@dataclass(frozen=True)
class OperationalClass:
    """Relative states agreeing on every observable framed by ``inner``.

    The representative is the member that is diagonal in the inner frame's basis.
    """

    representative: RelativeState
    inner: int

    def __post_init__(self) -> None:
        rho = self.representative.density()
        pos = self.representative.position(self.inner)
        if np.abs(dephase_register(rho, pos).matrix - rho.matrix).max() > EPS:
            raise ValueError("representative is not dephased on the inner frame")

    @property
    def outer(self) -> int:
        return self.representative.frame.register

    def distance(self, other: OperationalClass) -> float:
        if (self.outer, self.inner) != (other.outer, other.inner):
            raise ValueError("classes refer to different frame pairs")
        return float(
            np.linalg.norm(self.representative.density().matrix - other.representative.density().matrix)
        )

    def same_as(self, other: OperationalClass, tol: float = EPS) -> bool:
        return self.distance(other) <= tol


def op_canonicalize(rel: RelativeState, inner_frame: int) -> OperationalClass:
    return OperationalClass(dephase_toward_frame(rel, inner_frame), inner_frame)


def _diagonal_blocks(rho: np.ndarray, dims: tuple[int, ...], pos: int) -> list[np.ndarray]:
    """<j|_pos rho |j>_pos for every j, as matrices on the other registers."""
    n = len(dims)
    t = np.moveaxis(rho.reshape(dims + dims), [pos, n + pos], [0, 1])
    d_rest = int(np.prod(dims)) // dims[pos]
    return [t[j, j].reshape(d_rest, d_rest) for j in range(dims[pos])]


def op_change(c: OperationalClass) -> OperationalClass:
    """Swap the roles of outer and inner frame on a dephased relative state.

    Output block for the old outer frame at value k is X**k B X**(-k) on the
    remaining registers, where B is the input block for the inner frame at
    value -k. Invertible: applying it twice gives back the input.
    """
    rel = c.representative
    if not (rel.frame.has_default_seed):
        raise ValueError("the operational change assumes seed |0> frames")
    N, n = rel.layout.local_dim, rel.layout.n + 1
    outer, inner = c.outer, c.inner
    blocks_in = _diagonal_blocks(rel.density().matrix, rel.layout.dims, rel.position(inner))
    rest = n - 2
    blocks_out = []
    for k in range(N):
        v = _rest_shift(N, k, rest)
        blocks_out.append(v @ blocks_in[(-k) % N] @ v.conj().T)
    regs = residual_registers(n, inner)
    op = framed_to_operator(FramedObservable(regs.index(outer), tuple(blocks_out)), N)
    body = DensityOperator(op.layout, op.matrix)
    return OperationalClass(RelativeState(FrameSpec(inner), regs, body), outer)


def op_frame_change(rel: RelativeState, target: FrameSpec) -> OperationalClass:
    """Alice's relative state to Bob's class: canonicalize on the target, then swap roles."""
    return op_change(op_canonicalize(rel, target.register))
