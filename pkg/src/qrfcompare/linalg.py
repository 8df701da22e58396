"""Dense linear algebra on small tensor-product Hilbert spaces.

Registers are indexed big-endian: register 0 is the most significant digit of
a basis index, so on three qubits ``|ijk>`` sits at ``4*i + 2*j + k``. All
values are immutable; every operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence, Union

import numpy as np

#: Tolerance used for equality, Hermiticity and positivity checks.
EPS = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered local dimensions of a register stack."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("a layout needs at least one register")
        if any(d < 2 for d in dims):
            raise ValueError(f"local dimensions must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def uniform(cls, local_dim: int, registers: int) -> RegisterLayout:
        return cls((local_dim,) * registers)

    @property
    def total_dim(self) -> int:
        return prod(self.dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def local_dim(self) -> int:
        """The common local dimension; raises if the layout is heterogeneous."""
        if len(set(self.dims)) != 1:
            raise ValueError(f"heterogeneous local dimensions {self.dims}")
        return self.dims[0]

    def without(self, register: int) -> RegisterLayout:
        self.check_register(register)
        if self.n == 1:
            raise ValueError("cannot remove the only register")
        return RegisterLayout(self.dims[:register] + self.dims[register + 1:])

    def check_register(self, register: int) -> None:
        if not 0 <= register < self.n:
            raise IndexError(f"register {register} out of range for {self.n} registers")

    def __add__(self, other: RegisterLayout) -> RegisterLayout:
        return RegisterLayout(self.dims + other.dims)


@dataclass(frozen=True, eq=False)
class StateVector:
    layout: RegisterLayout
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.shape != (self.layout.total_dim,):
            raise ValueError(
                f"expected {self.layout.total_dim} amplitudes, got {amps.shape[0]}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, layout: RegisterLayout, digits: Sequence[int]) -> StateVector:
        """Computational basis ket, e.g. ``basis(layout, (0, 1, 1))`` is |011>."""
        if len(digits) != layout.n:
            raise ValueError("one digit per register required")
        amps = np.zeros(layout.total_dim, dtype=complex)
        amps[np.ravel_multi_index(tuple(digits), layout.dims)] = 1.0
        return cls(layout, amps)

    @classmethod
    def from_kets(cls, layout: RegisterLayout, terms: dict[str, complex]) -> StateVector:
        """Build from a ``{"001": amp, ...}`` mapping (one character per register)."""
        amps = np.zeros(layout.total_dim, dtype=complex)
        for ket, amp in terms.items():
            digits = tuple(int(c) for c in ket)
            amps[np.ravel_multi_index(digits, layout.dims)] += amp
        return cls(layout, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        nrm = self.norm
        if nrm < EPS:
            raise ZeroDivisionError("cannot normalize a zero vector")
        return StateVector(self.layout, self.amplitudes / nrm)

    def inner(self, other: StateVector) -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> DensityOperator:
        return DensityOperator(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def __neg__(self) -> StateVector:
        return StateVector(self.layout, -self.amplitudes)


@dataclass(frozen=True, eq=False)
class Operator:
    layout: RegisterLayout
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        mat = _frozen(self.matrix)
        d = self.layout.total_dim
        if mat.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got shape {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, layout: RegisterLayout) -> Operator:
        return cls(layout, np.eye(layout.total_dim))

    def apply(self, psi: StateVector) -> StateVector:
        _same_layout(self.layout, psi.layout)
        return StateVector(self.layout, self.matrix @ psi.amplitudes)

    def expectation(self, psi: StateVector) -> complex:
        return psi.inner(self.apply(psi))

    @property
    def dag(self) -> Operator:
        return Operator(self.layout, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def __matmul__(self, other: Operator) -> Operator:
        _same_layout(self.layout, other.layout)
        return Operator(self.layout, self.matrix @ other.matrix)

    def conjugate_by(self, u: Operator) -> Operator:
        """u · self · u†, keeping the kind of ``self``."""
        _same_layout(self.layout, u.layout)
        return type(self)(self.layout, u.matrix @ self.matrix @ u.matrix.conj().T)


class DensityOperator(Operator):
    """Hermitian, unit-trace, positive semidefinite operator."""

    def __post_init__(self) -> None:
        super().__post_init__()
        m = self.matrix
        if np.abs(m - m.conj().T).max() > EPS:
            raise ValueError("density operator must be Hermitian")
        if abs(np.trace(m) - 1) > EPS:
            raise ValueError(f"density operator must have unit trace, got {np.trace(m)}")
        if np.linalg.eigvalsh(m).min() < -EPS:
            raise ValueError("density operator must be positive semidefinite")

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def _same_layout(a: RegisterLayout, b: RegisterLayout) -> None:
    if a != b:
        raise ValueError(f"layout mismatch: {a.dims} vs {b.dims}")


Tensorable = Union[StateVector, Operator]


def tensor(a: Tensorable, b: Tensorable) -> Tensorable:
    """Kronecker product; ``a`` occupies the leading registers."""
    layout = a.layout + b.layout
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(layout, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, Operator) and isinstance(b, Operator):
        cls = DensityOperator if (isinstance(a, DensityOperator) and isinstance(b, DensityOperator)) else Operator
        return cls(layout, np.kron(a.matrix, b.matrix))
    raise TypeError("tensor needs two vectors or two operators")


def tensor_all(items: Iterable[Tensorable]) -> Tensorable:
    items = list(items)
    out = items[0]
    for x in items[1:]:
        out = tensor(out, x)
    return out


def bra_contract(psi: StateVector, register: int, bra: StateVector) -> StateVector:
    """<bra|_register |psi>, unnormalized, on the layout without ``register``."""
    psi.layout.check_register(register)
    if bra.layout.dims != (psi.layout.dims[register],):
        raise ValueError("bra does not live on the named register")
    out = np.tensordot(bra.amplitudes.conj(), psi.tensor_view(), axes=([0], [register]))
    return StateVector(psi.layout.without(register), out.ravel())


def bra_sandwich(rho: Operator, register: int, bra: StateVector) -> Operator:
    """<bra|_register rho |bra>_register as a plain operator on the residual layout."""
    layout = rho.layout
    layout.check_register(register)
    if bra.layout.dims != (layout.dims[register],):
        raise ValueError("bra does not live on the named register")
    n = layout.n
    t = rho.matrix.reshape(layout.dims + layout.dims)
    t = np.tensordot(bra.amplitudes.conj(), t, axes=([0], [register]))
    # column index of the contracted register has shifted down by one
    t = np.tensordot(t, bra.amplitudes, axes=([n - 1 + register], [0]))
    residual = layout.without(register)
    return Operator(residual, t.reshape(residual.total_dim, residual.total_dim))


def insert_register(psi: StateVector, position: int, local: StateVector) -> StateVector:
    """Place ``local`` so that it becomes register ``position`` of the result."""
    if local.layout.n != 1:
        raise ValueError("local must be a single-register vector")
    if not 0 <= position <= psi.layout.n:
        raise IndexError(f"position {position} out of range")
    t = np.multiply.outer(local.amplitudes, psi.tensor_view())
    t = np.moveaxis(t, 0, position)
    dims = psi.layout.dims[:position] + local.layout.dims + psi.layout.dims[position:]
    return StateVector(RegisterLayout(dims), t.ravel())


def embed_local(op: np.ndarray, register: int, layout: RegisterLayout) -> Operator:
    """Operator acting as ``op`` on one register and identity elsewhere."""
    layout.check_register(register)
    before = prod(layout.dims[:register])
    after = prod(layout.dims[register + 1:])
    return Operator(layout, np.kron(np.kron(np.eye(before), op), np.eye(after)))


def permute_registers(x: Tensorable, order: Sequence[int]) -> Tensorable:
    """Reorder registers: new register ``i`` is old register ``order[i]``."""
    order = list(order)
    if sorted(order) != list(range(x.layout.n)):
        raise ValueError(f"{order} is not a permutation of the registers")
    layout = RegisterLayout(tuple(x.layout.dims[i] for i in order))
    if isinstance(x, StateVector):
        return StateVector(layout, np.transpose(x.tensor_view(), order).ravel())
    n = x.layout.n
    t = x.matrix.reshape(x.layout.dims + x.layout.dims)
    t = np.transpose(t, order + [n + i for i in order])
    return type(x)(layout, t.reshape(layout.total_dim, layout.total_dim))


def permutation_matrix(layout: RegisterLayout, order: Sequence[int]) -> np.ndarray:
    """Unitary P with P·psi == permute_registers(psi, order) for every vector on ``layout``."""
    d = layout.total_dim
    cols = [permute_registers(StateVector(layout, np.eye(d)[j]), order).amplitudes for j in range(d)]
    return np.stack(cols, axis=1)


def dephase_register(rho: Operator, register: int) -> Operator:
    """Kill every block that is off-diagonal in the computational basis of ``register``."""
    layout = rho.layout
    layout.check_register(register)
    n, d = layout.n, layout.dims[register]
    shape = [1] * (2 * n)
    shape[register] = shape[n + register] = d
    mask = np.eye(d).reshape(shape)
    t = rho.matrix.reshape(layout.dims + layout.dims) * mask
    return type(rho)(layout, t.reshape(rho.matrix.shape))


def partial_trace(rho: Operator, registers: Iterable[int]) -> Operator:
    """Trace out ``registers``; the kind of ``rho`` is preserved."""
    layout = rho.layout
    registers = sorted(set(registers))
    if not registers:
        raise ValueError("nothing to trace out")
    for r in registers:
        layout.check_register(r)
    if len(registers) == layout.n:
        raise ValueError("cannot trace out every register")
    keep = [i for i in range(layout.n) if i not in registers]
    n = layout.n
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise ValueError("too many registers")
    rows = list(letters[:n])
    cols = [rows[i] if i in registers else letters[n + i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    t = np.einsum("".join(rows) + "".join(cols) + "->" + out, rho.matrix.reshape(layout.dims * 2))
    residual = RegisterLayout(tuple(layout.dims[i] for i in keep))
    return type(rho)(residual, t.reshape(residual.total_dim, residual.total_dim))


def hs_inner(a: Operator, b: Operator) -> complex:
    """Hilbert-Schmidt inner product Tr(a† b)."""
    return complex(np.vdot(a.matrix, b.matrix))


def _stack(ops: Sequence[Operator]) -> np.ndarray:
    if not ops:
        raise ValueError("empty operator list")
    layout = ops[0].layout
    for op in ops:
        _same_layout(layout, op.layout)
    return np.stack([op.matrix.ravel() for op in ops], axis=1)


def gram_matrix(ops: Sequence[Operator]) -> np.ndarray:
    m = _stack(ops)
    return m.conj().T @ m


def span_rank(ops: Sequence[Operator], tol: float = EPS) -> int:
    """Dimension of the linear span of ``ops`` under the Hilbert-Schmidt product.

    Computed from the Gram matrix; eigenvalues below ``tol`` (relative to the
    largest, when that exceeds one) count as zero.
    """
    g = gram_matrix(ops)
    s = np.linalg.svd(g, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


def _orthonormal_columns(ops: Sequence[Operator], tol: float) -> np.ndarray:
    m = _stack(ops)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return u[:, :0]
    # singular values of the stack are square roots of Gram eigenvalues
    r = int(np.sum(s**2 > tol * max(1.0, s[0] ** 2)))
    return u[:, :r]


def span_basis(ops: Sequence[Operator], tol: float = EPS) -> list[Operator]:
    """Orthonormal (Hilbert-Schmidt) basis of the span of ``ops``."""
    q = _orthonormal_columns(ops, tol)
    layout = ops[0].layout
    d = layout.total_dim
    return [Operator(layout, q[:, i].reshape(d, d)) for i in range(q.shape[1])]


def span_residual(basis: Sequence[Operator], ops: Sequence[Operator], tol: float = EPS) -> float:
    """Largest Frobenius distance from any of ``ops`` to the span of ``basis``."""
    q = _orthonormal_columns(basis, tol)
    worst = 0.0
    for op in ops:
        _same_layout(basis[0].layout, op.layout)
        v = op.matrix.ravel()
        worst = max(worst, float(np.linalg.norm(v - q @ (q.conj().T @ v))))
    return worst


def span_intersection(a: Sequence[Operator], b: Sequence[Operator], tol: float = EPS) -> list[Operator]:
    """Orthonormal basis of span(a) ∩ span(b).

    With orthonormal bases of both spans, the singular values of their overlap
    matrix are cosines of the principal angles; cosines equal to one mark
    shared directions.
    """
    qa = _orthonormal_columns(a, tol)
    qb = _orthonormal_columns(b, tol)
    u, s, _ = np.linalg.svd(qa.conj().T @ qb)
    layout = a[0].layout
    d = layout.total_dim
    hits = [i for i, c in enumerate(s) if c > 1 - np.sqrt(tol)]
    return [Operator(layout, (qa @ u[:, i]).reshape(d, d)) for i in hits]


def frobenius_distance(a: Operator | np.ndarray, b: Operator | np.ndarray) -> float:
    ma = a.matrix if isinstance(a, Operator) else np.asarray(a)
    mb = b.matrix if isinstance(b, Operator) else np.asarray(b)
    return float(np.linalg.norm(ma - mb))


def vector_distance(a: StateVector, b: StateVector) -> float:
    _same_layout(a.layout, b.layout)
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


# random objects --------------------------------------------------------------


def random_state(layout: RegisterLayout, rng: np.random.Generator) -> StateVector:
    d = layout.total_dim
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return StateVector(layout, v / np.linalg.norm(v))


def random_density(layout: RegisterLayout, rng: np.random.Generator) -> DensityOperator:
    """A A† / Tr(A A†) for complex Gaussian A."""
    d = layout.total_dim
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = a @ a.conj().T
    m = (m + m.conj().T) / 2
    return DensityOperator(layout, m / np.trace(m).real)


def random_hermitian(layout: RegisterLayout, rng: np.random.Generator) -> Operator:
    d = layout.total_dim
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return Operator(layout, (a + a.conj().T) / 2)


def random_operator(layout: RegisterLayout, rng: np.random.Generator) -> Operator:
    d = layout.total_dim
    return Operator(layout, rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
