"""The three-qubit scenario, its verification suite and the random-state fuzzer.

Registers are labelled A, B, C, ... in order. In the worked scenario Alice
(register 0) and Bob (register 1) are the frames and Charlie (register 2) is
the system both of them describe.
"""

from __future__ import annotations

import string
from dataclasses import asdict, dataclass
from typing import Callable, Iterator

import numpy as np

from .approaches import (
    NotPhysicalStateError,
    controlled_change_matrix,
    disentangler,
    ep_change,
    extract_extra_particle,
    frame_change_matrix,
    op_canonicalize,
    op_change,
    op_frame_change,
    pn_change,
    pn_change_global,
)
from .frames import (
    FramedObservable,
    FrameSpec,
    RelativeState,
    dephase_toward_frame,
    expectation,
    framed_to_operator,
    reconstruct,
    reduce,
    relativize,
    residual_registers,
)
from .group import (
    CyclicGroup,
    charge_projector,
    charge_weights,
    fourier_vector,
    global_unitary,
    invariance_residual,
    shift_matrix,
)
from .linalg import (
    DensityOperator,
    Operator,
    RegisterLayout,
    StateVector,
    dephase_register,
    frobenius_distance,
    insert_register,
    partial_trace,
    random_density,
    random_hermitian,
    random_operator,
    random_state,
    span_intersection,
    span_rank,
    span_residual,
    tensor,
    vector_distance,
)
from .paths import frame_change_paths
from .report import Check, Discrepancy, VerificationReport, check, jsonable, render_density, render_ket
from .twirl import coherent_twirl, incoherent_twirl, is_invariant_state, is_invariant_vector, sector_compress

EXACT_TOL = 1e-12
DEFAULT_TOL = 1e-10

#: Anchor keys used by checks; each names the part of the construction a check reproduces.
ANCHORS = {
    "global-states": "the two invariant three-qubit states of the main argument",
    "group-action": "Z_N acting by shifts on every register",
    "charge-sectors": "charge projectors and sector weights",
    "invariance": "invariant states versus invariant vectors",
    "relative-states": "states relative to Alice and to Bob",
    "main-argument": "same state relative to Alice, orthogonal states relative to Bob",
    "discriminator": "the global observable that tells the two states apart",
    "relativization": "relativization of observables and its predual",
    "dephasing": "dephasing on an inner frame and framed observables",
    "perspective-neutral": "frame change restricted to the trivial sector",
    "extra-particle": "frame change carrying the global charge as an extra register",
    "operational": "frame change on classes of framed-indistinguishable states",
    "frame-change-paths": "the three routes from one frame to another",
    "framed-algebra": "observables accessible to both frames",
    "twirl-structure": "images of the incoherent and coherent twirls",
    "comparison-table": "which approach lets Alice distinguish all global states",
    "rendering": "report rendering of relative states",
    "plumbing": "internal consistency of the artifact",
}

STATES = ("psi0", "psi1", "mixture", "twirled-product", "random-physical")
APPROACHES = ("pn", "ep", "op")
APPROACH_NAMES = {"pn": "perspective-neutral", "ep": "extra-particle", "op": "operational"}


class ConfigError(ValueError):
    """Invalid scenario configuration (a usage error at the CLI)."""


@dataclass(frozen=True)
class ScenarioConfig:
    N: int = 2
    n: int = 3
    frame_from: int = 0
    frame_to: int = 1
    seed: int = 42
    trials: int = 100
    tolerance: float | None = None
    dim_cap: int = 4096

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ConfigError(f"group order must be at least 2, got {self.N}")
        if self.n < 2:
            raise ConfigError(f"need at least 2 registers, got {self.n}")
        if self.N**self.n > self.dim_cap:
            raise ConfigError(f"dimension {self.N}^{self.n} exceeds the cap {self.dim_cap}")
        for f in (self.frame_from, self.frame_to):
            if not 0 <= f < self.n:
                raise ConfigError(f"frame register {f} out of range for {self.n} registers")
        if self.frame_from == self.frame_to:
            raise ConfigError("source and target frames must differ")
        if self.trials < 0:
            raise ConfigError("trials must be non-negative")
        if self.tolerance is not None and not self.tolerance >= 0:
            raise ConfigError("tolerance must be non-negative")

    @property
    def layout(self) -> RegisterLayout:
        return RegisterLayout.uniform(self.N, self.n)

    @property
    def is_worked_scenario(self) -> bool:
        return (self.N, self.n, self.frame_from, self.frame_to) == (2, 3, 0, 1)

    def tol(self, default: float = DEFAULT_TOL) -> float:
        return default if self.tolerance is None else self.tolerance

    def to_dict(self) -> dict:
        return asdict(self)


def register_name(i: int) -> str:
    return string.ascii_uppercase[i] if i < 26 else f"R{i}"


# scenario states -------------------------------------------------------------

_LAYOUT3 = RegisterLayout.uniform(2, 3)
_LAYOUT2 = RegisterLayout.uniform(2, 2)


def build_psi(which: int, N: int = 2, n: int = 3) -> StateVector:
    """The two invariant states of the main argument; sector 0 and sector 1."""
    if (N, n) != (2, 3):
        raise ConfigError("the scenario states exist only for N=2, n=3")
    h = 0.5
    if which == 0:
        terms = {"001": h, "110": h, "100": -h, "011": -h}
    elif which == 1:
        terms = {"001": h, "100": h, "110": -h, "011": -h}
    else:
        raise ValueError(f"which must be 0 or 1, got {which}")
    return StateVector.from_kets(_LAYOUT3, terms)


def build_state(name: str, cfg: ScenarioConfig) -> DensityOperator:
    """Named global densities used by the comparison table."""
    if name in ("psi0", "psi1", "mixture") and not cfg.is_worked_scenario:
        raise ConfigError(f"state {name!r} needs N=2, n=3 with frames 0 -> 1")
    if name == "psi0":
        return build_psi(0).projector()
    if name == "psi1":
        return build_psi(1).projector()
    if name == "mixture":
        m = (build_psi(0).projector().matrix + build_psi(1).projector().matrix) / 2
        return DensityOperator(_LAYOUT3, m)
    if name == "twirled-product":
        return incoherent_twirl(StateVector.basis(cfg.layout, [0] * cfg.n).projector())
    if name == "random-physical":
        # a seeded unit vector of the trivial sector
        psi = _unit_in_sector(cfg.layout, 0, np.random.default_rng(cfg.seed))
        return psi.projector()
    raise ConfigError(f"unknown state {name!r}; choose from {', '.join(STATES)}")


def _rel_ket(terms: dict[str, float]) -> np.ndarray:
    return StateVector.from_kets(_LAYOUT2, terms).amplitudes


_S = 1 / np.sqrt(2)
REL_A = _rel_ket({"01": _S, "11": -_S})
REL_B0 = _rel_ket({"01": _S, "10": -_S})
REL_B1 = _rel_ket({"01": _S, "10": _S})
# dephasing oracle applied to the relative states above
DEPHASED_A = np.diag([0, 0.5, 0, 0.5]).astype(complex)
DEPHASED_B = np.diag([0, 0.5, 0.5, 0]).astype(complex)
# values as printed for Bob's dephased relative state and for the equal mixture
PRINTED_DEPHASED_B = np.diag([0, 0.5, 0, 0.5]).astype(complex)


def _amp(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _raises(fn: Callable[[], object], exc: type[BaseException]) -> tuple[float, str]:
    try:
        fn()
    except exc as e:
        return 0.0, str(e)
    return 1.0, "no error raised"


def _unit_in_sector(layout: RegisterLayout, k: int, rng: np.random.Generator) -> StateVector:
    v = coherent_twirl(random_state(layout, rng), k)
    return v.normalized()


# worked example --------------------------------------------------------------


def run_worked_example(
    cfg: ScenarioConfig | None = None,
    states: tuple[str, ...] = STATES,
    approaches: tuple[str, ...] = APPROACHES,
) -> VerificationReport:
    """Every worked value of the three-qubit scenario as a named check.

    ``states`` and ``approaches`` only filter the comparison table.
    """
    cfg = cfg or ScenarioConfig()
    if not cfg.is_worked_scenario:
        raise ConfigError("the worked example is defined for N=2, n=3 with frames 0 -> 1")
    rng = np.random.default_rng(cfg.seed)
    report = VerificationReport(config={"mode": "worked-example", **cfg.to_dict()})
    for suite in (
        _global_checks,
        _group_checks,
        _twirl_checks,
        _relative_checks,
        _relativization_checks,
        _pn_checks,
        _ep_checks,
        _op_checks,
        _path_checks,
        _algebra_checks,
        _table_checks,
        _render_checks,
    ):
        for c in suite(cfg, rng):
            report.add(c)
    report.discrepancies.extend(DISCREPANCIES)
    report.table = comparison_table(cfg, states, approaches)
    report.frameworks = framework_summary(report)
    return report


def _global_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    t = cfg.tol(EXACT_TOL)
    p0, p1 = build_psi(0), build_psi(1)
    e0 = np.zeros(8)
    e0[[0b001, 0b110]] = 0.5
    e0[[0b100, 0b011]] = -0.5
    e1 = np.zeros(8)
    e1[[0b001, 0b100]] = 0.5
    e1[[0b110, 0b011]] = -0.5
    yield check("global.psi0_amplitudes", "global-states", _amp(p0.amplitudes, e0), t, computed=p0.amplitudes)
    yield check("global.psi1_amplitudes", "global-states", _amp(p1.amplitudes, e1), t, computed=p1.amplitudes)
    yield check("global.psi0_psi1_orthogonal", "global-states", abs(p0.inner(p1)), t)


def _group_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    t = cfg.tol(EXACT_TOL)
    group = CyclicGroup(2)
    x = np.array([[0, 1], [1, 0]])
    yield check("group.shift_is_pauli_x", "group-action", _amp(shift_matrix(2, 1), x), t)
    plus = fourier_vector(0, group)
    minus = fourier_vector(1, group)
    yield check("group.fourier_plus", "group-action", _amp(plus.amplitudes, [_S, _S]), t)
    yield check("group.fourier_minus", "group-action", _amp(minus.amplitudes, [_S, -_S]), t)
    yield check("group.shift_fixes_plus", "group-action", _amp(x @ plus.amplitudes, plus.amplitudes), t)

    u = global_unitary(1, _LAYOUT3)
    ghz = StateVector.from_kets(_LAYOUT3, {"000": _S, "111": _S})
    yield check("group.ghz_in_trivial_sector", "group-action", vector_distance(u.apply(ghz), ghz), t)
    p1 = build_psi(1)
    yield check("group.psi1_sign_flip", "group-action", vector_distance(u.apply(p1), -p1), t)

    xxx = np.kron(np.kron(x, x), x)
    pi0 = charge_projector(0, _LAYOUT3).matrix
    pi1 = charge_projector(1, _LAYOUT3).matrix
    yield check("sectors.trivial_projector_form", "charge-sectors", _amp(pi0, (np.eye(8) + xxx) / 2), t)
    p0 = build_psi(0).amplitudes
    yield check("sectors.psi0_in_trivial_sector", "charge-sectors", max(_amp(pi0 @ p0, p0), _amp(pi1 @ p0, 0)), t)
    ranks = [int(round(np.trace(p).real)) for p in (pi0, pi1)]
    ranks_svd = [int(np.linalg.matrix_rank(p)) for p in (pi0, pi1)]
    yield check(
        "sectors.sector_dimensions", "charge-sectors", abs(ranks[0] - 4) + abs(ranks[1] - 4) + abs(ranks_svd[0] - 4),
        0, ranks=ranks,
    )
    w0 = charge_weights(build_psi(0).projector())
    w1 = charge_weights(build_psi(1).projector())
    yield check("sectors.weights_psi0", "charge-sectors", _amp(w0, [1, 0]), t, weights=w0)
    yield check("sectors.weights_psi1", "charge-sectors", _amp(w1, [0, 1]), t, weights=w1)


def _twirl_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    t = cfg.tol(DEFAULT_TOL)
    p0, p1 = build_psi(0), build_psi(1)
    ok, res = is_invariant_state(p1.projector())
    yield check("invariance.psi1_invariant_state", "invariance", res, t, invariant=ok)
    q = RegisterLayout((2,))
    plus, minus = fourier_vector(0, CyclicGroup(2)), fourier_vector(1, CyclicGroup(2))
    rho = 0.3 * plus.projector().matrix + 0.7 * minus.projector().matrix
    ok, res = is_invariant_state(DensityOperator(q, rho))
    yield check("invariance.qubit_diagonal_in_charge_basis", "invariance", res, t, invariant=ok, p=0.3)
    yield check("invariance.psi0_invariant_vector", "invariance", 0.0 if is_invariant_vector(p0) else 1.0, 0)
    yield check("invariance.psi1_not_invariant_vector", "invariance", 1.0 if is_invariant_vector(p1) else 0.0, 0)

    # 64 matrix units under each twirl
    units = [Operator(_LAYOUT3, np.eye(64)[i].reshape(8, 8)) for i in range(64)]
    r_inc = span_rank([incoherent_twirl(u) for u in units])
    r_coh = span_rank([sector_compress(u, 0) for u in units])
    yield check("twirl.incoherent_image_rank", "twirl-structure", abs(r_inc - 32), 0, rank=r_inc)
    yield check("twirl.coherent_image_rank", "twirl-structure", abs(r_coh - 16), 0, rank=r_coh)
    worst = 0.0
    for _ in range(20):
        r = random_density(_LAYOUT3, rng)
        once = incoherent_twirl(r)
        worst = max(worst, frobenius_distance(incoherent_twirl(once), once))
    yield check("twirl.incoherent_idempotent", "twirl-structure", worst, t, samples=20)


def _relative_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    te, t = cfg.tol(EXACT_TOL), cfg.tol(DEFAULT_TOL)
    fa, fb = FrameSpec(0), FrameSpec(1)
    p0, p1 = build_psi(0), build_psi(1)
    r0a, r1a = reduce(p0, fa).body, reduce(p1, fa).body
    r0b, r1b = reduce(p0, fb).body, reduce(p1, fb).body
    for cid, got, want in (
        ("relative.psi0_wrt_A", r0a, REL_A),
        ("relative.psi1_wrt_A", r1a, REL_A),
        ("relative.psi0_wrt_B", r0b, REL_B0),
        ("relative.psi1_wrt_B", r1b, REL_B1),
    ):
        yield check(cid, "relative-states", _amp(got.amplitudes, want), te,
                    computed=got.amplitudes, rendered=render_ket(got.amplitudes, (2, 2)))
    yield check("main_argument.same_wrt_A", "main-argument", vector_distance(r0a, r1a), te)
    yield check("main_argument.orthogonal_wrt_B", "main-argument", abs(r0b.inner(r1b)), te,
                overlap=r0b.inner(r1b))

    xxx = global_unitary(1, _LAYOUT3)
    e0, e1 = xxx.expectation(p0), xxx.expectation(p1)
    yield check("discriminator.psi0", "discriminator", abs(e0 - 1), te, value=e0)
    yield check("discriminator.psi1", "discriminator", abs(e1 + 1), te, value=e1)

    # reduction is isometric on the trivial sector, and reconstruct inverts it
    back = reconstruct(RelativeState(fa, (1, 2), StateVector(_LAYOUT2, REL_A)), 0)
    yield check("perspective_neutral.reconstruct_psi0", "perspective-neutral", vector_distance(back, p0), t)
    worst = 0.0
    for _ in range(100):
        psi = _unit_in_sector(_LAYOUT3, 0, rng)
        worst = max(worst, vector_distance(reconstruct(reduce(psi, fa), 0), psi))
    yield check("perspective_neutral.reconstruct_roundtrip", "perspective-neutral", worst, t, samples=100)


def _relativization_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    t = cfg.tol(DEFAULT_TOL)
    fa = FrameSpec(0)
    p0 = build_psi(0)
    rel = reduce(p0, fa)
    worst = 0.0
    for _ in range(50):
        T = random_hermitian(_LAYOUT2, rng)
        worst = max(worst, abs(relativize(T, fa).expectation(p0) - expectation(rel, T)))
    yield check("relativization.expectation_psi0", "relativization", worst, t, samples=50)

    worst = 0.0
    for _ in range(50):
        rho = incoherent_twirl(random_density(_LAYOUT3, rng))
        T = random_operator(_LAYOUT2, rng)
        lhs = np.trace(rho.matrix @ relativize(T, fa).matrix)
        rhs = np.trace(reduce(rho, fa).density().matrix @ T.matrix)
        worst = max(worst, abs(lhs - rhs))
    yield check("relativization.duality", "relativization", worst, t, samples=50)

    # dephasing on Bob inside Alice's relative state
    te = cfg.tol(EXACT_TOL)
    for cid, psi in (("dephasing.psi0_wrt_A", p0), ("dephasing.psi1_wrt_A", build_psi(1))):
        d = dephase_toward_frame(reduce(psi, fa), 1).density()
        yield check(cid, "dephasing", _amp(d.matrix, DEPHASED_A), te,
                    rendered=render_density(d.matrix, (2, 2)))
    d = dephase_register(rel.density(), 0)
    yield check("dephasing.register_B_of_psi0_wrt_A", "dephasing", _amp(d.matrix, DEPHASED_A), te)

    worst = 0.0
    for i in range(50):
        blocks = tuple(random_hermitian(RegisterLayout((2,)), rng).matrix for _ in range(2))
        F = framed_to_operator(FramedObservable(0, blocks))
        r = RelativeState(fa, (1, 2), random_density(_LAYOUT2, rng)) if i else rel
        worst = max(worst, abs(expectation(dephase_toward_frame(r, 1), F) - expectation(r, F)))
    yield check("dephasing.framed_expectations_preserved", "dephasing", worst, t, samples=50)


def _pn_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    te, t = cfg.tol(EXACT_TOL), cfg.tol(DEFAULT_TOL)
    fa, fb = FrameSpec(0), FrameSpec(1)
    out = pn_change(reduce(build_psi(0), fa), fb)
    yield check("perspective_neutral.change_psi0", "perspective-neutral", _amp(out.body.amplitudes, REL_B0), te,
                rendered=render_ket(out.body.amplitudes, (2, 2)))
    res, msg = _raises(lambda: pn_change_global(build_psi(1), fa, fb), NotPhysicalStateError)
    yield check("perspective_neutral.rejects_psi1", "perspective-neutral", res, 0, reason=msg)

    worst_ip = worst_inv = 0.0
    for _ in range(100):
        a = RelativeState(fa, (1, 2), random_state(_LAYOUT2, rng))
        b = RelativeState(fa, (1, 2), random_state(_LAYOUT2, rng))
        ca, cb = pn_change(a, fb), pn_change(b, fb)
        worst_ip = max(worst_ip, abs(a.body.inner(b.body) - ca.body.inner(cb.body)))
        worst_inv = max(worst_inv, vector_distance(pn_change(ca, fa).body, a.body))
    yield check("perspective_neutral.inner_products", "perspective-neutral", worst_ip, t, samples=100)
    yield check("perspective_neutral.inverse", "perspective-neutral", worst_inv, t, samples=100)
    w = frame_change_matrix(fa, fb, 2, 3, 0)
    yield check("perspective_neutral.unitary", "perspective-neutral", _amp(w.conj().T @ w, np.eye(4)), t)


def _ep_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    te, t = cfg.tol(EXACT_TOL), cfg.tol(DEFAULT_TOL)
    fa, fb = FrameSpec(0), FrameSpec(1)
    for k, want in ((0, REL_B0), (1, REL_B1)):
        x = extract_extra_particle(build_psi(k), fa)
        res_in = _amp(x.relative.body.amplitudes, REL_A) + abs(x.charge - k)
        yield check(f"extra_particle.extract_psi{k}", "extra-particle", res_in, te, charge=x.charge)
        for route in ("reconstruct", "controlled"):
            y = ep_change(x, fb, route=route)
            res = _amp(y.relative.body.amplitudes, want) + abs(y.charge - k)
            yield check(f"extra_particle.change_psi{k}_{route}", "extra-particle", res, te, charge=y.charge,
                        rendered=render_ket(y.relative.body.amplitudes, (2, 2)))

    worst_route = worst_global = worst_fact = worst_pn = 0.0
    for i in range(100):
        k = i % 2
        psi = _unit_in_sector(_LAYOUT3, k, rng)
        x = extract_extra_particle(psi, fa)
        a = ep_change(x, fb, route="reconstruct")
        b = ep_change(x, fb, route="controlled")
        worst_route = max(worst_route, vector_distance(a.relative.body, b.relative.body), abs(a.charge - b.charge))
        worst_global = max(worst_global, vector_distance(a.relative.body, reduce(psi, fb).body))
        out = disentangler(fa, _LAYOUT3).apply(psi)
        want = insert_register(reduce(psi, fa).body, 0, fa.charge_state(k, 2))
        worst_fact = max(worst_fact, vector_distance(out, want))
        if k == 0:
            worst_pn = max(worst_pn, vector_distance(a.relative.body, pn_change(reduce(psi, fa), fb).body))
    yield check("extra_particle.routes_agree", "extra-particle", worst_route, t, samples=100)
    yield check("extra_particle.global_consistency", "extra-particle", worst_global, t, samples=100)
    yield check("extra_particle.disentangler_factorization", "extra-particle", worst_fact, t, samples=100)
    yield check("extra_particle.sector0_matches_pn", "extra-particle", worst_pn, t, samples=50)
    s = max(
        _amp(controlled_change_matrix(fa, fb, 3, k), frame_change_matrix(fa, fb, 2, 3, k)) for k in (0, 1)
    )
    yield check("extra_particle.controlled_equals_reconstruct", "extra-particle", s, t)


def _op_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    te, t = cfg.tol(EXACT_TOL), cfg.tol(DEFAULT_TOL)
    fa, fb = FrameSpec(0), FrameSpec(1)
    p0, p1 = build_psi(0), build_psi(1)
    c0 = op_canonicalize(reduce(p0, fb), 0)
    c1 = op_canonicalize(reduce(p1, fb), 0)
    rep = c0.representative.density().matrix
    yield check("operational.collapse_wrt_B", "operational", c0.distance(c1), te)
    yield check("operational.representative_wrt_B", "operational", _amp(rep, DEPHASED_B), te,
                rendered=render_density(rep, (2, 2)))

    # framed expectations cannot tell psi0 and psi1 relative to Bob apart
    worst = 0.0
    for _ in range(20):
        T = random_hermitian(RegisterLayout((2,)), rng).matrix
        for i in (0, 1):
            F = Operator(_LAYOUT2, np.kron(np.diag(np.eye(2)[i]), T))
            worst = max(worst, abs(expectation(reduce(p0, fb), F) - expectation(reduce(p1, fb), F)))
    yield check("operational.framed_indistinguishable", "operational", worst, t, samples=20)

    mix = DensityOperator(_LAYOUT2, (reduce(p0, fb).density().matrix + reduce(p1, fb).density().matrix) / 2)
    cm = op_canonicalize(RelativeState(fb, (0, 2), mix), 0)
    yield check("operational.mixture_same_class", "operational", cm.distance(c0), te)
    yield check("operational.mixture_is_representative", "operational", _amp(mix.matrix, DEPHASED_B), te,
                rendered=render_density(mix.matrix, (2, 2)))

    a0 = op_frame_change(reduce(p0, fa), fb)
    a1 = op_frame_change(reduce(p1, fa), fb)
    yield check("operational.change_psi0", "operational", a0.distance(c0), te)
    yield check("operational.well_defined", "operational", a0.distance(a1), te)

    worst = 0.0
    for _ in range(100):
        r = RelativeState(fa, (1, 2), random_density(_LAYOUT2, rng))
        c = op_canonicalize(r, 1)
        worst = max(worst, op_change(op_change(c)).distance(c))
    yield check("operational.inverse", "operational", worst, t, samples=100)

    # printed values, compared against the dephasing oracle
    for cid, printed, text in (
        ("operational.printed_dephased_wrt_B", PRINTED_DEPHASED_B, "dephased states relative to Bob"),
        ("operational.printed_mixture_wrt_B", PRINTED_DEPHASED_B, "equal mixture relative to Bob"),
    ):
        res = frobenius_distance(printed, rep)
        status = "pass" if res <= te else "flagged"
        yield Check(cid, "operational", status, res, jsonable({
            "printed": render_density(printed, (2, 2)),
            "computed": render_density(rep, (2, 2)),
            "note": f"{text}: printed value differs from the dephasing oracle",
        }))


def _path_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    t = cfg.tol(DEFAULT_TOL)
    r0 = frame_change_paths(build_psi(0).projector())
    yield check("paths.psi0_all_agree", "frame-change-paths",
                r0.worst() + sum(not r0.ok(p) for p in r0.paths), t, distances=r0.distances)
    r1 = frame_change_paths(build_psi(1).projector())
    shape = (not r1.ok("extra-particle")) + (not r1.ok("operational")) + r1.ok("perspective-neutral")
    yield check("paths.psi1_pn_rejected", "frame-change-paths", r1.worst() + shape, t,
                statuses={p.name: p.status for p in r1.paths.values()}, distances=r1.distances)
    r2 = frame_change_paths(build_state("twirled-product", cfg))
    yield check("paths.twirled_product_roundtrip", "frame-change-paths",
                r2.distances["operational: inverse round trip"], t, distances=r2.distances)


def _algebra_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    t = cfg.tol(DEFAULT_TOL)
    fa, fb = FrameSpec(0), FrameSpec(1)
    units2 = [np.eye(4)[i].reshape(2, 2) for i in range(4)]
    proj = [np.diag(np.eye(2)[i]) for i in range(2)]
    # |i><i| on the other frame (first residual register) times any operator on C
    framed = [Operator(_LAYOUT2, np.kron(p, e)) for p in proj for e in units2]
    framed_a = [relativize(f, fa) for f in framed]
    framed_b = [relativize(f, fb) for f in framed]
    ra, rb = span_rank(framed_a), span_rank(framed_b)
    yield check("algebra.framed_span_ranks", "framed-algebra", abs(ra - 8) + abs(rb - 8), 0, ranks=[ra, rb])
    coincide = max(span_residual(framed_a, framed_b), span_residual(framed_b, framed_a))
    yield check("algebra.framed_spans_coincide", "framed-algebra", coincide, t)

    full = [Operator(_LAYOUT2, np.eye(16)[i].reshape(4, 4)) for i in range(16)]
    all_a = [relativize(f, fa) for f in full]
    all_b = [relativize(f, fb) for f in full]
    inter = span_intersection(all_a, all_b)
    ri = span_rank(inter)
    yield check("algebra.intersection_rank", "framed-algebra", abs(ri - 8), 0, rank=ri,
                ranks=[span_rank(all_a), span_rank(all_b)])
    same = max(span_residual(inter, framed_a), span_residual(framed_a, inter)) if inter else 1.0
    yield check("algebra.intersection_is_framed", "framed-algebra", same, t)


def _table_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    t = cfg.tol(DEFAULT_TOL)
    fa = FrameSpec(0)
    worst = 0.0
    for _ in range(50):
        a, b = _unit_in_sector(_LAYOUT3, 0, rng), _unit_in_sector(_LAYOUT3, 0, rng)
        worst = max(worst, abs(a.inner(b) - reduce(a, fa).body.inner(reduce(b, fa).body)))
    yield check("table.pn_distinguishes", "comparison-table", worst, t, samples=50)

    x0 = extract_extra_particle(build_psi(0), fa)
    x1 = extract_extra_particle(build_psi(1), fa)
    ov = abs(x0.joint().inner(x1.joint()))
    yield check("table.ep_distinguishes", "comparison-table", ov, t, charges=[x0.charge, x1.charge])

    c0 = op_frame_change(reduce(build_psi(0), fa), FrameSpec(1))
    c1 = op_frame_change(reduce(build_psi(1), fa), FrameSpec(1))
    # the classes coincide, so Alice's data cannot tell the global states apart
    yield check("table.op_does_not_distinguish", "comparison-table", c0.distance(c1), t)
    # dephasing the inner frame is a rank-8 channel on 16-dimensional operators
    units = [Operator(_LAYOUT2, np.eye(16)[i].reshape(4, 4)) for i in range(16)]
    r = span_rank([dephase_register(u, 0) for u in units])
    yield check("table.op_dephasing_not_injective", "comparison-table", abs(r - 8), 0, rank=r)


def _render_checks(cfg: ScenarioConfig, rng: np.random.Generator) -> Iterator[Check]:
    text = render_ket(reduce(build_psi(0), FrameSpec(0)).body.amplitudes, (2, 2))
    yield check("render.psi0_wrt_A", "rendering", float(text != "(|01⟩ − |11⟩)/√2"), 0, rendered=text)


DISCREPANCIES = [
    Discrepancy(
        "dephased-states-wrt-B",
        "suspected typo",
        "½(|0⟩⟨0|_A ⊗ |1⟩⟨1|_C + |1⟩⟨1|_A ⊗ |1⟩⟨1|_C) for both dephased states relative to Bob",
        "½(|0⟩⟨0|_A ⊗ |1⟩⟨1|_C + |1⟩⟨1|_A ⊗ |0⟩⟨0|_C)",
        "dephasing (|01⟩ ∓ |10⟩)/√2 on A keeps |10⟩⟨10|; flagged by operational.printed_dephased_wrt_B",
    ),
    Discrepancy(
        "mixture-wrt-B",
        "suspected typo",
        "½(|01⟩⟨01| + |11⟩⟨11|)_AC for the equal mixture relative to Bob",
        "½(|01⟩⟨01| + |10⟩⟨10|)_AC",
        "the cross terms cancel and the diagonal keeps |10⟩⟨10|; flagged by operational.printed_mixture_wrt_B",
    ),
    Discrepancy(
        "alice-state-prose",
        "note",
        "(|01⟩ + |10⟩)/√2 quoted in prose as the state relative to Alice",
        "(|01⟩ − |11⟩)/√2",
        "the displayed equations give the computed value; the prose value is not used",
    ),
    Discrepancy(
        "reduction-bra-subscript",
        "note",
        "√2 ⟨0|_B |ψ⁰⟩ in the perspective-neutral reduction map",
        "√2 ⟨0|_A |ψ⁰⟩",
        "read as conditioning on Alice, consistent with the map's own label",
    ),
    Discrepancy(
        "extra-particle-labels",
        "note",
        "|0⟩, |1⟩ and |+⟩, |−⟩ both used for the extra particle; change operator subscript BS",
        "charge states |+⟩ (sector 0) and |−⟩ (sector 1); subscript read as the extra particle of BC",
        "labels only; no numerical effect",
    ),
]


# comparison table --------------------------------------------------------------


def comparison_table(
    cfg: ScenarioConfig, states: tuple[str, ...] = STATES, approaches: tuple[str, ...] = APPROACHES
) -> list[dict]:
    """Global state x frame x approach -> relative state or class, as rendered text."""
    rows = []
    src, tgt = FrameSpec(cfg.frame_from), FrameSpec(cfg.frame_to)
    for name in states:
        rho = build_state(name, cfg)
        for approach in approaches:
            for frame, value, status in _cells(rho, approach, src, tgt):
                rows.append({
                    "state": name,
                    "frame": register_name(frame.register),
                    "approach": APPROACH_NAMES[approach],
                    "status": status,
                    "value": value,
                })
    return rows


def _pure_vector(rho: DensityOperator) -> StateVector | None:
    w, v = np.linalg.eigh(rho.matrix)
    if abs(w[-1] - 1) > 1e-10:
        return None
    vec = v[:, -1]
    lead = vec[np.argmax(np.abs(vec) > 1e-10)]
    return StateVector(rho.layout, vec * abs(lead) / lead)


def _cells(rho: DensityOperator, approach: str, src: FrameSpec, tgt: FrameSpec):
    weights = charge_weights(rho)
    psi = _pure_vector(rho)
    if approach == "pn":
        if weights[0] < 1 - 1e-8:
            reason = f"rejected: not a physical state (sector weights {_fmt_weights(weights)})"
            yield src, reason, "rejected"
            yield tgt, reason, "rejected"
            return
        rel = reduce(psi if psi is not None else rho, src)
        yield src, _render_rel(rel), "ok"
        yield tgt, _render_rel(pn_change(rel, tgt)), "ok"
    elif approach == "ep":
        if psi is not None and np.count_nonzero(weights) == 1:
            x = extract_extra_particle(psi, src)
            y = ep_change(x, tgt)
            yield src, f"charge {x.charge} ⊗ {_render_rel(x.relative)}", "ok"
            yield tgt, f"charge {y.charge} ⊗ {_render_rel(y.relative)}", "ok"
            return
        # mixed or multi-sector: report the sector weights and the relative density
        w = _fmt_weights(weights)
        yield src, f"charge weights {w}; {_render_rel(reduce(rho, src))}", "ok"
        paths = frame_change_paths(rho, src.register, tgt.register)
        final = paths.paths["extra-particle"].final
        names = "".join(register_name(r) for r in residual_registers(rho.layout.n, tgt.register))
        yield tgt, f"charge weights {w}; {render_density(final.matrix, final.layout.dims)} on {names}", "ok"
    elif approach == "op":
        c = op_canonicalize(reduce(rho, src), tgt.register)
        yield src, "class of " + _render_rel(c.representative), "ok"
        yield tgt, "class of " + _render_rel(op_change(c).representative), "ok"
    else:
        raise ConfigError(f"unknown approach {approach!r}")


def _render_rel(rel: RelativeState) -> str:
    names = "".join(register_name(r) for r in rel.registers)
    if rel.is_pure:
        return f"{render_ket(rel.body.amplitudes, rel.layout.dims)} on {names}"
    return f"{render_density(rel.body.matrix, rel.layout.dims)} on {names}"


def _fmt_weights(w: np.ndarray) -> str:
    return "(" + ", ".join(f"{x:.6g}" for x in w) + ")"


def framework_summary(report: VerificationReport) -> list[dict]:
    status = {c.id: c.status for c in report.checks}

    def backed(answer: str, *ids: str) -> str:
        return answer if all(status.get(i) == "pass" for i in ids) else f"{answer} (unverified)"

    return [
        {
            "approach": "perspective-neutral",
            "physical states": "sector-0 vectors",
            "frame change": backed("unitary", "perspective_neutral.unitary", "perspective_neutral.inverse"),
            "distinguishes global states": backed("yes", "table.pn_distinguishes"),
            "evidence": "table.pn_distinguishes",
        },
        {
            "approach": "extra-particle",
            "physical states": "twirl-invariant densities",
            "frame change": backed("unitary with the extra particle", "extra_particle.routes_agree"),
            "distinguishes global states": backed("yes", "table.ep_distinguishes"),
            "evidence": "table.ep_distinguishes",
        },
        {
            "approach": "operational",
            "physical states": "classes under framed observables",
            "frame change": backed("invertible on classes only", "operational.inverse",
                                   "table.op_dephasing_not_injective"),
            "distinguishes global states": backed("no", "table.op_does_not_distinguish"),
            "evidence": "table.op_does_not_distinguish",
        },
    ]


def compare(
    cfg: ScenarioConfig, states: tuple[str, ...] = STATES, approaches: tuple[str, ...] = APPROACHES
) -> VerificationReport:
    """Comparison table plus one check per (state, approach) cell.

    A cell passes when its target-frame value agrees with the direct
    reduction of the global state (or its class), or when the approach
    correctly refuses a state outside its domain.
    """
    if not cfg.is_worked_scenario and states == STATES:
        states = tuple(s for s in states if s not in ("psi0", "psi1", "mixture"))
    report = VerificationReport(config={"mode": "compare", **cfg.to_dict()})
    t = cfg.tol(DEFAULT_TOL)
    for name in states:
        rho = build_state(name, cfg)
        paths = frame_change_paths(rho, cfg.frame_from, cfg.frame_to)
        for a in approaches:
            p = paths.paths[APPROACH_NAMES[a]]
            cid = f"compare.{a}.{name}"
            if p.status == "rejected":
                ok = paths.weights[0] < 1 - 1e-8
                report.add(check(cid, "comparison-table", 0.0 if ok else 1.0, 0, rejected=p.reason))
                continue
            res = max(v for k, v in paths.distances.items() if k.startswith(p.name + " vs direct"))
            report.add(check(cid, "comparison-table", res, t, weights=paths.weights))
    report.table = comparison_table(cfg, states, approaches)
    return report


# fuzzing ---------------------------------------------------------------------


class _Worst:
    """Running maximum of each named residual."""

    def __init__(self) -> None:
        self.values: dict[str, float] = {}
        self.anchors: dict[str, str] = {}

    def __call__(self, name: str, anchor: str, value: float) -> None:
        v = float(value)
        if np.isnan(v):
            v = np.inf
        self.anchors[name] = anchor
        self.values[name] = max(self.values.get(name, 0.0), v)


def fuzz(cfg: ScenarioConfig) -> VerificationReport:
    """Random invariant states through every cross-module invariant.

    Deterministic in ``cfg.seed`` (numpy PCG64). Reports the worst residual
    per check over ``cfg.trials`` trials; zero trials give an empty report.
    """
    report = VerificationReport(config={"mode": "fuzz", **cfg.to_dict()})
    if cfg.trials == 0:
        return report
    rng = np.random.default_rng(cfg.seed)
    worst = _Worst()
    for _ in range(cfg.trials):
        _fuzz_trial(cfg, rng, worst)
    t = cfg.tol(DEFAULT_TOL)
    for name in sorted(worst.values):
        report.add(check(name, worst.anchors[name], worst.values[name], t, trials=cfg.trials))
    return report


def _fuzz_trial(cfg: ScenarioConfig, rng: np.random.Generator, w: _Worst) -> None:
    N, n, layout = cfg.N, cfg.n, cfg.layout
    src, tgt = FrameSpec(cfg.frame_from), FrameSpec(cfg.frame_to)
    residual = layout.without(src.register)
    regs = residual_registers(n, src.register)

    # group action and charge sectors
    g, h = (int(x) for x in rng.integers(0, N, size=2))
    ug, uh, ugh = (global_unitary(x, layout).matrix for x in (g, h, g + h))
    w("fuzz.group_representation", "group-action", _amp(ug @ uh, ugh))
    k, l = (int(x) for x in rng.integers(0, N, size=2))
    pk, pl = charge_projector(k, layout).matrix, charge_projector(l, layout).matrix
    w("fuzz.projector_orthogonality", "charge-sectors", _amp(pk @ pl, pk if k == l else 0))
    w("fuzz.projector_completeness", "charge-sectors",
      _amp(sum(charge_projector(j, layout).matrix for j in range(N)), np.eye(layout.total_dim)))

    # twirls
    raw = random_density(layout, rng)
    rho = incoherent_twirl(raw)
    w("fuzz.twirl_idempotent", "twirl-structure", frobenius_distance(incoherent_twirl(rho), rho))
    w("fuzz.twirl_trace", "twirl-structure", abs(rho.trace() - 1))
    w("fuzz.twirl_invariant", "invariance", invariance_residual(rho))
    blocks = sum(charge_projector(j, layout).matrix @ raw.matrix @ charge_projector(j, layout).matrix
                 for j in range(N))
    w("fuzz.twirl_block_diagonal", "twirl-structure", _amp(rho.matrix, blocks))
    direct = np.array([np.trace(charge_projector(j, layout).matrix @ raw.matrix).real for j in range(N)])
    w("fuzz.twirl_keeps_weights", "charge-sectors", _amp(charge_weights(rho), direct))
    w("fuzz.twirl_positive", "twirl-structure", max(0.0, -float(np.linalg.eigvalsh(rho.matrix)[0])))

    # reduce / reconstruct
    k = int(rng.integers(0, N))
    psi = _unit_in_sector(layout, k, rng)
    phi = _unit_in_sector(layout, k, rng)
    rp, rf = reduce(psi, src), reduce(phi, src)
    w("fuzz.reduce_isometric_on_sector", "relative-states", abs(psi.inner(phi) - rp.body.inner(rf.body)))
    w("fuzz.reconstruct_roundtrip", "perspective-neutral", vector_distance(reconstruct(rp, k), psi))
    rel = RelativeState(src, regs, random_state(residual, rng))
    w("fuzz.reduce_after_reconstruct", "perspective-neutral", vector_distance(reduce(reconstruct(rel, k), src).body, rel.body))

    # perspective-neutral change
    rel2 = RelativeState(src, regs, random_state(residual, rng))
    a, b = pn_change(rel, tgt), pn_change(rel2, tgt)
    w("fuzz.pn_inner_products", "perspective-neutral", abs(rel.body.inner(rel2.body) - a.body.inner(b.body)))
    w("fuzz.pn_inverse", "perspective-neutral", vector_distance(pn_change(a, src).body, rel.body))

    # relativization
    T, S = random_operator(residual, rng), random_operator(residual, rng)
    yt, ys = relativize(T, src), relativize(S, src)
    lhs = np.trace(rho.matrix @ yt.matrix)
    rhs = np.trace(reduce(rho, src).density().matrix @ T.matrix)
    w("fuzz.duality", "relativization", abs(lhs - rhs) / max(1.0, np.linalg.norm(T.matrix)))
    w("fuzz.relativize_multiplicative", "relativization",
      frobenius_distance(relativize(S @ T, src), ys @ yt) / max(1.0, np.linalg.norm(S.matrix) * np.linalg.norm(T.matrix)))
    w("fuzz.relativize_adjoint", "relativization", frobenius_distance(relativize(T.dag, src), yt.dag))
    w("fuzz.relativize_unital", "relativization",
      _amp(relativize(Operator.identity(residual), src).matrix, np.eye(layout.total_dim)))
    w("fuzz.relativize_invariant", "relativization", invariance_residual(yt))

    # extra particle
    x = extract_extra_particle(psi, src)
    want = insert_register(rp.body, src.register, src.charge_state(k, N))
    w("fuzz.disentangler_factorization", "extra-particle", vector_distance(disentangler(src, layout).apply(psi), want))
    y = ep_change(x, tgt)
    w("fuzz.ep_global_consistency", "extra-particle", vector_distance(y.relative.body, reduce(psi, tgt).body))
    w("fuzz.ep_keeps_charge", "extra-particle", abs(y.charge - k))
    w("fuzz.ep_inverse", "extra-particle", vector_distance(ep_change(y, src).relative.body, x.relative.body))
    if N == 2 and src.has_default_seed:
        z = ep_change(x, tgt, route="controlled")
        w("fuzz.ep_routes_agree", "extra-particle", vector_distance(z.relative.body, y.relative.body))
    if k == 0:
        w("fuzz.ep_sector0_matches_pn", "extra-particle",
          vector_distance(y.relative.body, pn_change(rp, tgt).body))

    # dephasing and the operational change
    rel_rho = reduce(rho, src)
    cls = op_canonicalize(rel_rho, tgt.register)
    pos = rel_rho.position(tgt.register)
    blocks = tuple(random_hermitian(RegisterLayout.uniform(N, n - 2), rng).matrix if n > 2
                   else rng.standard_normal((1, 1)) for _ in range(N))
    F = framed_to_operator(FramedObservable(pos, blocks), N)
    w("fuzz.dephasing_keeps_framed_expectations", "dephasing",
      abs(expectation(cls.representative, F) - expectation(rel_rho, F)))
    d2 = dephase_toward_frame(cls.representative, tgt.register)
    w("fuzz.dephasing_idempotent", "dephasing", frobenius_distance(d2.density(), cls.representative.density()))
    w("fuzz.dephasing_positive", "dephasing",
      max(0.0, -float(np.linalg.eigvalsh(cls.representative.density().matrix)[0])))
    moved = op_change(cls)
    w("fuzz.op_inverse", "operational", op_change(moved).distance(cls))
    direct_cls = op_canonicalize(reduce(rho, tgt), src.register)
    w("fuzz.op_global_consistency", "operational", moved.distance(direct_cls))
    other = op_canonicalize(RelativeState(src, regs, random_density(residual, rng)), tgt.register)
    w("fuzz.op_isometric", "operational",
      abs(op_change(other).distance(moved) - other.distance(cls)))

    # all three routes at once
    paths = frame_change_paths(rho, src.register, tgt.register)
    w("fuzz.paths_agree", "frame-change-paths", paths.worst())
    w("fuzz.pn_rejects_mixed_sectors", "perspective-neutral",
      float(paths.ok("perspective-neutral") != (paths.weights[0] >= 1 - 1e-8)))

    # tensor and partial trace
    ra, rb = random_density(RegisterLayout((N,)), rng), random_density(layout.without(0), rng)
    w("fuzz.partial_trace_product", "plumbing", frobenius_distance(partial_trace(tensor(ra, rb), range(1, n)), ra))
    ops = [random_operator(RegisterLayout((N,)), rng) for _ in range(2)]
    combo = Operator(ops[0].layout, ops[0].matrix + 2 * ops[1].matrix)
    w("fuzz.span_rank", "plumbing", abs(span_rank([*ops, combo]) - 2))
