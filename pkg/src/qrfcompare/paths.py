"""Run one invariant global state through all three frame-change routes.

Each route ends with the state of the registers relative to the target frame
(or that state's operational class). The report keeps every intermediate
object so a disagreement can be pinned to a single arrow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .approaches import (
    disentangler,
    ep_change_operator,
    op_canonicalize,
    op_change,
    pn_change,
)
from .frames import FrameSpec, dephase_toward_frame, reduce, residual_registers
from .group import charge_weights
from .linalg import (
    DensityOperator,
    Operator,
    dephase_register,
    frobenius_distance,
    partial_trace,
    permute_registers,
)

#: Sector-0 weight needed before the perspective-neutral route is attempted.
PHYSICAL_WEIGHT_TOL = 1e-8

PATHS = ("extra-particle", "perspective-neutral", "operational")


@dataclass
class PathResult:
    name: str
    status: str  # "ok" or "rejected"
    reason: str = ""
    steps: list[tuple[str, np.ndarray]] = field(default_factory=list, repr=False)
    final: DensityOperator | None = field(default=None, repr=False)
    canonical: DensityOperator | None = field(default=None, repr=False)


@dataclass
class PathReport:
    source: int
    target: int
    weights: np.ndarray
    reference: DensityOperator = field(repr=False)
    reference_canonical: DensityOperator = field(repr=False)
    paths: dict[str, PathResult] = field(default_factory=dict)
    distances: dict[str, float] = field(default_factory=dict)

    def ok(self, name: str) -> bool:
        return self.paths[name].status == "ok"

    def worst(self) -> float:
        return max(self.distances.values(), default=0.0)

    def agree(self, tol: float = 1e-10) -> bool:
        return self.worst() <= tol


def _extra_particle(rho: DensityOperator, source: FrameSpec, target: FrameSpec) -> tuple[PathResult, dict[str, float]]:
    layout = rho.layout
    n = layout.n
    res = PathResult("extra-particle", "ok")
    src = rho.conjugate_by(disentangler(source, layout))
    res.steps.append(("disentangle source", src.matrix))
    front = permute_registers(src, [source.register, *residual_registers(n, source.register)])
    s = ep_change_operator(source, target, layout)
    swapped = Operator(front.layout, s.matrix @ front.matrix @ s.matrix.conj().T)
    res.steps.append(("change of extra-particle frame", swapped.matrix))
    extras = {}
    if layout.local_dim == 2 and source.has_default_seed and target.has_default_seed:
        s2 = ep_change_operator(source, target, layout, route="controlled")
        extras["extra-particle: controlled vs reconstruct operator"] = frobenius_distance(s, s2)
    # back to the global state through the target's disentangler
    order = list(range(1, n))
    order.insert(target.register, 0)
    glob = permute_registers(swapped, order).conjugate_by(disentangler(target, layout).dag)
    res.steps.append(("undo target disentangler", glob.matrix))
    extras["extra-particle: global round trip"] = frobenius_distance(glob, rho)
    res.final = DensityOperator(front.layout.without(0), partial_trace(swapped, [0]).matrix)
    return res, extras


def frame_change_paths(rho: DensityOperator, source: int = 0, target: int = 1) -> PathReport:
    """Execute the extra-particle, perspective-neutral and operational routes."""
    if source == target:
        raise ValueError("source and target frames must differ")
    n = rho.layout.n
    fs, ft = FrameSpec(source), FrameSpec(target)
    weights = charge_weights(rho)
    rel_src = reduce(rho, fs)
    rel_tgt = reduce(rho, ft)
    ref = rel_tgt.density()
    ref_can = dephase_toward_frame(rel_tgt, source).density()
    report = PathReport(source, target, weights, ref, ref_can)

    ep, extras = _extra_particle(rho, fs, ft)
    report.paths[ep.name] = ep

    pn = PathResult("perspective-neutral", "ok")
    if weights[0] < 1 - PHYSICAL_WEIGHT_TOL:
        pn.status = "rejected"
        pn.reason = (
            "state has support outside charge sector 0; the perspective-neutral map is not defined"
        )
    else:
        pn.steps.append(("reduce to source", rel_src.density().matrix))
        out = pn_change(rel_src, ft)
        pn.final = out.density()
    report.paths[pn.name] = pn

    op = PathResult("operational", "ok")
    cls = op_canonicalize(rel_src, target)
    op.steps.append(("reduce to source", rel_src.density().matrix))
    op.steps.append(("dephase on target frame", cls.representative.density().matrix))
    moved = op_change(cls)
    op.final = moved.representative.density()
    back = op_change(moved)
    extras["operational: inverse round trip"] = cls.distance(back)
    report.paths[op.name] = op

    pos = residual_registers(n, target).index(source)
    for p in report.paths.values():
        if p.final is not None:
            p.canonical = dephase_register(p.final, pos)

    for name in ("extra-particle", "perspective-neutral"):
        if report.paths[name].final is not None:
            report.distances[f"{name} vs direct reduction"] = frobenius_distance(report.paths[name].final, ref)
    for p in report.paths.values():
        if p.canonical is not None:
            report.distances[f"{p.name} vs direct class"] = frobenius_distance(p.canonical, ref_can)
    live = [p for p in report.paths.values() if p.canonical is not None]
    for a, b in combinations(live, 2):
        report.distances[f"{a.name} vs {b.name} (class)"] = frobenius_distance(a.canonical, b.canonical)
    report.distances.update(extras)
    return report

