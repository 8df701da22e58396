"""Verification reports: records, JSON (de)serialization and text rendering.

JSON layout (stable field names)::

    {
      "config": {...},
      "checks": [{"id", "anchor", "status", "residual", "witness"}, ...],
      "summary": {"pass": int, "fail": int, "flagged": int},
      "discrepancies": [{"id", "kind", "printed", "computed", "note"}, ...],
      "table": [{"state", "frame", "approach", "status", "value"}, ...],
      "frameworks": [{"approach", "physical states", "frame change",
                      "distinguishes global states", "evidence"}, ...]
    }

Complex amplitudes inside witnesses are ``[re, im]`` pairs. Checks are sorted
by id, so equal inputs always give byte-identical output.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .linalg import EPS

STATUSES = ("pass", "fail", "flagged")


@dataclass
class Check:
    id: str
    anchor: str
    status: str
    residual: float
    witness: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")


@dataclass
class Discrepancy:
    id: str
    kind: str
    printed: str
    computed: str
    note: str


@dataclass
class VerificationReport:
    config: dict[str, Any]
    checks: list[Check] = field(default_factory=list)
    discrepancies: list[Discrepancy] = field(default_factory=list)
    table: list[dict[str, Any]] = field(default_factory=list)
    frameworks: list[dict[str, Any]] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        if any(c.id == check.id for c in self.checks):
            raise ValueError(f"duplicate check id {check.id!r}")
        self.checks.append(check)
        return check

    @property
    def summary(self) -> dict[str, int]:
        return {s: sum(c.status == s for c in self.checks) for s in STATUSES}

    def promote_flags(self) -> None:
        """Strict mode: a flagged discrepancy counts as a failure."""
        for c in self.checks:
            if c.status == "flagged":
                c.status = "fail"

    def exit_code(self) -> int:
        return 1 if self.summary["fail"] else 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config,
            "checks": [asdict(c) for c in sorted(self.checks, key=lambda c: c.id)],
            "summary": self.summary,
            "discrepancies": [asdict(d) for d in sorted(self.discrepancies, key=lambda d: d.id)],
            "table": self.table,
            "frameworks": self.frameworks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> VerificationReport:
        return cls(
            config=data["config"],
            checks=[Check(**c) for c in data["checks"]],
            discrepancies=[Discrepancy(**d) for d in data.get("discrepancies", [])],
            table=list(data.get("table", [])),
            frameworks=list(data.get("frameworks", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> VerificationReport:
        return cls.from_dict(json.loads(text))


def check(id: str, anchor: str, residual: float, tol: float, **witness: Any) -> Check:
    """A pass/fail record; residual must not exceed ``tol``."""
    residual = float(residual)
    if math.isnan(residual):
        raise ValueError(f"check {id} produced a NaN residual")
    return Check(id, anchor, "pass" if residual <= tol else "fail", residual, jsonable(witness))


def jsonable(x: Any) -> Any:
    """Convert numpy scalars/arrays to JSON types; complex numbers become [re, im]."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


# rendering -------------------------------------------------------------------

_SQ2 = math.sqrt(2)
# magnitude -> (unicode, ascii) divisor suffix
_EXACT = [
    (1.0, ("", "")),
    (1 / 2, ("/2", "/2")),
    (1 / _SQ2, ("/√2", "/sqrt2")),
    (1 / (2 * _SQ2), ("/(2√2)", "/(2sqrt2)")),
]


def _exact_magnitude(m: float) -> tuple[str, str] | None:
    for value, text in _EXACT:
        if abs(m - value) < EPS:
            return text
    return None


def _label(index: Sequence[int], dims: Sequence[int]) -> str:
    # comma-separated digits once a register has more than ten levels
    sep = "" if max(dims) <= 10 else ","
    return sep.join(str(i) for i in index)


def _ket(index: Sequence[int], dims: Sequence[int], ascii: bool) -> str:
    return f"|{_label(index, dims)}>" if ascii else f"|{_label(index, dims)}⟩"


def _bra(index: Sequence[int], dims: Sequence[int], ascii: bool) -> str:
    return f"<{_label(index, dims)}|" if ascii else f"⟨{_label(index, dims)}|"


def _unit_phase(z: complex) -> str | None:
    """'+', '-', '+i', '-i' for the four exact unit phases."""
    for value, sign in ((1, "+"), (-1, "-"), (1j, "+i"), (-1j, "-i")):
        if abs(z - value) < EPS:
            return sign
    return None


def _number(z: complex) -> str:
    if abs(z.imag) < EPS:
        return f"{z.real:.12g}"
    if abs(z.real) < EPS:
        return f"{z.imag:.12g}i"
    return f"({z.real:.12g}{z.imag:+.12g}i)"


def _join(terms: list[tuple[complex, str]], ascii: bool) -> str:
    """Render Σ coeff·term, factoring a shared exact magnitude when possible."""
    minus = "-" if ascii else "−"
    if not terms:
        return "0"
    mags = [abs(c) for c, _ in terms]
    shared = _exact_magnitude(mags[0]) if np.ptp(mags) < EPS else None
    phases = [_unit_phase(c / mags[0]) for c, _ in terms] if shared else []
    if shared and all(phases):
        parts = []
        for i, ((_, t), p) in enumerate(zip(terms, phases)):
            neg = p.startswith("-")
            unit = "i" if p.endswith("i") else ""
            if i == 0:
                parts.append(f"{minus if neg else ''}{unit}{t}")
            else:
                parts.append(f" {minus if neg else '+'} {unit}{t}")
        body = "".join(parts)
        suffix = shared[1] if ascii else shared[0]
        if not suffix:
            return body
        return f"({body}){suffix}" if len(terms) > 1 else f"{body}{suffix}"
    out = []
    for i, (c, t) in enumerate(terms):
        exact = _exact_magnitude(abs(c))
        phase = _unit_phase(c / abs(c))
        if exact is not None and phase is not None:
            neg = phase.startswith("-")
            unit = "i" if phase.endswith("i") else ""
            coeff = "1" + (exact[1] if ascii else exact[0]) if exact[0] else ""
            text = f"{unit}{coeff} {t}".strip() if (coeff or unit) else t
        else:
            neg = False
            text = f"{_number(c)} {t}"
        if i == 0:
            out.append(f"{minus if neg else ''}{text}")
        else:
            out.append(f" {minus if neg else '+'} {text}")
    return "".join(out)


def render_ket(amplitudes: np.ndarray, dims: Sequence[int], ascii: bool = False) -> str:
    """E.g. ``(|01⟩ − |11⟩)/√2``; exact forms for the common dyadic magnitudes."""
    amps = np.asarray(amplitudes, dtype=complex).ravel()
    terms = [
        (complex(a), _ket(np.unravel_index(i, tuple(dims)), dims, ascii))
        for i, a in enumerate(amps)
        if abs(a) > EPS
    ]
    return _join(terms, ascii)


def render_density(matrix: np.ndarray, dims: Sequence[int], ascii: bool = False) -> str:
    """Render an operator as a sum of ``|i⟩⟨j|`` terms; pure states print as ket-bras."""
    m = np.asarray(matrix, dtype=complex)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    if np.allclose(m, m.conj().T, atol=EPS) and abs(w[-1] - 1) < EPS and abs(np.trace(m) - 1) < EPS:
        vec = v[:, -1]
        lead = vec[np.argmax(np.abs(vec) > EPS)]
        vec = vec * (abs(lead) / lead)
        k = render_ket(vec, dims, ascii)
        return f"P[{k}]"
    terms = []
    d = m.shape[0]
    for i in range(d):
        for j in range(d):
            if abs(m[i, j]) > EPS:
                ii = np.unravel_index(i, tuple(dims))
                jj = np.unravel_index(j, tuple(dims))
                terms.append((complex(m[i, j]), _ket(ii, dims, ascii) + _bra(jj, dims, ascii)))
    return _join(terms, ascii)


# text output -----------------------------------------------------------------


def render_text(report: VerificationReport, ascii: bool = False) -> str:
    lines = []
    cfg = ", ".join(f"{k}={v}" for k, v in sorted(report.config.items()))
    lines.append(f"config: {cfg}")
    if report.table:
        lines.append("")
        lines.extend(_table(report.table, ["state", "frame", "approach", "status", "value"]))
    if report.frameworks:
        lines.append("")
        lines.extend(_table(report.frameworks, list(report.frameworks[0])))
    if report.checks:
        lines.append("")
        width = max(len(c.id) for c in report.checks)
        for c in sorted(report.checks, key=lambda c: c.id):
            lines.append(f"{c.status.upper():7s} {c.id:<{width}}  residual={c.residual:.3e}  [{c.anchor}]")
    if report.discrepancies:
        lines.append("")
        lines.append("discrepancies:")
        for d in sorted(report.discrepancies, key=lambda d: d.id):
            lines.append(f"  - {d.id} ({d.kind}): printed {d.printed}; computed {d.computed}. {d.note}")
    s = report.summary
    lines.append("")
    lines.append(f"summary: {s['pass']} pass, {s['fail']} fail, {s['flagged']} flagged")
    text = "\n".join(lines) + "\n"
    if ascii:
        text = _asciify(text)
    return text


_ASCII = {
    "⟩": ">", "⟨": "<", "√": "sqrt", "−": "-", "∓": "-/+", "±": "+/-", "⊗": "(x)",
    "ψ": "psi", "ρ": "rho", "½": "1/2", "⁰": "0", "¹": "1", "→": "->",
}


def _asciify(text: str) -> str:
    for a, b in _ASCII.items():
        text = text.replace(a, b)
    # anything left over is escaped rather than dropped
    return text.encode("ascii", "backslashreplace").decode("ascii")


def _table(rows: Iterable[dict[str, Any]], cols: list[str]) -> list[str]:
    """Aligned columns; the last column is left ragged."""
    rows = list(rows)
    widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in cols[:-1]}

    def line(r: dict[str, Any]) -> str:
        return "  ".join(f"{str(r.get(c, '')):<{widths[c]}}" for c in cols[:-1]) + f"  {r.get(cols[-1], '')}"

    head = line({c: c for c in cols})
    return [head, "-" * len(head.rstrip()), *(line(r) for r in rows)]


def emit_report(report: VerificationReport, fmt: str = "text", path: str | Path | None = None, ascii: bool = False) -> None:
    """Write the report as text or JSON to ``path`` (stdout when None)."""
    if fmt == "json":
        text = report.to_json()
    elif fmt == "text":
        text = render_text(report, ascii=ascii)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
