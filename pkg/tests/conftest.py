from __future__ import annotations

from functools import reduce as _fold

import numpy as np
import pytest

X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)
S2 = 1 / np.sqrt(2)


def kron(*ms):
    return _fold(np.kron, ms)


def ket(bits: str, d: int = 2) -> np.ndarray:
    """Computational basis vector built from single-register basis vectors."""
    return kron(*(np.eye(d, dtype=complex)[int(b)] for b in bits))


def shift(d: int, p: int = 1) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    for i in range(d):
        m[(i + p) % d, i] = 1
    return m


def psi0_oracle() -> np.ndarray:
    return 0.5 * (ket("001") + ket("110") - ket("100") - ket("011"))


def psi1_oracle() -> np.ndarray:
    return 0.5 * (ket("001") - ket("110") + ket("100") - ket("011"))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, printed after the run
CRITERIA: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    CRITERIA[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
