"""Effective (Floquet) Hamiltonians from one-period propagators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .pauli import PauliSum, decompose, to_matrix
from .prop import (
    StepControl,
    TimeDependentHamiltonian,
    evolve,
    exp_hermitian,
    log_unitary,
)

CSV_COLUMNS = ("omega_over_J", "f0", "f1", "f2", "c_x", "c_zz", "c_zy", "c_zxz", "max_other")


@dataclass(frozen=True)
class EffectiveHamiltonian:
    h_eff: PauliSum
    period: float
    residual: float
    propagator: np.ndarray = field(repr=False, compare=False)

    def matrix(self) -> np.ndarray:
        return to_matrix(self.h_eff)


def extract(u: np.ndarray, period: float) -> EffectiveHamiltonian:
    """Effective Hamiltonian of a given one-period propagator."""
    h = log_unitary(u, period)
    h_eff = decompose(h, hermitian=True)
    residual = float(np.max(np.abs(exp_hermitian(to_matrix(h_eff), period) - u)))
    return EffectiveHamiltonian(h_eff, period, residual, u)


def effective_hamiltonian(h: TimeDependentHamiltonian, sc: StepControl = StepControl(),
                          period: float | None = None) -> EffectiveHamiltonian:
    period = period or h.period
    if not period:
        raise ValueError("a drive period is required")
    return extract(evolve(h, 0.0, period, sc), period)


@dataclass(frozen=True)
class CoefficientTable:
    """Projection of a 3-site effective Hamiltonian onto

    ``c_x X2 + c_zz (Z1Z2 + Z2Z3) + c_zy (Z1Y2 + Y2Z3) + c_zxz Z1X2Z3``;
    everything else, including antisymmetric parts of the paired strings,
    lands in ``other``.
    """

    c_x: float
    c_zz: float
    c_zy: float
    c_zxz: float
    other: PauliSum

    @property
    def max_other(self) -> float:
        return self.other.norm_max()

    def as_pauli_sum(self) -> PauliSum:
        named = PauliSum(3, {
            "IXI": self.c_x,
            "ZZI": self.c_zz, "IZZ": self.c_zz,
            "ZYI": self.c_zy, "IYZ": self.c_zy,
            "ZXZ": self.c_zxz,
        })
        return named + self.other

    def csv_row(self, omega: float, f_over_omega) -> dict:
        f0, f1, f2 = (list(f_over_omega) + [0.0, 0.0, 0.0])[:3]
        return dict(zip(CSV_COLUMNS, (omega, f0, f1, f2, self.c_x, self.c_zz,
                                      self.c_zy, self.c_zxz, self.max_other)))


def coefficient_table(e: EffectiveHamiltonian | PauliSum) -> CoefficientTable:
    h = e.h_eff if isinstance(e, EffectiveHamiltonian) else e
    if h.n != 3:
        raise DimensionError(f"coefficient table needs 3 sites, got {h.n}")
    terms = {str(s): c.real for s, c in h}
    pop = lambda key: terms.pop(key, 0.0)  # noqa: E731
    c_x = pop("IXI")
    c_zxz = pop("ZXZ")
    zz_a, zz_b = pop("ZZI"), pop("IZZ")
    zy_a, zy_b = pop("ZYI"), pop("IYZ")
    c_zz = 0.5 * (zz_a + zz_b)
    c_zy = 0.5 * (zy_a + zy_b)
    other = dict(terms)
    other["ZZI"] = zz_a - c_zz
    other["IZZ"] = zz_b - c_zz
    other["ZYI"] = zy_a - c_zy
    other["IYZ"] = zy_b - c_zy
    return CoefficientTable(c_x, c_zz, c_zy, c_zxz, PauliSum(3, other))


def stroboscopic_deviation(e: EffectiveHamiltonian, repetitions: int) -> list[float]:
    """``|exp(-i m H_eff T) - U(T)^m|`` for ``m = 1..repetitions``."""
    step = exp_hermitian(e.matrix(), e.period)
    u = e.propagator
    a, b = np.eye(u.shape[0]), np.eye(u.shape[0])
    out = []
    for _ in range(repetitions):
        a, b = step @ a, u @ b
        out.append(float(np.max(np.abs(a - b))))
    return out


def period_of(omega: float) -> float:
    return 2 * math.pi / omega


def relative_distance(h: np.ndarray, h_ideal: np.ndarray) -> float:
    """``|1 - tr(H H0) / tr(H0^2)|``."""
    num = np.trace(h @ h_ideal)
    den = np.trace(h_ideal @ h_ideal)
    return float(abs(1 - num / den))
