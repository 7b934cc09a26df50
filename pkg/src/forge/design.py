"""Drive design for the three-spin unit.

The unit is ``J (Z1Z2 + Z2Z3) + f(t) X2`` with
``f(t) = omega * (f0 + sum_j f_j cos(j omega t))``. Because Z1 and Z3 are
conserved, the dynamics splits into three conditioned single-qubit problems
``f X + 2J Z`` (neighbours up-up), ``f X - 2J Z`` (down-down) and ``f X``
(anti-aligned). Asking for a pure ``c Z1X2Z3`` effective term fixes
``f0 = -c/omega``; the harmonics are then tuned until the up-up propagator
over one period equals ``exp(-i c X T)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionError, ForgeError
from .floquet import coefficient_table, effective_hamiltonian
from .parallel import parallel_map
from .pauli import PauliSum
from .prop import (
    Constant,
    Cosine,
    StepControl,
    TimeDependentHamiltonian,
    delta_pulse,
    evolve,
    exp_hermitian,
)

SUCCESS_THRESHOLD = 1e-16
OBJECTIVE_STEPS = StepControl(2048, None)
SCAN_STEPS = StepControl(512, None)

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DriveProtocol:
    """Cosine Fourier drive; ``f0`` and ``harmonics`` are in units of ``omega``."""

    omega: float
    f0: float
    harmonics: tuple[float, ...] = ()
    sites: tuple[int, ...] = (2,)

    def __post_init__(self):
        object.__setattr__(self, "harmonics", tuple(float(x) for x in self.harmonics))
        object.__setattr__(self, "sites", tuple(self.sites))
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @classmethod
    def for_target(cls, omega: float, c_target: float, harmonics: Sequence[float],
                   sites: Sequence[int] = (2,)) -> "DriveProtocol":
        return cls(omega, -c_target / omega, tuple(harmonics), tuple(sites))

    @classmethod
    def from_f_over_omega(cls, omega: float, f: Sequence[float], sites=(2,)) -> "DriveProtocol":
        return cls(omega, f[0], tuple(f[1:]), tuple(sites))

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    @property
    def c_zxz(self) -> float:
        return -self.f0 * self.omega

    @property
    def f_over_omega(self) -> list[float]:
        return [self.f0, *self.harmonics]

    def value(self, t):
        """``f(t)`` in absolute units."""
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.f0 * self.omega)
        for j, fj in enumerate(self.harmonics, start=1):
            out = out + fj * self.omega * np.cos(j * self.omega * t)
        return out

    def driven_terms(self, op: PauliSum, scale: float = 1.0):
        """``(op, profile, amplitude)`` entries realising ``scale * f(t) * op``."""
        terms = [(op, Constant(), scale * self.f0 * self.omega)]
        for j, fj in enumerate(self.harmonics, start=1):
            terms.append((op, Cosine(j, self.omega), scale * fj * self.omega))
        return terms

    def scaled(self, factors: Sequence[float]) -> "DriveProtocol":
        """Harmonics multiplied elementwise by ``factors``."""
        return replace(self, harmonics=tuple(f * s for f, s in zip(self.harmonics, factors)))


def three_site_hamiltonian(J: float, p: DriveProtocol) -> TimeDependentHamiltonian:
    if p.sites != (2,):
        raise DimensionError(f"the three-site unit is driven on site 2 only, got {p.sites}")
    static = PauliSum(3, {"ZZI": J, "IZZ": J})
    return TimeDependentHamiltonian(static, p.driven_terms(PauliSum.single("IXI")), p.period)


@dataclass(frozen=True)
class ReducedProblem:
    h_plus: TimeDependentHamiltonian
    h_minus: TimeDependentHamiltonian
    h_zero: TimeDependentHamiltonian

    def propagators(self, sc: StepControl = StepControl()):
        t = self.h_plus.period
        return tuple(evolve(h, 0.0, t, sc) for h in (self.h_plus, self.h_minus, self.h_zero))


def reduce(J: float, p: DriveProtocol) -> ReducedProblem:
    if p.sites != (2,):
        raise DimensionError(f"reduction needs the drive on the central site, got {p.sites}")
    x = PauliSum.single("X")

    def conditioned(bias):
        return TimeDependentHamiltonian(PauliSum(1, {"Z": bias}), p.driven_terms(x), p.period)

    return ReducedProblem(conditioned(2 * J), conditioned(-2 * J), conditioned(0.0))


def su2_extract(u: np.ndarray) -> np.ndarray:
    """Generator ``(a_x, a_y, a_z)`` with ``U = exp(-i a.sigma)``, ``|a| <= pi``."""
    u = np.asarray(u, dtype=complex)
    if abs(np.linalg.det(u) - 1) > 1e-10:
        raise ValueError("su2_extract needs det U = 1")
    c = 0.5 * np.trace(u).real
    v = np.array([(0.5j * np.trace(s @ u)).real for s in (_X, _Y, _Z)])
    s = np.linalg.norm(v)
    theta = math.atan2(s, c)
    if theta < 1e-12:
        return np.zeros(3)
    if math.pi - theta < 1e-6:
        raise ForgeError(f"rotation angle {theta:.9f} too close to pi: axis is ambiguous")
    return theta * v / s


@dataclass(frozen=True)
class ObjectiveValue:
    value: float
    d_x: float
    d_z: float


def objective(*harmonics: float, omega: float, c_target: float, J: float = 1.0,
              sc: StepControl = OBJECTIVE_STEPS) -> ObjectiveValue:
    """Squared deviation of the up-up propagator from ``exp(-i c_target X T)``.

    ``harmonics`` are the cosine amplitudes in units of ``omega``. With
    ``U_+(T) = exp(-i (a_x X + a_y Y + a_z Z))`` the deviations are
    ``d_x = a_x/T - c_target`` and ``d_z = a_z/T``.
    """
    p = DriveProtocol.for_target(omega, c_target, harmonics)
    h_plus = reduce(J, p).h_plus
    a = su2_extract(evolve(h_plus, 0.0, p.period, sc))
    d_x = a[0] / p.period - c_target
    d_z = a[2] / p.period
    return ObjectiveValue(d_x**2 + d_z**2, d_x, d_z)


@dataclass(frozen=True)
class OptimizationResult:
    protocol: DriveProtocol
    objective: float
    d_x: float
    d_z: float
    evaluations: int
    converged: bool
    seed: tuple[float, ...] = ()

    def report(self, J: float = 1.0) -> dict:
        return {
            "omega_over_J": self.protocol.omega / J,
            "c_target_over_J": self.protocol.c_zxz / J,
            "f_over_omega": self.protocol.f_over_omega,
            "dx": self.d_x,
            "dz": self.d_z,
            "objective": self.objective,
            "evaluations": self.evaluations,
            "converged": self.converged,
        }


def default_seeds(n_harmonics: int = 2, points: int = 5, span: float = 3.0):
    axis = np.linspace(-span, span, points)
    grids = np.meshgrid(*([axis] * n_harmonics), indexing="ij")
    return [tuple(float(g) for g in row) for row in np.stack(grids, -1).reshape(-1, n_harmonics)]


def _minimize_from(seed, omega, c_target, J, sc, xatol):
    count = 0

    def fun(x):
        nonlocal count
        count += 1
        try:
            return objective(*x, omega=omega, c_target=c_target, J=J, sc=sc).value
        except ForgeError:
            # rotation angle at pi: far from any optimum
            return 1e6

    res = minimize(fun, np.asarray(seed, dtype=float), method="Nelder-Mead",
                   options={"xatol": xatol, "fatol": 1e-26, "maxfev": 4000, "maxiter": 4000})
    x = tuple(float(v) for v in res.x)
    ov = objective(*x, omega=omega, c_target=c_target, J=J, sc=sc)
    return OptimizationResult(
        DriveProtocol.for_target(omega, c_target, x), ov.value, ov.d_x, ov.d_z,
        count, ov.value < SUCCESS_THRESHOLD, tuple(seed),
    )


def optimize(omega: float, c_target: float, J: float = 1.0,
             seeds: Sequence[Sequence[float]] | None = None, n_harmonics: int = 2,
             sc: StepControl = OBJECTIVE_STEPS, xatol: float = 1e-10,
             workers: int | None = None) -> OptimizationResult:
    """Nelder-Mead multi-start over the harmonic amplitudes (units of omega).

    Seeds default to a 5-point-per-axis grid over [-3, 3]. The best result
    wins; equal objectives are broken by the lexicographically smaller
    amplitudes. ``converged`` is False when no start gets below
    ``SUCCESS_THRESHOLD``.
    """
    seeds = list(seeds) if seeds is not None else default_seeds(n_harmonics)
    if not seeds:
        raise ValueError("need at least one seed")
    results = parallel_map(lambda s: _minimize_from(s, omega, c_target, J, sc, xatol),
                           seeds, workers)
    return min(results, key=lambda r: (r.objective, r.protocol.harmonics))


def robustness_scan(p: DriveProtocol, eps1: Sequence[float], eps2: Sequence[float],
                    J: float = 1.0, sc: StepControl = SCAN_STEPS,
                    workers: int | None = None) -> list[tuple[float, float, float, float]]:
    """``(eps1, eps2, |c_x|, |c_zz|)`` with ``f1 -> f1 (1 + eps1)``, ``f2 -> f2 (1 + eps2)``.

    Each point is a full three-spin effective Hamiltonian.
    """
    points = [(float(a), float(b)) for a in eps1 for b in eps2]

    def one(pt):
        q = p.scaled([1 + pt[0], 1 + pt[1]])
        table = coefficient_table(effective_hamiltonian(three_site_hamiltonian(J, q), sc))
        return (pt[0], pt[1], abs(table.c_x), abs(table.c_zz))

    return parallel_map(one, points, workers)


def default_robustness_grid(points: int = 41, lo: float = 1e-5, hi: float = 1e-1) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), points)


@dataclass(frozen=True)
class EchoResult:
    period: float
    analytic: tuple[np.ndarray, np.ndarray, np.ndarray]
    numeric: tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def max_deviation(self) -> float:
        return max(float(np.max(np.abs(a - b))) for a, b in zip(self.analytic, self.numeric))


def echo_oracle(J: float, lam: float, sc: StepControl = StepControl()) -> EchoResult:
    """Hard pulse of area ``lam`` at ``3 pi / 4J`` inside a window ``T = pi/J``.

    Returns ``(U_+, U_0, U_-)``, analytic and propagated with a square pulse
    of width ``T/10^4``.
    """
    period = math.pi / J
    pulse = delta_pulse(3 * math.pi / (4 * J), lam, period)
    x = PauliSum.single("X")

    def propagate(bias):
        h = TimeDependentHamiltonian(PauliSum(1, {"Z": bias}), [(x, pulse, 1.0)], period)
        return evolve(h, 0.0, period, sc)

    flip = exp_hermitian(-lam * _X)  # exp(+i lam X)
    keep = exp_hermitian(lam * _X)
    analytic = (flip, keep, flip)
    numeric = (propagate(2 * J), propagate(0.0), propagate(-2 * J))
    return EchoResult(period, analytic, numeric)
