"""Full-chain construction and digital (Trotter) composition of driven steps.

Sites are 1-based. In the ZXZ scheme every step drives one sublattice: each
driven site ``k`` is the centre of a three-site unit ``(k-1, k, k+1)`` that
evolves under the optimised single-unit drive. On a ring with even ``N`` the
units of one step tile every bond exactly once and mutually commute. On an
open chain the end spins are never centres, so one of the two steps leaves
the outermost bonds outside every unit; by default those idle bonds are
switched off for that step (``idle_bonds="off"``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .design import DriveProtocol
from .errors import ConfigError, DimensionError
from .floquet import extract, relative_distance
from .pauli import PauliString, PauliSum, to_matrix
from .prop import (
    Cosine,
    RampedDrive,
    StepControl,
    TimeDependentHamiltonian,
    evolve,
    evolve_state,
    exp_hermitian,
)

PARITIES = ("even", "odd")


@dataclass(frozen=True)
class ChainSpec:
    n: int
    boundary: str = "periodic"
    coupling: str = "ising"
    J: float = 1.0

    def __post_init__(self):
        if self.n < 3:
            raise DimensionError(f"chain needs at least 3 sites, got {self.n}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.coupling not in ("ising", "xy"):
            raise ValueError(f"unknown coupling {self.coupling!r}")

    @property
    def bonds(self) -> list[tuple[int, int]]:
        out = [(k, k + 1) for k in range(1, self.n)]
        if self.boundary == "periodic":
            out.append((self.n, 1))
        return out

    def neighbours(self, k: int) -> tuple[int, int]:
        left, right = k - 1, k + 1
        if self.boundary == "periodic":
            left = left if left >= 1 else self.n
            right = right if right <= self.n else 1
        return left, right


def coupling_hamiltonian(spec: ChainSpec, bonds: Sequence[tuple[int, int]] | None = None) -> PauliSum:
    bonds = spec.bonds if bonds is None else bonds
    letters = ("Z",) if spec.coupling == "ising" else ("X", "Y")
    terms = [
        (PauliString.from_sites(spec.n, {a: ch, b: ch}), spec.J) for a, b in bonds for ch in letters
    ]
    return PauliSum(spec.n, terms)


def drive_centers(spec: ChainSpec, parity: str) -> list[int]:
    if parity not in PARITIES:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    rem = 0 if parity == "even" else 1
    sites = [k for k in range(1, spec.n + 1) if k % 2 == rem]
    if spec.boundary == "open":
        sites = [k for k in sites if 1 < k < spec.n]
    return sites


def _unit_bonds(spec: ChainSpec, k: int) -> list[tuple[int, int]]:
    left, right = spec.neighbours(k)
    return [(left, k), (k, right)]


def step_bonds(spec: ChainSpec, parity: str) -> list[tuple[int, int]]:
    """Bonds that belong to a driven unit in the given step."""
    out = []
    for k in drive_centers(spec, parity):
        out.extend(_unit_bonds(spec, k))
    return out


def _check_zxz(spec: ChainSpec):
    if spec.coupling != "ising":
        raise ValueError("the ZXZ scheme needs Ising coupling")
    if spec.boundary == "periodic" and spec.n % 2:
        raise DimensionError("a ring needs an even number of sites for alternating steps")


def subsystem_hamiltonians(spec: ChainSpec, parity: str) -> list[tuple[PauliSum, PauliSum]]:
    """``(static, drive operator)`` of every three-site unit in one step."""
    _check_zxz(spec)
    out = []
    for k in drive_centers(spec, parity):
        static = coupling_hamiltonian(spec, _unit_bonds(spec, k))
        out.append((static, PauliSum.from_sites(spec.n, {k: "X"})))
    return out


def build_step(spec: ChainSpec, parity: str, p: DriveProtocol,
               idle_bonds: str = "off") -> TimeDependentHamiltonian:
    """Ising chain with the drive ``f(t) X_k`` on every centre of one sublattice."""
    _check_zxz(spec)
    if idle_bonds not in ("on", "off"):
        raise ValueError("idle_bonds must be 'on' or 'off'")
    centers = drive_centers(spec, parity)
    if idle_bonds == "on" or spec.boundary == "periodic":
        static = coupling_hamiltonian(spec)
    else:
        static = coupling_hamiltonian(spec, sorted(set(step_bonds(spec, parity))))
    drive_op = PauliSum(spec.n, [(PauliString.from_sites(spec.n, {k: "X"}), 1.0) for k in centers])
    return TimeDependentHamiltonian(static, p.driven_terms(drive_op), p.period)


def zxz_hamiltonian(spec: ChainSpec, j_zxz: float) -> PauliSum:
    """``j_zxz * sum_k Z_{k-1} X_k Z_{k+1}`` over all drive centres."""
    centers = sorted(drive_centers(spec, "even") + drive_centers(spec, "odd"))
    terms = []
    for k in centers:
        left, right = spec.neighbours(k)
        terms.append((PauliString.from_sites(spec.n, {left: "Z", k: "X", right: "Z"}), j_zxz))
    return PauliSum(spec.n, terms)


def trotter(h_list: Sequence[PauliSum | np.ndarray], t: float, m: int) -> np.ndarray:
    """``(prod_j exp(-i H_j t/m))^m`` with ``H_1`` applied first."""
    if m <= 0:
        raise ValueError("m must be positive")
    mats = [to_matrix(h) if isinstance(h, PauliSum) else np.asarray(h, dtype=complex)
            for h in h_list]
    if len({m_.shape for m_ in mats}) != 1:
        raise DimensionError("Hamiltonians have different dimensions")
    step = np.eye(mats[0].shape[0], dtype=complex)
    for h in mats:
        step = exp_hermitian(h, t / m) @ step
    return np.linalg.matrix_power(step, m)


def trotter_errors(h_list, t: float, ms: Sequence[int]) -> list[float]:
    total = sum((to_matrix(h) if isinstance(h, PauliSum) else h) for h in h_list)
    exact = exp_hermitian(total, t)
    return [float(np.max(np.abs(trotter(h_list, t, m) - exact))) for m in ms]


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def cycle_propagator(spec: ChainSpec, p: DriveProtocol, sc: StepControl = StepControl(),
                     idle_bonds: str = "off") -> np.ndarray:
    """One even step followed by one odd step, duration ``2T``."""
    u_even = evolve(build_step(spec, "even", p, idle_bonds), 0.0, p.period, sc)
    u_odd = evolve(build_step(spec, "odd", p, idle_bonds), 0.0, p.period, sc)
    return u_odd @ u_even


def cycle_target(spec: ChainSpec, p: DriveProtocol) -> np.ndarray:
    """Ideal cycle: every ``Z X Z`` term acts for one period with strength ``c_zxz``."""
    return exp_hermitian(to_matrix(zxz_hamiltonian(spec, p.c_zxz)), p.period)


def stroboscopic_errors(spec: ChainSpec, p: DriveProtocol, cycles: int,
                        sc: StepControl = StepControl(), idle_bonds: str = "off",
                        norm: str = "max") -> list[float]:
    """Distance to the ideal after each of ``1..cycles`` cycles.

    ``norm="max"`` is the largest entry modulus; ``norm="op"`` the spectral
    norm, in which the error of ``k`` cycles is bounded by ``k`` times one cycle.
    """
    if norm not in ("max", "op"):
        raise ValueError(f"unknown norm {norm!r}")
    u = cycle_propagator(spec, p, sc, idle_bonds)
    target = cycle_target(spec, p)
    a = np.eye(u.shape[0], dtype=complex)
    b = a.copy()
    out = []
    for _ in range(cycles):
        a, b = u @ a, target @ b
        diff = a - b
        out.append(float(np.max(np.abs(diff)) if norm == "max" else np.linalg.norm(diff, 2)))
    return out


def stroboscopic_error(spec: ChainSpec, p: DriveProtocol, cycles: int = 1,
                       sc: StepControl = StepControl(), idle_bonds: str = "off") -> float:
    return stroboscopic_errors(spec, p, cycles, sc, idle_bonds)[-1]


# ------------------------------------------------------------ cluster state


def cluster_state(n: int) -> np.ndarray:
    """CZ on every ring edge applied to ``|+...+>``; largest amplitude made real positive."""
    if n < 3:
        raise DimensionError("cluster state needs at least 3 sites")
    idx = np.arange(2**n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1  # column k is site k+1
    parity = np.zeros(2**n, dtype=int)
    for k in range(n):
        parity += bits[:, k] * bits[:, (k + 1) % n]
    psi = (-1.0) ** parity / math.sqrt(2**n)
    psi = psi.astype(complex)
    j = int(np.argmax(np.abs(psi)))
    return psi * (abs(psi[j]) / psi[j])


def cluster_stabilizers(n: int) -> list[PauliSum]:
    spec = ChainSpec(n, "periodic")
    out = []
    for k in range(1, n + 1):
        left, right = spec.neighbours(k)
        out.append(PauliSum.from_sites(n, {left: "Z", k: "X", right: "Z"}))
    return out


@dataclass(frozen=True)
class RampSpec:
    """Ramp duration ``t_f`` in units of the drive period."""

    tf_over_T: float

    @staticmethod
    def polynomial() -> Polynomial:
        return Polynomial([0, 0, 0, 0, 35, -84, 70, -20])

    def r(self, s):
        return self.polynomial()(np.clip(np.asarray(s, dtype=float), 0.0, 1.0))


def _ramp_step(spec: ChainSpec, parity: str, p: DriveProtocol, t_f: float,
               inactive_field: bool) -> TimeDependentHamiltonian:
    drive = RampedDrive(p.omega, p.f0 * p.omega,
                        tuple(f * p.omega for f in p.harmonics), t_f)
    active = drive_centers(spec, parity)
    other = drive_centers(spec, "odd" if parity == "even" else "even")
    x_sum = lambda sites: PauliSum(spec.n, [(PauliString.from_sites(spec.n, {k: "X"}), 1.0)  # noqa: E731
                                            for k in sites])
    driven = [(x_sum(active), drive, 1.0)]
    if inactive_field:
        driven.append((x_sum(other), RampedDrive(p.omega, 0.0, (), t_f, residual_only=True), 1.0))
    return TimeDependentHamiltonian(coupling_hamiltonian(spec), driven, p.period)


def ramp_initial_state(spec: ChainSpec) -> np.ndarray:
    """Ground state of ``sum_k [X_k + J Z_k Z_{k+1}]``."""
    h = coupling_hamiltonian(spec) + PauliSum(
        spec.n, [(PauliString.from_sites(spec.n, {k: "X"}), 1.0) for k in range(1, spec.n + 1)])
    w, v = np.linalg.eigh(to_matrix(h))
    if w[1] - w[0] < 1e-9:
        raise ValueError("initial Hamiltonian has a degenerate ground state")
    return v[:, 0]


def adiabatic_prepare(p: DriveProtocol, ramp: RampSpec, n: int = 6,
                      sc: StepControl = StepControl(256, None), inactive_field: bool = True,
                      J: float = 1.0) -> float:
    """Fidelity ``|<c|psi(t_f)>|^2`` after ramping the alternating drive on.

    The active sublattice alternates every period (even first) and feels
    ``[1 - r] + r f(t)``; with ``inactive_field`` the other sublattice keeps
    the residual static field ``1 - r`` so that ``r = 0`` is the uniform
    initial Hamiltonian.
    """
    periods = ramp.tf_over_T
    if abs(periods - round(periods)) > 1e-9 or round(periods) % 2 or periods <= 0:
        raise ConfigError(f"t_f must be a positive even multiple of T, got {periods}T")
    periods = int(round(periods))
    spec = ChainSpec(n, "periodic", "ising", J)
    _check_zxz(spec)
    t_f = periods * p.period
    steps = {par: _ramp_step(spec, par, p, t_f, inactive_field) for par in PARITIES}
    psi = ramp_initial_state(spec)
    for k in range(periods):
        h = steps["even" if k % 2 == 0 else "odd"]
        psi = evolve_state(h, psi, k * p.period, (k + 1) * p.period, sc)
    return float(abs(np.vdot(cluster_state(n), psi)) ** 2)


# ---------------------------------------------------------------- XY demo


@dataclass(frozen=True)
class XYDrive:
    """Static and harmonic Z-drive amplitudes in units of ``omega``."""

    omega: float = 5.0
    f10: float = 0.05553
    f30: float = 0.05553
    f20: float = 0.88894
    f21: float = 0.75227
    f22: float = 0.61233

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega


@dataclass(frozen=True)
class XYResult:
    h_eff: PauliSum
    distance: float
    residual: float

    def chart(self) -> list[tuple[str, float]]:
        rows = [(str(s), abs(c)) for s, c in self.h_eff if not s.is_identity()]
        return sorted(rows, key=lambda r: (-r[1], r[0]))


XY_TARGET = ("XZXI", "YZYI", "IXZX", "IYZY")


def _check_decoupling(h: float, omega: float):
    ratio = h / omega
    if abs(ratio - round(ratio)) > 1e-9:
        raise ConfigError(f"decoupling field h={h} is not an integer multiple of omega={omega}")


def xy_steps_control(h: float, d: XYDrive, tol: float | None = 1e-10) -> StepControl:
    top = max(abs(h) / d.omega, 2.0) + 2.0
    spp = max(256, 32 * math.ceil(top))
    return StepControl(spp + spp % 2, tol)


def xy_step(spec: ChainSpec, d: XYDrive, h: float, which: int = 1,
            couple_decoupled: bool = True) -> TimeDependentHamiltonian:
    """Step ``which`` (1 or 2) of the four-site XY sequence.

    Step 1 engineers the three-body term on sites (1, 2, 3) while ``h Z4``
    detunes site 4; step 2 is its mirror image. With
    ``couple_decoupled=False`` the bond to the detuned spin is removed.
    """
    if spec.coupling != "xy" or spec.boundary != "open" or spec.n != 4:
        raise ValueError("the XY demo runs on an open 4-site XY chain")
    w = d.omega
    sites = (1, 2, 3, 4) if which == 1 else (4, 3, 2, 1)
    bonds = spec.bonds if couple_decoupled else [
        b for b in spec.bonds if sites[3] not in b]
    static = coupling_hamiltonian(spec, bonds) + PauliSum(4, [
        (PauliString.from_sites(4, {sites[0]: "Z"}), d.f10 * w),
        (PauliString.from_sites(4, {sites[1]: "Z"}), d.f20 * w),
        (PauliString.from_sites(4, {sites[2]: "Z"}), d.f30 * w),
        (PauliString.from_sites(4, {sites[3]: "Z"}), h),
    ])
    z_mid = PauliSum.from_sites(4, {sites[1]: "Z"})
    driven = [(z_mid, Cosine(1, w), d.f21 * w), (z_mid, Cosine(2, w), d.f22 * w)]
    return TimeDependentHamiltonian(static, driven, d.period)


def decoupling_distance(spec: ChainSpec, d: XYDrive, h: float,
                        sc: StepControl | None = None) -> float:
    """Relative distance between the step-1 effective Hamiltonians with the
    3-4 bond detuned by ``h Z4`` and with the bond removed."""
    _check_decoupling(h, d.omega)
    sc = sc or xy_steps_control(h, d)
    real = extract(evolve(xy_step(spec, d, h, 1), 0.0, d.period, sc), d.period)
    ideal = extract(evolve(xy_step(spec, d, h, 1, couple_decoupled=False), 0.0, d.period, sc),
                    d.period)
    return relative_distance(real.matrix(), ideal.matrix())


def xy_digital(spec: ChainSpec, d: XYDrive, h: float, sc: StepControl | None = None) -> XYResult:
    """Two-step sequence; effective Hamiltonian of ``U(2T)`` over ``2T``."""
    _check_decoupling(h, d.omega)
    sc = sc or xy_steps_control(h, d)
    u1 = evolve(xy_step(spec, d, h, 1), 0.0, d.period, sc)
    u2 = evolve(xy_step(spec, d, h, 2), 0.0, d.period, sc)
    e = extract(u2 @ u1, 2 * d.period)
    return XYResult(e.h_eff, decoupling_distance(spec, d, h, sc), e.residual)
