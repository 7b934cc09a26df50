"""Physical parameter maps: superconducting circuits and molecular nanomagnets.

Simulations of the nanomagnet unit are done in units of the Ising scale
``J = J_par / 4`` (angular frequency), i.e. ``hbar = J = 1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .design import DriveProtocol
from .floquet import EffectiveHamiltonian, extract, relative_distance
from .parallel import parallel_map
from .pauli import PauliString, PauliSum
from .prop import Cosine, Sine, StepControl, TimeDependentHamiltonian, evolve

MU_B_OVER_H = 13.996245e9  # Hz / T
GAUSS_PER_TESLA = 1e4
TABLE_ROW_OMEGA5 = (0.04, 1.0849517026900328, 1.2455409822710848)


@dataclass(frozen=True)
class NanomagnetParams:
    """A-B-A unit. ``J_par``, ``J_perp`` and ``omega`` are angular frequencies (rad/s).

    ``J_perp`` defaults to ``J_par / 2`` and ``omega`` to ``5 J`` with ``J = J_par / 4``.
    """

    g_A: tuple[float, float, float] = (14.2, 3.2, 0.5)
    g_B: tuple[float, float, float] = (9.3, 6.4, 4.0)
    B_z: float = 1.0
    J_par: float = 2 * math.pi * 0.3e9
    J_perp: float | None = None
    omega: float | None = None
    mu_b_over_h: float = MU_B_OVER_H

    def __post_init__(self):
        object.__setattr__(self, "g_A", tuple(self.g_A))
        object.__setattr__(self, "g_B", tuple(self.g_B))
        if self.J_perp is None:
            object.__setattr__(self, "J_perp", self.J_par / 2)
        if self.omega is None:
            object.__setattr__(self, "omega", 5 * self.J)
        ratio = self.gap_ratio
        if ratio <= 50:
            warnings.warn(f"A/B Zeeman gap is only {ratio:.1f} x J_perp; flip-flops not suppressed",
                          stacklevel=2)

    @property
    def J(self) -> float:
        return self.J_par / 4

    def larmor(self, g_z: float) -> float:
        return 2 * math.pi * g_z * self.mu_b_over_h * self.B_z

    @property
    def Omega_A(self) -> float:
        return self.larmor(self.g_A[2])

    @property
    def Omega_2(self) -> float:
        return self.larmor(self.g_B[2])

    @property
    def gap_ratio(self) -> float:
        gap = abs(self.Omega_2 - self.Omega_A)
        return math.inf if self.J_perp == 0 else gap / abs(self.J_perp)

    @property
    def product_tesla(self) -> float:
        """``(g_B^z - g_A^z) B_z``."""
        return (self.g_B[2] - self.g_A[2]) * self.B_z

    def larmor_multiples(self) -> tuple[int, int]:
        """Larmor frequencies of A and B snapped to integer multiples of omega."""
        return round(self.Omega_A / self.omega), round(self.Omega_2 / self.omega)


@dataclass(frozen=True)
class FieldAmplitudes:
    """Oscillating-field amplitudes in gauss."""

    B0x: float = 0.0
    B1x: float = 0.0
    B2x: float = 0.0
    B0y: float = 0.0
    B1y: float = 0.0
    B2y: float = 0.0

    def __post_init__(self):
        if any(v < 0 for v in self.as_tuple()):
            raise ValueError("field amplitudes must be non-negative")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.B0x, self.B1x, self.B2x, self.B0y, self.B1y, self.B2y)

    def as_dict(self) -> dict:
        keys = ("B0x_G", "B1x_G", "B2x_G", "B0y_G", "B1y_G", "B2y_G")
        return dict(zip(keys, self.as_tuple()))


def _gauss_per_rad(np_: NanomagnetParams, g: float) -> float:
    """Field (gauss) that gives ``g mu_B B / hbar = 1 rad/s``."""
    return GAUSS_PER_TESLA / (2 * math.pi * g * np_.mu_b_over_h)


def nanomagnet_fields(np_: NanomagnetParams, f0: float, f1: float, f2: float) -> FieldAmplitudes:
    """Field amplitudes for drive amplitudes ``f_i`` given in units of omega.

    ``B0 = 2 hbar f0 / (g mu_B)``, ``B1,2 = hbar f1,2 / (g mu_B)`` using the
    central-spin g factors along x and y.
    """
    gx, gy = np_.g_B[0], np_.g_B[1]
    if gx <= 0 or gy <= 0:
        raise ValueError("central-spin g factors along x and y must be positive")
    w = np_.omega
    # signs of f_i are carried by the phase of the tone; amplitudes are magnitudes
    ax, ay = _gauss_per_rad(np_, gx), _gauss_per_rad(np_, gy)
    return FieldAmplitudes(
        2 * abs(f0) * w * ax, abs(f1) * w * ax, abs(f2) * w * ax,
        2 * abs(f0) * w * ay, abs(f1) * w * ay, abs(f2) * w * ay,
    )


def drive_from_fields(np_: NanomagnetParams, fa: FieldAmplitudes) -> tuple[float, float, float]:
    """Inverse of :func:`nanomagnet_fields` from the x components (units of omega)."""
    ax = _gauss_per_rad(np_, np_.g_B[0]) * np_.omega
    return fa.B0x / (2 * ax), fa.B1x / ax, fa.B2x / ax


def superconducting_map(J_MHz: float, omega_over_J: float, protocol: DriveProtocol,
                        tau_c_us: float = 20.0) -> dict:
    """Frequencies in MHz (all ``/2pi``) for a transmon chain with ``J/2pi = J_MHz``.

    ``protocol`` amplitudes are in units of omega; the drive tones are the
    Fourier amplitudes ``f_i``; ``peak_drive_MHz`` is ``max_t |f(t)|``.
    """
    omega_MHz = omega_over_J * J_MHz
    f_MHz = [f * omega_MHz for f in protocol.f_over_omega]
    c_zxz_over_J = -protocol.f0 * omega_over_J
    j_zxz = abs(c_zxz_over_J) * J_MHz
    t = np.linspace(0, 2 * math.pi, 4097)
    peak = float(np.max(np.abs(protocol.f0 + sum(
        fj * np.cos(j * t) for j, fj in enumerate(protocol.harmonics, start=1)))))
    cycle_us = 2 / omega_MHz
    return {
        "J_MHz": J_MHz,
        "omega_MHz": omega_MHz,
        "f_MHz": f_MHz,
        "max_amplitude_MHz": max(abs(f) for f in f_MHz),
        "peak_drive_MHz": peak * omega_MHz,
        "J_zxz_MHz": j_zxz,
        "period_ns": 1e3 / omega_MHz,
        "cycle_ns": 1e3 * cycle_us,
        "tau_c_us": tau_c_us,
        "tau_c_over_cycle": tau_c_us / cycle_us,
        "strong_coupling": tau_c_us * j_zxz,
    }


def nanomagnet_map(np_: NanomagnetParams, f_over_omega=TABLE_ROW_OMEGA5) -> dict:
    fa = nanomagnet_fields(np_, *f_over_omega)
    two_pi = 2 * math.pi
    c_zxz = -f_over_omega[0] * np_.omega
    return {
        "J_MHz": np_.J / two_pi / 1e6,
        "omega_MHz": np_.omega / two_pi / 1e6,
        "J_zxz_MHz": abs(c_zxz) / two_pi / 1e6,
        **fa.as_dict(),
    }


# ------------------------------------------------------------- lab frame


def _site_op(letter: str, site: int, scale: float = 1.0) -> PauliSum:
    return PauliSum(3, {PauliString.from_sites(3, {site: letter}): scale})


def lab_frame_hamiltonian(np_: NanomagnetParams, fa: FieldAmplitudes,
                          include_crosstalk: bool = True) -> TimeDependentHamiltonian:
    """Static A-B-A Hamiltonian plus the oscillating-field drive, units of ``J``.

    Larmor frequencies are snapped to integer multiples of omega so that
    ``H(t)`` is strictly periodic. With ``include_crosstalk=False`` the field
    coupling to the A spins (sites 1 and 3) is dropped.
    """
    J = np_.J
    w = np_.omega / J
    n_a, n_b = np_.larmor_multiples()
    jp = np_.J_perp / J
    static = PauliSum(3, {
        "ZII": n_a * w / 2, "IIZ": n_a * w / 2, "IZI": n_b * w / 2,
        "ZZI": 1.0, "IZZ": 1.0,  # J_par S^z S^z = (J_par / 4) Z Z
        "XXI": jp / 2, "YYI": jp / 2, "IXX": jp / 2, "IYY": jp / 2,
    })
    gauss_to_J = 1 / (GAUSS_PER_TESLA / (2 * math.pi * np_.mu_b_over_h)) / J  # per unit g

    # (amplitude in gauss, frequency multiple, profile kind) for B_x and B_y
    tones_x = [(fa.B0x, n_b, Cosine)]
    tones_y = [(fa.B0y, n_b, Sine)]
    for alpha, (bx, by) in enumerate(((fa.B1x, fa.B1y), (fa.B2x, fa.B2y)), start=1):
        tones_x += [(bx, n_b + alpha, Cosine), (bx, n_b - alpha, Cosine)]
        tones_y += [(by, n_b + alpha, Sine), (by, n_b - alpha, Sine)]

    spins = [(2, np_.g_B)]
    if include_crosstalk:
        spins += [(1, np_.g_A), (3, np_.g_A)]
    driven = []
    for site, g in spins:
        for letter, tones, gi in (("X", tones_x, g[0]), ("Y", tones_y, g[1])):
            op = _site_op(letter, site, 0.5)  # S = sigma / 2
            for amp, k, kind in tones:
                if amp:
                    driven.append((op, kind(k, w), gi * amp * gauss_to_J))
    return TimeDependentHamiltonian(static, driven, 2 * math.pi / w)


def zeeman_matrix(np_: NanomagnetParams) -> np.ndarray:
    """Diagonal of the snapped Zeeman Hamiltonian (units of J)."""
    w = np_.omega / np_.J
    n_a, n_b = np_.larmor_multiples()
    z = np.array([1.0, -1.0])
    diag = (n_a * w / 2) * (np.kron(np.kron(z, [1, 1]), [1, 1]) + np.kron([1, 1], np.kron([1, 1], z)))
    diag = diag + (n_b * w / 2) * np.kron(np.kron([1, 1], z), [1, 1])
    return diag


def lab_steps(np_: NanomagnetParams, tol: float | None = 1e-9) -> StepControl:
    _, n_b = np_.larmor_multiples()
    spp = max(256, 32 * (abs(n_b) + 2))
    return StepControl(spp + spp % 2, tol)


def interaction_picture_effective(np_: NanomagnetParams, fa: FieldAmplitudes,
                                  include_crosstalk: bool = True,
                                  sc: StepControl | None = None) -> EffectiveHamiltonian:
    """Effective Hamiltonian of ``exp(+i H_Z T) U_lab(T)``."""
    h = lab_frame_hamiltonian(np_, fa, include_crosstalk)
    sc = sc or lab_steps(np_)
    u_lab = evolve(h, 0.0, h.period, sc)
    frame = np.exp(1j * zeeman_matrix(np_) * h.period)
    return extract(frame[:, None] * u_lab, h.period)


def crosstalk_distance(np_: NanomagnetParams, fa: FieldAmplitudes,
                       sc: StepControl | None = None) -> float:
    full = interaction_picture_effective(np_, fa, True, sc)
    ideal = interaction_picture_effective(np_, fa, False, sc)
    return relative_distance(full.matrix(), ideal.matrix())


def crosstalk_sweep(products_T, fa: FieldAmplitudes | None = None,
                    base: NanomagnetParams | None = None, sc: StepControl | None = None,
                    workers: int | None = None) -> list[tuple[float, float]]:
    """``(product_T, D)`` varying ``g_B^z`` at fixed ``B_z``.

    ``product_T`` is ``(g_B^z - g_A^z) B_z`` in tesla. Field amplitudes
    default to the omega = 5J row mapped through ``base``.
    """
    base = base or NanomagnetParams()
    fa = fa or nanomagnet_fields(base, *TABLE_ROW_OMEGA5)

    def one(x):
        g_bz = base.g_A[2] + x / base.B_z
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            p = NanomagnetParams(base.g_A, (base.g_B[0], base.g_B[1], g_bz), base.B_z,
                                 base.J_par, base.J_perp, base.omega, base.mu_b_over_h)
        return (float(x), crosstalk_distance(p, fa, sc))

    return parallel_map(one, list(products_T), workers)
