"""Dense propagation kernels.

Time-ordered propagators are built from exponential steps ``exp(-i G)`` with
a Hermitian step generator ``G``, so every scheme is unitary by construction:

* ``magnus6`` (default): sixth-order Magnus step on three Gauss-Legendre nodes.
* ``magnus4``: fourth-order Magnus step on two Gauss-Legendre nodes,
  ``G = dt/2 (H1 + H2) - i sqrt(3)/12 dt^2 [H2, H1]``.
* ``midpoint``: second-order ``G = H(t_mid) dt``.

Steps are exponentiated in batches and multiplied by a pairwise tree
reduction, which keeps round-off growth logarithmic in the step count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Protocol, Sequence

import numpy as np
from scipy.linalg import schur

from .errors import BranchError, ConvergenceError, DimensionError, HermiticityError, UnitarityError
from .pauli import PauliSum, to_matrix

BRANCH_MARGIN = 1e-6
PULSE_WIDTH_FRACTION = 1e-4
_GAUSS = math.sqrt(3) / 6
_MAGNUS_C = math.sqrt(3) / 12
_GAUSS3 = math.sqrt(15) / 10
SCHEMES = ("magnus6", "magnus4", "midpoint")
_CHUNK_ELEMENTS = 2**22


# ---------------------------------------------------------------- profiles


class TimeProfile(Protocol):
    def __call__(self, t: np.ndarray) -> np.ndarray: ...

    def breakpoints(self, t0: float, t1: float) -> list[float]: ...


@dataclass(frozen=True)
class Constant:
    def __call__(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def breakpoints(self, t0, t1):
        return []


@dataclass(frozen=True)
class Cosine:
    """``cos(k * omega * t)``."""

    k: int
    omega: float

    def __call__(self, t):
        return np.cos(self.k * self.omega * np.asarray(t, dtype=float))

    def breakpoints(self, t0, t1):
        return []


@dataclass(frozen=True)
class Sine:
    """``sin(k * omega * t)``."""

    k: int
    omega: float

    def __call__(self, t):
        return np.sin(self.k * self.omega * np.asarray(t, dtype=float))

    def breakpoints(self, t0, t1):
        return []


@dataclass(frozen=True)
class SquarePulse:
    """Finite-width stand-in for ``area * delta(t - t0)``: height ``area/width``
    on ``[t0 - width/2, t0 + width/2]``."""

    t0: float
    area: float
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("pulse width must be positive")

    @property
    def edges(self) -> tuple[float, float]:
        return self.t0 - self.width / 2, self.t0 + self.width / 2

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.edges
        return np.where((t >= lo) & (t <= hi), self.area / self.width, 0.0)

    def breakpoints(self, t0, t1):
        return [e for e in self.edges if t0 < e < t1]


def delta_pulse(t0: float, area: float, period: float) -> SquarePulse:
    return SquarePulse(t0, area, period * PULSE_WIDTH_FRACTION)


def ramp_polynomial(s):
    """Smooth step 35s^4 - 84s^5 + 70s^6 - 20s^7 clipped to [0, 1]."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    return s**4 * (35 + s * (-84 + s * (70 - 20 * s)))


@dataclass(frozen=True)
class RampedDrive:
    """Drive envelope ``[1 - r(t/t_f)] + r(t/t_f) * f(t)``.

    ``f(t) = f0 + sum_j harmonics[j-1] cos(j omega t)`` in absolute units.
    With ``residual_only`` the profile is just ``1 - r(t/t_f)``, the static
    field left on a sublattice that is not being driven.
    """

    omega: float
    f0: float
    harmonics: tuple[float, ...]
    t_f: float
    residual_only: bool = False

    def drive(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.f0)
        for j, fj in enumerate(self.harmonics, start=1):
            out = out + fj * np.cos(j * self.omega * t)
        return out

    def __call__(self, t):
        r = ramp_polynomial(np.asarray(t, dtype=float) / self.t_f)
        if self.residual_only:
            return 1.0 - r
        return (1.0 - r) + r * self.drive(t)

    def breakpoints(self, t0, t1):
        return [self.t_f] if t0 < self.t_f < t1 else []


# ------------------------------------------------------------- hamiltonian


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """``H(t) = static + sum_j amplitude_j * profile_j(t) * op_j``."""

    static: PauliSum
    driven: tuple[tuple[PauliSum, TimeProfile, float], ...] = ()
    period: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "driven", tuple(self.driven))
        if not self.static.is_hermitian():
            raise HermiticityError("static part is not Hermitian")
        for op, _, _ in self.driven:
            if op.n != self.static.n:
                raise DimensionError("driven operator has wrong qubit count")
            if not op.is_hermitian():
                raise HermiticityError("driven operator is not Hermitian")

    @property
    def n(self) -> int:
        return self.static.n

    @property
    def dim(self) -> int:
        return 2**self.n

    @cached_property
    def _static_matrix(self) -> np.ndarray:
        return to_matrix(self.static)

    @cached_property
    def _driven_matrices(self) -> list[np.ndarray]:
        return [amp * to_matrix(op) for op, _, amp in self.driven]

    def matrices(self, t) -> np.ndarray:
        """Dense ``H(t)`` for an array of times, shape ``(len(t), d, d)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.broadcast_to(self._static_matrix, (t.size, self.dim, self.dim)).copy()
        for (_, profile, _), m in zip(self.driven, self._driven_matrices):
            out += profile(t)[:, None, None] * m
        return out

    def matrix(self, t: float) -> np.ndarray:
        return self.matrices([t])[0]

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        pts = {p for _, prof, _ in self.driven for p in prof.breakpoints(t0, t1)}
        return sorted(pts)


@dataclass(frozen=True)
class StepControl:
    steps_per_period: int = 256
    tol: float | None = 1e-12
    max_refinements: int = 6
    scheme: str = "magnus6"

    def __post_init__(self):
        if self.steps_per_period < 16 or self.steps_per_period % 2:
            raise ValueError("steps_per_period must be even and >= 16")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")

    def fixed(self, steps_per_period: int | None = None) -> "StepControl":
        return StepControl(steps_per_period or self.steps_per_period, None, 0, self.scheme)


# ------------------------------------------------------------ dense kernels


def _check_hermitian(h: np.ndarray, tol: float = 1e-10):
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got {h.shape}")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol:
        raise HermiticityError("matrix is not Hermitian")


def expm_hermitian_batch(g: np.ndarray) -> np.ndarray:
    """``exp(-i G)`` for a stack of Hermitian matrices ``G``."""
    if g.shape[-1] == 2:
        g0 = 0.5 * (g[..., 0, 0] + g[..., 1, 1]).real
        gx = g[..., 0, 1].real
        gy = -g[..., 0, 1].imag
        gz = 0.5 * (g[..., 0, 0] - g[..., 1, 1]).real
        r = np.sqrt(gx**2 + gy**2 + gz**2)
        c = np.cos(r)
        sinc = np.sinc(r / np.pi)  # sin(r)/r
        ph = np.exp(-1j * g0)
        out = np.empty(g.shape, dtype=complex)
        out[..., 0, 0] = c - 1j * sinc * gz
        out[..., 1, 1] = c + 1j * sinc * gz
        out[..., 0, 1] = -1j * sinc * (gx - 1j * gy)
        out[..., 1, 0] = -1j * sinc * (gx + 1j * gy)
        return out * ph[..., None, None]
    w, v = np.linalg.eigh(g)
    return (v * np.exp(-1j * w)[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def exp_hermitian(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(-i H t)`` for Hermitian ``H``."""
    h = np.asarray(h, dtype=complex)
    _check_hermitian(h)
    h = 0.5 * (h + h.conj().T)
    return expm_hermitian_batch(h[None] * t)[0]


def check_unitary(u: np.ndarray, tol: float = 1e-10):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError(f"expected a square matrix, got {u.shape}")
    err = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if err > tol:
        raise UnitarityError(f"matrix is not unitary (deviation {err:.3e})")


def log_unitary(u: np.ndarray, period: float, margin: float = BRANCH_MARGIN) -> np.ndarray:
    """Hermitian ``H`` with ``exp(-i H period) = U``, eigenphases in (-pi, pi)."""
    u = np.asarray(u, dtype=complex)
    check_unitary(u)
    tri, z = schur(u, output="complex")
    lam = np.diag(tri)
    phases = np.angle(lam)
    worst = phases[np.argmax(np.abs(phases))] if phases.size else 0.0
    if abs(worst) > math.pi - margin:
        raise BranchError(
            f"eigenphase {worst:.12f} lies within {margin:g} of the branch cut", float(worst)
        )
    h = (z * (-phases / period)) @ z.conj().T
    return 0.5 * (h + h.conj().T)


def ordered_product(steps: np.ndarray) -> np.ndarray:
    """``U_n ... U_2 U_1`` for a stack ``[U_1, ..., U_n]``."""
    while steps.shape[0] > 1:
        if steps.shape[0] % 2:
            tail = steps[-1:]
            steps = steps[:-1]
        else:
            tail = None
        steps = steps[1::2] @ steps[0::2]
        if tail is not None:
            steps = np.concatenate([steps, tail])
    return steps[0]


def _step_generators(h: TimeDependentHamiltonian, a: float, dt: float, n: int, scheme: str):
    """Hermitian generators of ``n`` consecutive steps starting at ``a``."""
    starts = a + dt * np.arange(n)
    if scheme == "midpoint":
        return h.matrices(starts + 0.5 * dt) * dt
    if scheme == "magnus4":
        h1 = h.matrices(starts + (0.5 - _GAUSS) * dt)
        h2 = h.matrices(starts + (0.5 + _GAUSS) * dt)
        return 0.5 * dt * (h1 + h2) - 1j * _MAGNUS_C * dt**2 * _comm(h2, h1)
    # Blanes-Casas-Ros sixth-order form, written for A = -iH
    a1 = -1j * h.matrices(starts + (0.5 - _GAUSS3) * dt)
    a2 = -1j * h.matrices(starts + 0.5 * dt)
    a3 = -1j * h.matrices(starts + (0.5 + _GAUSS3) * dt)
    al1 = dt * a2
    al2 = (math.sqrt(15) * dt / 3) * (a3 - a1)
    al3 = (10 * dt / 3) * (a3 - 2 * a2 + a1)
    c1 = _comm(al1, al2)
    c2 = (-1 / 60) * _comm(al1, 2 * al3 + c1)
    omega = al1 + al3 / 12 + _comm(-20 * al1 - al3 + c1, al2 + c2) / 240
    return 1j * omega


def _comm(a, b):
    return a @ b - b @ a


def _propagate_fixed(h: TimeDependentHamiltonian, a: float, b: float, n: int, scheme: str):
    dt = (b - a) / n
    chunk = max(1, _CHUNK_ELEMENTS // h.dim**2)
    u = np.eye(h.dim, dtype=complex)
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        g = _step_generators(h, a + start * dt, dt, m, scheme)
        u = ordered_product(expm_hermitian_batch(g)) @ u
    return u


def _pieces(h: TimeDependentHamiltonian, t0: float, t1: float) -> list[tuple[float, float]]:
    edges = [t0, *h.breakpoints(t0, t1), t1]
    return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _base_steps(h: TimeDependentHamiltonian, a: float, b: float, t0: float, t1: float,
                sc: StepControl) -> int:
    ref = h.period if h.period else (t1 - t0)
    n = math.ceil(sc.steps_per_period * (b - a) / ref - 1e-9)
    return max(2, n + (n % 2))


def evolve(h: TimeDependentHamiltonian, t0: float, t1: float,
           sc: StepControl = StepControl()) -> np.ndarray:
    """Time-ordered propagator ``U(t1, t0)``.

    The interval is split at profile discontinuities. On each piece the step
    count is doubled until two successive propagators differ by less than
    ``sc.tol`` in max norm (no refinement when ``sc.tol`` is None).
    """
    if not t1 > t0:
        raise ValueError("evolve needs t1 > t0")
    u = np.eye(h.dim, dtype=complex)
    for a, b in _pieces(h, t0, t1):
        n = _base_steps(h, a, b, t0, t1, sc)
        cur = _propagate_fixed(h, a, b, n, sc.scheme)
        if sc.tol is not None:
            for _ in range(sc.max_refinements):
                n *= 2
                nxt = _propagate_fixed(h, a, b, n, sc.scheme)
                diff = np.max(np.abs(nxt - cur))
                cur = nxt
                if diff < sc.tol:
                    break
            else:
                raise ConvergenceError(
                    f"propagator on [{a:g}, {b:g}] not converged to {sc.tol:g} "
                    f"after {sc.max_refinements} refinements (last change {diff:.3e})"
                )
        u = cur @ u
    return u


def evolve_state(h: TimeDependentHamiltonian, psi: np.ndarray, t0: float, t1: float,
                 sc: StepControl = StepControl()) -> np.ndarray:
    """Apply the fixed-step propagator on ``[t0, t1]`` to a state vector."""
    psi = np.asarray(psi, dtype=complex).copy()
    for a, b in _pieces(h, t0, t1):
        n = _base_steps(h, a, b, t0, t1, sc)
        dt = (b - a) / n
        chunk = max(1, _CHUNK_ELEMENTS // h.dim**2)
        for start in range(0, n, chunk):
            m = min(chunk, n - start)
            g = -1j * _step_generators(h, a + start * dt, dt, m, sc.scheme)
            for k in range(m):
                psi = _expv(g[k], psi)
    return psi


def _expv(a: np.ndarray, v: np.ndarray, max_terms: int = 40) -> np.ndarray:
    """``exp(A) v`` by Taylor summation; meant for ``|A|`` well below 1."""
    scale = np.linalg.norm(v)
    out = v.copy()
    term = v
    for k in range(1, max_terms):
        term = (a @ term) / k
        out = out + term
        if np.linalg.norm(term) <= 1e-17 * scale:
            return out
    raise ConvergenceError("Taylor series for exp(A)v did not converge; reduce the step size")


def matrix_to_json(m: np.ndarray) -> list:
    """Row-major nested lists of ``[re, im]`` pairs, for debugging dumps."""
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m)]


def max_norm(a: np.ndarray) -> float:
    return float(np.max(np.abs(a)))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out
