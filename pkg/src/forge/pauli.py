"""Pauli-string algebra on N qubits.

Strings are written with site 1 leftmost, e.g. ``"ZXZ"`` is Z1 X2 Z3, and the
dense realization uses the matching Kronecker order (site 1 is the most
significant qubit).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionError, ResourceError

LETTERS = "IXYZ"
PRUNE = 1e-14
MATRIX_CAP = 12

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (phase, c) with a.b = phase * c
_TABLE: dict[tuple[str, str], tuple[complex, str]] = {}
for _a in LETTERS:
    _TABLE[("I", _a)] = (1, _a)
    _TABLE[(_a, "I")] = (1, _a)
    _TABLE[(_a, _a)] = (1, "I")
for _a, _b, _c in ("XYZ", "YZX", "ZXY"):
    _TABLE[(_a, _b)] = (1j, _c)
    _TABLE[(_b, _a)] = (-1j, _c)


@dataclass(frozen=True, order=True)
class PauliString:
    letters: str

    def __post_init__(self):
        if not self.letters or any(ch not in LETTERS for ch in self.letters):
            raise ValueError(f"invalid Pauli string {self.letters!r}")

    @property
    def n(self) -> int:
        return len(self.letters)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def from_sites(cls, n: int, ops: Mapping[int, str]) -> "PauliString":
        """Build a string from a ``{site: letter}`` map with 1-based sites."""
        letters = ["I"] * n
        for site, letter in ops.items():
            if not 1 <= site <= n:
                raise DimensionError(f"site {site} outside 1..{n}")
            letters[site - 1] = letter
        return cls("".join(letters))

    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def commutes_with(self, other: "PauliString") -> bool:
        clashes = sum(
            1 for a, b in zip(self.letters, other.letters) if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

    def __str__(self) -> str:
        return self.letters


def mul(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product ``a.b = phase * c`` with ``phase`` in {1, -1, 1j, -1j}."""
    if a.n != b.n:
        raise DimensionError(f"length mismatch: {a.n} vs {b.n}")
    phase: complex = 1
    out = []
    for x, y in zip(a.letters, b.letters):
        p, c = _TABLE[(x, y)]
        phase *= p
        out.append(c)
    return complex(phase), PauliString("".join(out))


def _as_string(key) -> PauliString:
    return key if isinstance(key, PauliString) else PauliString(key)


class PauliSum:
    """Weighted sum of N-qubit Pauli strings.

    Coefficients with magnitude below ``PRUNE`` are dropped on construction,
    so two sums that differ only by round-off noise compare equal term-wise.
    Instances are not mutated after construction.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n: int, terms: Mapping | Iterable = (), prune: float = PRUNE):
        if n < 1:
            raise DimensionError("need at least one qubit")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[PauliString, complex] = {}
        for key, coeff in items:
            s = _as_string(key)
            if s.n != n:
                raise DimensionError(f"string {s} has length {s.n}, expected {n}")
            acc[s] = acc.get(s, 0) + complex(coeff)
        self._n = n
        self._terms = {s: c for s, c in sorted(acc.items()) if abs(c) >= prune}

    @classmethod
    def zero(cls, n: int) -> "PauliSum":
        return cls(n)

    @classmethod
    def single(cls, letters: str, coeff: complex = 1.0) -> "PauliSum":
        return cls(len(letters), {letters: coeff})

    @classmethod
    def from_sites(cls, n: int, ops: Mapping[int, str], coeff: complex = 1.0) -> "PauliSum":
        return cls(n, {PauliString.from_sites(n, ops): coeff})

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> dict[PauliString, complex]:
        return dict(self._terms)

    def coeff(self, key) -> complex:
        return self._terms.get(_as_string(key), 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def _check(self, other: "PauliSum"):
        if self._n != other._n:
            raise DimensionError(f"qubit count mismatch: {self._n} vs {other._n}")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check(other)
        return PauliSum(self._n, list(self._terms.items()) + list(other._terms.items()))

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            self._check(other)
            out = []
            for a, ca in self._terms.items():
                for b, cb in other._terms.items():
                    phase, c = mul(a, b)
                    out.append((c, phase * ca * cb))
            return PauliSum(self._n, out)
        return PauliSum(self._n, {s: other * c for s, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def allclose(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coeff(k) - other.coeff(k)) <= atol for k in keys)

    def real(self) -> "PauliSum":
        return PauliSum(self._n, {s: c.real for s, c in self._terms.items()})

    def norm_max(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})*{s}" for s, c in self._terms.items()) or "0"
        return f"PauliSum(n={self._n}: {body})"

    def to_json(self) -> dict:
        return {
            "n": self._n,
            "terms": [
                {"string": s.letters, "re": c.real, "im": c.imag} for s, c in self._terms.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "PauliSum":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            int(data["n"]),
            [(t["string"], complex(t["re"], t.get("im", 0.0))) for t in data["terms"]],
        )


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """``[a, b] = ab - ba`` using the string (anti)commutation rule."""
    if a.n != b.n:
        raise DimensionError(f"qubit count mismatch: {a.n} vs {b.n}")
    out = []
    for sa, ca in a:
        for sb, cb in b:
            if sa.commutes_with(sb):
                continue
            phase, c = mul(sa, sb)
            out.append((c, 2 * phase * ca * cb))
    return PauliSum(a.n, out)


def string_matrix(s: PauliString) -> np.ndarray:
    return reduce(np.kron, (_SINGLE[ch] for ch in s.letters))


def to_matrix(a: PauliSum, cap: int = MATRIX_CAP) -> np.ndarray:
    if a.n > cap:
        raise ResourceError(f"{a.n} qubits exceeds dense cap of {cap}")
    dim = 2**a.n
    out = np.zeros((dim, dim), dtype=complex)
    for s, c in a:
        out += c * string_matrix(s)
    return out


# B[a, 2*i + j] = sigma_a[j, i], so sum_ij B[a, 2i+j] M[i, j] = tr(sigma_a M)
_BASIS = np.array([_SINGLE[ch].T.reshape(4) for ch in LETTERS])


def decompose(m: np.ndarray, hermitian: bool = False, prune: float = PRUNE) -> PauliSum:
    """Expand a ``2^N x 2^N`` matrix as ``sum_P tr(P M)/2^N * P``.

    With ``hermitian=True`` the (round-off) imaginary parts of the
    coefficients are discarded.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    # interleave row/column bits per site: (i1, j1, i2, j2, ...)
    t = m.reshape([2] * (2 * n))
    perm = [k for site in range(n) for k in (site, n + site)]
    t = t.transpose(perm).reshape([4] * n)
    for axis in range(n):
        t = np.moveaxis(np.tensordot(_BASIS, t, axes=([1], [axis])), 0, axis)
    coeffs = t.reshape(-1) / dim
    if hermitian:
        coeffs = coeffs.real
    labels = ("".join(p) for p in product(LETTERS, repeat=n))
    return PauliSum(n, zip(labels, coeffs), prune=prune)


def all_strings(n: int) -> list[PauliString]:
    return [PauliString("".join(p)) for p in product(LETTERS, repeat=n)]
