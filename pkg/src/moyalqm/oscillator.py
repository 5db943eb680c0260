"""Harmonic-oscillator quasi-amplitudes built with ladder star-operators."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .core import GaussianPolynomial, StarOperator, star_truncated
from .quadrature import integrate

MAX_N = 14
OVERLAP_TOL = 1e-6


@dataclass(frozen=True, order=True)
class FockLabel:
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 0 or self.ny < 0:
            raise ValueError("Fock labels are non-negative")

    @property
    def shell(self) -> int:
        return self.nx + self.ny

    def __iter__(self):
        return iter((self.nx, self.ny))

    def __str__(self):
        return f"({self.nx},{self.ny})"

    @classmethod
    def coerce(cls, n) -> "FockLabel":
        if isinstance(n, FockLabel):
            return n
        nx, ny = n
        return cls(int(nx), int(ny))


Label = Union[FockLabel, tuple, int]


def labels_in_shells(max_shell: int, min_shell: int = 0) -> list[FockLabel]:
    return [FockLabel(nx, N - nx) for N in range(min_shell, max_shell + 1) for nx in range(N, -1, -1)]


@dataclass(frozen=True)
class LadderSet:
    A: StarOperator
    Ad: StarOperator
    B: StarOperator | None
    Bd: StarOperator | None
    omega: float
    hbar: float


def _ladder_symbol(axis: int, dim: int, omega: float, hbar: float, sign: int) -> GaussianPolynomial:
    # natural units: q -> sqrt(omega) q, p -> p / sqrt(omega)
    q = GaussianPolynomial.variable(2 * axis, dim)
    p = GaussianPolynomial.variable(2 * axis + 1, dim)
    return (q.scale(math.sqrt(omega)) + p.scale(sign * 1j / math.sqrt(omega))).scale(1 / math.sqrt(2 * hbar))


def ladder_set(omega: float = 1.0, hbar: float = 1.0, dim: int = 2) -> LadderSet:
    """Annihilation/creation star-operators ``(q +- i p)/sqrt(2)`` per axis."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    ops = []
    for axis in range(dim):
        ops.append(StarOperator(_ladder_symbol(axis, dim, omega, hbar, +1), hbar))
        ops.append(StarOperator(_ladder_symbol(axis, dim, omega, hbar, -1), hbar))
    if dim == 1:
        return LadderSet(ops[0], ops[1], None, None, omega, hbar)
    return LadderSet(*ops, omega, hbar)


def hamiltonian_symbol(omega: float = 1.0, dim: int = 2) -> GaussianPolynomial:
    """``sum_i (p_i^2 + omega^2 q_i^2) / 2``."""
    h = GaussianPolynomial.zero(dim)
    for axis in range(dim):
        q = GaussianPolynomial.variable(2 * axis, dim)
        p = GaussianPolynomial.variable(2 * axis + 1, dim)
        h = h + (p * p + (q * q).scale(omega ** 2)).scale(0.5)
    return h


def hamiltonian(omega: float = 1.0, hbar: float = 1.0, dim: int = 2) -> StarOperator:
    return StarOperator(hamiltonian_symbol(omega, dim), hbar)


def norm2(f: GaussianPolynomial) -> float:
    """``int |f|^2`` over phase space."""
    return integrate(f * f.conj()).real


def normalized(f: GaussianPolynomial) -> GaussianPolynomial:
    n = norm2(f)
    if not n > 0:
        raise ValueError("function has zero norm")
    return f.scale(1.0 / math.sqrt(n))


@lru_cache(maxsize=None)
def _ground(omega: float, hbar: float, dim: int) -> GaussianPolynomial:
    diag = []
    for _ in range(dim):
        diag += [omega / hbar, 1.0 / (omega * hbar)]
    return normalized(GaussianPolynomial.gaussian(np.diag(diag), dim=dim))


def ho_ground(omega: float = 1.0, hbar: float = 1.0, dim: int = 2) -> GaussianPolynomial:
    """``exp(-2h/omega)`` per axis, normalised to ``int |psi|^2 = 1``."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    return _ground(float(omega), float(hbar), dim)


@lru_cache(maxsize=None)
def _state(nx: int, ny: int, omega: float, hbar: float, dim: int) -> GaussianPolynomial:
    if nx == 0 and ny == 0:
        return _ground(omega, hbar, dim)
    lad = ladder_set(omega, hbar, dim)
    if nx > 0:
        prev = _state(nx - 1, ny, omega, hbar, dim)
        raised = lad.Ad(prev).scale(1 / math.sqrt(nx))
    else:
        prev = _state(nx, ny - 1, omega, hbar, dim)
        raised = lad.Bd(prev).scale(1 / math.sqrt(ny))
    return normalized(raised)


def ho_state(n: Label, omega: float = 1.0, hbar: float = 1.0, max_n: int = MAX_N) -> GaussianPolynomial:
    """Normalised quasi-amplitude of the Fock state ``n``.

    An ``int`` selects a one-dimensional oscillator, a pair or
    :class:`FockLabel` the two-dimensional one.
    """
    if isinstance(n, (int, np.integer)):
        if not 0 <= n <= max_n:
            raise ValueError(f"Fock number {n} outside 0..{max_n}")
        return _state(int(n), 0, float(omega), float(hbar), 1)
    n = FockLabel.coerce(n)
    if n.nx > max_n or n.ny > max_n:
        raise OverflowError(f"Fock label {n} exceeds the configured maximum {max_n}")
    return _state(n.nx, n.ny, float(omega), float(hbar), 2)


def ho_energy(n: Label, omega: float = 1.0, hbar: float = 1.0) -> float:
    if isinstance(n, (int, np.integer)):
        return hbar * omega * (n + 0.5)
    n = FockLabel.coerce(n)
    return hbar * omega * (n.nx + 0.5 + n.ny + 0.5)


@dataclass(frozen=True)
class Overlap:
    star: complex
    pointwise: complex

    @property
    def mismatch(self) -> float:
        return abs(self.star - self.pointwise)


def star_overlap_detail(a: GaussianPolynomial, b: GaussianPolynomial, K: int = 2, hbar: float = 1.0) -> Overlap:
    ad = a.conj()
    res = Overlap(integrate(star_truncated(ad, b, K, hbar)), integrate(ad * b))
    if res.mismatch > OVERLAP_TOL:
        raise ArithmeticError(
            f"star and pointwise overlaps differ by {res.mismatch:.3e}; truncation order {K} too low"
        )
    return res


def star_overlap(a: GaussianPolynomial, b: GaussianPolynomial, K: int = 2, hbar: float = 1.0) -> complex:
    """``int a^dagger * b`` over phase space."""
    return star_overlap_detail(a, b, K, hbar).star
