"""Closed algebra of Gaussian-polynomial phase-space functions.

A :class:`GaussianPolynomial` is a finite sum of blocks.  Every block shares one
Gaussian envelope ``exp(-(v^T Q v + l.v + c))`` and carries a dense complex
coefficient tensor indexed by the exponent of each phase-space variable.  The
variable order is ``(q1, p1)`` in one dimension and ``(q1, p1, q2, p2)`` in two.

The Moyal product uses ``Lambda = <d_q d_p> - <d_p d_q>`` so that left
multiplication by ``q`` is the Bopp operator ``q + (i hbar / 2) d_p``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

DROP_TOL = 1e-14

VARIABLES = {1: ("q1", "p1"), 2: ("q1", "p1", "q2", "p2")}


class NotIntegrableError(ValueError):
    """Raised when a quadrature is requested for a non-decaying envelope."""


class NonHermitianError(ValueError):
    """Raised when a function expected to be real carries an imaginary part."""


def _clean(z) -> complex:
    z = complex(z)
    # adding 0.0 folds -0.0 into 0.0 so equal envelopes hash equally
    return complex(z.real + 0.0, z.imag + 0.0)


def var_index(v, dim: int) -> int:
    if isinstance(v, (int, np.integer)):
        if not 0 <= v < 2 * dim:
            raise ValueError(f"variable index {v} out of range for dimension {dim}")
        return int(v)
    names = VARIABLES[dim]
    if v not in names:
        raise ValueError(f"unknown phase variable {v!r} for dimension {dim}")
    return names.index(v)


@dataclass(frozen=True)
class Envelope:
    """Gaussian envelope ``exp(-(v^T quad v + lin.v + const))``."""

    quad: tuple
    lin: tuple
    const: complex = 0j

    @classmethod
    def make(cls, quad, lin, const=0.0) -> "Envelope":
        quad = np.asarray(quad, dtype=complex)
        quad = 0.5 * (quad + quad.T)
        return cls(
            tuple(tuple(_clean(x) for x in row) for row in quad),
            tuple(_clean(x) for x in np.asarray(lin, dtype=complex)),
            _clean(const),
        )

    @classmethod
    def zero(cls, nvars: int) -> "Envelope":
        return cls.make(np.zeros((nvars, nvars)), np.zeros(nvars), 0.0)

    @cached_property
    def Q(self) -> np.ndarray:
        return np.array(self.quad, dtype=complex).reshape(len(self.lin), len(self.lin))

    @cached_property
    def L(self) -> np.ndarray:
        return np.array(self.lin, dtype=complex)

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.Q) or np.any(self.L) or self.const)

    @property
    def is_diagonal(self) -> bool:
        return not np.any(self.Q - np.diag(np.diag(self.Q)))

    @property
    def integrable(self) -> bool:
        re = self.Q.real
        try:
            np.linalg.cholesky(re)
        except np.linalg.LinAlgError:
            return False
        return True

    def __add__(self, other: "Envelope") -> "Envelope":
        return Envelope.make(self.Q + other.Q, self.L + other.L, self.const + other.const)

    def conj(self) -> "Envelope":
        return Envelope.make(self.Q.conj(), self.L.conj(), np.conj(self.const))

    def exponent(self, x: np.ndarray) -> complex:
        x = np.asarray(x, dtype=complex)
        return x @ self.Q @ x + self.L @ x + self.const


# ----------------------------------------------------------------------------
# dense coefficient-tensor helpers


def _pad_to(a: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    if tuple(a.shape) == tuple(shape):
        return a
    out = np.zeros(shape, dtype=complex)
    out[tuple(slice(0, s) for s in a.shape)] = a
    return out


def _add_arrays(arrays: Sequence[np.ndarray]) -> np.ndarray:
    shape = np.max([a.shape for a in arrays], axis=0)
    out = np.zeros(shape, dtype=complex)
    for a in arrays:
        out[tuple(slice(0, s) for s in a.shape)] += a
    return out


def _shift_up(a: np.ndarray, axis: int) -> np.ndarray:
    """Multiply the polynomial by the variable ``axis``."""
    pad = [(0, 0)] * a.ndim
    pad[axis] = (1, 0)
    return np.pad(a, pad)


def _poly_derivative(a: np.ndarray, axis: int) -> np.ndarray:
    n = a.shape[axis]
    if n <= 1:
        shape = list(a.shape)
        shape[axis] = 1
        return np.zeros(shape, dtype=complex)
    idx = [slice(None)] * a.ndim
    idx[axis] = slice(1, None)
    k = np.arange(1, n).reshape([-1 if i == axis else 1 for i in range(a.ndim)])
    return a[tuple(idx)] * k


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of two dense coefficient tensors."""
    if np.count_nonzero(a) > np.count_nonzero(b):
        a, b = b, a
    shape = tuple(x + y - 1 for x, y in zip(a.shape, b.shape))
    out = np.zeros(shape, dtype=complex)
    nz = np.argwhere(a)
    for idx in nz:
        sl = tuple(slice(int(i), int(i) + s) for i, s in zip(idx, b.shape))
        out[sl] += a[tuple(idx)] * b
    return out


def _trim(a: np.ndarray) -> np.ndarray:
    if not np.any(a):
        return np.zeros((1,) * a.ndim, dtype=complex)
    nz = np.argwhere(a)
    hi = nz.max(axis=0) + 1
    return a[tuple(slice(0, int(h)) for h in hi)]


# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    coeff: complex
    exponents: tuple
    quad: tuple
    lin: tuple
    const: complex


class GaussianPolynomial:
    """Sum of ``coeff * monomial * exp(-(v^T Q v + l.v + c))`` terms.

    Instances are immutable; every operation returns a new canonical object.
    """

    __slots__ = ("dim", "_blocks", "__weakref__")

    def __init__(self, dim: int, blocks: dict | None = None, canonical: bool = True):
        if dim not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        self.dim = dim
        blocks = blocks or {}
        nv = 2 * dim
        for env, arr in blocks.items():
            if arr.ndim != nv or len(env.lin) != nv:
                raise ValueError("block does not match the declared dimension")
        self._blocks = self._canonical(blocks) if canonical else dict(blocks)
        for arr in self._blocks.values():
            arr.setflags(write=False)

    # -- construction -----------------------------------------------------

    @staticmethod
    def _canonical(blocks: dict) -> dict:
        if not blocks:
            return {}
        peak = max((np.abs(a).max() if a.size else 0.0) for a in blocks.values())
        if peak == 0.0 or not np.isfinite(peak):
            if not np.isfinite(peak):
                raise FloatingPointError("non-finite coefficient")
            return {}
        thr = DROP_TOL * peak
        out = {}
        for env in sorted(blocks, key=_env_sort_key):
            a = np.array(blocks[env], dtype=complex)
            a[np.abs(a) < thr] = 0.0
            if np.any(a):
                out[env] = _trim(a)
        return out

    @classmethod
    def zero(cls, dim: int) -> "GaussianPolynomial":
        return cls(dim, {})

    @classmethod
    def constant(cls, c, dim: int) -> "GaussianPolynomial":
        a = np.full((1,) * (2 * dim), complex(c))
        return cls(dim, {Envelope.zero(2 * dim): a})

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff=1.0, dim: int | None = None) -> "GaussianPolynomial":
        dim = dim or len(exponents) // 2
        exps = tuple(int(e) for e in exponents)
        if len(exps) != 2 * dim or min(exps) < 0:
            raise ValueError("exponents must be non-negative, one per phase variable")
        a = np.zeros(tuple(e + 1 for e in exps), dtype=complex)
        a[exps] = coeff
        return cls(dim, {Envelope.zero(2 * dim): a})

    @classmethod
    def variable(cls, v, dim: int) -> "GaussianPolynomial":
        exps = [0] * (2 * dim)
        exps[var_index(v, dim)] = 1
        return cls.monomial(exps, 1.0, dim)

    @classmethod
    def gaussian(cls, quad, lin=None, const=0.0, coeff=1.0, dim: int | None = None) -> "GaussianPolynomial":
        quad = np.asarray(quad, dtype=complex)
        nv = quad.shape[0]
        dim = dim or nv // 2
        lin = np.zeros(nv) if lin is None else lin
        a = np.full((1,) * nv, complex(coeff))
        return cls(dim, {Envelope.make(quad, lin, const): a})

    @classmethod
    def from_polynomial_array(cls, coeffs: np.ndarray, envelope: Envelope | None = None) -> "GaussianPolynomial":
        coeffs = np.asarray(coeffs, dtype=complex)
        dim = coeffs.ndim // 2
        env = envelope or Envelope.zero(coeffs.ndim)
        return cls(dim, {env: coeffs})

    @classmethod
    def from_terms(cls, terms: Iterable, dim: int) -> "GaussianPolynomial":
        acc: dict[Envelope, list[np.ndarray]] = {}
        for t in terms:
            if not isinstance(t, Term):
                t = Term(*t)
            env = Envelope.make(t.quad, t.lin, t.const)
            a = np.zeros(tuple(e + 1 for e in t.exponents), dtype=complex)
            a[tuple(t.exponents)] = t.coeff
            acc.setdefault(env, []).append(a)
        return cls(dim, {e: _add_arrays(v) for e, v in acc.items()})

    # -- inspection ---------------------------------------------------------

    @property
    def nvars(self) -> int:
        return 2 * self.dim

    @property
    def blocks(self) -> dict:
        return dict(self._blocks)

    def terms(self) -> Iterator[Term]:
        for env, a in self._blocks.items():
            for idx in np.argwhere(a):
                idx = tuple(int(i) for i in idx)
                yield Term(complex(a[idx]), idx, env.quad, env.lin, env.const)

    @property
    def n_terms(self) -> int:
        return sum(int(np.count_nonzero(a)) for a in self._blocks.values())

    def is_zero(self) -> bool:
        return not self._blocks

    @property
    def is_polynomial(self) -> bool:
        return all(env.is_zero for env in self._blocks)

    @property
    def integrable(self) -> bool:
        return all(env.integrable for env in self._blocks)

    def degrees(self) -> tuple:
        """Maximum exponent per variable."""
        if not self._blocks:
            return (0,) * self.nvars
        return tuple(int(x) - 1 for x in np.max([a.shape for a in self._blocks.values()], axis=0))

    def degree(self) -> int:
        """Total polynomial degree."""
        best = 0
        for a in self._blocks.values():
            nz = np.argwhere(a)
            if len(nz):
                best = max(best, int(nz.sum(axis=1).max()))
        return best

    def max_abs_coeff(self) -> float:
        return max((float(np.abs(a).max()) for a in self._blocks.values()), default=0.0)

    def polynomial_array(self) -> np.ndarray:
        """Coefficient tensor of a pure polynomial."""
        if not self.is_polynomial:
            raise ValueError("function carries a Gaussian envelope")
        if not self._blocks:
            return np.zeros((1,) * self.nvars, dtype=complex)
        return next(iter(self._blocks.values())).copy()

    # -- algebra ------------------------------------------------------------

    def _check(self, other: "GaussianPolynomial"):
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        if not isinstance(other, GaussianPolynomial):
            other = GaussianPolynomial.constant(other, self.dim)
        self._check(other)
        blocks: dict[Envelope, list] = {}
        for src in (self._blocks, other._blocks):
            for env, a in src.items():
                blocks.setdefault(env, []).append(a)
        return GaussianPolynomial(self.dim, {e: _add_arrays(v) for e, v in blocks.items()})

    __radd__ = __add__

    def __neg__(self):
        return GaussianPolynomial(self.dim, {e: -a for e, a in self._blocks.items()}, canonical=False)

    def __sub__(self, other):
        return self + (-other if isinstance(other, GaussianPolynomial) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "GaussianPolynomial":
        c = complex(c)
        if c == 0:
            return GaussianPolynomial.zero(self.dim)
        return GaussianPolynomial(self.dim, {e: c * a for e, a in self._blocks.items()})

    def __mul__(self, other):
        if not isinstance(other, GaussianPolynomial):
            return self.scale(other)
        self._check(other)
        acc: dict[Envelope, list] = {}
        for e1, a1 in self._blocks.items():
            for e2, a2 in other._blocks.items():
                acc.setdefault(e1 + e2, []).append(_convolve(a1, a2))
        return GaussianPolynomial(self.dim, {e: _add_arrays(v) for e, v in acc.items()})

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(1.0 / complex(c))

    def conj(self) -> "GaussianPolynomial":
        """Complex conjugate, the ``dagger`` of a phase-space function."""
        return GaussianPolynomial(self.dim, {e.conj(): a.conj() for e, a in self._blocks.items()})

    dagger = conj

    def real_part(self) -> "GaussianPolynomial":
        return (self + self.conj()).scale(0.5)

    def times_variable(self, v) -> "GaussianPolynomial":
        ax = var_index(v, self.dim)
        return GaussianPolynomial(self.dim, {e: _shift_up(a, ax) for e, a in self._blocks.items()})

    def with_envelope(self, env: Envelope) -> "GaussianPolynomial":
        """Multiply by an extra Gaussian envelope."""
        return GaussianPolynomial(self.dim, {e + env: a for e, a in self._blocks.items()})

    def translated(self, shift: Sequence[float]) -> "GaussianPolynomial":
        """``x -> f(x - shift)`` as an exact re-expansion."""
        a = np.asarray(shift, dtype=float)
        if a.shape != (self.nvars,):
            raise ValueError("one shift per phase variable is required")
        out = {}
        for env, arr in self._blocks.items():
            Q, L = env.Q, env.L
            new_env = Envelope.make(Q, L - 2 * Q @ a, env.const + a @ Q @ a - L @ a)
            T = arr
            for ax in range(self.nvars):
                n = arr.shape[ax]
                # (x - a)^j = sum_k C(j,k) (-a)^(j-k) x^k
                B = np.array([[math.comb(j, k) * (-a[ax]) ** (j - k) if k <= j else 0.0 for j in range(n)] for k in range(n)])
                T = np.moveaxis(np.tensordot(B, T, axes=([1], [ax])), 0, ax)
            out[new_env] = out.get(new_env, 0) + T
        return GaussianPolynomial(self.dim, out)

    # -- comparison / evaluation -------------------------------------------

    def allclose(self, other: "GaussianPolynomial", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        """Compare canonical forms coefficient by coefficient."""
        self._check(other)
        scale = max(self.max_abs_coeff(), other.max_abs_coeff())
        tol = atol + rtol * scale
        for env in set(self._blocks) | set(other._blocks):
            a = self._blocks.get(env, np.zeros((1,) * self.nvars, dtype=complex))
            b = other._blocks.get(env, np.zeros((1,) * self.nvars, dtype=complex))
            shape = np.maximum(a.shape, b.shape)
            if np.abs(_pad_to(a, shape) - _pad_to(b, shape)).max() > tol:
                return False
        return True

    def __call__(self, *point):
        return self.evaluate(point[0] if len(point) == 1 and np.ndim(point[0]) else point)

    def evaluate(self, point) -> complex:
        x = np.asarray(point, dtype=complex).reshape(-1)
        if x.size != self.nvars:
            raise ValueError(f"point has {x.size} coordinates, function has {self.nvars}")
        total = 0j
        for env, a in self._blocks.items():
            val = a
            for ax in range(self.nvars):
                powers = x[ax] ** np.arange(val.shape[0])
                val = np.tensordot(powers, val, axes=(0, 0))
            total += complex(val) * np.exp(-env.exponent(x))
        return total

    # -- serialization --------------------------------------------------------

    def to_json(self) -> str:
        def cplx(z):
            return [float(np.real(z)), float(np.imag(z))]

        terms = []
        for t in self.terms():
            terms.append([
                float(t.coeff.real), float(t.coeff.imag), list(t.exponents),
                [[cplx(x) for x in row] for row in t.quad],
                [cplx(x) for x in t.lin], cplx(t.const),
            ])
        return json.dumps({"dimension": self.dim, "terms": terms})

    @classmethod
    def from_json(cls, text: str) -> "GaussianPolynomial":
        doc = json.loads(text)

        def cplx(z):
            return complex(z[0], z[1])

        terms = [
            Term(complex(re, im), tuple(exps), [[cplx(x) for x in row] for row in quad],
                 [cplx(x) for x in lin], cplx(const))
            for re, im, exps, quad, lin, const in doc["terms"]
        ]
        return cls.from_terms(terms, doc["dimension"])

    def __repr__(self):
        return f"GaussianPolynomial(dim={self.dim}, blocks={len(self._blocks)}, terms={self.n_terms})"


def _env_sort_key(env: Envelope):
    flat = [x for row in env.quad for x in row] + list(env.lin) + [env.const]
    return tuple((z.real, z.imag) for z in flat)


# ----------------------------------------------------------------------------
# differentiation


def differentiate(f: GaussianPolynomial, v, order: int = 1) -> GaussianPolynomial:
    """Exact derivative of ``f`` with respect to the phase variable ``v``."""
    ax = var_index(v, f.dim)
    for _ in range(order):
        f = _diff_once(f, ax)
    return f


def _diff_once(f: GaussianPolynomial, ax: int) -> GaussianPolynomial:
    out = {}
    for env, a in f._blocks.items():
        parts = [_poly_derivative(a, ax)]
        Q, L = env.Q, env.L
        if L[ax] != 0:
            parts.append(-L[ax] * a)
        for w in range(f.nvars):
            if Q[ax, w] != 0:
                parts.append(-2.0 * Q[ax, w] * _shift_up(a, w))
        out[env] = _add_arrays(parts)
    return GaussianPolynomial(f.dim, out)


def _partial(f: GaussianPolynomial, orders: tuple, cache: dict) -> GaussianPolynomial:
    """Mixed partial derivative with memoisation over multi-indices."""
    if orders in cache:
        return cache[orders]
    ax = next(i for i, o in enumerate(orders) if o > 0)
    lower = list(orders)
    lower[ax] -= 1
    prev = _partial(f, tuple(lower), cache)
    res = prev if prev.is_zero() else _diff_once(prev, ax)
    cache[orders] = res
    return res


# ----------------------------------------------------------------------------
# star operators


@dataclass(frozen=True)
class StarOperator:
    """A polynomial symbol acting by exact Bopp shift.

    ``side="left"`` realises ``f -> A * f`` with
    ``q -> q + (i hbar/2) d_p``, ``p -> p - (i hbar/2) d_q``;
    ``side="right"`` realises ``f -> f * A`` with the opposite shifts.
    """

    symbol: GaussianPolynomial
    hbar: float = 1.0
    side: str = "left"

    def __post_init__(self):
        if not self.symbol.is_polynomial:
            raise ValueError("star operators need a polynomial symbol; the Bopp series would not terminate")
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    def __call__(self, f: GaussianPolynomial) -> GaussianPolynomial:
        return bopp_apply(self, f)

    def __pow__(self, n: int):
        return _PoweredOperator(self, n)


@dataclass(frozen=True)
class _PoweredOperator:
    op: StarOperator
    n: int

    def __call__(self, f):
        for _ in range(self.n):
            f = self.op(f)
        return f


def _q_hat(f: GaussianPolynomial, i: int, shift: complex) -> GaussianPolynomial:
    # q_i f + shift * d_{p_i} f
    qa, pa = 2 * i, 2 * i + 1
    return f.times_variable(qa) + _diff_once(f, pa).scale(shift)


def _p_hat(f: GaussianPolynomial, i: int, shift: complex) -> GaussianPolynomial:
    # p_i f - shift * d_{q_i} f
    qa, pa = 2 * i, 2 * i + 1
    return f.times_variable(pa) - _diff_once(f, qa).scale(shift)


def _weyl_monomial(f: GaussianPolynomial, i: int, a: int, b: int, shift: complex) -> GaussianPolynomial:
    """Weyl-ordered ``q_i^a p_i^b`` applied through its Bopp realisation.

    Uses the symmetrisation ``2^-a sum_k C(a,k) Q^k P^b Q^(a-k)``.
    """
    if a == 0 and b == 0:
        return f
    terms = []
    for k in range(a + 1):
        g = f
        for _ in range(a - k):
            g = _q_hat(g, i, shift)
        for _ in range(b):
            g = _p_hat(g, i, shift)
        for _ in range(k):
            g = _q_hat(g, i, shift)
        terms.append(g.scale(math.comb(a, k)))
    acc = sum_functions(terms, f.dim)
    return acc.scale(2.0 ** -a)


def bopp_apply(op: StarOperator, f: GaussianPolynomial) -> GaussianPolynomial:
    """Apply ``A(q,p) *`` (or ``* A`` for right operators) exactly."""
    sym = op.symbol
    if sym.dim != f.dim:
        raise ValueError("dimension mismatch between operator and function")
    shift = 0.5j * op.hbar if op.side == "left" else -0.5j * op.hbar
    coeffs = sym.polynomial_array()
    out = GaussianPolynomial.zero(f.dim)
    for idx in np.argwhere(coeffs):
        idx = tuple(int(x) for x in idx)
        g = f
        for i in range(f.dim):
            g = _weyl_monomial(g, i, idx[2 * i], idx[2 * i + 1], shift)
        out = out + g.scale(coeffs[idx])
    return out


# ----------------------------------------------------------------------------
# Moyal products


def _pair_indices(dim: int, K: int):
    """All (a_1, b_1, ..., a_d, b_d) with total order <= K."""
    for combo in product(range(K + 1), repeat=2 * dim):
        if sum(combo) <= K:
            yield combo


def star_truncated(f: GaussianPolynomial, g: GaussianPolynomial, K: int, hbar: float = 1.0) -> GaussianPolynomial:
    """Moyal product ``f * g`` summed through order ``K`` in ``hbar``.

    Each order ``j`` term is ``(i hbar/2)^j / j! f Lambda^j g`` with
    ``Lambda^j`` expanded multinomially over the symplectic pairs.
    """
    if K < 0:
        raise ValueError("truncation order must be non-negative")
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    dim = f.dim
    fcache = {(0,) * (2 * dim): f}
    gcache = {(0,) * (2 * dim): g}
    fdeg = f.degrees() if f.is_polynomial else None
    gdeg = g.degrees() if g.is_polynomial else None
    acc = []
    for combo in _pair_indices(dim, K):
        left = [0] * (2 * dim)
        right = [0] * (2 * dim)
        coeff = (0.5j * hbar) ** sum(combo)
        for i in range(dim):
            a, b = combo[2 * i], combo[2 * i + 1]
            left[2 * i] += a      # d_q on the left
            left[2 * i + 1] += b  # d_p on the left
            right[2 * i + 1] += a  # d_p on the right
            right[2 * i] += b      # d_q on the right
            coeff *= (-1) ** b / (math.factorial(a) * math.factorial(b))
        if fdeg is not None and any(o > d for o, d in zip(left, fdeg)):
            continue
        if gdeg is not None and any(o > d for o, d in zip(right, gdeg)):
            continue
        df = _partial(f, tuple(left), fcache)
        dg = _partial(g, tuple(right), gcache)
        if df.is_zero() or dg.is_zero():
            continue
        acc.append((df * dg).scale(coeff))
    return sum_functions(acc, dim)


def sum_functions(items: Sequence[GaussianPolynomial], dim: int) -> GaussianPolynomial:
    """Sum many functions with a single canonicalisation pass."""
    blocks: dict[Envelope, list] = {}
    for it in items:
        for env, a in it._blocks.items():
            blocks.setdefault(env, []).append(a)
    return GaussianPolynomial(dim, {e: _add_arrays(v) for e, v in blocks.items()})


def moyal_bracket(f: GaussianPolynomial, g: GaussianPolynomial, K: int, hbar: float = 1.0) -> GaussianPolynomial:
    """``f * g - g * f`` with both products truncated at order ``K``."""
    if K < 1:
        raise ValueError("the bracket needs truncation order >= 1")
    return star_truncated(f, g, K, hbar) - star_truncated(g, f, K, hbar)
