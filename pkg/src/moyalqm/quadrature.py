"""Grid evaluation and phase-space quadrature for Gaussian polynomials."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .core import Envelope, GaussianPolynomial, NonHermitianError, NotIntegrableError

THREADS_ENV = "MOYALQM_THREADS"

BOX_CORE = 4.0
BOX_SLOPE = 2.5
BOUNDARY_TOL = 1e-10
IMAG_TOL = 1e-8
DEFAULT_POINTS = 64


@dataclass(frozen=True)
class Quadrature:
    """Quadrature rule over all phase-space variables.

    ``points`` may be an int or one entry per axis.  ``None`` for a
    Gauss-Hermite rule means "as many nodes as exactness requires".
    """

    kind: str = "gauss-hermite-tensor"
    points: int | tuple | None = None
    box: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("gauss-hermite-tensor", "trapezoid-tensor"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")

    @classmethod
    def trapezoid(cls, points=DEFAULT_POINTS, box=None) -> "Quadrature":
        return cls("trapezoid-tensor", points, box)

    def points_per_axis(self, nvars: int) -> tuple:
        pts = DEFAULT_POINTS if self.points is None else self.points
        if isinstance(pts, (int, np.integer)):
            return (int(pts),) * nvars
        if len(pts) != nvars:
            raise ValueError("one point count per axis is required")
        return tuple(int(x) for x in pts)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


# ----------------------------------------------------------------------------
# grid evaluation


def _block_on_grid(env: Envelope, a: np.ndarray, axes: Sequence[np.ndarray]) -> np.ndarray:
    Q, L = env.Q, env.L
    nv = len(axes)
    # the diagonal part of the envelope is folded into per-axis Vandermonde rows
    T = a
    for v in range(nv):
        x = np.asarray(axes[v], dtype=complex)
        V = x[:, None] ** np.arange(a.shape[v])[None, :]
        V = V * np.exp(-(Q[v, v] * x * x + L[v] * x))[:, None]
        T = np.tensordot(T, V, axes=([0], [1]))
    if not env.is_diagonal:
        cross = np.zeros(T.shape, dtype=complex)
        for v in range(nv):
            for w in range(v + 1, nv):
                if Q[v, w] != 0:
                    shape_v = [1] * nv
                    shape_w = [1] * nv
                    shape_v[v] = -1
                    shape_w[w] = -1
                    cross = cross + 2.0 * Q[v, w] * (
                        np.asarray(axes[v]).reshape(shape_v) * np.asarray(axes[w]).reshape(shape_w)
                    )
        T = T * np.exp(-cross)
    if env.const:
        T = T * np.exp(-env.const)
    return T


def _eval_chunk(f: GaussianPolynomial, axes: Sequence[np.ndarray]) -> np.ndarray:
    out = np.zeros(tuple(len(x) for x in axes), dtype=complex)
    for env, a in f.blocks.items():
        out += _block_on_grid(env, a, axes)
    return out


def evaluate_on_axes(f: GaussianPolynomial, axes: Sequence[np.ndarray], chunk: int = 8) -> np.ndarray:
    """Values of ``f`` on the tensor grid spanned by ``axes``.

    The first axis is split into fixed chunks; the result does not depend on
    the number of worker threads.
    """
    axes = [np.asarray(x, dtype=float) for x in axes]
    if len(axes) != f.nvars:
        raise ValueError("one sample vector per phase variable is required")
    n0 = len(axes[0])
    pieces = [(i, min(i + chunk, n0)) for i in range(0, n0, chunk)]

    def work(bounds):
        lo, hi = bounds
        return _eval_chunk(f, [axes[0][lo:hi]] + axes[1:])

    workers = thread_count()
    if workers > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(work, pieces))
    else:
        parts = [work(b) for b in pieces]
    return np.concatenate(parts, axis=0)


# ----------------------------------------------------------------------------
# exact Gauss-Hermite integration


@lru_cache(maxsize=None)
def _hermgauss(n: int):
    return np.polynomial.hermite.hermgauss(n)


def _moments_1d(a: complex, b: complex, kmax: int, npts: int) -> np.ndarray:
    """``int x^k exp(-(a x^2 + b x)) dx`` for k = 0..kmax by completing the square."""
    x, w = _hermgauss(npts)
    sa = np.sqrt(complex(a))
    mu = -b / (2 * a)
    nodes = mu + x / sa
    pref = np.exp(b * b / (4 * a)) / sa
    powers = nodes[None, :] ** np.arange(kmax + 1)[:, None]
    return pref * (powers @ w)


def _complex_cholesky(Q: np.ndarray) -> np.ndarray:
    """Symmetric (non-Hermitian) factorisation ``Q = L L^T``."""
    n = Q.shape[0]
    L = np.zeros_like(Q, dtype=complex)
    for j in range(n):
        s = Q[j, j] - np.sum(L[j, :j] ** 2)
        L[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            L[i, j] = (Q[i, j] - np.sum(L[i, :j] * L[j, :j])) / L[j, j]
    return L


def _integrate_block(env: Envelope, a: np.ndarray, points) -> complex:
    nv = a.ndim
    if not env.integrable:
        raise NotIntegrableError("Re(quad) must be positive definite for quadrature")
    Q, L = env.Q, env.L
    if env.is_diagonal:
        val = a
        for v in range(nv):
            kmax = a.shape[v] - 1
            npts = points[v] if points is not None else kmax // 2 + 1
            m = _moments_1d(Q[v, v], L[v], kmax, npts)
            val = np.tensordot(m, val, axes=(0, 0))
        return complex(val) * np.exp(-env.const)
    # general quadratic form: shift to the centre, then whiten with L L^T = Q
    Qi = np.linalg.inv(Q)
    mu = -0.5 * Qi @ L
    const = env.const - 0.25 * L @ Qi @ L
    C = _complex_cholesky(Q)
    M = np.linalg.inv(C).T
    lam = np.linalg.eigvals(Q)
    sqrt_det = np.prod(np.sqrt(lam))
    deg = sum(s - 1 for s in a.shape)
    npts = points[0] if points is not None else deg // 2 + 1
    x, w = _hermgauss(npts)
    nodes = np.array(list(product(x, repeat=nv)))
    weights = np.prod(np.array(list(product(w, repeat=nv))), axis=1)
    pts = mu[None, :] + nodes @ M.T
    idx = np.argwhere(a)
    coeffs = a[tuple(idx.T)]
    vals = np.ones((len(pts), len(idx)), dtype=complex)
    for v in range(nv):
        vals *= pts[:, v:v + 1] ** idx[None, :, v]
    poly = vals @ coeffs
    return complex(poly @ weights) / sqrt_det * np.exp(-const)


def integrate(f: GaussianPolynomial, quad: Quadrature | None = None) -> complex:
    """Integral of ``f`` over the whole phase space.

    Gauss-Hermite nodes after completing the square in each block; with the
    default node count the result is exact up to roundoff.
    """
    quad = quad or Quadrature()
    if quad.kind == "trapezoid-tensor":
        vals, weights, _ = _trapezoid_grid(f, quad)
        return _weighted_sum(vals, weights)
    if not f.integrable:
        raise NotIntegrableError("function is not flagged integrable")
    points = None if quad.points is None else quad.points_per_axis(f.nvars)
    total = 0j
    for env, a in f.blocks.items():
        total += _integrate_block(env, a, points)
    return total


# ----------------------------------------------------------------------------
# trapezoid rule on an automatically sized box


def _centre_and_scale(f: GaussianPolynomial):
    best, env = -1.0, None
    for e, a in f.blocks.items():
        m = float(np.abs(a).max())
        if m > best:
            best, env = m, e
    nv = f.nvars
    if env is None or not env.integrable:
        return np.zeros(nv), np.ones(nv)
    ReQ = env.Q.real
    centre = -0.5 * np.linalg.solve(ReQ, env.L.real)
    scale = 1.0 / np.sqrt(np.diag(ReQ))
    return centre, scale


def auto_box(f: GaussianPolynomial) -> tuple:
    """Box covering the turning region of the highest Fock component plus tails."""
    nmax = math.ceil(max(f.degrees()) / 2)
    half = BOX_CORE + BOX_SLOPE * math.sqrt(2 * nmax + 1)
    centre, scale = _centre_and_scale(f)
    return tuple((float(c - half * s), float(c + half * s)) for c, s in zip(centre, scale))


def _trap_weights(x: np.ndarray) -> np.ndarray:
    h = x[1] - x[0]
    w = np.full(len(x), h)
    w[0] = w[-1] = 0.5 * h
    return w


def _boundary_max(vals: np.ndarray) -> float:
    m = 0.0
    for ax in range(vals.ndim):
        m = max(m, float(np.abs(np.take(vals, [0, -1], axis=ax)).max()))
    return m


def _trapezoid_grid(f: GaussianPolynomial, quad: Quadrature, max_expand: int = 6):
    pts = quad.points_per_axis(f.nvars)
    box = quad.box or auto_box(f)
    fixed = quad.box is not None
    for _ in range(max_expand + 1):
        axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(box, pts)]
        vals = evaluate_on_axes(f, axes)
        peak = float(np.abs(vals).max())
        if fixed or peak == 0.0 or _boundary_max(vals) < BOUNDARY_TOL * peak:
            break
        box = tuple(((lo + hi) / 2 - 0.625 * (hi - lo), (lo + hi) / 2 + 0.625 * (hi - lo)) for lo, hi in box)
    weights = [_trap_weights(x) for x in axes]
    return vals, weights, box


def _weighted_sum(vals: np.ndarray, weights) -> complex:
    """Tensor-weighted sum, reduced slab by slab with compensated accumulation."""
    W = weights[1:]
    re_parts, im_parts = [], []
    for i in range(vals.shape[0]):
        s = vals[i]
        for w in W:
            s = np.tensordot(w, s, axes=(0, 0)) if s.ndim > 0 else s
        s = complex(s) * weights[0][i]
        re_parts.append(s.real)
        im_parts.append(s.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


@dataclass(frozen=True)
class AbsIntegral:
    value: float
    box: tuple
    points: tuple
    imag_ratio: float


def integrate_abs_detail(f: GaussianPolynomial, quad: Quadrature | None = None) -> AbsIntegral:
    quad = quad or Quadrature.trapezoid()
    if quad.kind != "trapezoid-tensor":
        raise ValueError("|f| breaks polynomial exactness; use a trapezoid-tensor rule")
    vals, weights, box = _trapezoid_grid(f, quad)
    peak = float(np.abs(vals).max()) if vals.size else 0.0
    imag = float(np.abs(vals.imag).max()) if vals.size else 0.0
    ratio = imag / peak if peak else 0.0
    if ratio > IMAG_TOL:
        raise NonHermitianError(
            f"imaginary part {ratio:.3e} of peak exceeds {IMAG_TOL:g}; the Wigner construction is not Hermitian"
        )
    value = _weighted_sum(np.abs(vals.real), weights).real
    return AbsIntegral(value, box, quad.points_per_axis(f.nvars), ratio)


def integrate_abs(f: GaussianPolynomial, quad: Quadrature | None = None) -> float:
    """Trapezoid estimate of the integral of ``|f|`` over phase space."""
    return integrate_abs_detail(f, quad).value
