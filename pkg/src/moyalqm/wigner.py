"""Wigner functions, their extrema and marginals, and the negativity indicator."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import GaussianPolynomial, NonHermitianError, NotIntegrableError, StarOperator, differentiate, star_truncated
from .oscillator import _ladder_symbol, hamiltonian, ho_state
from .quadrature import (
    DEFAULT_POINTS,
    Quadrature,
    auto_box,
    evaluate_on_axes,
    integrate,
    integrate_abs_detail,
)

IMAG_TOL = 1e-8
NORM_TOL = 5e-3
NEGATIVITY_FLOOR = -5e-3


# ----------------------------------------------------------------------------
# construction


def hermitian_part(f: GaussianPolynomial, tol: float = IMAG_TOL) -> tuple[GaussianPolynomial, float]:
    """Real part of ``f`` and the relative size of the discarded imaginary part."""
    peak = f.max_abs_coeff()
    if peak == 0:
        return f, 0.0
    imag = (f - f.conj()).scale(0.5).max_abs_coeff() / peak
    if imag > tol:
        raise NonHermitianError(f"Wigner function has imaginary part {imag:.3e} relative to its peak")
    return f.real_part(), imag


def normalize(f: GaussianPolynomial) -> GaussianPolynomial:
    total = integrate(f)
    if not abs(total) > 1e-300:
        raise NotIntegrableError("Wigner function integrates to zero; cannot normalise")
    return f.scale(1.0 / total.real)


def _label_tuple(m, dim: int) -> tuple:
    if dim == 1:
        return (int(m),) if not isinstance(m, tuple) else (int(m[0]),)
    return (int(m[0]), int(m[1]))


def _basis_state(label: tuple, omega: float, hbar: float) -> GaussianPolynomial:
    return ho_state(label[0] if len(label) == 1 else label, omega, hbar, max_n=64)


def wigner_from_coefficients(coeffs: dict, omega: float = 1.0, hbar: float = 1.0, dim: int = 2) -> GaussianPolynomial:
    """Exact ``psi * psi^dagger`` for ``psi = sum_k c_k psi_k`` in the oscillator basis.

    Uses ``psi_k * psi_l^dagger = kappa psi_k * a^l / sqrt(l!)``: the conjugate
    amplitudes are generated by right star-multiplication with annihilation
    symbols, so no truncation is involved.
    """
    coeffs = {_label_tuple(m, dim): complex(c) for m, c in coeffs.items() if c != 0}
    if not coeffs:
        raise ValueError("empty state")
    psi = GaussianPolynomial.zero(dim)
    for m, c in sorted(coeffs.items()):
        psi = psi + _basis_state(m, omega, hbar).scale(c)
    right = [StarOperator(_ladder_symbol(ax, dim, omega, hbar, +1), hbar, side="right") for ax in range(dim)]
    out = GaussianPolynomial.zero(dim)
    cache = {(0,) * dim: psi}

    def raised(l):
        if l not in cache:
            axis = max(i for i in range(dim) if l[i] > 0)
            prev = list(l)
            prev[axis] -= 1
            cache[l] = right[axis](raised(tuple(prev)))
        return cache[l]

    for l, c in sorted(coeffs.items()):
        norm = math.sqrt(math.prod(math.factorial(k) for k in l))
        out = out + raised(l).scale(c.conjugate() / norm)
    f, _ = hermitian_part(out)
    return normalize(f)


def project_on_basis(psi: GaussianPolynomial, omega: float = 1.0, hbar: float = 1.0, tol: float = 1e-9) -> dict:
    """Oscillator-basis coefficients of ``psi``; raises if ``psi`` is outside the span."""
    dim = psi.dim
    if not psi.integrable:
        raise ValueError("state is not integrable")
    top = sum(psi.degrees())
    labels = [(n,) for n in range(top + 1)] if dim == 1 else [(i, N - i) for N in range(top + 1) for i in range(N + 1)]
    coeffs, recon = {}, GaussianPolynomial.zero(dim)
    for m in labels:
        b = _basis_state(m, omega, hbar)
        c = integrate(b.conj() * psi)
        if abs(c) > 1e-15:
            coeffs[m] = c
            recon = recon + b.scale(c)
    if not recon.allclose(psi, rtol=tol, atol=tol * psi.max_abs_coeff()):
        raise ValueError("state is not in the oscillator span at this omega/hbar; pass an explicit star order K")
    return coeffs


def wigner_from_state(psi: GaussianPolynomial, K: int | None = None, omega: float = 1.0, hbar: float = 1.0) -> GaussianPolynomial:
    """Normalised ``psi * psi^dagger``.

    ``K=None`` evaluates the star product exactly for oscillator-span states;
    an integer ``K`` truncates the Moyal series at that order.
    """
    if K is None:
        return wigner_from_coefficients(project_on_basis(psi, omega, hbar), omega, hbar, psi.dim)
    f, _ = hermitian_part(star_truncated(psi, psi.conj(), K, hbar))
    return normalize(f)


def wigner_perturbed(state, K: int | None = None) -> GaussianPolynomial:
    """Wigner function of ``psi0 + psi1 (+ psi2)`` for a perturbed state."""
    spec = state.spec
    omega, hbar = (spec.omega, spec.hbar) if spec is not None else (1.0, 1.0)
    vec = {tuple(m): c for m, c in state.fock_vector().items()}
    if K is None:
        return wigner_from_coefficients(vec, omega, hbar, 2)
    return wigner_from_state(state.amplitude(), K, omega, hbar)


def eigen_residual(f: GaussianPolynomial, energy: float, omega: float = 1.0, hbar: float = 1.0) -> float:
    """``max |H*f - E f|`` over coefficients, relative to ``max |E f|``."""
    H = hamiltonian(omega, hbar, f.dim)
    r = H(f) - f.scale(energy)
    return r.max_abs_coeff() / max(f.scale(energy).max_abs_coeff(), 1e-300)


# ----------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class GridSpec:
    """Per phase variable either ``(lo, hi, n)`` or a fixed float value."""

    ranges: tuple

    @classmethod
    def auto(cls, f: GaussianPolynomial, points: int = DEFAULT_POINTS, fixed: dict | None = None) -> "GridSpec":
        fixed = fixed or {}
        box = auto_box(f)
        return cls(tuple(fixed[v] if v in fixed else (lo, hi, points) for v, (lo, hi) in enumerate(box)))

    @property
    def free(self) -> list[int]:
        return [v for v, r in enumerate(self.ranges) if isinstance(r, (tuple, list))]

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(r[0], r[1], int(r[2])) if isinstance(r, (tuple, list)) else np.array([float(r)]) for r in self.ranges]

    def as_dict(self) -> dict:
        return {"ranges": [list(r) if isinstance(r, (tuple, list)) else float(r) for r in self.ranges]}


@dataclass
class WignerGrid:
    axes: tuple
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def integral(self) -> float:
        """Trapezoid integral over the free axes."""
        v = self.values
        for ax in reversed(range(v.ndim)):
            v = np.trapezoid(v, self.axes[ax], axis=ax) if hasattr(np, "trapezoid") else np.trapz(v, self.axes[ax], axis=ax)
        return float(v)

    def to_csv(self) -> str:
        """RFC-4180 CSV: one row per grid point, coordinates then value, 17 significant digits."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        names = self.meta.get("variables", [f"x{i}" for i in range(len(self.axes))])
        w.writerow(list(names) + ["value"])
        mesh = np.meshgrid(*self.axes, indexing="ij")
        flat = [m.ravel() for m in mesh] + [self.values.ravel()]
        for row in zip(*flat):
            w.writerow([_fmt(x) for x in row])
        return buf.getvalue()

    def sidecar(self) -> str:
        meta = dict(self.meta)
        meta["shape"] = list(self.values.shape)
        return json.dumps(meta, indent=1, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_csv(cls, text: str, meta: dict | None = None) -> "WignerGrid":
        rows = list(csv.reader(io.StringIO(text)))
        data = np.array([[float(x) for x in r] for r in rows[1:]])
        nfree = data.shape[1] - 1
        axes = tuple(np.unique(data[:, i]) for i in range(nfree))
        shape = tuple(len(a) for a in axes)
        meta = dict(meta or {})
        meta.setdefault("variables", rows[0][:-1])
        return cls(axes, data[:, -1].reshape(shape), meta)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


VARIABLE_NAMES = {1: ("q", "p"), 2: ("q_x", "p_x", "q_y", "p_y")}


def evaluate_grid(f: GaussianPolynomial, grid: GridSpec, meta: dict | None = None) -> WignerGrid:
    axes = grid.axes()
    vals = evaluate_on_axes(f, axes)
    peak = float(np.abs(vals).max()) if vals.size else 0.0
    imag = float(np.abs(vals.imag).max()) / peak if peak else 0.0
    free = grid.free
    values = vals.real.reshape([len(axes[v]) for v in free])
    names = VARIABLE_NAMES.get(f.dim, tuple(f"x{i}" for i in range(f.nvars)))
    m = {
        "variables": [names[v] for v in free],
        "fixed": {names[v]: float(grid.ranges[v]) for v in range(len(axes)) if v not in free},
        "grid": grid.as_dict(),
        "imag_residue": imag,
    }
    m.update(meta or {})
    return WignerGrid(tuple(axes[v] for v in free), values, m)


# ----------------------------------------------------------------------------
# extrema


@dataclass(frozen=True)
class Extrema:
    max: float
    min: float
    argmax: tuple
    argmin: tuple


def _newton(f, grad, hess, x0: np.ndarray, sign: int, box, steps: int = 20) -> tuple[float, np.ndarray]:
    x = np.array(x0, dtype=float)
    best = f.evaluate(x).real
    for _ in range(steps):
        g = np.array([d.evaluate(x).real for d in grad])
        H = np.array([[h.evaluate(x).real for h in row] for row in hess])
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        y = x - step
        if not all(lo <= yi <= hi for yi, (lo, hi) in zip(y, box)):
            break
        val = f.evaluate(y).real
        if sign * val < sign * best - 1e-15:
            break
        moved = np.max(np.abs(y - x))
        x, best = y, val
        if moved < 1e-12:
            break
    return best, x


def extrema(f: GaussianPolynomial, points: int | None = None, candidates: int = 4) -> Extrema:
    """Global max/min from a grid scan refined by Newton steps on the analytic form."""
    nv = f.nvars
    points = points or (101 if nv == 2 else 25)
    box = auto_box(f)
    axes = [np.linspace(lo, hi, points) for lo, hi in box]
    vals = evaluate_on_axes(f, axes).real
    grad = [differentiate(f, v) for v in range(nv)]
    hess = [[differentiate(grad[v], w) for w in range(nv)] for v in range(nv)]
    results = {}
    for sign in (+1, -1):
        order = np.argsort(sign * vals, axis=None)[::-1][:candidates]
        best = None
        for flat in order:
            idx = np.unravel_index(flat, vals.shape)
            x0 = np.array([axes[v][i] for v, i in enumerate(idx)])
            val, x = _newton(f, grad, hess, x0, sign, box)
            if best is None or sign * val > sign * best[0]:
                best = (val, x)
        results[sign] = best
    (mx, ax), (mn, an) = results[+1], results[-1]
    return Extrema(float(mx), float(mn), tuple(float(t) for t in ax), tuple(float(t) for t in an))


# ----------------------------------------------------------------------------
# marginals


@dataclass(frozen=True)
class Marginal:
    """Position density sampled on ``q`` with its refined maximum."""

    q: np.ndarray
    values: np.ndarray
    argmax: float
    function: GaussianPolynomial


def _depends_on_momentum(f: GaussianPolynomial) -> bool:
    for env, a in f.blocks.items():
        Q, L = env.Q, env.L
        for i in range(f.dim):
            p = 2 * i + 1
            if a.shape[p] > 1 or np.any(Q[p] != 0) or L[p] != 0:
                return True
    return False


def integrate_momenta(f: GaussianPolynomial) -> GaussianPolynomial:
    """Exact ``int dp f`` for blocks whose envelope does not couple momenta to anything.

    The result is returned as a momentum-independent function of the same
    dimension.
    """
    dim = f.dim
    pieces = []
    from .core import Envelope
    from .quadrature import _moments_1d

    for env, a in f.blocks.items():
        Q, L = env.Q.copy(), env.L.copy()
        arr = a
        for i in range(dim):
            p = 2 * i + 1
            off = np.delete(Q[p], p)
            if np.any(off != 0):
                raise NotImplementedError("momentum coupled to other variables in the envelope")
            if Q[p, p].real <= 0:
                raise NotIntegrableError("envelope does not decay in momentum")
            m = _moments_1d(Q[p, p], L[p], arr.shape[p] - 1, arr.shape[p] // 2 + 1)
            arr = np.moveaxis(np.tensordot(arr, m, axes=([p], [0]))[..., None], -1, p)
            Q[p, p] = 0
            L[p] = 0
        quad = [[complex(Q[i, j]) for j in range(Q.shape[1])] for i in range(Q.shape[0])]
        pieces.append(GaussianPolynomial.from_polynomial_array(arr, Envelope.make(quad, L, env.const)))
    out = GaussianPolynomial.zero(dim)
    for g in pieces:
        out = out + g
    return out


def marginal_position(f: GaussianPolynomial, q: np.ndarray | None = None, axis: int = 0, domain=None) -> Marginal:
    """``sigma(q) = int dp f`` along one position axis, normalised to unit area.

    Momentum-independent inputs (the hydrogen case) are used as they are, up
    to the normalisation.  Other position axes are integrated out for
    multi-dimensional inputs on the sample grid.
    """
    g = integrate_momenta(f) if _depends_on_momentum(f) else f
    if q is None:
        lo, hi = domain or auto_box(f)[2 * axis]
        q = np.linspace(lo, hi, 4001)
    q = np.asarray(q, dtype=float)
    if g.dim == 1:
        vals = evaluate_on_axes(g, [q, np.zeros(1)])[:, 0].real
    else:
        other = 1 - axis
        box = auto_box(f)[2 * other]
        y = np.linspace(box[0], box[1], 401)
        axes = [None, np.zeros(1), None, np.zeros(1)]
        axes[2 * axis], axes[2 * other] = q, y
        grid = evaluate_on_axes(g, axes).real.squeeze()
        grid = grid if axis == 0 else grid.T
        vals = np.trapezoid(grid, y, axis=1) if hasattr(np, "trapezoid") else np.trapz(grid, y, axis=1)
    area = np.trapezoid(vals, q) if hasattr(np, "trapezoid") else np.trapz(vals, q)
    vals = vals / area
    i = int(np.argmax(vals))
    arg = float(q[i])
    if g.dim == 1 and 0 < i < len(q) - 1:
        d1 = differentiate(g, 0)
        d2 = differentiate(d1, 0)
        x = arg
        for _ in range(30):
            h = d2.evaluate([x, 0.0]).real
            if h == 0:
                break
            step = d1.evaluate([x, 0.0]).real / h
            x -= step
            if abs(step) < 1e-14:
                break
        if q[i - 1] <= x <= q[i + 1]:
            arg = float(x)
    return Marginal(q, vals, arg, g)


# ----------------------------------------------------------------------------
# negativity


@dataclass(frozen=True)
class Negativity:
    eta: float
    delta: float
    refined: float
    box: tuple
    points: tuple


def negativity_detail(f: GaussianPolynomial, quad: Quadrature | None = None, check_axis: int = 0) -> Negativity:
    """``int |f| - 1`` with the change from doubling one grid axis as error estimate."""
    quad = quad or Quadrature.trapezoid()
    pts = quad.points_per_axis(f.nvars)
    base = integrate_abs_detail(f, quad)
    dense = list(pts)
    dense[check_axis] = 2 * pts[check_axis] - 1
    fine = integrate_abs_detail(f, Quadrature.trapezoid(tuple(dense), base.box))
    eta = base.value - 1.0
    if eta < NEGATIVITY_FLOOR:
        raise ValueError(f"negativity {eta:.3e} below -5e-3; input is not normalised")
    return Negativity(eta, abs(fine.value - base.value), fine.value - 1.0, base.box, base.points)


def negativity(f: GaussianPolynomial, quad: Quadrature | None = None) -> float:
    return negativity_detail(f, quad).eta
