"""One-dimensional hydrogen atom in phase space (atomic units).

The amplitude on the ``q > 0`` branch is

    psi_n(q, p) = h(p) exp(-2iqp) u_n(q - a0),   h(p) = exp(2 i a0 p) / sqrt(2 pi)

with the radial factor ``u_n(r) = N r exp(-Z r/n) F(1-n, 2; 2 Z r/n)``.  In the
``"lab"`` frame the phase is kept and the Wigner function comes from the
truncated Moyal series.  The ``"gauge"`` frame drops the pure phase
``h(p) exp(-2iqp)``; the amplitude is then momentum independent and every
truncation order gives the same product ``|u_n|^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import GaussianPolynomial, star_truncated
from .wigner import hermitian_part

HARTREE_EV = 27.211386245988
A0 = 1.0
FRAMES = ("lab", "gauge")
BRANCHES = ("positive", "negative")


# ----------------------------------------------------------------------------
# Kummer function


def _kummer_poly(a: int, b: Fraction) -> list[Fraction]:
    """Coefficients of the terminating series ``F(a, b; x)`` for integer ``a <= 0``."""
    coeffs, c = [Fraction(1)], Fraction(1)
    for k in range(-a):
        c = c * (a + k) / ((b + k) * (k + 1))
        coeffs.append(c)
    return coeffs


def confluent_F(a, b, x: float, rtol: float = 1e-12, max_terms: int = 100000) -> float:
    """Kummer's ``M(a, b, x) = sum_k (a)_k / (b)_k x^k / k!``.

    For a nonpositive integer ``a`` the series is a polynomial and is summed
    in exact rational arithmetic.
    """
    if float(b) <= 0 and float(b) == int(b):
        raise ValueError("b must not be a nonpositive integer")
    if float(a) == int(a) and a <= 0:
        xf = Fraction(x)
        total = sum(c * xf ** k for k, c in enumerate(_kummer_poly(int(a), Fraction(b))))
        return float(total)
    term, total = 1.0, 1.0
    for k in range(max_terms):
        term *= (a + k) / (b + k) * x / (k + 1)
        total += term
        if abs(term) <= rtol * abs(total):
            return total
    raise ArithmeticError("Kummer series did not converge")


# ----------------------------------------------------------------------------
# states and energies


def _check(n: int, Z: int):
    if int(n) != n or n < 1:
        raise ValueError("principal quantum number must be an integer >= 1")
    if int(Z) != Z or Z < 1:
        raise ValueError("nuclear charge Z must be a positive integer")


def radial_coefficients(n: int, Z: int = 1) -> list[Fraction]:
    """Exact ``c_k`` with ``u_n(r) = exp(-Z r/n) sum_k c_k r^k``, normalised on ``r > 0``."""
    _check(n, Z)
    s = Fraction(2 * Z, n)
    poly = [Fraction(0)] + [c * s ** k for k, c in enumerate(_kummer_poly(1 - n, Fraction(2)))]
    # int_0^inf r^k exp(-2 Z r / n) dr = k! / (2Z/n)^(k+1)
    norm2 = sum(
        ci * cj * math.factorial(i + j) / s ** (i + j + 1)
        for i, ci in enumerate(poly)
        for j, cj in enumerate(poly)
    )
    scale = 1.0 / math.sqrt(norm2)
    return [c * Fraction(scale) for c in poly]


def radial_function(n: int, Z: int, r: np.ndarray) -> np.ndarray:
    c = [float(x) for x in radial_coefficients(n, Z)]
    r = np.asarray(r, dtype=float)
    return np.polynomial.polynomial.polyval(r, c) * np.exp(-Z * r / n)


def hydrogen_state(n: int, Z: int = 1, branch: str = "positive", frame: str = "lab", scale: float = 1.0) -> GaussianPolynomial:
    """Quasi-amplitude ``psi_n(q, p)`` as a Gaussian polynomial with complex envelope.

    With ``scale=s`` the first variable is ``x = q / s``; star products in
    ``(x, p)`` then use ``hbar / s``.
    """
    _check(n, Z)
    if frame not in FRAMES:
        raise ValueError(f"frame must be one of {FRAMES}")
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    sgn = 1 if branch == "positive" else -1
    q = GaussianPolynomial.variable(0, 1).scale(sgn * scale)
    r = q - GaussianPolynomial.constant(A0, 1)
    poly = GaussianPolynomial.zero(1)
    for c in reversed(radial_coefficients(n, Z)):
        poly = poly * r + GaussianPolynomial.constant(float(c), 1)
    k = Z / n
    if frame == "gauge":
        env = GaussianPolynomial.gaussian([[0, 0], [0, 0]], [sgn * k * scale, 0], -k * A0, dim=1)
    else:
        # exp(-2iqp) exp(2 i a0 p) exp(-k (q - a0)) / sqrt(2 pi); the mirror flips q and p together
        env = GaussianPolynomial.gaussian(
            [[0, 1j * scale], [1j * scale, 0]],
            [sgn * k * scale, -sgn * 2j * A0],
            -k * A0,
            coeff=1 / math.sqrt(2 * math.pi),
            dim=1,
        )
    return poly * env


def hydrogen_energy(n: int, Z: int = 1) -> tuple[float, float]:
    """``(hartree, eV)`` for ``E_n = -Z^2 / (2 n^2)``."""
    _check(n, Z)
    e = -(Z ** 2) / (2 * n ** 2)
    return e, e * HARTREE_EV


def eigen_residual(n: int, Z: int = 1, r: np.ndarray | None = None) -> float:
    """``max |-u''/2 - Z u / r - E u|`` relative to ``max |E u|`` on a sample grid."""
    r = np.linspace(0.05, 12.0 * n * n / Z, 400) if r is None else np.asarray(r, dtype=float)
    c = np.array([float(x) for x in radial_coefficients(n, Z)])
    k = Z / n
    P = np.polynomial.Polynomial(c)
    u = P(r) * np.exp(-k * r)
    # (P e^{-kr})'' = (P'' - 2k P' + k^2 P) e^{-kr}
    u2 = (P.deriv(2)(r) - 2 * k * P.deriv(1)(r) + k * k * P(r)) * np.exp(-k * r)
    E = hydrogen_energy(n, Z)[0]
    res = -0.5 * u2 - Z * u / r - E * u
    return float(np.max(np.abs(res)) / np.max(np.abs(E * u)))


# ----------------------------------------------------------------------------
# Wigner function and checks


@dataclass(frozen=True)
class HydrogenWigner:
    """Momentum-independent Wigner function on one branch, unit area over that branch."""

    function: GaussianPolynomial
    n: int
    Z: int
    K: int
    frame: str
    branch: str
    area: float
    scale: float = 1.0

    def __call__(self, q) -> np.ndarray:
        """Density at lab positions ``q`` (zero off the branch)."""
        from .quadrature import evaluate_on_axes

        q = np.atleast_1d(np.asarray(q, dtype=float))
        vals = evaluate_on_axes(self.function, [q / self.scale, np.zeros(1)])[:, 0].real / self.area
        inside = q >= 0 if self.branch == "positive" else q <= 0
        return np.where(inside, vals, 0.0)

    def domain(self, span: float | None = None) -> tuple[float, float]:
        span = span or (A0 + self.scale * (40.0 + 4.0 * self.n))
        return (0.0, span) if self.branch == "positive" else (-span, 0.0)


def _momentum_free(f: GaussianPolynomial, tol: float = 1e-12) -> GaussianPolynomial:
    peak = f.max_abs_coeff()
    for env, a in f.blocks.items():
        Q, L = env.Q, env.L
        if np.any(np.abs(Q) > 0) or abs(L[1]) > 0 or (a.shape[1] > 1 and np.abs(a[:, 1:]).max() > tol * peak):
            raise ArithmeticError("hydrogen Wigner function depends on momentum")
    return f


def _area(f: GaussianPolynomial, branch: str) -> float:
    """Exact ``int f dx`` over the branch for ``f = sum_k c_k x^k exp(-(l x + c))``."""
    total = 0.0
    for env, a in f.blocks.items():
        lq = env.L[0].real * (1 if branch == "positive" else -1)
        if lq <= 0:
            raise ArithmeticError("density does not decay on this branch")
        for k, c in enumerate(a[:, 0]):
            sign = 1 if branch == "positive" else (-1) ** k
            total += sign * c.real * math.factorial(k) / lq ** (k + 1) * math.exp(-env.const.real)
    return total


def hydrogen_wigner(n: int, K: int = 2, Z: int = 1, frame: str = "lab", branch: str = "positive") -> HydrogenWigner:
    """``psi * psi^dagger`` truncated at order ``K``, normalised on its branch."""
    # natural length n/Z keeps the polynomial coefficients within the canonical tolerance
    s = n / Z
    psi = hydrogen_state(n, Z, branch, frame, scale=s)
    f, _ = hermitian_part(star_truncated(psi, psi.conj(), K, hbar=1.0 / s))
    f = _momentum_free(f)
    return HydrogenWigner(f, n, Z, K, frame, branch, s * _area(f, branch), s)


def quoted_shape(q: np.ndarray, Z: int = 1) -> np.ndarray:
    """Reference ground-state profile ``(q - a0)^2 exp(-2 Z (q - a0))``."""
    r = np.asarray(q, dtype=float) - A0
    return r * r * np.exp(-2 * Z * r)


def shape_residual(w: HydrogenWigner, q: np.ndarray | None = None) -> float:
    """Relative L-infinity distance to the quoted profile after a least-squares scale."""
    q = np.linspace(0.0, 10.0, 2001) if q is None else np.asarray(q, dtype=float)
    ref = quoted_shape(q, w.Z)
    got = w(q)
    scale = float(np.dot(got, ref) / np.dot(ref, ref))
    return float(np.max(np.abs(got - scale * ref)) / np.max(np.abs(scale * ref)))


@dataclass(frozen=True)
class BohrRadius:
    radial: float
    lab: float
    density_at_origin: float
    density_at_peak: float


def bohr_radius_check(Z: int = 1, K: int = 2, frame: str = "gauge") -> BohrRadius:
    """Maximum of the ground-state position density.

    ``radial`` is measured from the shifted origin ``r = q - a0`` in which the
    quoted profile is written; ``lab`` is the same point in the ``q`` coordinate.
    """
    from .wigner import marginal_position

    w = hydrogen_wigner(1, K, Z, frame)
    lo, hi = A0, A0 + 20.0 / Z
    m = marginal_position(w.function, q=np.linspace(lo, hi, 20001) / w.scale)
    peak = m.argmax * w.scale
    sig = w(np.array([A0 + 1e-9, peak]))
    return BohrRadius(peak - A0, peak, float(sig[0]), float(sig[1]))


@dataclass(frozen=True)
class HydrogenNegativity:
    eta: float
    delta: float
    span: float
    points: int


def _abs_integral(w: HydrogenWigner, points: int, span: float) -> float:
    lo, hi = w.domain(span)
    q = np.linspace(lo, hi, points)
    v = np.abs(w(q))
    h = q[1] - q[0]
    return float(h * (math.fsum(v) - 0.5 * (v[0] + v[-1])))


def hydrogen_negativity(n: int, K: int = 2, Z: int = 1, frame: str = "lab", mode: str = "positive", points: int = 20001) -> HydrogenNegativity:
    """``int |f| - 1`` on the ``q > 0`` branch, or on both branches glued by parity."""
    if mode not in ("positive", "both"):
        raise ValueError("mode must be 'positive' or 'both'")
    branches = ("positive",) if mode == "positive" else ("positive", "negative")
    ws = [hydrogen_wigner(n, K, Z, frame, b) for b in branches]
    span = ws[0].domain()[1]

    def eta(pts):
        # each branch carries half the weight when both are used
        return sum(_abs_integral(w, pts, span) for w in ws) / len(ws) - 1.0

    base, fine = eta(points), eta(2 * points - 1)
    return HydrogenNegativity(base, abs(fine - base), span, points)
