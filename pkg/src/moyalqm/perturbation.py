"""Henon-Heiles plus magnetic-hydrogen perturbation of the 2D oscillator.

Matrix elements are available through two independent routes: phase-space
integrals of Bopp-shifted quasi-amplitudes, and plain Fock-space algebra of
``(A + A^dagger)`` powers.  Rayleigh-Schroedinger sums use the Fock route.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .core import GaussianPolynomial, StarOperator, sum_functions
from .oscillator import FockLabel, Label, ho_energy, ho_state, labels_in_shells
from .quadrature import integrate

log = logging.getLogger(__name__)

EPSILON_PRESETS = (0.0, 0.28, 0.5, 1.0)
SHELL_REACH = 6
DEGENERATE_TOL = 1e-10
ORACLE_TOL = 1e-9
PARTS = ("cubic", "sextic", "quadratic")
POLICIES = ("paper-faithful", "strict")


class DegeneracyError(ArithmeticError):
    pass


class OracleMismatch(ArithmeticError):
    pass


@dataclass(frozen=True)
class HamiltonianSpec:
    """Physical parameters and truncation settings.

    ``gamma`` (field strength in atomic units) is informational; it enters
    only through the scaled energy ``epsilon``.
    """

    hbar: float = 1.0
    omega: float = 1.0
    lam: float = 1.0
    epsilon: float = 0.0
    basis_cutoff: int | None = None
    star_order: int = 2
    policy: str = "paper-faithful"
    gamma: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.lam) and math.isfinite(self.epsilon)):
            raise ValueError("lambda and epsilon must be finite")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if self.hbar <= 0 or self.omega <= 0:
            raise ValueError("hbar and omega must be positive")

    def with_(self, **kw) -> "HamiltonianSpec":
        return replace(self, **kw)

    def cutoff_for(self, n: FockLabel, reach: int = SHELL_REACH) -> int:
        need = n.shell + reach
        if self.basis_cutoff is None:
            return need
        if self.basis_cutoff < n.shell + SHELL_REACH:
            raise ValueError(f"basis_cutoff {self.basis_cutoff} < N+6 = {n.shell + SHELL_REACH} for {n}")
        return max(self.basis_cutoff, need) if reach > SHELL_REACH else self.basis_cutoff


# ----------------------------------------------------------------------------
# the perturbation as a phase-space symbol


def potential_symbol(spec: HamiltonianSpec, parts=PARTS, include_oscillator: bool = False) -> GaussianPolynomial:
    """``lam * [qx^2 qy - qy^3/3 + 5/2 qx^2 qy^2 (qx^2+qy^2) - eps (qx^2+qy^2)]``.

    The harmonic ``(qx^2+qy^2)/2`` of the Henon-Heiles potential lives in the
    unperturbed Hamiltonian and is only added back on request.
    """
    qx = GaussianPolynomial.variable(0, 2)
    qy = GaussianPolynomial.variable(2, 2)
    qx2, qy2 = qx * qx, qy * qy
    v = GaussianPolynomial.zero(2)
    if "cubic" in parts:
        v = v + qx2 * qy - (qy2 * qy).scale(1 / 3)
    if "sextic" in parts:
        v = v + (qx2 * qy2 * (qx2 + qy2)).scale(2.5)
    if "quadratic" in parts:
        v = v - (qx2 + qy2).scale(spec.epsilon)
    if include_oscillator:
        v = v + (qx2 + qy2).scale(0.5)
    return v.scale(spec.lam)


def perturbation_operator(spec: HamiltonianSpec, parts=PARTS) -> StarOperator:
    return StarOperator(potential_symbol(spec, parts), spec.hbar)


def apply_V(spec: HamiltonianSpec, psi: GaussianPolynomial, parts=PARTS) -> GaussianPolynomial:
    """``V * psi`` by exact Bopp substitution of the polynomial symbol."""
    return perturbation_operator(spec, parts)(psi)


def _quadrature_op(axis: int, spec: HamiltonianSpec) -> StarOperator:
    # A + A^dagger in natural units
    q = GaussianPolynomial.variable(2 * axis, 2)
    return StarOperator(q.scale(math.sqrt(2 * spec.omega / spec.hbar)), spec.hbar)


def apply_V_ladder(spec: HamiltonianSpec, psi: GaussianPolynomial, parts=PARTS) -> GaussianPolynomial:
    """``V psi`` assembled from powers of ``X = A + A^dagger`` and ``Y = B + B^dagger``."""
    X, Y = _quadrature_op(0, spec), _quadrature_op(1, spec)
    s = math.sqrt(spec.hbar / (2 * spec.omega))  # q = s X

    def pw(op, k, f):
        for _ in range(k):
            f = op(f)
        return f

    out = []
    if "cubic" in parts:
        out.append(pw(X, 2, pw(Y, 1, psi)).scale(s ** 3))
        out.append(pw(Y, 3, psi).scale(-s ** 3 / 3))
    if "sextic" in parts:
        x2y2 = pw(X, 2, pw(Y, 2, psi))
        out.append((pw(X, 2, x2y2) + pw(Y, 2, x2y2)).scale(2.5 * s ** 6))
    if "quadratic" in parts:
        out.append((pw(X, 2, psi) + pw(Y, 2, psi)).scale(-spec.epsilon * s ** 2))
    return sum_functions(out, 2).scale(spec.lam)


# ----------------------------------------------------------------------------
# Fock-space algebra


@lru_cache(maxsize=64)
def _x_powers(size: int, kmax: int = 6) -> tuple:
    a = np.diag(np.sqrt(np.arange(1, size)), 1)
    x = a + a.T
    out = [np.eye(size)]
    for _ in range(kmax):
        out.append(out[-1] @ x)
    return tuple(out)


def _fock_terms(spec: HamiltonianSpec, parts=PARTS):
    """(coefficient, power of X, power of Y) for the ladder form of V."""
    s = math.sqrt(spec.hbar / (2 * spec.omega))
    terms = []
    if "cubic" in parts:
        terms += [(s ** 3, 2, 1), (-s ** 3 / 3, 0, 3)]
    if "sextic" in parts:
        terms += [(2.5 * s ** 6, 4, 2), (2.5 * s ** 6, 2, 4)]
    if "quadratic" in parts:
        terms += [(-spec.epsilon * s ** 2, 2, 0), (-spec.epsilon * s ** 2, 0, 2)]
    return [(c * spec.lam, i, j) for c, i, j in terms]


def fock_matrix(spec: HamiltonianSpec, rows, cols, parts=PARTS) -> np.ndarray:
    """Dense block ``<m|V|k>`` for label lists ``rows`` x ``cols``."""
    rows = [FockLabel.coerce(m) for m in rows]
    cols = [FockLabel.coerce(k) for k in cols]
    size = max(max(max(l.nx, l.ny) for l in rows + cols) + 7, 8)
    P = _x_powers(size)
    rx = np.array([m.nx for m in rows])
    ry = np.array([m.ny for m in rows])
    cx = np.array([k.nx for k in cols])
    cy = np.array([k.ny for k in cols])
    out = np.zeros((len(rows), len(cols)))
    for c, i, j in _fock_terms(spec, parts):
        out += c * P[i][np.ix_(rx, cx)] * P[j][np.ix_(ry, cy)]
    return out


def fock_element(spec: HamiltonianSpec, m: Label, n: Label, parts=PARTS) -> float:
    return float(fock_matrix(spec, [m], [n], parts)[0, 0])


@lru_cache(maxsize=4096)
def _integral_piece(m: FockLabel, n: FockLabel, part: str, omega: float, hbar: float) -> complex:
    # epsilon- and lambda-free building block: eps=-1 turns the quadratic part into +q^2
    pm = ho_state(m, omega, hbar, max_n=64)
    return integrate(pm.conj() * _applied_piece(n, part, omega, hbar))


@lru_cache(maxsize=512)
def _applied_piece(n: FockLabel, part: str, omega: float, hbar: float) -> GaussianPolynomial:
    unit = HamiltonianSpec(hbar=hbar, omega=omega, lam=1.0, epsilon=-1.0)
    return apply_V(unit, ho_state(n, omega, hbar, max_n=64), (part,))


def integral_element(spec: HamiltonianSpec, m: Label, n: Label, parts=PARTS) -> complex:
    """``int psi_m^dagger (V * psi_n)`` with exact Gauss-Hermite quadrature."""
    m, n = FockLabel.coerce(m), FockLabel.coerce(n)
    weight = {"cubic": 1.0, "sextic": 1.0, "quadratic": -spec.epsilon}
    total = 0j
    for part in parts:
        if weight[part] != 0:
            total += weight[part] * _integral_piece(m, n, part, float(spec.omega), float(spec.hbar))
    return spec.lam * total


def matrix_element(spec: HamiltonianSpec, m: Label, n: Label, parts=PARTS) -> complex:
    """``<m|V|n>`` computed by both routes, which must agree to 1e-9."""
    a = integral_element(spec, m, n, parts)
    b = fock_element(spec, m, n, parts)
    if abs(a - b) > ORACLE_TOL * max(1.0, abs(b)):
        raise OracleMismatch(f"<{m}|V|{n}>: integral {a} vs Fock {b}")
    return a


# ----------------------------------------------------------------------------
# Rayleigh-Schroedinger corrections


@dataclass(frozen=True)
class PerturbedState:
    order: int
    base: FockLabel
    coefficients: dict
    energy1: float
    energy2: float | None = None
    first_order: dict | None = None
    skipped: dict = field(default_factory=dict)
    spec: HamiltonianSpec | None = None

    def fock_vector(self) -> dict:
        """Total coefficient of every basis label in ``psi0 + psi1 (+ psi2)``."""
        vec = {self.base: 1.0 + 0j}
        layers = [self.coefficients] if self.order == 1 else [self.first_order or {}, self.coefficients]
        if self.order == 0:
            layers = []
        for layer in layers:
            for m, c in layer.items():
                vec[m] = vec.get(m, 0j) + c
        return vec

    def amplitude(self) -> GaussianPolynomial:
        spec = self.spec or HamiltonianSpec()
        items = [
            ho_state(m, spec.omega, spec.hbar, max_n=64).scale(c)
            for m, c in sorted(self.fock_vector().items())
            if c != 0
        ]
        return sum_functions(items, 2)


def _check_policy(spec: HamiltonianSpec, n: FockLabel, skipped: dict):
    big = {m: v for m, v in skipped.items() if v > DEGENERATE_TOL}
    if not big:
        return
    if spec.policy == "strict":
        raise DegeneracyError(f"degenerate couplings for {n}: {big}")
    log.info("skipped %d degenerate couplings for %s (max %.3e)", len(big), n, max(big.values()))


def first_order_energy(spec: HamiltonianSpec, n: Label, parts=PARTS) -> float:
    n = FockLabel.coerce(n)
    return fock_element(spec, n, n, parts)


def _neighbours(n: FockLabel, top: int, reach: int) -> list[FockLabel]:
    return [m for m in labels_in_shells(top, max(0, n.shell - reach)) if m != n]


def first_order_state(spec: HamiltonianSpec, n: Label) -> PerturbedState:
    n = FockLabel.coerce(n)
    top = spec.cutoff_for(n)
    ms = _neighbours(n, top, SHELL_REACH)
    col = fock_matrix(spec, ms, [n])[:, 0]
    En = ho_energy(n, spec.omega, spec.hbar)
    coeffs, skipped = {}, {}
    for m, v in zip(ms, col):
        dE = En - ho_energy(m, spec.omega, spec.hbar)
        if abs(dE) < 1e-12:
            skipped[m] = abs(v)
            continue
        if v != 0:
            coeffs[m] = complex(v / dE)
    _check_policy(spec, n, skipped)
    return PerturbedState(1, n, coeffs, first_order_energy(spec, n), None, None, skipped, spec)


def second_order_energy(spec: HamiltonianSpec, n: Label) -> float:
    n = FockLabel.coerce(n)
    top = spec.cutoff_for(n)
    ms = _neighbours(n, top, SHELL_REACH)
    col = fock_matrix(spec, ms, [n])[:, 0]
    En = ho_energy(n, spec.omega, spec.hbar)
    total, skipped = [], {}
    for m, v in zip(ms, col):
        dE = En - ho_energy(m, spec.omega, spec.hbar)
        if abs(dE) < 1e-12:
            skipped[m] = abs(v)
            continue
        total.append(v * v / dE)
    _check_policy(spec, n, skipped)
    return math.fsum(total)


def second_order_state(spec: HamiltonianSpec, n: Label) -> PerturbedState:
    n = FockLabel.coerce(n)
    first = first_order_state(spec, n)
    top = spec.cutoff_for(n, reach=2 * SHELL_REACH)
    ms = _neighbours(n, top, 2 * SHELL_REACH)
    ks = sorted(first.coefficients)
    En = ho_energy(n, spec.omega, spec.hbar)
    Vmk = fock_matrix(spec, ms, ks) if ks else np.zeros((len(ms), 0))
    Vmn = fock_matrix(spec, ms, [n])[:, 0]
    a1 = np.array([first.coefficients[k] for k in ks])
    E1 = first.energy1
    coeffs, skipped = {}, dict(first.skipped)
    for i, m in enumerate(ms):
        dE = En - ho_energy(m, spec.omega, spec.hbar)
        if abs(dE) < 1e-12:
            skipped[m] = max(skipped.get(m, 0.0), abs(Vmn[i]))
            continue
        # a_m^2 = sum_k V_mk a_k^1 / (E_n - E_m) - V_mn V_nn / (E_n - E_m)^2
        val = (Vmk[i] @ a1) / dE - Vmn[i] * E1 / dE ** 2 if ks else -Vmn[i] * E1 / dE ** 2
        if val != 0:
            coeffs[m] = complex(val)
    _check_policy(spec, n, skipped)
    return PerturbedState(
        2, n, coeffs, E1, second_order_energy(spec, n), dict(first.coefficients), skipped, spec
    )


def unperturbed_state(spec: HamiltonianSpec, n: Label) -> PerturbedState:
    n = FockLabel.coerce(n)
    return PerturbedState(0, n, {}, 0.0, 0.0, None, {}, spec)


def perturbed_state(spec: HamiltonianSpec, n: Label, order: int) -> PerturbedState:
    if order == 0:
        return unperturbed_state(spec, n)
    if order == 1:
        return first_order_state(spec, n)
    if order == 2:
        return second_order_state(spec, n)
    raise ValueError("perturbation order must be 0, 1 or 2")


def golden_record(spec: HamiltonianSpec, n: Label) -> dict:
    """JSON-ready first/second-order data for one state."""
    n = FockLabel.coerce(n)
    st = first_order_state(spec, n)
    return {
        "n": [n.nx, n.ny],
        "epsilon": spec.epsilon,
        "lambda": spec.lam,
        "E1": st.energy1,
        "E2": second_order_energy(spec, n),
        "coefficients": [[m.nx, m.ny, c.real] for m, c in sorted(st.coefficients.items())],
    }


# ----------------------------------------------------------------------------
# closed-form tables and their errata


def first_order_state_appendix(spec: HamiltonianSpec, n: Label) -> PerturbedState:
    """First-order state from the literal a0..a7 tables (natural units only).

    The tables carry no coupling constant; the result is scaled by ``lam`` so
    that it is comparable with :func:`first_order_state` for any coupling.
    """
    from . import appendix

    if spec.hbar != 1.0 or spec.omega != 1.0:
        raise ValueError("the closed-form tables are written for hbar = omega = 1")
    n = FockLabel.coerce(n)
    coeffs = {m: complex(spec.lam * c) for m, c in appendix.assemble(n, spec.epsilon).items()}
    coeffs.pop(n, None)
    return PerturbedState(1, n, coeffs, first_order_energy(spec, n), None, None, {}, spec)


@dataclass(frozen=True)
class Erratum:
    n: FockLabel
    epsilon: float
    m: FockLabel
    table: float
    generic: float
    kind: str

    def as_dict(self) -> dict:
        return {
            "n": [self.n.nx, self.n.ny],
            "epsilon": self.epsilon,
            "m": [self.m.nx, self.m.ny],
            "table": self.table,
            "generic": self.generic,
            "kind": self.kind,
        }


def compare_with_generic(spec: HamiltonianSpec, n: Label, tol: float = ORACLE_TOL) -> list[Erratum]:
    """Coefficients where the closed-form tables and direct perturbation theory differ.

    ``kind`` is ``"degenerate"`` when the table keeps a same-shell label that
    the generic sum must skip, ``"spurious"`` when only the table has the
    label, ``"missing"`` when only the generic sum has it, else ``"value"``.
    """
    n = FockLabel.coerce(n)
    tab = first_order_state_appendix(spec, n).coefficients
    gen = first_order_state(spec.with_(policy="paper-faithful"), n).coefficients
    out = []
    for m in sorted(set(tab) | set(gen)):
        a, b = tab.get(m, 0j).real, gen.get(m, 0j).real
        if abs(a - b) <= tol:
            continue
        if m.shell == n.shell:
            kind = "degenerate"
        elif abs(b) <= tol:
            kind = "spurious"
        elif abs(a) <= tol:
            kind = "missing"
        else:
            kind = "value"
        out.append(Erratum(n, spec.epsilon, m, a, b, kind))
    return out


ERRATA_STATES = (FockLabel(0, 0), FockLabel(1, 0), FockLabel(1, 1), FockLabel(2, 2))


def errata_table(lam: float = 1.0) -> list[dict]:
    """All table/generic mismatches for the checked states and epsilon presets."""
    rows = []
    for eps in EPSILON_PRESETS:
        for n in ERRATA_STATES:
            rows += [e.as_dict() for e in compare_with_generic(HamiltonianSpec(lam=lam, epsilon=eps), n)]
    return rows
