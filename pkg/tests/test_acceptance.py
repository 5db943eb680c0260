"""One check per acceptance criterion; each prints a PASS/FAIL line in the summary."""
import json
import math
import time
from importlib import resources

import numpy as np
import pytest

from moyalqm.cli import main
from moyalqm.core import GaussianPolynomial, StarOperator, bopp_apply, star_truncated
from moyalqm.hydrogen import bohr_radius_check, hydrogen_energy, hydrogen_negativity, hydrogen_wigner, shape_residual
from moyalqm.oscillator import hamiltonian, ho_energy, ho_ground, ho_state, labels_in_shells, ladder_set, star_overlap_detail
from moyalqm.perturbation import (
    EPSILON_PRESETS,
    ERRATA_STATES,
    HamiltonianSpec,
    compare_with_generic,
    first_order_energy,
    fock_element,
    integral_element,
    perturbed_state,
)
from moyalqm.quadrature import Quadrature
from moyalqm.wigner import eigen_residual, extrema, negativity_detail, wigner_from_state, wigner_perturbed

from oracles import schroedinger_element

HH_SHELLS = (0, 2, 4, 6, 8)
TREND_REASON = "normalised first-order Wigner functions do not follow the published epsilon trends"


def rel(a: GaussianPolynomial, b: GaussianPolynomial) -> float:
    return (a - b).max_abs_coeff() / max(b.max_abs_coeff(), 1e-300)


def random_symbol(rng, dim, degree, nterms=5):
    out = GaussianPolynomial.zero(dim)
    for _ in range(nterms):
        exps = rng.multinomial(rng.integers(0, degree + 1), [1 / (2 * dim)] * (2 * dim))
        out = out + GaussianPolynomial.monomial(list(exps), complex(*rng.normal(size=2)), dim)
    return out


def hh_label(n):
    return (n // 2, n // 2)


@pytest.fixture(scope="module")
def hh_states():
    out = {}
    for n in HH_SHELLS:
        for e in EPSILON_PRESETS:
            out[(n, e)] = wigner_perturbed(perturbed_state(HamiltonianSpec(epsilon=e), hh_label(n), 1))
    return out


@pytest.fixture(scope="module")
def hh_negativity(hh_states):
    return {k: negativity_detail(f, Quadrature.trapezoid(64)) for k, f in hh_states.items()}


@pytest.fixture(scope="module")
def hh_extrema(hh_states):
    return {k: extrema(f) for k, f in hh_states.items()}


def test_01_heisenberg_and_ladder_algebra(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    probes = [ho_state(n) for n in labels_in_shells(2)[:6]]
    probes += [random_symbol(rng, 2, 3) * ho_ground() for _ in range(4)]
    q = StarOperator(GaussianPolynomial.variable(0, 2))
    p = StarOperator(GaussianPolynomial.variable(1, 2))
    lad = ladder_set()
    worst = 0.0
    for f in probes:
        worst = max(worst, rel(q(p(f)) - p(q(f)), f.scale(1j)))
        worst = max(worst, rel(lad.A(lad.Ad(f)) - lad.Ad(lad.A(f)), f))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    report("01 Heisenberg/ladder algebra", ok, f"residual={worst:.2e} time={dt:.2f}s")
    assert ok


def test_02_star_identities(report):
    t0 = time.perf_counter()
    q = GaussianPolynomial.variable(0, 1)
    p = GaussianPolynomial.variable(1, 1)
    exact = star_truncated(q, p, 8).allclose(q * p + GaussianPolynomial.constant(0.5j, 1), rtol=0)
    rng = np.random.default_rng(5)
    agree = 0
    for i in range(50):
        dim = 1 + i % 2
        a = random_symbol(rng, dim, 6)
        f = random_symbol(rng, dim, 6)
        agree += star_truncated(a, f, a.degree()).allclose(bopp_apply(StarOperator(a), f), rtol=1e-12)
    dt = time.perf_counter() - t0
    ok = exact and agree == 50 and dt < 5.0
    report("02 star identities", ok, f"q*p exact={exact} star==bopp {agree}/50 time={dt:.2f}s")
    assert ok


def test_03_integral_identity(report):
    worst = max(star_overlap_detail(ho_state(n), ho_state(n), K=2).mismatch for n in labels_in_shells(4))
    ok = worst <= 1e-8
    report("03 star vs pointwise overlap", ok, f"max mismatch={worst:.2e}")
    assert ok


def test_04_oscillator_spectrum(report):
    H = hamiltonian()
    worst = 0.0
    for n in labels_in_shells(4):
        psi = ho_state(n)
        worst = max(worst, rel(H(psi), psi.scale(ho_energy(n))))
    ok = worst <= 1e-8
    report("04 oscillator spectrum", ok, f"residual={worst:.2e}")
    assert ok


def test_05_eigen_wigner_identity(report):
    worst = max(eigen_residual(wigner_from_state(ho_state(n)), ho_energy(n)) for n in labels_in_shells(3))
    ok = worst <= 1e-8
    report("05 H*f = E f", ok, f"residual={worst:.2e}")
    assert ok


def test_06_perturbation_oracles(report):
    labels = labels_in_shells(4)
    worst = 0.0
    for e in EPSILON_PRESETS:
        spec = HamiltonianSpec(epsilon=e)
        for m in labels:
            for n in labels:
                a, b = integral_element(spec, m, n), fock_element(spec, m, n)
                worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    shipped = json.loads(resources.files("moyalqm").joinpath("data", "table_errata.json").read_text())
    documented = {(tuple(r["n"]), r["epsilon"], tuple(r["m"])) for r in shipped}
    found, unexplained = 0, []
    for e in EPSILON_PRESETS:
        for n in ERRATA_STATES:
            for err in compare_with_generic(HamiltonianSpec(epsilon=e), n):
                found += 1
                dE = ho_energy(n) - ho_energy(err.m)
                brute = 0.0 if dE == 0 else schroedinger_element(tuple(err.m), tuple(n), eps=e) / dE
                key = (tuple(n), e, tuple(err.m))
                if key not in documented or abs(brute - err.generic) > 1e-9:
                    unexplained.append(key)
    ok = worst <= 1e-9 and not unexplained and found == len(shipped)
    report(
        "06 matrix-element routes and table errata",
        ok,
        f"route diff={worst:.2e} table mismatches={found} documented+oracle-confirmed={found - len(unexplained)}",
    )
    assert ok


def test_07_cubic_parity(report):
    worst = 0.0
    for e in EPSILON_PRESETS:
        spec = HamiltonianSpec(epsilon=e)
        for n in labels_in_shells(4):
            worst = max(worst, abs(fock_element(spec, n, n, ("cubic",))), abs(integral_element(spec, n, n, ("cubic",))))
            full = first_order_energy(spec, n)
            rest = fock_element(spec, n, n, ("sextic", "quadratic"))
            worst = max(worst, abs(full - rest))
    ok = worst <= 1e-12
    report("07 cubic terms drop from E1", ok, f"max contribution={worst:.2e}")
    assert ok


def test_08_hydrogen_energies(report):
    t0 = time.perf_counter()
    worst = max(abs(hydrogen_energy(n)[1] - (-13.6 / n ** 2)) / (13.6 / n ** 2) for n in range(1, 10))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-3 and dt < 1.0
    report("08 hydrogen energies", ok, f"max rel dev={worst:.2e} time={dt:.3f}s")
    assert ok


def test_09_bohr_radius(report):
    b = bohr_radius_check()
    ok = abs(b.radial - 1.0) <= 1e-3
    report("09 Bohr radius", ok, f"argmax sigma at r={b.radial:.6f} (lab q={b.lab:.6f})")
    assert ok


def test_10_hydrogen_wigner_shape(report):
    res = shape_residual(hydrogen_wigner(1, K=2, frame="gauge"), np.linspace(0, 10, 2001))
    lab = shape_residual(hydrogen_wigner(1, K=2, frame="lab"), np.linspace(0, 10, 2001))
    ok = res <= 1e-10
    report("10 hydrogen ground Wigner shape", ok, f"residual={res:.2e} (lab frame {lab:.2e})")
    assert ok


def test_11_negativity_anchors(report):
    t0 = time.perf_counter()
    h = hydrogen_negativity(1)
    f = wigner_from_state(ho_ground())
    g = negativity_detail(f, Quadrature.trapezoid(64))
    dt = time.perf_counter() - t0
    ok = abs(h.eta) <= 5e-3 and abs(g.eta) <= 5e-3 and h.delta < 5e-3 and g.delta < 5e-3 and dt < 120
    report("11 negativity anchors", ok, f"hydrogen={h.eta:.2e} HH ground={g.eta:.2e} deltas={h.delta:.1e},{g.delta:.1e} time={dt:.1f}s")
    assert ok


def test_12a_hydrogen_negativity_trend(report):
    etas = [hydrogen_negativity(n).eta for n in range(1, 10)]
    ok = all(b >= a for a, b in zip(etas, etas[1:]))
    report("12a hydrogen eta nondecreasing in n", ok, " ".join(f"{x:.4f}" for x in etas))
    assert ok


@pytest.mark.xfail(strict=True, reason=TREND_REASON)
def test_12b_henon_heiles_negativity_trend(report, hh_negativity):
    bad = []
    for n in HH_SHELLS:
        etas = [hh_negativity[(n, e)].eta for e in EPSILON_PRESETS]
        if not all(b > a for a, b in zip(etas, etas[1:])):
            bad.append(f"n={n}:" + "/".join(f"{x:.4f}" for x in etas))
    ok = not bad
    worst = max(r.delta for r in hh_negativity.values())
    report("12b HH eta strictly increasing in eps", ok, "; ".join(bad) + f" (max grid delta {worst:.1e})")
    assert ok


@pytest.mark.xfail(strict=True, reason=TREND_REASON)
def test_13a_extrema_trend(report, hh_extrema):
    bad = []
    for n in HH_SHELLS:
        mx = [hh_extrema[(n, e)].max for e in EPSILON_PRESETS]
        mn = [-hh_extrema[(n, e)].min for e in EPSILON_PRESETS]
        if not all(b >= a for a, b in zip(mx, mx[1:])):
            bad.append(f"max n={n}")
        if not all(b >= a for a, b in zip(mn, mn[1:])):
            bad.append(f"|min| n={n}")
    ok = not bad
    report("13a extrema nondecreasing in eps", ok, ", ".join(bad))
    assert ok


def test_13b_extrema_sign_structure(report, hh_extrema):
    rows = [(n, e) for n in HH_SHELLS if n >= 2 for e in EPSILON_PRESETS]
    ok = all(hh_extrema[k].max > 0 > hh_extrema[k].min for k in rows)
    report("13b max>0>min for n>=2", ok, f"{len(rows)} rows")
    assert ok


def test_14_cli_determinism(report, tmp_path):
    commands = [
        ["wigner-grid", "--state", "2", "--epsilon", "0.28", "--grid", "33"],
        ["extrema-table", "--n", "0", "--epsilon", "0,1"],
        ["negativity", "--system", "hydrogen1d", "--n", "1,2"],
        ["negativity", "--n", "0", "--epsilon", "0.5", "--grid", "24"],
        ["hydrogen", "--n", "1,2"],
    ]
    same = 0
    for i, argv in enumerate(commands):
        a, b = tmp_path / f"{i}a", tmp_path / f"{i}b"
        main(argv + ["--out-dir", str(a)])
        main(argv + ["--out-dir", str(b)])
        names = sorted(x.name for x in a.glob("*.csv"))
        same += bool(names) and names == sorted(x.name for x in b.glob("*.csv")) and all(
            (a / x).read_bytes() == (b / x).read_bytes() for x in names
        )
    ok = same == len(commands)
    report("14 CLI determinism", ok, f"{same}/{len(commands)} commands byte-identical")
    assert ok
