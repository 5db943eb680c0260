import json
import math

import numpy as np
import pytest

from moyalqm.core import NonHermitianError
from moyalqm.oscillator import ho_ground, ho_state
from moyalqm.perturbation import HamiltonianSpec, perturbed_state, unperturbed_state
from moyalqm.quadrature import Quadrature, integrate
from moyalqm.wigner import (
    GridSpec,
    WignerGrid,
    eigen_residual,
    evaluate_grid,
    extrema,
    hermitian_part,
    marginal_position,
    negativity_detail,
    project_on_basis,
    wigner_from_coefficients,
    wigner_from_state,
    wigner_perturbed,
)

from oracles import laguerre_wigner, wigner_transform

rng = np.random.default_rng(7)


@pytest.mark.parametrize("n", range(6))
def test_laguerre_closed_form_1d(n):
    f = wigner_from_state(ho_state(n))
    pts = rng.uniform(-3, 3, size=(20, 2))
    got = np.array([f.evaluate(x).real for x in pts])
    assert np.abs(got - laguerre_wigner(n, pts[:, 0], pts[:, 1])).max() < 1e-13


@pytest.mark.parametrize("n", [(0, 0), (1, 0), (2, 1), (3, 3)])
def test_laguerre_closed_form_2d(n):
    f = wigner_from_state(ho_state(n))
    for x in rng.uniform(-2.5, 2.5, size=(10, 4)):
        ref = laguerre_wigner(n[0], x[0], x[1]) * laguerre_wigner(n[1], x[2], x[3])
        assert abs(f.evaluate(x).real - ref) < 1e-13


def test_origin_value_of_first_excited_state():
    f = wigner_from_state(ho_state((1, 0)))
    assert abs(f.evaluate([0, 0, 0, 0]).real + 1 / math.pi ** 2) < 1e-15


def test_superposition_against_position_space_transform():
    coeffs = {0: 0.6, 1: 0.48j, 3: -0.64}
    f = wigner_from_coefficients(coeffs, dim=1)
    for q, p in rng.uniform(-2, 2, size=(6, 2)):
        assert abs(f.evaluate([q, p]).real - wigner_transform(coeffs, q, p)) < 1e-12


def test_unnormalised_coefficients_are_normalised():
    f = wigner_from_coefficients({(0, 0): 3.0, (1, 1): 4.0})
    assert abs(integrate(f) - 1) < 1e-13


def test_exact_form_obeys_eigen_equation():
    for n in [(0, 0), (2, 1)]:
        f = wigner_from_state(ho_state(n))
        assert eigen_residual(f, sum(n) + 1.0) < 1e-12


def test_project_on_basis():
    psi = ho_state((1, 0)).scale(0.6) + ho_state((0, 2)).scale(0.8j)
    c = project_on_basis(psi)
    assert abs(c[(1, 0)] - 0.6) < 1e-13 and abs(c[(0, 2)] - 0.8j) < 1e-13
    with pytest.raises(ValueError):
        project_on_basis(ho_ground(omega=2.0))


def test_truncated_series_option():
    exact = wigner_from_state(ho_ground())
    # the ground amplitude is star-idempotent up to scale
    assert exact.allclose(ho_ground().scale(1 / (2 * math.pi)), rtol=1e-12)
    assert not wigner_from_state(ho_ground(), K=0).allclose(exact, rtol=1e-3)
    k2 = wigner_from_state(ho_ground(), K=2)
    assert not k2.allclose(exact, rtol=1e-3)
    assert k2.evaluate([0, 0, 0, 0]).real < 0


def test_hermitian_part_rejects_complex_input():
    f = wigner_from_state(ho_state((1, 0)))
    with pytest.raises(NonHermitianError):
        hermitian_part(f + f.scale(1e-3j))
    _, imag = hermitian_part(f + f.scale(1e-12j))
    assert imag < 1e-11


def test_translation_invariance_of_integrals():
    f = wigner_from_state(ho_state((1, 0)))
    g = f.translated([0.7, -0.3, 1.1, 0.2])
    assert abs(integrate(g) - 1) < 1e-12
    x = np.array([0.1, 0.2, -0.4, 0.5])
    assert abs(g.evaluate(x) - f.evaluate(x - np.array([0.7, -0.3, 1.1, 0.2]))) < 1e-13


def test_negativity_ground_and_first_excited():
    nd = negativity_detail(wigner_from_state(ho_ground()))
    assert abs(nd.eta) < 5e-3
    nd = negativity_detail(wigner_from_state(ho_state((1, 0))))
    exact = 4 * math.exp(-0.5) - 2
    assert abs(nd.eta - exact) < 5e-3
    assert nd.delta < 5e-3


def test_negativity_1d_exact_with_dense_grid():
    f = wigner_from_state(ho_state(1))
    nd = negativity_detail(f, Quadrature.trapezoid(801))
    # the kink of |f| on the nodal circle limits the trapezoid rule to O(h^2)
    assert abs(nd.eta - (4 * math.exp(-0.5) - 2)) < 5e-5


def test_negativity_rejects_unnormalised():
    with pytest.raises(ValueError):
        negativity_detail(wigner_from_state(ho_ground()).scale(0.5))


def test_extrema_of_first_excited_state():
    e = extrema(wigner_from_state(ho_state(1)))
    assert abs(e.min + 1 / math.pi) < 1e-12
    assert np.allclose(e.argmin, (0, 0), atol=1e-8)
    # max of (2r^2 - 1) e^{-r^2} / pi sits on r^2 = 3/2
    assert abs(e.max - 2 * math.exp(-1.5) / math.pi) < 1e-12
    assert abs(e.argmax[0] ** 2 + e.argmax[1] ** 2 - 1.5) < 1e-8


def test_extrema_4d():
    e = extrema(wigner_from_state(ho_state((1, 0))))
    assert abs(e.min + 1 / math.pi ** 2) < 1e-12
    assert abs(e.max - 2 * math.exp(-1.5) / math.pi ** 2) < 1e-10


def test_position_marginal_is_probability_density():
    f = wigner_from_state(ho_state((2, 0)))
    m = marginal_position(f, q=np.linspace(-6, 6, 1201), axis=0)
    phi2 = (4 * m.q ** 2 - 2) ** 2 * np.exp(-m.q ** 2) / (8 * math.sqrt(math.pi))
    assert np.abs(m.values - phi2).max() < 1e-6
    assert abs(abs(m.argmax) - math.sqrt(2.5)) < 1e-2


def test_grid_csv_round_trip():
    f = wigner_from_state(ho_state((1, 1)))
    spec = GridSpec(((-3, 3, 7), 0.0, (-2, 2, 5), 0.5))
    g = evaluate_grid(f, spec)
    assert g.values.shape == (7, 5)
    assert g.meta["variables"] == ["q_x", "q_y"]
    assert g.meta["fixed"] == {"p_x": 0.0, "p_y": 0.5}
    text = g.to_csv()
    assert text.endswith("\r\n") and text.splitlines()[0] == "q_x,q_y,value"
    back = WignerGrid.from_csv(text)
    assert np.array_equal(back.values, g.values)
    assert json.loads(g.sidecar())["shape"] == [7, 5]


def test_grid_integral_matches_exact():
    f = wigner_from_state(ho_state(2))
    g = evaluate_grid(f, GridSpec(((-7, 7, 281), (-7, 7, 281))))
    assert abs(g.integral() - 1) < 1e-9


def test_zero_coupling_reduces_to_unperturbed():
    spec = HamiltonianSpec(lam=0.0, epsilon=0.5)
    st = perturbed_state(spec, (1, 1), order=2)
    assert wigner_perturbed(st).allclose(wigner_from_state(ho_state((1, 1))), rtol=1e-12)
    assert wigner_perturbed(unperturbed_state(spec, (1, 1))).allclose(wigner_from_state(ho_state((1, 1))), rtol=1e-12)


def test_perturbed_wigner_is_normalised_and_real():
    st = perturbed_state(HamiltonianSpec(lam=0.1, epsilon=0.28), (0, 0), order=1)
    f = wigner_perturbed(st)
    assert abs(integrate(f) - 1) < 1e-12
    assert f.conj().allclose(f, rtol=1e-14)
