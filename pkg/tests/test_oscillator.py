import math

import numpy as np
import pytest

from moyalqm.core import star_truncated
from moyalqm.oscillator import (
    FockLabel,
    hamiltonian,
    ho_energy,
    ho_ground,
    ho_state,
    labels_in_shells,
    ladder_set,
    norm2,
    star_overlap,
)
from moyalqm.quadrature import integrate


def test_ground_state_normalisation():
    g = ho_ground()
    assert abs(norm2(g) - 1) < 1e-13
    # |psi|^2 integrates to one, so the peak is 2/pi in four variables
    assert abs(g.evaluate([0, 0, 0, 0]) - 2 / math.pi) < 1e-14


def test_ground_state_is_annihilated():
    lad = ladder_set()
    assert lad.A(ho_ground()).max_abs_coeff() < 1e-15
    assert lad.B(ho_ground()).max_abs_coeff() < 1e-15


@pytest.mark.parametrize("n", labels_in_shells(4))
def test_spectrum(n):
    psi = ho_state(n)
    r = hamiltonian()(psi) - psi.scale(ho_energy(n))
    assert r.max_abs_coeff() <= 1e-8 * psi.max_abs_coeff()


def test_orthonormality():
    labels = labels_in_shells(3)
    states = [ho_state(n) for n in labels]
    G = np.array([[integrate(a.conj() * b) for b in states] for a in states])
    assert np.abs(G - np.eye(len(labels))).max() < 1e-12


def test_number_operator():
    lad = ladder_set()
    psi = ho_state((3, 1))
    n_x = integrate(psi.conj() * lad.Ad(lad.A(psi))).real
    assert abs(n_x - 3) < 1e-12


def test_star_overlap_equals_pointwise_overlap():
    a, b = ho_state((2, 1)), ho_state((2, 1))
    assert abs(star_overlap(a, b, K=2) - 1) < 1e-10
    assert abs(star_overlap(ho_state((1, 0)), ho_state((0, 1)), K=3)) < 1e-12


def test_one_dimensional_states():
    psi = ho_state(3)
    assert psi.dim == 1
    r = hamiltonian(dim=1)(psi) - psi.scale(3.5)
    assert r.max_abs_coeff() < 1e-12


def test_frequency_and_hbar_scaling():
    psi = ho_state((1, 2), omega=2.0, hbar=0.5)
    H = hamiltonian(2.0, 0.5)
    assert (H(psi) - psi.scale(ho_energy((1, 2), 2.0, 0.5))).max_abs_coeff() < 1e-12


def test_label_errors():
    with pytest.raises(ValueError):
        FockLabel(-1, 0)
    with pytest.raises(OverflowError):
        ho_state((15, 0))
    with pytest.raises(ValueError):
        ho_ground(omega=0)
