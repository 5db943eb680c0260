"""Quantum mechanics in phase space with Moyal star products."""
from .core import (
    Envelope,
    GaussianPolynomial,
    NonHermitianError,
    NotIntegrableError,
    StarOperator,
    bopp_apply,
    differentiate,
    moyal_bracket,
    star_truncated,
)
from .hydrogen import (
    bohr_radius_check,
    confluent_F,
    hydrogen_energy,
    hydrogen_negativity,
    hydrogen_state,
    hydrogen_wigner,
)
from .oscillator import FockLabel, ho_energy, ho_ground, ho_state, ladder_set, star_overlap
from .perturbation import (
    EPSILON_PRESETS,
    HamiltonianSpec,
    PerturbedState,
    apply_V,
    first_order_energy,
    first_order_state,
    first_order_state_appendix,
    matrix_element,
    perturbed_state,
    potential_symbol,
    second_order_energy,
    second_order_state,
)
from .quadrature import Quadrature, integrate, integrate_abs
from .wigner import (
    GridSpec,
    WignerGrid,
    evaluate_grid,
    extrema,
    marginal_position,
    negativity,
    wigner_from_state,
    wigner_perturbed,
)

__all__ = [name for name in dir() if not name.startswith("_")]
