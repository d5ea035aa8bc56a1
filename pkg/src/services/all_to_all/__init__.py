"""
All-to-all encode service.

Universal prepare-and-shoot, structured DFT and draw-and-loose encoders,
and the two-pass Cauchy-like block encoder.
"""

from .cauchy import (
    CauchyBlockSpec,
    GRSPoints,
    PointDesignError,
    cauchy_block_program,
    cauchy_block_specs,
    design_grs_points,
    phi_psi_diagonals,
    predicted_cost_cauchy,
    predicted_profile_cauchy,
    virtual_points,
)
from .structured import (
    MAX_RADIX,
    ElementTree,
    GridMatch,
    OmegaGrid,
    PhiNotInjectiveError,
    PhiOutOfRangeError,
    choose_radix,
    detect_omega_grid,
    draw_and_loose_program,
    make_omega_grid,
    permuted_dft_program,
    polynomial_tree_exponents,
    predicted_cost_structured,
    predicted_profile_dft,
    predicted_profile_draw_and_loose,
)
from .universal import (
    PhasePlan,
    PrepareAndShoot,
    WindowSets,
    balanced_cost_universal,
    choose_phase_lengths,
    effective_ports,
    lower_bounds,
    predicted_cost_universal,
    predicted_profile_universal,
    prepare_and_shoot,
    window_sets,
)

__all__ = [
    "CauchyBlockSpec",
    "ElementTree",
    "GRSPoints",
    "GridMatch",
    "MAX_RADIX",
    "OmegaGrid",
    "PhasePlan",
    "PhiNotInjectiveError",
    "PhiOutOfRangeError",
    "PointDesignError",
    "PrepareAndShoot",
    "WindowSets",
    "balanced_cost_universal",
    "cauchy_block_program",
    "cauchy_block_specs",
    "choose_phase_lengths",
    "choose_radix",
    "design_grs_points",
    "detect_omega_grid",
    "draw_and_loose_program",
    "effective_ports",
    "lower_bounds",
    "make_omega_grid",
    "permuted_dft_program",
    "phi_psi_diagonals",
    "polynomial_tree_exponents",
    "predicted_cost_cauchy",
    "predicted_cost_structured",
    "predicted_cost_universal",
    "predicted_profile_cauchy",
    "predicted_profile_dft",
    "predicted_profile_draw_and_loose",
    "predicted_profile_universal",
    "prepare_and_shoot",
    "virtual_points",
    "window_sets",
]
