"""Python bindings for the hilbvp solver library."""

from ._hilbvp import (
    NumericalError,
    apply_evolution,
    generating_F,
    generating_torus,
    jacobian_B0,
    pinv,
    resonant_frequencies,
    shoot_periodic,
    solve_periodic_linear,
    solve_vdp,
    torus_amplitude,
    w_plus_closed_form,
)

__all__ = [
    "NumericalError",
    "apply_evolution",
    "generating_F",
    "generating_torus",
    "jacobian_B0",
    "pinv",
    "resonant_frequencies",
    "shoot_periodic",
    "solve_periodic_linear",
    "solve_vdp",
    "torus_amplitude",
    "w_plus_closed_form",
]
