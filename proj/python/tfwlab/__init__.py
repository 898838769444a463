"""Generalized Thomas-Fermi-von Weizsaecker atoms and excess-charge bounds."""

from ._core import (
    NumericalError,
    TFSolution,
    TFWSolution,
    bound_curve,
    c_lambda,
    check_names,
    compute_B,
    critical_excess_bound,
    gamma_critical,
    load_tfw,
    nam_particle_bound,
    psi_cap_nonpositive_phi,
    scaling_constants,
    solve_tf,
    solve_tfw,
    verify,
)

__all__ = [
    "NumericalError",
    "TFSolution",
    "TFWSolution",
    "bound_curve",
    "c_lambda",
    "check_names",
    "compute_B",
    "critical_excess_bound",
    "gamma_critical",
    "load_tfw",
    "nam_particle_bound",
    "psi_cap_nonpositive_phi",
    "scaling_constants",
    "solve_tf",
    "solve_tfw",
    "verify",
]
