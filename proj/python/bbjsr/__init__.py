"""Data-driven bounds on the joint spectral radius of switched linear systems."""

from ._core import (
    ValidationError,
    analyze,
    cap_measure,
    delta_shrink,
    epsilon_of_beta,
    inv_reg_inc_beta,
    jsr_bruteforce,
    jsr_cqf_upper,
    kappa,
    netctl_modes,
    reg_inc_beta,
    scenario_confidence,
    simulate,
    true_rho,
)

__all__ = [
    "ValidationError",
    "analyze",
    "cap_measure",
    "delta_shrink",
    "epsilon_of_beta",
    "inv_reg_inc_beta",
    "jsr_bruteforce",
    "jsr_cqf_upper",
    "kappa",
    "netctl_modes",
    "reg_inc_beta",
    "scenario_confidence",
    "simulate",
    "true_rho",
]
