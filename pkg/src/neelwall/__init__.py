"""Numerical laboratory for one-dimensional transition layers with a nonlocal
stray-field energy: constrained minimization, closed-form interaction laws,
single-wall core energies, and ladder extrapolation experiments."""

__version__ = "0.1.0"

from .asymptotics import (DEFAULT_LADDER, EXTENDED_LADDER, LADDER_GRIDS,
                          DifferenceResult, LadderPoint, SweepResult,
                          difference_experiment, difference_from_ladders,
                          extrapolate_in_lam, grid_for_epsilon,
                          interaction_sign_report, model_shift, pair_force_table,
                          run_ladder, sweep, sweep_from_ladder)
from .closedform import (LimitStrayField, RenormalizedEnergy, TailProfile,
                         cross_energy, invert_F, limit_field_star, renormalized_W,
                         tail_mu, tail_star)
from .corelab import (DEFAULT_CORE_LADDER, CoreEnergyResult, CoreMinimizeResult,
                      CoreProblem, extract_core_energy, minimize_core,
                      profile_law_sup)
from .domain import (PhaseField, Scales, WallConfig, default_branches,
                     lift_and_wind, mobius_metric, mobius_transform,
                     phase_from_m1)
from .minimizer import (TAIL_COST_INTEGRAL, EnergyBreakdown, MinimizeOptions,
                        MinimizeReport, PohozaevReport, construction_energy_bound,
                        construction_profile, core_estimate_checks,
                        default_grid_size, el_residual, exchange_energy, minimize,
                        pohozaev_check)
from .strayfield import (ExtendedTrace, SpectralOperator, StrayPotential,
                         extension_energy, gagliardo_energy, magnetostatic_energy,
                         magnetostatic_gradient, periodization_kernel)

__all__ = [
    "__version__",
    "DEFAULT_LADDER", "EXTENDED_LADDER", "LADDER_GRIDS", "DEFAULT_CORE_LADDER",
    "TAIL_COST_INTEGRAL",
    "WallConfig", "Scales", "PhaseField", "default_branches", "phase_from_m1",
    "lift_and_wind", "mobius_metric", "mobius_transform",
    "LimitStrayField", "TailProfile", "RenormalizedEnergy", "renormalized_W",
    "limit_field_star", "tail_star", "cross_energy", "tail_mu", "invert_F",
    "ExtendedTrace", "SpectralOperator", "StrayPotential", "periodization_kernel",
    "magnetostatic_energy", "magnetostatic_gradient", "gagliardo_energy",
    "extension_energy",
    "MinimizeOptions", "MinimizeReport", "EnergyBreakdown", "minimize",
    "construction_profile", "construction_energy_bound", "default_grid_size",
    "exchange_energy", "el_residual", "PohozaevReport", "pohozaev_check",
    "core_estimate_checks",
    "CoreProblem", "CoreMinimizeResult", "CoreEnergyResult", "minimize_core",
    "extract_core_energy", "profile_law_sup",
    "LadderPoint", "SweepResult", "DifferenceResult", "run_ladder", "sweep",
    "difference_experiment", "difference_from_ladders", "extrapolate_in_lam",
    "grid_for_epsilon", "model_shift", "interaction_sign_report",
    "pair_force_table", "sweep_from_ladder",
]
