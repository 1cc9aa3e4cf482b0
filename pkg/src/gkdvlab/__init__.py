"""Numerical laboratory for solitary waves of the supercritical gKdV equation.

Layers, bottom up: periodic grids and spectral calculus (grid), the wave
family and its scaling symmetry (waves), the linearized operator's mode
pair and coercivity (spectral), chart coordinates around the family
(coords), exponential time integration (dynamics), invariant-manifold
shooting experiments (manifold_lab), and a deterministic CLI (cli, config).
"""

from .config import RunConfig, parse_config, serialize_config
from .coords import (Coords, ManifoldDistance, ResidualSeries,
                     distance_to_manifold, embed, fit_modulation,
                     modulation_residual)
from .dynamics import (ConservationReport, Stepper, Trajectory,
                       conservation_report, evolve, evolve_linearized)
from .errors import (ChartError, ConfigError, ContractError, GKdVLabError,
                     ResolutionError)
from .grid import (Field, Grid, inner_h1, inner_l2, norm_h1, norm_l2,
                   reflect, spectral_derivative, translate)
from .manifold_lab import (CenterResult, ExitRecord, RescaleCheck,
                           ShootResult, StabilityRecord, exit_time,
                           instability_rate, orbital_stability_run,
                           rescale_invariance_check, shoot_center, shoot_cs,
                           shoot_cu)
from .rng import DEFAULT_SEED, SplitMix64, random_smooth_values
from .spectral import (OperatorMatrix, SpectralFrame, assemble_jlc,
                       assemble_lc, coercivity_constant, project,
                       random_xe_field, translate_frame, unstable_eigenpair)
from .waves import (WaveParams, dc_profile, default_grid, energy, momentum,
                    rescale, soliton_profile)

__version__ = "0.1.0"

__all__ = [
    "Grid", "Field", "spectral_derivative", "inner_l2", "inner_h1",
    "norm_l2", "norm_h1", "translate", "reflect",
    "WaveParams", "default_grid", "soliton_profile", "dc_profile",
    "rescale", "energy", "momentum",
    "OperatorMatrix", "SpectralFrame", "assemble_lc", "assemble_jlc",
    "unstable_eigenpair", "coercivity_constant", "project",
    "translate_frame", "random_xe_field",
    "Coords", "ManifoldDistance", "ResidualSeries", "embed",
    "fit_modulation", "distance_to_manifold", "modulation_residual",
    "Stepper", "Trajectory", "ConservationReport", "evolve",
    "evolve_linearized", "conservation_report",
    "ShootResult", "ExitRecord", "CenterResult", "StabilityRecord",
    "RescaleCheck", "shoot_cs", "shoot_cu", "shoot_center", "exit_time",
    "instability_rate", "orbital_stability_run", "rescale_invariance_check",
    "RunConfig", "parse_config", "serialize_config",
    "SplitMix64", "DEFAULT_SEED", "random_smooth_values",
    "GKdVLabError", "ConfigError", "ResolutionError", "ChartError",
    "ContractError",
]
