"""Interpolating vector fields of near-identity maps."""

from ._core import (
    AdiabaticInvariant,
    InterpolatingField,
    MapFamily,
    __version__,
    abs_sum,
    advance,
    coefficients,
    delta_h_scan,
    flowmap_error_grid,
    froeschle_map,
    iterate_power,
    moment_sum,
    pendulum_flow_map,
    reversibility_defect,
    run_experiment,
    section_cloud,
    seed_levelset,
    standard_map,
    validate_config,
)

__all__ = [
    "AdiabaticInvariant",
    "InterpolatingField",
    "MapFamily",
    "__version__",
    "abs_sum",
    "advance",
    "coefficients",
    "delta_h_scan",
    "flowmap_error_grid",
    "froeschle_map",
    "iterate_power",
    "moment_sum",
    "pendulum_flow_map",
    "reversibility_defect",
    "run_experiment",
    "section_cloud",
    "seed_levelset",
    "standard_map",
    "validate_config",
]
