"""Hypercongestion, perimeter control and monocentric land-use equilibria."""
from .longrun import (LandUseEquilibrium, Mode, SpatialProfile, solve_longrun,
                      solve_rent_level, spatial_profile)
from .params import (AvEffects, CityParameters, EffectiveParameters, ParameterError,
                     SolverError, apply_av_effects, nef, speed, travel_time)
from .perimeter import PerimeterEquilibrium, cost_ratio, queue_profile, solve_perimeter
from .shortrun import BathtubEquilibrium, build_trajectory, solve_shortrun

__all__ = [
    "AvEffects", "BathtubEquilibrium", "CityParameters", "EffectiveParameters",
    "LandUseEquilibrium", "Mode", "ParameterError", "PerimeterEquilibrium", "SolverError",
    "SpatialProfile", "apply_av_effects", "build_trajectory", "cost_ratio", "nef",
    "queue_profile", "solve_longrun", "solve_perimeter", "solve_rent_level",
    "solve_shortrun", "spatial_profile", "speed", "travel_time",
]
