"""Two-dimensional cluster variation method on an offset-row torus."""

from .analytic import continuous_minimize, equilibrium, estimate_h
from .configvars import ConfigCounts, ConfigFractions, count, fractions, grid_fractions
from .lattice import Coord, Grid, UnitState, from_text, new_random, new_uniform, to_text
from .minimizer import MinimizeConfig, minimize, perturb
from .thermo import EnthalpyParams, entropy, free_energy

__all__ = [
    "ConfigCounts", "ConfigFractions", "Coord", "EnthalpyParams", "Grid",
    "MinimizeConfig", "UnitState", "continuous_minimize", "count", "entropy",
    "equilibrium", "estimate_h", "fractions", "free_energy", "from_text",
    "grid_fractions", "minimize", "new_random", "new_uniform", "perturb", "to_text",
]
