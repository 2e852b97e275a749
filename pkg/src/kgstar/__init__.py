"""Klein-Gordon waves on star-shaped networks: spectral transform, exact
solutions and their t^{-1/2} asymptotics."""
from .errors import *  # noqa: F401,F403
from .network import SpectralBand, StarNetwork, band, validate_network
from .spectral import eigenfunction, kirchhoff_defects, s_coeff, weight_q, xi
from .transform import (BranchFunction, SpectralGrid, SpectralVector, forward, inverse, isometry_defect,
                        diagonalization_defect, q_norm, spectral_grid)
from .initial_data import BandBump, SpectralProfile, bump, initial_condition, make_profile, realize_u0
from .propagator import FieldSample, solution, u_minus, u_plus
from .asymptotics import (AsymptoticTerm, Cone, PhasePoint, coefficient_bound, coefficient_bound_two_branch,
                          cone, leading_coefficient, phase, phase_point, stationary_point, step_sweep)
from .analysis import DecayReport, RaySeries, cone_raster, decay_fit, remainder_table
from .config import ExperimentConfig, parse_config

__version__ = "0.1.0"
