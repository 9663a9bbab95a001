"""Fractional Gagliardo energies on thin films and their scaling limits."""

from .domain import (Box, FieldFunction, ThinDomain, catalog, make_thin_film, parse_expression, parse_function,
                     rescale_from_unit, rescale_to_unit, resolve_function)
from .errors import ThinFilmError
from .extension import dr_distance, dr_distance_scaled, reflect_periodize, thick_regime_check
from .lattice import (Frame, LatticeField, discrete_gradient_energy, discretize, kuhn_eval, lemma1_check,
                      prop4_check, random_frame, u_sigma)
from .scaling import (ParamPath, PathKind, Regime, classify_regime, ftf_prediction, kappa_of_path, lambda_membrane,
                      lambda_native)
from .seminorm import (EnergyEstimate, Method, SplitConfig, F_energy, G_energy, c_d, constant_diagnostic, dirichlet,
                       oracle_dense, raw_seminorm_sq, reduced_dirichlet)
from .sweep import RateFit, SweepRecord, fit_rate, read_results, run_sweep, write_results

__version__ = "0.1.0"
