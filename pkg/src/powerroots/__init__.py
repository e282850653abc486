"""Polynomial zeros from power sums, root squaring and Newton-ratio black boxes."""

from .blackbox import (NewtonOracle, StraightLineProgram, deflated_oracle, matrix_oracle,
                       oracle_from_coeffs, oracle_from_slp, reversed_oracle, shifted_oracle)
from .errors import *  # noqa: F401,F403
from .extremal import ExtremalEstimate, choose_k, estimate_largest, estimate_smallest, gamma_bound
from .polycore import Disc, Poly, from_roots
from .powersums import (CauchyParams, PowerSumEstimate, cauchy_error_bound, cauchy_sum,
                        cauchy_sum_disc, choose_q, newton_power_sums, root_count, scaled_params)
from .radii import (RadiusBounds, coeff_radii_bounds, dlg_sharpened_bounds,
                    newton_smallest_bound, radius_bisect)
from .solver import (RootApproximation, SolverConfig, largest_root, lehmer_newton,
                     newton_refine, root_sequence, roots_near, smallest_root)
from .squaring import dlg_step, fg_step, gemignani_estimate, initial_state, run_dlg

__version__ = "0.1.0"
