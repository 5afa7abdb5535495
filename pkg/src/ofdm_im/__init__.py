"""OFDM index modulation performance analysis with Monte Carlo cross-checks.

Single-cell closed-form rates and index detection error, Poisson-field SINR
distribution, exact Gaussian-mixture law of noise plus inter-cell
interference, simplified EM fitting, entropy-based rate bounds, and the
matching simulation oracles.
"""
from ._backend import available_backends, backend_name, has_compiled
from .curves import CurveTable, write_csv
from .geometry import (HexScenario, PathlossModel, PppConfig,
                       default_window_radius, hex_grid, interferer_distances,
                       received_power, sample_ppp, thin_points, ue_position)
from .mc import (ComplexSampleSet, ErrorEstimate, MutualInfoEstimate,
                 TrialPlan, confusion_mutual_info, empirical_cdf,
                 empirical_mutual_info, qam_constellation, sample_noise_plus_ici,
                 sample_noise_plus_ici_powers, sample_received,
                 simulate_index_error, simulate_sinr)
from .mog import (EmFitResult, EmSettings, MoGDist, em_fit,
                  entropy_exact_radial, entropy_lower_bound_conditional,
                  entropy_upper_bound, exact_mog_enumeration, mog_from_json,
                  mog_pdf, mog_pdf_real, mog_to_json, sample_mog,
                  sum_rate_upper_bound)
from .multicell import (MultiCellConfig, SumRatePipelineResult,
                        analytic_sinr_cdf, run_sum_rate_pipeline,
                        serving_snr_linear, sinr_cdf_curve)
from .singlecell import (RatePoint, SingleCellConfig, index_error_prob,
                         optimal_nf, rate_index, rate_index_from_error,
                         rate_symbol, rate_total)
from .specfun import (Tolerance, binary_entropy, binom, e1_scaled, erf, erfc,
                      erfcx, exp_integral_ei)
from .units import db_grid, db_to_linear, linear_to_db

__version__ = "0.1.0"

__all__ = [
    "available_backends", "backend_name", "has_compiled",
    "CurveTable", "write_csv",
    "HexScenario", "PathlossModel", "PppConfig", "default_window_radius",
    "hex_grid", "interferer_distances", "received_power", "sample_ppp",
    "thin_points", "ue_position",
    "ComplexSampleSet", "ErrorEstimate", "MutualInfoEstimate", "TrialPlan",
    "confusion_mutual_info", "empirical_cdf", "empirical_mutual_info",
    "qam_constellation", "sample_noise_plus_ici",
    "sample_noise_plus_ici_powers", "sample_received",
    "simulate_index_error", "simulate_sinr",
    "EmFitResult", "EmSettings", "MoGDist", "em_fit", "entropy_exact_radial",
    "entropy_lower_bound_conditional", "entropy_upper_bound",
    "exact_mog_enumeration", "mog_from_json", "mog_pdf", "mog_pdf_real",
    "mog_to_json", "sample_mog", "sum_rate_upper_bound",
    "MultiCellConfig", "SumRatePipelineResult", "analytic_sinr_cdf",
    "run_sum_rate_pipeline", "serving_snr_linear", "sinr_cdf_curve",
    "RatePoint", "SingleCellConfig", "index_error_prob", "optimal_nf",
    "rate_index", "rate_index_from_error", "rate_symbol", "rate_total",
    "Tolerance", "binary_entropy", "binom", "e1_scaled", "erf", "erfc",
    "erfcx", "exp_integral_ei",
    "db_grid", "db_to_linear", "linear_to_db",
    "__version__",
]
