"""Outage probability of a mixed RF/FSO decode-and-forward relay link.

The RF hop follows Fisher-Snedecor F composite fading, the FSO hop
Gamma-Gamma turbulence.  ``relay`` combines the two hop CDFs analytically;
``montecarlo`` is an independent simulation check.
"""

from .channels import (FisherSnedecorParams, FsoGeometry, GammaGammaParams, LinkBudget,
                       fs_cdf, fs_mean, fs_pdf, gg_cdf, gg_pdf, mu1_from_budget,
                       mu2_from_budget, rytov_variance, turbulence_params)
from .montecarlo import McConfig, McEstimate, estimate_outage, sample_fs, sample_gg
from .relay import (OutageCurve, OutageQuery, RelaySystem, db_to_linear, end_to_end_cdf,
                    linear_to_db, outage_floor_mu1, outage_floor_mu2, outage_probability,
                    sweep)
from .specfun import ConvergenceError, DomainError, EvalResult

__version__ = "0.1.0"

__all__ = [
    "FisherSnedecorParams", "GammaGammaParams", "FsoGeometry", "LinkBudget",
    "fs_pdf", "fs_cdf", "fs_mean", "gg_pdf", "gg_cdf", "rytov_variance",
    "turbulence_params", "mu1_from_budget", "mu2_from_budget",
    "RelaySystem", "OutageQuery", "OutageCurve", "end_to_end_cdf",
    "outage_probability", "outage_floor_mu1", "outage_floor_mu2", "sweep",
    "db_to_linear", "linear_to_db",
    "McConfig", "McEstimate", "sample_fs", "sample_gg", "estimate_outage",
    "EvalResult", "DomainError", "ConvergenceError",
]
