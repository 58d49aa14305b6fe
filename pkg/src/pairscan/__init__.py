"""Scan statistics for marked Poisson fields and paired-end structural-variant detection."""

from ._backend import BACKEND
from .core import ContractError, MarkDistribution, ModelDomainError, NullModel, PiecewiseRate, SolveError
from .mixture import MarkedEvents, MixtureFamily, ScanRegime, scan_max
from .power import Alternative, Statistic, marginal_power, sum_and_bonferroni_power
from .pvalue import (
    PValueReport,
    ThresholdRequest,
    pvalue_fixed,
    pvalue_fixed_mixture,
    pvalue_hanging,
    pvalue_laplace,
    pvalue_max_w,
    pvalue_max_wr,
    pvalue_nonhomogeneous,
    pvalue_smooth,
    pvalue_zb,
    threshold_for,
)
from .simulate import SimConfig, mc_power, mc_pvalue, simulate_paired_end
from .sv import PairedEndModel, ReadPairs, SVHypothesis

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ContractError", "MarkDistribution", "ModelDomainError", "NullModel", "PiecewiseRate",
    "SolveError", "MarkedEvents", "MixtureFamily", "ScanRegime", "scan_max", "Alternative", "Statistic",
    "marginal_power", "sum_and_bonferroni_power", "PValueReport", "ThresholdRequest", "pvalue_fixed",
    "pvalue_fixed_mixture", "pvalue_hanging", "pvalue_laplace", "pvalue_max_w", "pvalue_max_wr",
    "pvalue_nonhomogeneous", "pvalue_smooth", "pvalue_zb", "threshold_for", "SimConfig", "mc_power",
    "mc_pvalue", "simulate_paired_end", "PairedEndModel", "ReadPairs", "SVHypothesis", "__version__",
]
