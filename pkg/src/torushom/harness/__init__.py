"""Experiment configuration, sweeps, analysis and plotting."""

from .analysis import ConstantsReport, constants_report, fit_rate, uniformity_check
from .config import ExperimentConfig
from .sweep import ResultRecord, read_records, run_sweep, write_records

__all__ = ["ConstantsReport", "ExperimentConfig", "ResultRecord", "constants_report",
           "fit_rate", "read_records", "run_sweep", "uniformity_check", "write_records"]
