"""Equal-weighted stock picking against a drift-mixture GBM index.

The package simulates an index of independent GBM stocks whose drifts are
drawn from a normal cross-section, computes the model's closed forms
(expected index value, median stock, underperformance factor), enumerates
small portfolio spaces exactly, and measures over/under-performance
frequencies of random equal-weighted sub-portfolios by Monte Carlo.
"""

from .analytic import (
    AnalyticSummary,
    CalibrationError,
    CalibrationTarget,
    calibrate,
    expected_index_value,
    median_stock_value,
    stock_log_law,
    summarize,
    tail_probability,
    underperformance_factor,
)
from .enumeration import (
    DeterministicIndex,
    EnumerationCapError,
    SubsetStats,
    enumerate_portfolios,
    underperformance_fraction,
)
from .model import (
    ModelParams,
    SeedSpec,
    UniverseDraw,
    draw_drifts,
    draw_universe,
    index_value,
    portfolio_return,
    terminal_value,
)
from .montecarlo import (
    ExperimentConfig,
    FrequencyReport,
    FrequencyRow,
    frequency_ci,
    run_experiment,
    run_trial,
    subset_frequencies,
)
from .report import SampleSummary, emit_csv, emit_svg_chart, parse_csv, summary_stats

__version__ = "0.1.0"

__all__ = [
    "AnalyticSummary",
    "CalibrationError",
    "CalibrationTarget",
    "DeterministicIndex",
    "EnumerationCapError",
    "ExperimentConfig",
    "FrequencyReport",
    "FrequencyRow",
    "ModelParams",
    "SampleSummary",
    "SeedSpec",
    "SubsetStats",
    "UniverseDraw",
    "calibrate",
    "draw_drifts",
    "draw_universe",
    "emit_csv",
    "emit_svg_chart",
    "enumerate_portfolios",
    "expected_index_value",
    "frequency_ci",
    "index_value",
    "median_stock_value",
    "parse_csv",
    "portfolio_return",
    "run_experiment",
    "run_trial",
    "stock_log_law",
    "subset_frequencies",
    "summarize",
    "summary_stats",
    "tail_probability",
    "terminal_value",
    "underperformance_factor",
    "underperformance_fraction",
]
