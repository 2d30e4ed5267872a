"""Closed-loop benchmarks, statistics and studies."""
from .stats import welch_t_test, mean_ci, WelchResult
from .benchmark import ComparisonReport, run_benchmark, benchmark_traces, METRICS

__all__ = ['welch_t_test', 'mean_ci', 'WelchResult', 'ComparisonReport',
           'run_benchmark', 'benchmark_traces', 'METRICS']
