from bbpsim.analytics.stats import coverage_rank, mean, mean_std, percentile, propagation_percentile
from bbpsim.analytics.models import (AnalyticParams, ModelGrid, evaluate_grid, fork_probability,
                                     fork_probability_tps, latency_model, tps, tps_from_sizes)
