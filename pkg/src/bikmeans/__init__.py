"""Bi-criteria k-means via reduction to discrete k-median."""

from .core import (ClusteringError, ClusteringSolution, KMedianInstance, PointSet,
                   check_relaxed_3hop, cost_centers_kmeans, cost_partition_kmeans,
                   cost_partition_kmedian)
from .bounds import alpha_envelope, alpha_local, alpha_lp_closed, alpha_lp_tight, alpha_pipage
from .lp import FractionalSolution, normalize, solve_lp, solve_normalized
from .local import SearchConfig, run_local_search
from .oracle import brute_kmeans, brute_kmedian, verify_centroid_set
from .reduce import ReductionConfig, build_instance
from .rounding import round_many, sample_solution

__version__ = "0.1.0"
