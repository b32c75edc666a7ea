"""Topological vulnerability analysis of evolving power grids.

Yearly graph snapshots are built from commissioning records, described with
complex-network metrics, and stressed by simultaneous random or targeted
removal of substations (nodes) and lines (edges). Damage is the relative drop
in global efficiency.
"""

__version__ = "0.1.0"

from .errors import (BudgetExceededError, EmptySnapshotError, FitError, GraphError,
                     GridDataError, GridVulnError, InfeasibleScenarioError,
                     UndefinedMetricError)
from .graph import (Snapshot, all_pairs_distances, bfs_from, connected_components, diameter,
                    generate)
from .griddata import (ElementRecord, TemporalDataset, load_dataset, parse_dataset,
                       serialize_dataset, snapshot, write_dataset)
from .metrics import (MetricsReport, Partition, avg_path_length, clustering, compute_metrics,
                      detect_communities, efficiency, modularity, small_world_sigma)
from .degree import classify, cumulative_distribution, fit
from .attack import (DamageDistribution, RemovalScenario, damage, remove, run_scenario,
                     worst_element, worst_subset)
from .timeline import (build_timeline, correlate, damage_metric_report, growing_grid,
                       normalize, campaign_scenarios)
