"""Analytical roofline simulator for datacenter LLM inference.

Estimates step latency, TTFT, time-to-completion, throughput, power,
TCO, and CO2e for prefill/decode workloads across memory technologies,
and explores sharding plans for the Pareto front of latency and cost.
"""

__version__ = "0.1.0"

from .catalog import (Catalog, CatalogError, Endurance, HbmGeneration,
                      MemoryDeviceSpec, MemoryEfficiency, NodeSpec, Variant,
                      VariantKind, VariantRangeError, ZeroPowerError,
                      apply_variant, builtin_catalog, derive_efficiency,
                      load_catalog, load_catalog_file, serialize_catalog)
from .costs import CostModel, CostReport, SystemSpec, ratio_metrics, \
    system_power, tco_rate
from .pricing import (HBM_PRICE_INDEX, DegenerateWindowError,
                      InsufficientDataError, MissingEndpointError,
                      PriceDataError, PricePoint, TrendFit,
                      bandwidth_cost_points, fit_trend, hbm_trend_check,
                      ingest_price_history, load_bundled_history,
                      module_bandwidth_gbps, project_cost)
from .roofline import (Bottleneck, BottleneckRow, PhaseEstimate,
                       PlacementError, ScenarioTiming, Utilization,
                       attainable_flops, classify, decode_step,
                       effective_read_bw, prefill, scenario_timing)
from .scenario import (ConfigError, ExploreSpec, ScenarioConfig,
                       config_sha256, list_presets, load_preset,
                       parse_config, render_csv, render_json,
                       render_markdown, run_config)
from .sharding import (FeasibilityReport, PlanEvaluation, ShardingPlan,
                       Unsatisfiable, Violation, ViolationKind,
                       check_feasible, comm_volume_per_step, explore,
                       min_system_size, pareto_front, per_chip_demand)
from .topology import (CollectiveKind, Topology, TopologyKind,
                       UnsupportedCollectiveError, avg_hops, build_graph,
                       collective_time, message_time, tree_depth)
from .workload import (DataClass, ModelSpec, MoeSpec, Phase, RequestSpec,
                       active_params_per_token, flops, kv_bytes_per_token,
                       memory_demand, total_params, weight_bytes)
