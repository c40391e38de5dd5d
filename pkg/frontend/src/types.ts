// Wire types for the estimate service. Shapes mirror the JSON the service
// emits; the UI never computes these values, it only displays them.

export interface MoeConfig {
  n_experts: number;
  top_k: number;
  shared_ffn_dim?: number;
}

export interface ModelConfig {
  layers: number;
  d_model: number;
  n_heads: number;
  d_head: number;
  ffn_dim: number;
  vocab: number;
  n_kv_heads?: number;
  dtype_bytes?: number;
  gated_ffn?: boolean;
  moe?: MoeConfig;
}

export interface RequestConfig {
  input_len: number;
  output_len: number;
  thought_len?: number;
  batch?: number;
  rag_corpus_bytes?: number;
  modality_flops_multiplier?: number;
}

export interface TopologyConfig {
  kind: string;
  link_bw_gbps: number;
  in_network?: boolean;
  dims?: number[];
  fanout?: number;
  groups?: number;
  per_group?: number;
}

export interface Placement {
  weights: string;
  kv_cache: string;
}

export interface PlanConfig {
  tp?: number;
  pp?: number;
  ep?: number;
  dp?: number;
  placement: Placement;
}

export interface ExploreConfig {
  budget: number;
  objectives?: string[];
  placement?: Placement;
}

// What-if transform derived from an existing device; using the base name as
// the new name shadows the original, so every node tier referencing it picks
// up the variant without restating the node.
export interface VariantEntry {
  name: string;
  base: string;
  kind: string;
  bw_multiplier?: number;
  power_divisor?: number;
}

export interface CatalogBlock {
  variants?: VariantEntry[];
}

export interface ScenarioConfig {
  model: ModelConfig;
  request: RequestConfig;
  node: string;
  topology?: TopologyConfig;
  sharding: { plan: PlanConfig } | { explore: ExploreConfig };
  moe_skew?: number;
  catalog?: CatalogBlock;
}

// --- responses ---

export interface PlanReport {
  tp: number;
  pp: number;
  ep: number;
  dp: number;
  chips: number;
  placement: Record<string, string>;
}

export interface PhaseReport {
  phase: string;
  context_len: number;
  compute_time_s: number;
  memory_time_s: number;
  network_time_s: number;
  step_time_s: number;
  flops: number;
  memory_bytes: number;
  arithmetic_intensity: number;
  bottleneck: string;
  tier_bytes: Record<string, number>;
}

export interface TimingReport {
  ttft_s: number;
  time_to_completion_s: number;
  decode_time_s: number;
  decode_tokens_per_second: number;
  energy_per_token_j: number;
  generated_tokens: number;
}

export interface CostReport {
  system_power_w: number;
  tco_rate_usd_per_hour: number;
  tokens_per_usd: number;
  tokens_per_joule: number;
  co2e_per_token_g: number | null;
}

export interface Violation {
  kind: string;
  detail: string;
  tier: string | null;
}

export interface Feasibility {
  feasible: boolean;
  violations: Violation[];
}

export interface BottleneckRow {
  label: string;
  compute: string;
  memory_capacity: string;
  memory_bandwidth: string;
  interconnect: string;
}

export interface EstimateReport {
  version: string;
  config_sha256: string;
  plan: PlanReport;
  feasibility: Feasibility;
  prefill: PhaseReport;
  last_decode: PhaseReport | null;
  timing: TimingReport;
  cost: CostReport;
  bottleneck: BottleneckRow;
  workload_kinds: string[];
  comm_volume_bytes: number;
}

export interface ParetoEntry {
  plan: PlanReport;
  timing: TimingReport;
  cost: CostReport;
  objective_values: (number | null)[];
}

export interface ExploreReport {
  version: string;
  config_sha256: string;
  objectives: string[];
  budget: number;
  pareto: ParetoEntry[];
}

export interface CatalogDevice {
  name: string;
  capacity_gb: number;
  read_bw_gbps: number;
  write_bw_gbps: number;
  power_w: number;
  read_granularity_bytes: number;
  write_endurance: string;
}

export interface CatalogNodeTier {
  device: string;
  stacks: number;
}

export interface CatalogNode {
  name: string;
  peak_tflops: number;
  tiers: CatalogNodeTier[];
  total_power_w: number;
  capex_usd: number;
}

export interface CatalogSummary {
  memory_devices: CatalogDevice[];
  hbm_generations: { name: string; [k: string]: unknown }[];
  nodes: CatalogNode[];
}
