import type { PlanReport, ScenarioConfig } from "./types.js";

// Form state mirroring a scenario config. Serialization to the wire format
// lives in knobsToConfig; the service's validator is the only authority on
// whether the result is a valid scenario.

export interface KnobState {
  // model
  layers: number;
  dModel: number;
  nHeads: number;
  dHead: number;
  ffnDim: number;
  vocab: number;
  nKvHeads: number;
  dtypeBytes: number;
  moeEnabled: boolean;
  nExperts: number;
  topK: number;
  sharedFfnDim: number;
  // request
  inputLen: number;
  outputLen: number;
  thoughtLen: number;
  batch: number;
  // hardware
  node: string;
  topologyKind: string;
  linkBwGbps: number;
  inNetwork: boolean;
  memVariant: "none" | "pnm" | "stacked3d";
  // sharding
  mode: "plan" | "explore";
  tp: number;
  pp: number;
  ep: number;
  dp: number;
  weightsTier: string;
  kvTier: string;
  budget: number;
  objectives: [string, string];
}

export const OBJECTIVES = [
  "chips",
  "co2e_per_token",
  "energy_per_token",
  "system_power",
  "tco_per_token",
  "time_to_completion",
  "ttft",
] as const;

export const TOPOLOGY_KINDS = ["fully_connected", "torus", "tree", "dragonfly"] as const;

export const MEM_VARIANTS = ["none", "pnm", "stacked3d"] as const;

// fixed what-if strengths; the service validates the allowed ranges
const PNM_BW_MULTIPLIER = 2.0;
const STACKED3D_POWER_DIVISOR = 2.5;

// `tierDevices` names the selected node's tier devices (from the catalog
// listing); the variant shadows each one under its own name so the node
// picks it up unchanged.
export function knobsToConfig(s: KnobState, tierDevices: string[] = []): ScenarioConfig {
  const model: ScenarioConfig["model"] = {
    layers: s.layers,
    d_model: s.dModel,
    n_heads: s.nHeads,
    d_head: s.dHead,
    ffn_dim: s.ffnDim,
    vocab: s.vocab,
    n_kv_heads: s.nKvHeads,
    dtype_bytes: s.dtypeBytes,
  };
  if (s.moeEnabled) {
    model.moe = { n_experts: s.nExperts, top_k: s.topK, shared_ffn_dim: s.sharedFfnDim };
  }
  const request: ScenarioConfig["request"] = {
    input_len: s.inputLen,
    output_len: s.outputLen,
    batch: s.batch,
  };
  if (s.thoughtLen > 0) request.thought_len = s.thoughtLen;
  const placement = { weights: s.weightsTier, kv_cache: s.kvTier };
  const sharding =
    s.mode === "plan"
      ? { plan: { tp: s.tp, pp: s.pp, ep: s.ep, dp: s.dp, placement } }
      : { explore: { budget: s.budget, objectives: [...s.objectives], placement } };
  const cfg: ScenarioConfig = {
    model,
    request,
    node: s.node,
    topology: {
      kind: s.topologyKind,
      link_bw_gbps: s.linkBwGbps,
      in_network: s.inNetwork,
    },
    sharding,
  };
  if (s.memVariant !== "none" && tierDevices.length > 0) {
    cfg.catalog = {
      variants: tierDevices.map((dev) => ({
        name: dev,
        base: dev,
        kind: s.memVariant,
        ...(s.memVariant === "pnm"
          ? { bw_multiplier: PNM_BW_MULTIPLIER }
          : { power_divisor: STACKED3D_POWER_DIVISOR }),
      })),
    };
  }
  return cfg;
}

// A Pareto point carries the plan the service evaluated; clicking it makes
// the knobs describe that exact plan.
export function applyPlan(s: KnobState, plan: PlanReport): KnobState {
  return {
    ...s,
    mode: "plan",
    tp: plan.tp,
    pp: plan.pp,
    ep: plan.ep,
    dp: plan.dp,
    weightsTier: plan.placement["weights"] ?? s.weightsTier,
    kvTier: plan.placement["kv_cache"] ?? s.kvTier,
  };
}

// Map a service error path or violation onto the knob that caused it, so the
// message can be shown next to the control instead of in a global gutter.
export function knobForPath(path: string): keyof KnobState | null {
  const table: Record<string, keyof KnobState> = {
    "model.layers": "layers",
    "model.d_model": "dModel",
    "model.n_heads": "nHeads",
    "model.d_head": "dHead",
    "model.ffn_dim": "ffnDim",
    "model.vocab": "vocab",
    "model.n_kv_heads": "nKvHeads",
    "model.dtype_bytes": "dtypeBytes",
    "model.moe": "nExperts",
    "model.moe.n_experts": "nExperts",
    "model.moe.top_k": "topK",
    "model.moe.shared_ffn_dim": "sharedFfnDim",
    "request.input_len": "inputLen",
    "request.output_len": "outputLen",
    "request.thought_len": "thoughtLen",
    "request.batch": "batch",
    node: "node",
    "topology.kind": "topologyKind",
    "topology.link_bw_gbps": "linkBwGbps",
    "topology.in_network": "inNetwork",
    topology: "topologyKind",
    "sharding.plan.tp": "tp",
    "sharding.plan.pp": "pp",
    "sharding.plan.ep": "ep",
    "sharding.plan.dp": "dp",
    "sharding.explore.budget": "budget",
    "sharding.explore.objectives": "objectives",
  };
  if (path in table) return table[path] ?? null;
  if (path.includes("placement")) {
    if (path.includes("kv_cache")) return "kvTier";
    if (path.includes("weights")) return "weightsTier";
    return "weightsTier";
  }
  const head = path.split(".")[0] ?? "";
  if (head === "model") return "layers";
  if (head === "request") return "batch";
  if (head === "sharding") return "tp";
  if (head === "catalog") return "memVariant";
  return null;
}

// Feasibility violations name a data class in their detail text rather than
// a config path; route them to the placement selector they implicate.
export function knobForViolation(v: { kind: string; detail: string; tier: string | null }): keyof KnobState | null {
  const d = v.detail.toLowerCase();
  if (d.includes("kv_cache") || d.includes("kv cache")) return "kvTier";
  if (d.includes("weights")) return "weightsTier";
  if (v.kind === "Divisibility") {
    if (d.includes("head")) return "tp";
    if (d.includes("layer")) return "pp";
    if (d.includes("expert")) return "ep";
    return "tp";
  }
  if (v.kind === "Capacity") return "weightsTier";
  return null;
}
