import type { KnobState } from "./knobs.js";

// The four scenario presets, shipped client-side as knob states so preset
// switching never needs a round trip. Serializing any of these through
// knobsToConfig must satisfy the service's validator as-is.

const BASE: KnobState = {
  layers: 80,
  dModel: 8192,
  nHeads: 64,
  dHead: 128,
  ffnDim: 28672,
  vocab: 128256,
  nKvHeads: 8,
  dtypeBytes: 2,
  moeEnabled: false,
  nExperts: 256,
  topK: 8,
  sharedFfnDim: 4096,
  inputLen: 2048,
  outputLen: 256,
  thoughtLen: 0,
  batch: 1,
  node: "hbm-node",
  topologyKind: "fully_connected",
  linkBwGbps: 100,
  inNetwork: false,
  memVariant: "none",
  mode: "plan",
  tp: 2,
  pp: 1,
  ep: 1,
  dp: 1,
  weightsTier: "hbm4-6400-stack",
  kvTier: "hbm4-6400-stack",
  budget: 8,
  objectives: ["time_to_completion", "tco_per_token"],
};

export const PRESETS: Record<string, KnobState> = {
  "dense-on-hbm": { ...BASE },
  "moe-256-on-hbm": {
    ...BASE,
    layers: 48,
    dModel: 4096,
    nHeads: 32,
    ffnDim: 1536,
    moeEnabled: true,
    outputLen: 512,
    batch: 32,
    tp: 2,
    ep: 8,
  },
  "moe-256-with-hbf": {
    ...BASE,
    layers: 48,
    dModel: 4096,
    nHeads: 32,
    ffnDim: 1536,
    moeEnabled: true,
    outputLen: 512,
    batch: 32,
    node: "hbf-node",
    tp: 1,
    ep: 1,
    weightsTier: "hbf-stack",
  },
  "reasoning-long-context": {
    ...BASE,
    inputLen: 40960,
    outputLen: 1024,
    thoughtLen: 4096,
    tp: 4,
  },
};

export const PRESET_NAMES = Object.keys(PRESETS);

export function presetState(name: string): KnobState {
  const p = PRESETS[name];
  if (!p) throw new Error(`unknown preset '${name}'`);
  return { ...p, objectives: [...p.objectives] };
}
