import { fmt, fmtUnit } from "./format.js";
import { knobForViolation } from "./knobs.js";
import type { EstimateReport, Feasibility, PhaseReport } from "./types.js";

// Results pane rendering. Invariant: every numeric token in this subtree is
// a value (or a digit sequence inside a string) taken verbatim from the
// service response. Catalog identifiers that happen to contain digits are
// wrapped in [data-name] so the contract test can tell names from numbers;
// static labels must not contain ASCII digits.

type Doc = Document;

function el(doc: Doc, tag: string, cls?: string, text?: string): HTMLElement {
  const e = doc.createElement(tag);
  if (cls) e.className = cls;
  if (text !== undefined) e.textContent = text;
  return e;
}

function nameSpan(doc: Doc, text: string): HTMLElement {
  const s = el(doc, "span", "name", text);
  s.setAttribute("data-name", "");
  return s;
}

const BOTTLENECK_CLASS: Record<string, string> = {
  Compute: "bn-compute",
  MemoryBandwidth: "bn-memory",
  MemoryCapacity: "bn-memory",
  Network: "bn-network",
};

export function renderBadge(doc: Doc, report: EstimateReport): HTMLElement {
  const phase = report.last_decode ?? report.prefill;
  const badge = el(doc, "span", `badge ${BOTTLENECK_CLASS[phase.bottleneck] ?? "bn-other"}`, phase.bottleneck);
  badge.setAttribute("data-badge", "");
  return badge;
}

function readout(doc: Doc, label: string, value: string): HTMLElement {
  const row = el(doc, "div", "readout");
  row.appendChild(el(doc, "span", "readout-label", label));
  row.appendChild(el(doc, "span", "readout-value", value));
  return row;
}

function planLine(doc: Doc, report: EstimateReport): HTMLElement {
  const p = report.plan;
  const line = el(doc, "div", "plan-line");
  line.appendChild(
    el(doc, "span", undefined,
      `tp=${fmt(p.tp)} pp=${fmt(p.pp)} ep=${fmt(p.ep)} dp=${fmt(p.dp)} (${fmt(p.chips)} chips)`),
  );
  for (const [cls, tier] of Object.entries(p.placement)) {
    const tag = el(doc, "span", "placement-tag");
    tag.appendChild(el(doc, "span", undefined, `${cls.replace(/_/g, " ")}: `));
    tag.appendChild(nameSpan(doc, tier));
    line.appendChild(tag);
  }
  return line;
}

function bottleneckTable(doc: Doc, report: EstimateReport): HTMLElement {
  const t = el(doc, "table", "bottleneck-table");
  const head = el(doc, "tr");
  for (const h of ["Scenario", "Compute", "Memory capacity", "Memory bandwidth", "Interconnect"]) {
    head.appendChild(el(doc, "th", undefined, h));
  }
  t.appendChild(head);
  const r = report.bottleneck;
  const row = el(doc, "tr");
  row.setAttribute("data-bottleneck-row", "");
  row.appendChild(el(doc, "td", undefined, r.label));
  for (const cell of [r.compute, r.memory_capacity, r.memory_bandwidth, r.interconnect]) {
    row.appendChild(el(doc, "td", cell === "?" ? "flag-soft" : cell ? "flag-hard" : "", cell));
  }
  t.appendChild(row);
  return t;
}

function phaseCard(doc: Doc, phase: PhaseReport): HTMLElement {
  const card = el(doc, "div", "phase-card");
  card.setAttribute("data-phase", phase.phase);
  const title = el(doc, "div", "phase-title");
  title.appendChild(el(doc, "span", undefined, phase.phase.replace(/_/g, " ")));
  title.appendChild(el(doc, "span", `badge ${BOTTLENECK_CLASS[phase.bottleneck] ?? "bn-other"}`, phase.bottleneck));
  card.appendChild(title);
  card.appendChild(readout(doc, "context length", fmtUnit(phase.context_len, "tokens")));
  card.appendChild(readout(doc, "step time", fmtUnit(phase.step_time_s, "s")));
  card.appendChild(readout(doc, "arithmetic intensity", fmt(phase.arithmetic_intensity)));
  card.appendChild(readout(doc, "FLOPs", fmt(phase.flops)));
  card.appendChild(readout(doc, "bytes moved", fmt(phase.memory_bytes)));

  // time breakdown bar: widths are presentation, labels are payload values
  const parts: [string, number][] = [
    ["compute", phase.compute_time_s],
    ["memory", phase.memory_time_s],
    ["network", phase.network_time_s],
  ];
  const total = Math.max(phase.compute_time_s, phase.memory_time_s, phase.network_time_s) || 1;
  const bar = el(doc, "div", "time-bar");
  for (const [label, secs] of parts) {
    const seg = el(doc, "div", `time-seg seg-${label}`);
    seg.style.width = `${Math.max(2, (secs / total) * 100)}%`;
    seg.title = `${label}: ${fmtUnit(secs, "s")}`;
    const txt = el(doc, "span", "time-seg-label", `${label} ${fmtUnit(secs, "s")}`);
    seg.appendChild(txt);
    bar.appendChild(seg);
  }
  card.appendChild(bar);

  const tiers = el(doc, "div", "tier-bytes");
  for (const [tier, bytes] of Object.entries(phase.tier_bytes)) {
    const row = el(doc, "div", "tier-row");
    row.appendChild(nameSpan(doc, tier));
    row.appendChild(el(doc, "span", undefined, ` ${fmtUnit(bytes, "bytes")}`));
    tiers.appendChild(row);
  }
  card.appendChild(tiers);
  return card;
}

// Stylized roofline: a log-ish AI axis with one marker per phase, placed on
// the sloped (memory-bound) or flat (compute-bound) part of the roof by the
// service's own bottleneck call. Geometry only; the displayed numbers are
// the payload's arithmetic intensities.
function rooflineSvg(doc: Doc, report: EstimateReport): SVGElement {
  const W = 360;
  const H = 140;
  const svg = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "roofline");
  const ridgeX = W * 0.55;
  const roofY = 30;
  const roof = doc.createElementNS("http://www.w3.org/2000/svg", "path");
  roof.setAttribute("d", `M 10 ${H - 20} L ${ridgeX} ${roofY} L ${W - 10} ${roofY}`);
  roof.setAttribute("class", "roof-line");
  roof.setAttribute("fill", "none");
  svg.appendChild(roof);

  const phases: PhaseReport[] = [report.prefill];
  if (report.last_decode) phases.push(report.last_decode);
  const ais = phases.map((p) => p.arithmetic_intensity);
  const lo = Math.min(...ais);
  const hi = Math.max(...ais);
  for (const p of phases) {
    const computeBound = p.bottleneck === "Compute";
    // memory-bound markers sit on the slope, compute-bound on the plateau;
    // horizontal spread within each region follows relative AI
    const rel = hi > lo ? (Math.log(p.arithmetic_intensity) - Math.log(lo)) / (Math.log(hi) - Math.log(lo)) : 0.5;
    const x = computeBound ? ridgeX + 20 + rel * (W - 40 - ridgeX) : 14 + rel * (ridgeX - 40);
    const y = computeBound ? roofY : H - 20 - ((x - 10) / (ridgeX - 10)) * (H - 20 - roofY);
    const dot = doc.createElementNS("http://www.w3.org/2000/svg", "circle");
    dot.setAttribute("cx", String(x));
    dot.setAttribute("cy", String(y));
    dot.setAttribute("r", "5");
    dot.setAttribute("class", `phase-dot ${BOTTLENECK_CLASS[p.bottleneck] ?? "bn-other"}`);
    svg.appendChild(dot);
    const label = doc.createElementNS("http://www.w3.org/2000/svg", "text");
    label.setAttribute("x", String(Math.min(x + 8, W - 120)));
    label.setAttribute("y", String(Math.max(y - 8, 12)));
    label.setAttribute("class", "phase-label");
    label.textContent = `${p.phase.replace(/_/g, " ")} AI ${fmt(p.arithmetic_intensity)}`;
    svg.appendChild(label);
  }
  return svg as SVGElement;
}

export function renderResults(root: HTMLElement, report: EstimateReport): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  root.setAttribute("data-results", "");

  const header = el(doc, "div", "results-header");
  header.appendChild(el(doc, "span", "results-title", "Estimate"));
  header.appendChild(renderBadge(doc, report));
  root.appendChild(header);

  root.appendChild(planLine(doc, report));

  const grid = el(doc, "div", "readout-grid");
  const t = report.timing;
  const c = report.cost;
  grid.appendChild(readout(doc, "TTFT", fmtUnit(t.ttft_s, "s")));
  grid.appendChild(readout(doc, "time to completion", fmtUnit(t.time_to_completion_s, "s")));
  grid.appendChild(readout(doc, "decode throughput", fmtUnit(t.decode_tokens_per_second, "tok/s")));
  grid.appendChild(readout(doc, "generated tokens", fmt(t.generated_tokens)));
  grid.appendChild(readout(doc, "energy per token", fmtUnit(t.energy_per_token_j, "J")));
  grid.appendChild(readout(doc, "system power", fmtUnit(c.system_power_w, "W")));
  grid.appendChild(readout(doc, "TCO rate", fmtUnit(c.tco_rate_usd_per_hour, "USD/h")));
  grid.appendChild(readout(doc, "tokens per USD", fmt(c.tokens_per_usd)));
  grid.appendChild(readout(doc, "tokens per joule", fmt(c.tokens_per_joule)));
  grid.appendChild(readout(doc, "CO₂e per token", c.co2e_per_token_g === null ? "n/a" : fmtUnit(c.co2e_per_token_g, "g")));
  grid.appendChild(readout(doc, "interconnect volume", fmtUnit(report.comm_volume_bytes, "bytes")));
  root.appendChild(grid);

  root.appendChild(bottleneckTable(doc, report));

  if (report.workload_kinds.length) {
    const kinds = el(doc, "div", "workload-kinds");
    kinds.appendChild(el(doc, "span", "readout-label", "workload kinds"));
    for (const k of report.workload_kinds) kinds.appendChild(el(doc, "span", "kind-tag", k.replace(/_/g, " ")));
    root.appendChild(kinds);
  }

  root.appendChild(rooflineSvg(doc, report));

  const phases = el(doc, "div", "phase-row");
  phases.appendChild(phaseCard(doc, report.prefill));
  if (report.last_decode) phases.appendChild(phaseCard(doc, report.last_decode));
  root.appendChild(phases);
}

// Inline violation placement: each knob row in the form carries a
// [data-violation-for="<knobKey>"] slot; violations that map to a knob land
// there, the rest go to the supplied fallback element.
export function renderViolations(formRoot: HTMLElement, fallback: HTMLElement, feasibility: Feasibility): number {
  clearViolations(formRoot, fallback);
  let placed = 0;
  const doc = formRoot.ownerDocument;
  for (const v of feasibility.violations) {
    const knob = knobForViolation(v);
    const slot = knob ? formRoot.querySelector<HTMLElement>(`[data-violation-for="${knob}"]`) : null;
    const msg = el(doc, "div", "violation-msg");
    msg.setAttribute("data-violation", v.kind);
    const kindTag = el(doc, "span", "violation-kind", v.kind);
    msg.appendChild(kindTag);
    msg.appendChild(el(doc, "span", undefined, ` ${v.detail}`));
    if (v.tier) {
      msg.appendChild(el(doc, "span", undefined, " ("));
      msg.appendChild(nameSpan(doc, v.tier));
      msg.appendChild(el(doc, "span", undefined, ")"));
    }
    if (slot) {
      slot.appendChild(msg);
      slot.closest(".knob-row")?.classList.add("knob-invalid");
      placed += 1;
    } else {
      fallback.appendChild(msg);
    }
  }
  return placed;
}

export function clearViolations(formRoot: HTMLElement, fallback: HTMLElement): void {
  for (const n of formRoot.querySelectorAll(".violation-msg")) n.remove();
  for (const n of formRoot.querySelectorAll(".knob-invalid")) n.classList.remove("knob-invalid");
  fallback.textContent = "";
}

// Config errors point at a path instead of a data class; same inline idea.
export function renderConfigError(
  formRoot: HTMLElement,
  fallback: HTMLElement,
  message: string,
  knob: string | null,
): void {
  clearViolations(formRoot, fallback);
  const doc = formRoot.ownerDocument;
  const msg = el(doc, "div", "violation-msg");
  msg.setAttribute("data-config-error", "");
  msg.textContent = message;
  const slot = knob ? formRoot.querySelector<HTMLElement>(`[data-violation-for="${knob}"]`) : null;
  if (slot) {
    slot.appendChild(msg);
    slot.closest(".knob-row")?.classList.add("knob-invalid");
  } else {
    fallback.appendChild(msg);
  }
}
