import { fmt } from "./format.js";
import type { ExploreReport, Feasibility, ParetoEntry, PlanReport } from "./types.js";

// Pareto front scatter. Axes are fixed to time-to-completion vs tokens per
// USD regardless of which objectives drove the search; flipping the axes is
// a client-side re-render of the same response, never a refetch.

export interface ParetoOptions {
  flip: boolean;
  selected: number | null;
  onSelect: (index: number, plan: PlanReport) => void;
}

export function autoSelect(resp: ExploreReport): number | null {
  return resp.pareto.length === 1 ? 0 : null;
}

function axisValues(e: ParetoEntry, flip: boolean): { x: number; y: number } {
  const ttc = e.timing.time_to_completion_s;
  const tpu = e.cost.tokens_per_usd;
  return flip ? { x: tpu, y: ttc } : { x: ttc, y: tpu };
}

const W = 420;
const H = 260;
const PAD = 46;

function scale(v: number, lo: number, hi: number, a: number, b: number): number {
  if (hi <= lo) return (a + b) / 2;
  return a + ((v - lo) / (hi - lo)) * (b - a);
}

export function renderPareto(root: HTMLElement, resp: ExploreReport, opts: ParetoOptions): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  root.setAttribute("data-pareto", "");

  const head = doc.createElement("div");
  head.className = "pareto-head";
  const title = doc.createElement("span");
  title.textContent = "Pareto front";
  head.appendChild(title);
  const budget = doc.createElement("span");
  budget.className = "pareto-budget";
  budget.textContent = `budget ${fmt(resp.budget)} chips`;
  head.appendChild(budget);
  root.appendChild(head);

  const svgNS = "http://www.w3.org/2000/svg";
  const svg = doc.createElementNS(svgNS, "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "pareto-svg");

  const pts = resp.pareto.map((e) => axisValues(e, opts.flip));
  const xs = pts.map((p) => p.x);
  const ys = pts.map((p) => p.y);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const yLo = Math.min(...ys);
  const yHi = Math.max(...ys);

  const frame = doc.createElementNS(svgNS, "rect");
  frame.setAttribute("x", String(PAD));
  frame.setAttribute("y", String(10));
  frame.setAttribute("width", String(W - PAD - 10));
  frame.setAttribute("height", String(H - PAD - 10));
  frame.setAttribute("class", "pareto-frame");
  frame.setAttribute("fill", "none");
  svg.appendChild(frame);

  const xTitle = opts.flip ? "tokens per USD" : "time to completion (s)";
  const yTitle = opts.flip ? "time to completion (s)" : "tokens per USD";
  const xt = doc.createElementNS(svgNS, "text");
  xt.setAttribute("x", String(W / 2));
  xt.setAttribute("y", String(H - 4));
  xt.setAttribute("class", "axis-title axis-x");
  xt.textContent = xTitle;
  svg.appendChild(xt);
  const yt = doc.createElementNS(svgNS, "text");
  yt.setAttribute("x", "12");
  yt.setAttribute("y", String(H / 2));
  yt.setAttribute("class", "axis-title axis-y");
  yt.setAttribute("transform", `rotate(-90 12 ${H / 2})`);
  yt.textContent = yTitle;
  svg.appendChild(yt);

  // tick labels reuse the extreme payload values; no derived numbers
  const ticks: [number, number, string, string][] = [
    [PAD, H - PAD + 14, fmt(xLo), "tick tick-x"],
    [W - 10, H - PAD + 14, fmt(xHi), "tick tick-x tick-end"],
    [PAD - 4, H - PAD, fmt(yLo), "tick tick-y"],
    [PAD - 4, 18, fmt(yHi), "tick tick-y"],
  ];
  for (const [x, y, text, cls] of ticks) {
    const t = doc.createElementNS(svgNS, "text");
    t.setAttribute("x", String(x));
    t.setAttribute("y", String(y));
    t.setAttribute("class", cls);
    t.textContent = text;
    svg.appendChild(t);
  }

  resp.pareto.forEach((entry, i) => {
    const { x, y } = axisValues(entry, opts.flip);
    const cx = scale(x, xLo, xHi, PAD + 10, W - 24);
    const cy = scale(y, yLo, yHi, H - PAD - 12, 24); // larger y plots higher
    const dot = doc.createElementNS(svgNS, "circle");
    dot.setAttribute("cx", String(cx));
    dot.setAttribute("cy", String(cy));
    dot.setAttribute("r", i === opts.selected ? "8" : "5");
    dot.setAttribute("class", `pareto-dot${i === opts.selected ? " selected" : ""}`);
    dot.setAttribute("data-pareto-point", String(i));
    const label = `tp=${fmt(entry.plan.tp)} pp=${fmt(entry.plan.pp)} ep=${fmt(entry.plan.ep)} dp=${fmt(entry.plan.dp)} (${fmt(entry.plan.chips)} chips)`;
    const titleEl = doc.createElementNS(svgNS, "title");
    titleEl.textContent = label;
    dot.appendChild(titleEl);
    dot.addEventListener("click", () => opts.onSelect(i, entry.plan));
    svg.appendChild(dot);
  });

  root.appendChild(svg as unknown as Node);

  if (opts.selected !== null) {
    const entry = resp.pareto[opts.selected];
    if (entry) {
      const detail = doc.createElement("div");
      detail.className = "pareto-selected";
      detail.setAttribute("data-pareto-selected", "");
      detail.textContent =
        `selected: tp=${fmt(entry.plan.tp)} pp=${fmt(entry.plan.pp)} ` +
        `ep=${fmt(entry.plan.ep)} dp=${fmt(entry.plan.dp)} (${fmt(entry.plan.chips)} chips), ` +
        `time to completion ${fmt(entry.timing.time_to_completion_s)} s, ` +
        `tokens per USD ${fmt(entry.cost.tokens_per_usd)}`;
      root.appendChild(detail);
    }
  }
}

// The service answers an exhausted search with an error whose message names
// the tightest violated constraint (feasibility is null in that case); a
// plan-mode infeasibility carries a violations list instead. Render whichever
// the payload provides.
export function renderParetoEmpty(root: HTMLElement, feasibility: Feasibility | null, message?: string): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  root.setAttribute("data-pareto", "");
  const msg = doc.createElement("div");
  msg.className = "pareto-empty";
  msg.setAttribute("data-pareto-empty", "");
  msg.textContent = "no feasible plan";
  root.appendChild(msg);
  if (message) {
    const constraint = doc.createElement("div");
    constraint.className = "violation-msg binding";
    constraint.setAttribute("data-binding-constraint", "");
    constraint.textContent = message;
    root.appendChild(constraint);
  }
  const violations = feasibility?.violations ?? [];
  violations.forEach((v, i) => {
    const line = doc.createElement("div");
    line.className = i === 0 ? "violation-msg binding" : "violation-msg";
    line.setAttribute("data-violation", v.kind);
    const kind = doc.createElement("span");
    kind.className = "violation-kind";
    kind.textContent = v.kind;
    line.appendChild(kind);
    const detail = doc.createElement("span");
    detail.textContent = ` ${v.detail}`;
    line.appendChild(detail);
    if (v.tier) {
      const tier = doc.createElement("span");
      tier.setAttribute("data-name", "");
      tier.textContent = ` (${v.tier})`;
      line.appendChild(tier);
    }
    root.appendChild(line);
  });
}
