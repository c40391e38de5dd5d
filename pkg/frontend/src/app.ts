import { Client, ServiceError } from "./client.js";
import { applyPlan, knobForPath, knobsToConfig, MEM_VARIANTS, OBJECTIVES, TOPOLOGY_KINDS, type KnobState } from "./knobs.js";
import { autoSelect, renderPareto, renderParetoEmpty } from "./pareto.js";
import { presetState, PRESET_NAMES } from "./presets.js";
import { clearViolations, renderConfigError, renderResults, renderViolations } from "./render.js";
import { Scheduler } from "./scheduler.js";
import type { CatalogSummary, EstimateReport, ExploreReport, PlanReport } from "./types.js";

type NumberKnob = { kind: "number" | "range"; key: keyof KnobState; label: string; min?: number; max?: number; step?: number };
type SelectKnob = { kind: "select"; key: keyof KnobState; label: string; options: () => string[] };
type ToggleKnob = { kind: "toggle"; key: keyof KnobState; label: string };
type KnobDef = NumberKnob | SelectKnob | ToggleKnob;

const MODEL_KNOBS: KnobDef[] = [
  { kind: "number", key: "layers", label: "layers" },
  { kind: "number", key: "dModel", label: "model width" },
  { kind: "number", key: "nHeads", label: "attention heads" },
  { kind: "number", key: "dHead", label: "head width" },
  { kind: "number", key: "ffnDim", label: "FFN width" },
  { kind: "number", key: "vocab", label: "vocabulary" },
  { kind: "number", key: "nKvHeads", label: "KV heads" },
  { kind: "number", key: "dtypeBytes", label: "bytes per weight" },
  { kind: "toggle", key: "moeEnabled", label: "mixture of experts" },
  { kind: "range", key: "nExperts", label: "experts", min: 1, max: 512, step: 1 },
  { kind: "number", key: "topK", label: "experts per token" },
  { kind: "number", key: "sharedFfnDim", label: "shared FFN width" },
];

const REQUEST_KNOBS: KnobDef[] = [
  { kind: "range", key: "inputLen", label: "context tokens", min: 128, max: 131072, step: 128 },
  { kind: "number", key: "outputLen", label: "output tokens" },
  { kind: "number", key: "thoughtLen", label: "thought tokens" },
  { kind: "range", key: "batch", label: "batch", min: 1, max: 512, step: 1 },
];

const HW_KNOBS: KnobDef[] = [
  { kind: "select", key: "node", label: "node", options: () => [] },
  { kind: "select", key: "topologyKind", label: "topology", options: () => [...TOPOLOGY_KINDS] },
  { kind: "number", key: "linkBwGbps", label: "link bandwidth (GB/s)" },
  { kind: "toggle", key: "inNetwork", label: "in-network collectives" },
  { kind: "select", key: "memVariant", label: "memory what-if", options: () => [...MEM_VARIANTS] },
];

const PLAN_KNOBS: KnobDef[] = [
  { kind: "number", key: "tp", label: "tensor parallel" },
  { kind: "number", key: "pp", label: "pipeline parallel" },
  { kind: "number", key: "ep", label: "expert parallel" },
  { kind: "number", key: "dp", label: "data parallel" },
  { kind: "select", key: "weightsTier", label: "weights tier", options: () => [] },
  { kind: "select", key: "kvTier", label: "KV cache tier", options: () => [] },
];

const EXPLORE_KNOBS: KnobDef[] = [
  { kind: "range", key: "budget", label: "chip budget", min: 1, max: 64, step: 1 },
];

export class App {
  state: KnobState;
  client: Client;
  root: HTMLElement;
  form!: HTMLElement;
  resultsEl!: HTMLElement;
  paretoEl!: HTMLElement;
  bannerEl!: HTMLElement;
  errorGutter!: HTMLElement;
  scheduler: Scheduler<KnobState, EstimateReport | ExploreReport>;
  lastExplore: ExploreReport | null = null;
  flip = false;
  selected: number | null = null;
  private selects = new Map<string, HTMLSelectElement>();
  private catalog: CatalogSummary | null = null;

  constructor(root: HTMLElement, client: Client, opts: { debounceMs?: number } = {}) {
    this.root = root;
    this.client = client;
    this.state = presetState("dense-on-hbm");
    this.scheduler = new Scheduler<KnobState, EstimateReport | ExploreReport>(
      {
        run: (s, signal): Promise<EstimateReport | ExploreReport> => {
          const cfg = knobsToConfig(s, this.tierDevicesFor(s.node));
          return s.mode === "plan" ? this.client.estimate(cfg, signal) : this.client.explore(cfg, signal);
        },
        onResult: (r, s) => this.onResult(r, s),
        onError: (e) => this.onError(e),
      },
      opts.debounceMs ?? 150,
    );
    this.build();
    this.syncForm();
  }

  start(): void {
    void this.loadCatalog();
    this.scheduler.requestNow(this.state);
  }

  private async loadCatalog(): Promise<void> {
    try {
      const cat = await this.client.catalog();
      this.applyCatalog(cat);
      this.hideBanner();
    } catch (err) {
      this.onError(err);
    }
  }

  // Variants shadow the selected node's tier devices by name; an empty list
  // (catalog not loaded yet) just omits the what-if from the request.
  private tierDevicesFor(node: string): string[] {
    const spec = this.catalog?.nodes.find((n) => n.name === node);
    return spec ? [...new Set(spec.tiers.map((t) => t.device))] : [];
  }

  applyCatalog(cat: CatalogSummary): void {
    this.catalog = cat;
    const nodes = cat.nodes.map((n) => n.name);
    const tiers = [...new Set(cat.nodes.flatMap((n) => n.tiers.map((t) => t.device)))].sort();
    this.fillSelect("node", nodes);
    this.fillSelect("weightsTier", tiers);
    this.fillSelect("kvTier", tiers);
    this.syncForm();
  }

  private fillSelect(key: string, options: string[]): void {
    const sel = this.selects.get(key);
    if (!sel) return;
    const doc = this.root.ownerDocument;
    sel.textContent = "";
    for (const o of options) {
      const opt = doc.createElement("option");
      opt.value = o;
      opt.textContent = o;
      sel.appendChild(opt);
    }
  }

  private build(): void {
    const doc = this.root.ownerDocument;
    this.root.textContent = "";

    this.bannerEl = doc.createElement("div");
    this.bannerEl.className = "banner hidden";
    this.bannerEl.setAttribute("data-banner", "");
    this.root.appendChild(this.bannerEl);

    const presetBar = doc.createElement("div");
    presetBar.className = "preset-bar";
    for (const name of PRESET_NAMES) {
      const b = doc.createElement("button");
      b.textContent = name;
      b.setAttribute("data-preset", name);
      b.addEventListener("click", () => this.loadPreset(name));
      presetBar.appendChild(b);
    }
    this.root.appendChild(presetBar);

    const main = doc.createElement("div");
    main.className = "main-split";
    this.form = doc.createElement("form");
    this.form.className = "knob-form";
    this.form.addEventListener("submit", (e) => e.preventDefault());
    main.appendChild(this.form);

    const right = doc.createElement("div");
    right.className = "results-split";
    this.errorGutter = doc.createElement("div");
    this.errorGutter.className = "error-gutter";
    right.appendChild(this.errorGutter);
    this.resultsEl = doc.createElement("div");
    this.resultsEl.className = "results-pane";
    right.appendChild(this.resultsEl);
    this.paretoEl = doc.createElement("div");
    this.paretoEl.className = "pareto-pane";
    right.appendChild(this.paretoEl);
    main.appendChild(right);
    this.root.appendChild(main);

    this.buildSection("Model", MODEL_KNOBS);
    this.buildSection("Request", REQUEST_KNOBS);
    this.buildSection("Hardware", HW_KNOBS);
    this.buildModeSwitch();
    this.buildSection("Plan", PLAN_KNOBS, "plan");
    this.buildSection("Exploration", EXPLORE_KNOBS, "explore");
    this.buildObjectiveSelectors();
    this.buildFlipToggle();
  }

  private buildSection(title: string, knobs: KnobDef[], mode?: "plan" | "explore"): void {
    const doc = this.root.ownerDocument;
    const section = doc.createElement("fieldset");
    section.className = "knob-section";
    if (mode) section.setAttribute("data-mode-section", mode);
    const legend = doc.createElement("legend");
    legend.textContent = title;
    section.appendChild(legend);
    for (const def of knobs) {
      section.appendChild(this.buildKnobRow(def));
    }
    this.form.appendChild(section);
  }

  private buildKnobRow(def: KnobDef): HTMLElement {
    const doc = this.root.ownerDocument;
    const row = doc.createElement("div");
    row.className = "knob-row";
    row.setAttribute("data-knob-row", def.key);
    const label = doc.createElement("label");
    label.textContent = def.label;
    row.appendChild(label);

    let input: HTMLInputElement | HTMLSelectElement;
    if (def.kind === "select") {
      input = doc.createElement("select");
      for (const o of def.options()) {
        const opt = doc.createElement("option");
        opt.value = o;
        opt.textContent = o;
        input.appendChild(opt);
      }
      this.selects.set(def.key, input);
    } else if (def.kind === "toggle") {
      input = doc.createElement("input");
      input.type = "checkbox";
    } else {
      input = doc.createElement("input");
      input.type = def.kind === "range" ? "range" : "number";
      if (def.min !== undefined) input.min = String(def.min);
      if (def.max !== undefined) input.max = String(def.max);
      if (def.step !== undefined) input.step = String(def.step);
    }
    input.setAttribute("data-knob", def.key);
    input.addEventListener("input", () => this.onKnobInput(def, input));
    input.addEventListener("change", () => this.onKnobInput(def, input));
    row.appendChild(input);

    if (def.kind === "range") {
      const value = doc.createElement("span");
      value.className = "range-value";
      value.setAttribute("data-range-value", def.key);
      row.appendChild(value);
    }

    const slot = doc.createElement("div");
    slot.className = "violation-slot";
    slot.setAttribute("data-violation-for", def.key);
    row.appendChild(slot);
    return row;
  }

  private buildModeSwitch(): void {
    const doc = this.root.ownerDocument;
    const section = doc.createElement("fieldset");
    section.className = "knob-section";
    const legend = doc.createElement("legend");
    legend.textContent = "Sharding";
    section.appendChild(legend);
    for (const mode of ["plan", "explore"] as const) {
      const label = doc.createElement("label");
      label.className = "mode-choice";
      const radio = doc.createElement("input");
      radio.type = "radio";
      radio.name = "sharding-mode";
      radio.value = mode;
      radio.setAttribute("data-mode", mode);
      radio.addEventListener("change", () => {
        if (radio.checked) {
          this.state = { ...this.state, mode };
          this.syncForm();
          this.scheduler.request(this.state);
        }
      });
      label.appendChild(radio);
      label.appendChild(doc.createTextNode(mode === "plan" ? " fixed plan" : " explore plans"));
      section.appendChild(label);
    }
    this.form.appendChild(section);
  }

  private buildObjectiveSelectors(): void {
    const doc = this.root.ownerDocument;
    const section = this.form.querySelector<HTMLElement>('[data-mode-section="explore"]');
    if (!section) return;
    (["first", "second"] as const).forEach((slot, i) => {
      const row = doc.createElement("div");
      row.className = "knob-row";
      const label = doc.createElement("label");
      label.textContent = `objective (${slot})`;
      row.appendChild(label);
      const sel = doc.createElement("select");
      sel.setAttribute("data-knob", `objective-${slot}`);
      for (const o of OBJECTIVES) {
        const opt = doc.createElement("option");
        opt.value = o;
        opt.textContent = o.replace(/_/g, " ");
        sel.appendChild(opt);
      }
      sel.addEventListener("change", () => {
        const objectives: [string, string] = [...this.state.objectives];
        objectives[i] = sel.value;
        this.state = { ...this.state, objectives };
        this.scheduler.request(this.state);
      });
      row.appendChild(sel);
      const slotEl = doc.createElement("div");
      slotEl.className = "violation-slot";
      slotEl.setAttribute("data-violation-for", i === 0 ? "objectives" : "objectives-second");
      row.appendChild(slotEl);
      section.appendChild(row);
      this.selects.set(`objective-${slot}`, sel);
    });
  }

  private buildFlipToggle(): void {
    const doc = this.root.ownerDocument;
    const label = doc.createElement("label");
    label.className = "flip-toggle";
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.setAttribute("data-flip", "");
    box.addEventListener("change", () => {
      this.flip = box.checked;
      if (this.lastExplore) this.renderExplore(this.lastExplore); // same payload, no refetch
    });
    label.appendChild(box);
    label.appendChild(doc.createTextNode(" flip axes"));
    this.paretoEl.insertAdjacentElement("beforebegin", label);
  }

  private onKnobInput(def: KnobDef, input: HTMLInputElement | HTMLSelectElement): void {
    const next = { ...this.state };
    if (def.kind === "toggle") {
      (next as Record<string, unknown>)[def.key] = (input as HTMLInputElement).checked;
    } else if (def.kind === "select") {
      (next as Record<string, unknown>)[def.key] = input.value;
    } else {
      const v = Number(input.value);
      if (!Number.isFinite(v)) return; // leave state untouched while the field is mid-edit
      (next as Record<string, unknown>)[def.key] = v;
      const badge = this.form.querySelector(`[data-range-value="${def.key}"]`);
      if (badge) badge.textContent = input.value;
    }
    this.state = next;
    this.scheduler.request(this.state);
  }

  loadPreset(name: string): void {
    this.state = presetState(name);
    this.selected = null;
    this.lastExplore = null;
    this.syncForm();
    this.scheduler.requestNow(this.state);
  }

  // Write state into the form controls (presets, pareto clicks).
  syncForm(): void {
    for (const input of this.form.querySelectorAll<HTMLInputElement | HTMLSelectElement>("[data-knob]")) {
      const key = input.getAttribute("data-knob") ?? "";
      if (key === "objective-first") {
        (input as HTMLSelectElement).value = this.state.objectives[0];
        continue;
      }
      if (key === "objective-second") {
        (input as HTMLSelectElement).value = this.state.objectives[1];
        continue;
      }
      const val = (this.state as unknown as Record<string, unknown>)[key];
      if (val === undefined) continue;
      if ((input as HTMLInputElement).type === "checkbox") {
        (input as HTMLInputElement).checked = Boolean(val);
      } else {
        input.value = String(val);
        const badge = this.form.querySelector(`[data-range-value="${key}"]`);
        if (badge) badge.textContent = String(val);
      }
    }
    for (const radio of this.form.querySelectorAll<HTMLInputElement>("[data-mode]")) {
      radio.checked = radio.value === this.state.mode;
    }
    for (const section of this.form.querySelectorAll<HTMLElement>("[data-mode-section]")) {
      section.classList.toggle("hidden", section.getAttribute("data-mode-section") !== this.state.mode);
    }
  }

  private onResult(r: EstimateReport | ExploreReport, s: KnobState): void {
    this.hideBanner();
    clearViolations(this.form, this.errorGutter);
    if (s.mode === "plan") {
      renderResults(this.resultsEl, r as EstimateReport);
    } else {
      const resp = r as ExploreReport;
      this.lastExplore = resp;
      this.selected = autoSelect(resp);
      this.renderExplore(resp);
    }
  }

  renderExplore(resp: ExploreReport): void {
    renderPareto(this.paretoEl, resp, {
      flip: this.flip,
      selected: this.selected,
      onSelect: (i, plan) => this.selectPlan(i, plan),
    });
  }

  selectPlan(index: number, plan: PlanReport): void {
    this.selected = index;
    if (this.lastExplore) this.renderExplore(this.lastExplore);
    this.state = applyPlan(this.state, plan);
    this.syncForm();
    this.scheduler.requestNow(this.state);
  }

  private onError(err: unknown): void {
    if (err instanceof ServiceError) {
      if (err.kind === "unreachable") {
        this.showBanner(err.message);
        return;
      }
      if (err.kind === "infeasible") {
        if (this.state.mode === "explore") {
          renderParetoEmpty(this.paretoEl, err.feasibility, err.message);
        } else if (err.feasibility) {
          renderViolations(this.form, this.errorGutter, err.feasibility);
        }
        return;
      }
      if (err.kind === "config") {
        renderConfigError(this.form, this.errorGutter, err.message, err.path ? (knobForPath(err.path) as string | null) : null);
        return;
      }
    }
    this.showBanner(err instanceof Error ? err.message : String(err));
  }

  private showBanner(message: string): void {
    const doc = this.root.ownerDocument;
    this.bannerEl.classList.remove("hidden");
    this.bannerEl.textContent = "";
    const text = doc.createElement("span");
    text.textContent = message;
    this.bannerEl.appendChild(text);
    const retry = doc.createElement("button");
    retry.textContent = "retry";
    retry.setAttribute("data-retry", "");
    retry.addEventListener("click", () => {
      void this.loadCatalog();
      this.scheduler.retry();
    });
    this.bannerEl.appendChild(retry);
  }

  private hideBanner(): void {
    this.bannerEl.classList.add("hidden");
    this.bannerEl.textContent = "";
  }
}

export function mount(root: HTMLElement, baseUrl: string): App {
  const app = new App(root, new Client(baseUrl));
  app.start();
  return app;
}
