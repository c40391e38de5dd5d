// Mounted-app flows: preset switching, inline violations, pareto row trips,
// axis flip, and the unreachable-service banner, against a fetch stub that
// serves the recorded golden responses.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { App } from "../src/app.js";
import { Client } from "../src/client.js";
import type { ExploreReport, PlanReport, ScenarioConfig } from "../src/types.js";
import { golden } from "./helpers.js";

interface Call {
  url: string;
  method: string;
  body: ScenarioConfig | null;
}

interface Stub {
  calls: Call[];
  down: boolean;
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

// Route requests the way the real service would, using recorded bodies.
function installFetchStub(): Stub {
  const stub: Stub = { calls: [], down: false };
  const catalogBody = golden("catalog").body;
  const dense = golden("estimate-dense").body;
  const moeHbf = golden("estimate-moe-hbf").body;
  const kvViolation = golden("infeasible-kv-on-hbf");
  const exploreMulti = golden("explore-multi").body;
  const exploreSingle = golden("explore-singleton").body;

  vi.stubGlobal("fetch", async (url: string, init?: RequestInit): Promise<Response> => {
    if (stub.down) throw new TypeError("fetch failed");
    const body = init?.body ? (JSON.parse(String(init.body)) as ScenarioConfig) : null;
    stub.calls.push({ url: String(url), method: init?.method ?? "GET", body });
    const path = new URL(String(url)).pathname;
    if (path === "/catalog") return jsonResponse(200, catalogBody);
    if (path === "/health") return jsonResponse(200, { status: "ok", version: "test" });
    if (path === "/estimate" && body) {
      const placement = "plan" in body.sharding ? body.sharding.plan.placement : null;
      if (placement?.kv_cache === "hbf-stack") {
        return jsonResponse(kvViolation.status, kvViolation.body);
      }
      return jsonResponse(200, body.node === "hbf-node" ? moeHbf : dense);
    }
    if (path === "/explore" && body) {
      const budget = "explore" in body.sharding ? body.sharding.explore.budget : 0;
      return jsonResponse(200, budget === 1 ? exploreSingle : exploreMulti);
    }
    return jsonResponse(404, { error: `no route '${path}'` });
  });
  return stub;
}

async function settle(): Promise<void> {
  await vi.runAllTimersAsync();
  await Promise.resolve();
  await Promise.resolve();
}

function mountApp(stub: Stub): App {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = new App(root, new Client("http://svc.test"), { debounceMs: 50 });
  app.start();
  return app;
}

function estimateCalls(stub: Stub): Call[] {
  return stub.calls.filter((c) => c.url.endsWith("/estimate"));
}

let stub: Stub;
let app: App;

beforeEach(async () => {
  vi.useFakeTimers();
  stub = installFetchStub();
  app = mountApp(stub);
  await settle();
});

afterEach(() => {
  vi.unstubAllGlobals();
  vi.useRealTimers();
  document.body.textContent = "";
});

describe("estimate flow", () => {
  it("renders the initial preset estimate from the service response", () => {
    expect(app.resultsEl.querySelector("[data-badge]")?.textContent).toBe("MemoryBandwidth");
    expect(estimateCalls(stub).length).toBe(1);
  });

  it("KV-on-HBF placement surfaces the endurance violation next to that knob", async () => {
    const presetButton = app.root.querySelector<HTMLButtonElement>('[data-preset="moe-256-with-hbf"]');
    presetButton!.click();
    await settle();
    expect(app.form.querySelector(".violation-msg")).toBeNull();

    const kvSelect = app.form.querySelector<HTMLSelectElement>('[data-knob="kvTier"]');
    kvSelect!.value = "hbf-stack";
    kvSelect!.dispatchEvent(new Event("change"));
    await settle();

    const row = app.form.querySelector('[data-knob-row="kvTier"]');
    const msg = row?.querySelector("[data-violation]");
    expect(msg?.getAttribute("data-violation")).toBe("Endurance");
    expect(msg?.textContent).toContain("cannot live on a low-endurance tier");
    expect(row?.classList.contains("knob-invalid")).toBe(true);

    // moving the knob back clears the inline message
    kvSelect!.value = "hbm4-6400-stack";
    kvSelect!.dispatchEvent(new Event("change"));
    await settle();
    expect(app.form.querySelector(".violation-msg")).toBeNull();
    expect(app.resultsEl.querySelector("[data-results]") ?? app.resultsEl.hasChildNodes()).toBeTruthy();
  });

  it("a rapid slider drag renders exactly the final state's response", async () => {
    const before = estimateCalls(stub).length;
    const batch = app.form.querySelector<HTMLInputElement>('[data-knob="batch"]');
    for (const v of ["4", "8", "16"]) {
      batch!.value = v;
      batch!.dispatchEvent(new Event("input"));
      vi.advanceTimersByTime(10);
    }
    await settle();
    const after = estimateCalls(stub);
    expect(after.length).toBe(before + 1);
    expect(after[after.length - 1]!.body?.request.batch).toBe(16);
  });

  it("the memory what-if knob shadows the node's tier devices on the wire", async () => {
    const variant = app.form.querySelector<HTMLSelectElement>('[data-knob="memVariant"]');
    variant!.value = "stacked3d";
    variant!.dispatchEvent(new Event("change"));
    await settle();

    // dense preset sits on hbm-node, whose only tier device is the HBM stack
    const last = estimateCalls(stub).at(-1)!;
    expect(last.body?.catalog).toEqual({
      variants: [{ name: "hbm4-6400-stack", base: "hbm4-6400-stack", kind: "stacked3d", power_divisor: 2.5 }],
    });

    variant!.value = "none";
    variant!.dispatchEvent(new Event("change"));
    await settle();
    expect(estimateCalls(stub).at(-1)!.body?.catalog).toBeUndefined();
  });
});

describe("explore flow", () => {
  async function switchToExplore(): Promise<void> {
    const radio = app.form.querySelector<HTMLInputElement>('[data-mode="explore"]');
    radio!.checked = true;
    radio!.dispatchEvent(new Event("change"));
    await settle();
  }

  it("clicking a pareto point loads that plan into the knobs and refetches it", async () => {
    await switchToExplore();
    const dots = app.paretoEl.querySelectorAll("[data-pareto-point]");
    const resp = golden("explore-multi").body as ExploreReport;
    expect(dots.length).toBe(resp.pareto.length);

    const target = resp.pareto[2]!.plan as PlanReport;
    dots[2]!.dispatchEvent(new Event("click"));
    await settle();

    // knob state took the plan
    expect(app.state.mode).toBe("plan");
    expect(app.state.tp).toBe(target.tp);
    expect(app.state.pp).toBe(target.pp);
    expect(app.form.querySelector<HTMLInputElement>('[data-knob="pp"]')!.value).toBe(String(target.pp));
    expect(app.form.querySelector<HTMLSelectElement>('[data-knob="weightsTier"]')!.value).toBe(target.placement["weights"]);

    // and the follow-up estimate was for exactly that plan
    const last = estimateCalls(stub).pop()!;
    const plan = "plan" in last.body!.sharding ? last.body!.sharding.plan : null;
    expect(plan?.tp).toBe(target.tp);
    expect(plan?.pp).toBe(target.pp);
    expect(plan?.ep).toBe(target.ep);
    expect(plan?.dp).toBe(target.dp);
    expect(plan?.placement).toEqual(target.placement);
  });

  it("axis flip re-renders from the same payload without a refetch", async () => {
    await switchToExplore();
    const callsBefore = stub.calls.length;
    const flip = app.root.querySelector<HTMLInputElement>("[data-flip]");
    flip!.checked = true;
    flip!.dispatchEvent(new Event("change"));
    expect(app.paretoEl.querySelector(".axis-x")?.textContent).toBe("tokens per USD");
    expect(app.paretoEl.querySelector(".axis-y")?.textContent).toBe("time to completion (s)");
    expect(stub.calls.length).toBe(callsBefore);
  });

  it("a singleton front is auto-selected", async () => {
    const budget = app.form.querySelector<HTMLInputElement>('[data-knob="budget"]');
    budget!.value = "1";
    budget!.dispatchEvent(new Event("input"));
    await switchToExplore();
    const dot = app.paretoEl.querySelector("[data-pareto-point]");
    expect(dot?.classList.contains("selected")).toBe(true);
    expect(app.paretoEl.querySelector("[data-pareto-selected]")).toBeTruthy();
  });
});

describe("service unreachable", () => {
  it("shows a retry banner and recovers when the service returns", async () => {
    stub.down = true;
    const batch = app.form.querySelector<HTMLInputElement>('[data-knob="batch"]');
    batch!.value = "2";
    batch!.dispatchEvent(new Event("input"));
    await settle();

    expect(app.bannerEl.classList.contains("hidden")).toBe(false);
    expect(app.bannerEl.textContent).toContain("cannot reach service");
    const retry = app.bannerEl.querySelector<HTMLButtonElement>("[data-retry]");
    expect(retry).toBeTruthy();

    stub.down = false;
    retry!.click();
    await settle();
    expect(app.bannerEl.classList.contains("hidden")).toBe(true);
    expect(app.resultsEl.querySelector("[data-badge]")).toBeTruthy();
  });
});
