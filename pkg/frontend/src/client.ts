import type { CatalogSummary, EstimateReport, ExploreReport, Feasibility, ScenarioConfig } from "./types.js";

// Typed HTTP client for the estimate service. Every result the UI shows
// passes through here; there is no other backend.

export type ServiceErrorKind = "config" | "infeasible" | "unreachable" | "http";

export class ServiceError extends Error {
  kind: ServiceErrorKind;
  path: string | null;
  feasibility: Feasibility | null;
  status: number | null;

  constructor(kind: ServiceErrorKind, message: string, opts: {
    path?: string | null;
    feasibility?: Feasibility | null;
    status?: number | null;
  } = {}) {
    super(message);
    this.name = "ServiceError";
    this.kind = kind;
    this.path = opts.path ?? null;
    this.feasibility = opts.feasibility ?? null;
    this.status = opts.status ?? null;
  }
}

async function parseError(res: Response): Promise<ServiceError> {
  let body: Record<string, unknown> = {};
  try {
    body = (await res.json()) as Record<string, unknown>;
  } catch {
    return new ServiceError("http", `service returned ${res.status}`, { status: res.status });
  }
  const message = typeof body["error"] === "string" ? (body["error"] as string) : `service returned ${res.status}`;
  if (res.status === 422) {
    return new ServiceError("infeasible", message, {
      feasibility: (body["feasibility"] as Feasibility) ?? null,
      status: 422,
    });
  }
  if (res.status === 400) {
    return new ServiceError("config", message, {
      path: typeof body["path"] === "string" ? (body["path"] as string) : null,
      status: 400,
    });
  }
  return new ServiceError("http", message, { status: res.status });
}

export class Client {
  baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async post<T>(route: string, config: ScenarioConfig, signal?: AbortSignal): Promise<T> {
    let res: Response;
    try {
      res = await fetch(`${this.baseUrl}${route}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(config),
        signal,
      });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ServiceError("unreachable", `cannot reach service at ${this.baseUrl}`);
    }
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  private async get<T>(route: string): Promise<T> {
    let res: Response;
    try {
      res = await fetch(`${this.baseUrl}${route}`);
    } catch {
      throw new ServiceError("unreachable", `cannot reach service at ${this.baseUrl}`);
    }
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.get("/health");
  }

  catalog(): Promise<CatalogSummary> {
    return this.get("/catalog");
  }

  estimate(config: ScenarioConfig, signal?: AbortSignal): Promise<EstimateReport> {
    return this.post("/estimate", config, signal);
  }

  explore(config: ScenarioConfig, signal?: AbortSignal): Promise<ExploreReport> {
    return this.post("/explore", config, signal);
  }
}
