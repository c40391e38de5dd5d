import { readFileSync } from "node:fs";
import { join } from "node:path";
import { numericTokens } from "../src/format.js";

export interface Golden {
  route: string;
  status: number;
  request: unknown;
  body: unknown;
}

// vitest runs with the package root as cwd; under the jsdom environment
// import.meta.url is not a usable file URL, so resolve from cwd instead
export function golden(name: string): Golden {
  const path = join(process.cwd(), "tests", "golden", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf8")) as Golden;
}

// Numeric tokens a payload can justify: every number the service printed,
// in the exact spelling JSON gives it, plus digit runs inside its strings.
export function allowedTokens(body: unknown): Set<string> {
  const out = new Set<string>();
  for (const m of JSON.stringify(body).matchAll(/-?\d+(?:\.\d+)?(?:e[+-]?\d+)?/gi)) {
    out.add(m[0]);
    out.add(String(Number(m[0]))); // canonical spelling of the same value
  }
  return out;
}

// Every numeric token rendered inside root, ignoring [data-name] spans
// (catalog identifiers that contain digits) and attribute values. Tokens are
// extracted per text node; concatenating textContent would fuse numbers from
// adjacent elements into strings nobody ever rendered.
export function renderedTokens(root: HTMLElement): string[] {
  const clone = root.cloneNode(true) as HTMLElement;
  for (const n of clone.querySelectorAll("[data-name]")) n.remove();
  const out: string[] = [];
  const walk = (node: Node): void => {
    if (node.nodeType === 3) {
      for (const m of (node.nodeValue ?? "").matchAll(/-?\d+(?:\.\d+)?(?:e[+-]?\d+)?/gi)) {
        out.push(m[0]);
      }
      return;
    }
    for (const child of node.childNodes) walk(child);
  };
  walk(clone);
  return out;
}

export function assertVerbatim(root: HTMLElement, body: unknown): void {
  const allowed = allowedTokens(body);
  const bad = renderedTokens(root).filter((t) => !allowed.has(t) && !allowed.has(String(Number(t))));
  if (bad.length) {
    throw new Error(`rendered numbers not present in payload: ${[...new Set(bad)].join(", ")}`);
  }
}

export { numericTokens };
