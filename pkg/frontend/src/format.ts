// Lossless display formatting. Every number shown in the results pane must
// parse back to the exact value the service sent, so formatting is limited
// to String(x): shortest round-trip decimal, no rounding of our own.

export function fmt(x: number | null | undefined): string {
  if (x === null || x === undefined) return "n/a";
  return String(x);
}

export function fmtUnit(x: number | null | undefined, unit: string): string {
  if (x === null || x === undefined) return "n/a";
  return `${String(x)} ${unit}`;
}

// Pull every numeric token out of rendered text. Used by contract tests to
// check rendered numbers against the payload; lives here so the extraction
// rule and the formatter stay in one file.
const NUM_TOKEN = /-?\d+(?:\.\d+)?(?:e[+-]?\d+)?/gi;

export function numericTokens(text: string): number[] {
  const out: number[] = [];
  for (const m of text.matchAll(NUM_TOKEN)) {
    out.push(Number(m[0]));
  }
  return out;
}

// Collect every number reachable in a JSON payload.
export function payloadNumbers(value: unknown, into: Set<number> = new Set()): Set<number> {
  if (typeof value === "number") {
    into.add(value);
  } else if (Array.isArray(value)) {
    for (const v of value) payloadNumbers(v, into);
  } else if (value && typeof value === "object") {
    for (const v of Object.values(value)) payloadNumbers(v, into);
  }
  return into;
}
