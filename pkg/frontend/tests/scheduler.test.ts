// Debounce and newest-wins semantics, driven with fake timers and a
// controllable fake runner.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { Scheduler } from "../src/scheduler.js";

interface Pending {
  arg: number;
  signal: AbortSignal;
  resolve: (v: string) => void;
  reject: (e: unknown) => void;
}

function makeScheduler(delayMs = 150) {
  const started: Pending[] = [];
  const results: string[] = [];
  const errors: unknown[] = [];
  const sched = new Scheduler<number, string>(
    {
      run: (arg, signal) =>
        new Promise<string>((resolve, reject) => {
          started.push({ arg, signal, resolve, reject });
        }),
      onResult: (r) => results.push(r),
      onError: (e) => errors.push(e),
    },
    delayMs,
  );
  return { sched, started, results, errors };
}

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("debounce", () => {
  it("collapses rapid knob motion into one request for the final state", async () => {
    const { sched, started } = makeScheduler();
    for (let i = 0; i < 20; i++) {
      sched.request(i);
      vi.advanceTimersByTime(10); // continuous motion, gaps under the window
    }
    expect(started.length).toBe(0); // still within the debounce window
    vi.advanceTimersByTime(150);
    expect(started.length).toBe(1);
    expect(started[0]!.arg).toBe(19);
  });

  it("issues at most one request per debounce window of motion", () => {
    const { sched, started } = makeScheduler();
    // one second of continuous dragging at 10ms steps, then release
    for (let t = 0; t < 100; t++) {
      sched.request(t);
      vi.advanceTimersByTime(10);
    }
    vi.advanceTimersByTime(150);
    // trailing-edge debounce: continuous motion produces a single request
    expect(started.length).toBe(1);
  });

  it("fires separately for changes spaced beyond the window", () => {
    const { sched, started } = makeScheduler();
    sched.request(1);
    vi.advanceTimersByTime(200);
    sched.request(2);
    vi.advanceTimersByTime(200);
    expect(started.map((s) => s.arg)).toEqual([1, 2]);
  });

  it("requestNow skips the debounce window", () => {
    const { sched, started } = makeScheduler();
    sched.requestNow(7);
    expect(started.length).toBe(1);
    expect(started[0]!.arg).toBe(7);
  });
});

describe("newest wins", () => {
  it("aborts the in-flight request when a newer one starts", () => {
    const { sched, started } = makeScheduler();
    sched.requestNow(1);
    expect(started[0]!.signal.aborted).toBe(false);
    sched.requestNow(2);
    expect(started[0]!.signal.aborted).toBe(true);
    expect(started[1]!.signal.aborted).toBe(false);
  });

  it("drops a stale response that resolves after being superseded", async () => {
    const { sched, started, results } = makeScheduler();
    sched.requestNow(1);
    sched.requestNow(2);
    started[0]!.resolve("stale");
    started[1]!.resolve("fresh");
    await vi.runAllTimersAsync();
    expect(results).toEqual(["fresh"]);
  });

  it("renders exactly the final state's response for a rapid drag", async () => {
    const { sched, started, results } = makeScheduler();
    for (const v of [10, 20, 30]) {
      sched.request(v);
      vi.advanceTimersByTime(40);
    }
    vi.advanceTimersByTime(150);
    expect(started.length).toBe(1);
    started[0]!.resolve(`batch=${started[0]!.arg}`);
    await vi.runAllTimersAsync();
    expect(results).toEqual(["batch=30"]);
  });

  it("ignores abort errors but reports real failures", async () => {
    const { sched, started, errors, results } = makeScheduler();
    sched.requestNow(1);
    started[0]!.reject(new DOMException("The operation was aborted.", "AbortError"));
    await vi.runAllTimersAsync();
    expect(errors).toEqual([]);
    sched.requestNow(2);
    const boom = new Error("boom");
    started[1]!.reject(boom);
    await vi.runAllTimersAsync();
    expect(errors).toEqual([boom]);
    expect(results).toEqual([]);
  });

  it("retry reissues the most recent argument immediately", () => {
    const { sched, started } = makeScheduler();
    sched.requestNow(5);
    sched.retry();
    expect(started.map((s) => s.arg)).toEqual([5, 5]);
  });
});
