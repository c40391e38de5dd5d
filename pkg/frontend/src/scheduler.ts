// Debounced, newest-wins request scheduling. At most one request is in
// flight; starting a newer one aborts the older, and a stale response that
// loses the race is dropped rather than rendered.

export interface SchedulerCallbacks<A, R> {
  run: (arg: A, signal: AbortSignal) => Promise<R>;
  onResult: (result: R, arg: A) => void;
  onError: (err: unknown, arg: A) => void;
}

export class Scheduler<A, R> {
  private cb: SchedulerCallbacks<A, R>;
  private delayMs: number;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;
  private seq = 0;
  private lastArg: A | null = null;

  constructor(cb: SchedulerCallbacks<A, R>, delayMs = 150) {
    this.cb = cb;
    this.delayMs = delayMs;
  }

  // Trailing-edge debounce: knob motion within delayMs collapses to one
  // request for the final state.
  request(arg: A): void {
    this.lastArg = arg;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire(arg);
    }, this.delayMs);
  }

  // Skip the debounce window (preset click, retry button).
  requestNow(arg: A): void {
    this.lastArg = arg;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.fire(arg);
  }

  retry(): void {
    if (this.lastArg !== null) this.requestNow(this.lastArg);
  }

  private fire(arg: A): void {
    if (this.controller) this.controller.abort();
    const controller = new AbortController();
    this.controller = controller;
    const mySeq = ++this.seq;
    this.cb.run(arg, controller.signal).then(
      (result) => {
        if (mySeq !== this.seq) return; // superseded while in flight
        this.controller = null;
        this.cb.onResult(result, arg);
      },
      (err) => {
        if (mySeq !== this.seq) return;
        if (err instanceof DOMException && err.name === "AbortError") return;
        this.controller = null;
        this.cb.onError(err, arg);
      },
    );
  }
}
