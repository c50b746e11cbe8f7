/**
 * Debounced preview refresh.
 *
 * Slider drags fire many times per second; each recompose round-trip costs
 * a network hop plus server work. The scheduler collapses a burst into one
 * request after a quiet gap and never keeps more than one request in
 * flight: updates arriving mid-flight replace the pending payload, and the
 * newest payload is sent as soon as the active request settles.
 */

export interface RecomposePayload {
  weights: number[];
  baseWeight: number;
}

type RunFn = (payload: RecomposePayload) => Promise<Uint8Array>;
type DoneFn = (png: Uint8Array, payload: RecomposePayload) => void;
type FailFn = (error: unknown) => void;

export class RecomposeScheduler {
  private pending: RecomposePayload | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;

  constructor(
    private readonly run: RunFn,
    private readonly onDone: DoneFn,
    private readonly onError: FailFn = () => {},
    private readonly delayMs = 150,
  ) {}

  /** True while a request is on the wire or a flush is queued. */
  get busy(): boolean {
    return this.inFlight || this.timer !== null || this.pending !== null;
  }

  request(payload: RecomposePayload): void {
    this.pending = {
      weights: payload.weights.slice(),
      baseWeight: payload.baseWeight,
    };
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.flush();
    }, this.delayMs);
  }

  /** Drop any queued work; an in-flight request still settles. */
  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pending = null;
  }

  private flush(): void {
    if (this.inFlight || this.pending === null) return;
    const payload = this.pending;
    this.pending = null;
    this.inFlight = true;
    this.run(payload).then(
      (png) => {
        this.inFlight = false;
        this.onDone(png, payload);
        this.drain();
      },
      (error) => {
        this.inFlight = false;
        this.onError(error);
        this.drain();
      },
    );
  }

  // A payload queued while the wire was occupied has already waited longer
  // than the debounce gap; send it immediately rather than re-arming the timer.
  private drain(): void {
    if (this.pending !== null && this.timer === null) this.flush();
  }
}
