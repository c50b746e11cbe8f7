/**
 * UI state for the tuning panel: decomposition schedule plus per-layer
 * recomposition weights, with the clamping and slider mappings the
 * controls rely on.
 */

export interface LevelSetting {
  radius: number;
  epsilon: number;
}

/** What the main canvas shows: the recomposed result, the original beside
 * it, the base layer, or a single detail layer (1-based index). */
export type ViewMode = "result" | "side-by-side" | "base" | number;

export interface TuningState {
  schedule: LevelSetting[];
  colorMode: "per-channel" | "luma";
  baseWeight: number;
  weights: number[];
  viewMode: ViewMode;
}

export const RADIUS_MIN = 1;
export const RADIUS_MAX = 64;
export const EPSILON_MIN = 1e-4;
export const EPSILON_MAX = 0.2;
export const WEIGHT_MIN = -2;
export const WEIGHT_MAX = 10;

export function clampRadius(value: number): number {
  const r = Math.round(value);
  if (!Number.isFinite(r)) return RADIUS_MIN;
  return Math.min(RADIUS_MAX, Math.max(RADIUS_MIN, r));
}

export function clampEpsilon(value: number): number {
  if (!Number.isFinite(value)) return EPSILON_MIN;
  return Math.min(EPSILON_MAX, Math.max(EPSILON_MIN, value));
}

export function clampWeight(value: number): number {
  if (!Number.isFinite(value)) return 1;
  return Math.min(WEIGHT_MAX, Math.max(WEIGHT_MIN, value));
}

// Epsilon spans three decades, so the slider works in log space:
// t in [0, 1] maps to EPSILON_MIN * (EPSILON_MAX / EPSILON_MIN)^t.
export function epsilonFromSlider(t: number): number {
  const clamped = Math.min(1, Math.max(0, t));
  const ratio = EPSILON_MAX / EPSILON_MIN;
  return clampEpsilon(EPSILON_MIN * Math.pow(ratio, clamped));
}

export function sliderFromEpsilon(epsilon: number): number {
  const e = clampEpsilon(epsilon);
  const ratio = EPSILON_MAX / EPSILON_MIN;
  return Math.log(e / EPSILON_MIN) / Math.log(ratio);
}

export function defaultSchedule(): LevelSetting[] {
  return [
    { radius: 2, epsilon: 0.015 },
    { radius: 4, epsilon: 0.015 },
    { radius: 8, epsilon: 0.015 },
  ];
}

/** Named weight presets, by what they do to the preview. */
export const WEIGHT_PRESETS: Record<string, (levels: number) => number[]> = {
  identity: (levels) => new Array(levels).fill(1),
  "detail boost": (levels) =>
    Array.from({ length: levels }, (_, i) => (i === 0 ? 2.5 : 1.5)),
  smooth: (levels) =>
    Array.from({ length: levels }, (_, i) => (i === 0 ? 0.15 : 0.5)),
  "coarse only": (levels) =>
    Array.from({ length: levels }, (_, i) => (i === levels - 1 ? 1 : 0)),
};

type Listener = (state: TuningState) => void;

export class TuningStore {
  private state: TuningState;
  private listeners = new Set<Listener>();

  constructor(schedule: LevelSetting[] = defaultSchedule()) {
    if (schedule.length === 0) throw new Error("schedule needs at least one level");
    this.state = {
      schedule: schedule.map((lv) => ({
        radius: clampRadius(lv.radius),
        epsilon: clampEpsilon(lv.epsilon),
      })),
      colorMode: "per-channel",
      baseWeight: 1,
      weights: new Array(schedule.length).fill(1),
      viewMode: "result",
    };
  }

  getState(): TuningState {
    return {
      schedule: this.state.schedule.map((lv) => ({ ...lv })),
      colorMode: this.state.colorMode,
      baseWeight: this.state.baseWeight,
      weights: this.state.weights.slice(),
      viewMode: this.state.viewMode,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    const snapshot = this.getState();
    for (const listener of this.listeners) listener(snapshot);
  }

  get levels(): number {
    return this.state.schedule.length;
  }

  setRadius(level: number, radius: number): void {
    this.assertLevel(level);
    this.state.schedule[level]!.radius = clampRadius(radius);
    this.notify();
  }

  setEpsilon(level: number, epsilon: number): void {
    this.assertLevel(level);
    this.state.schedule[level]!.epsilon = clampEpsilon(epsilon);
    this.notify();
  }

  setColorMode(mode: "per-channel" | "luma"): void {
    this.state.colorMode = mode;
    this.notify();
  }

  setWeight(level: number, weight: number): void {
    this.assertLevel(level);
    this.state.weights[level] = clampWeight(weight);
    this.notify();
  }

  setBaseWeight(weight: number): void {
    this.state.baseWeight = clampWeight(weight);
    this.notify();
  }

  setViewMode(mode: ViewMode): void {
    if (typeof mode === "number") {
      if (!Number.isInteger(mode) || mode < 1 || mode > this.levels) {
        throw new RangeError(`no detail layer ${mode}`);
      }
    }
    this.state.viewMode = mode;
    this.notify();
  }

  applyPreset(name: keyof typeof WEIGHT_PRESETS): void {
    const preset = WEIGHT_PRESETS[name];
    if (!preset) throw new Error(`unknown preset: ${String(name)}`);
    this.state.weights = preset(this.levels).map(clampWeight);
    this.state.baseWeight = 1;
    this.notify();
  }

  addLevel(): void {
    const last = this.state.schedule[this.state.schedule.length - 1]!;
    this.state.schedule.push({
      radius: clampRadius(last.radius * 2),
      epsilon: last.epsilon,
    });
    this.state.weights.push(1);
    this.notify();
  }

  removeLevel(): void {
    if (this.state.schedule.length <= 1) return;
    this.state.schedule.pop();
    this.state.weights.pop();
    if (typeof this.state.viewMode === "number" && this.state.viewMode > this.levels) {
      this.state.viewMode = "result";
    }
    this.notify();
  }

  private assertLevel(level: number): void {
    if (!Number.isInteger(level) || level < 0 || level >= this.state.schedule.length) {
      throw new RangeError(`level out of range: ${level}`);
    }
  }
}
