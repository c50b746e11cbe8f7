/**
 * Typed client for the svf tuning service.
 *
 * Every method resolves to parsed data or rejects with ApiError carrying
 * the HTTP status and the service's machine-readable error code.
 */

export interface SessionInfo {
  sessionId: string;
  width: number;
  height: number;
  channels: number;
}

export interface LevelStats {
  radius: number;
  epsilon: number;
  min: number;
  max: number;
  mean: number;
}

export interface DecomposeResult {
  levels: number;
  perLevel: LevelStats[];
  timingMs: number;
}

export interface ScheduleSpec {
  radii: number[];
  epsilons: number | number[];
  colorMode?: "per-channel" | "luma";
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function raise(response: Response): Promise<never> {
  let code = "unknown";
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { error?: string; code?: string };
    if (body.code) code = body.code;
    if (body.error) message = body.error;
  } catch {
    // non-JSON error body; keep the fallback message
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async createSession(png: Uint8Array | Blob, name = "upload.png"): Promise<SessionInfo> {
    const blob = png instanceof Blob
      ? png
      : new Blob([png.buffer.slice(png.byteOffset, png.byteOffset + png.byteLength) as ArrayBuffer], { type: "image/png" });
    const form = new FormData();
    form.append("file", blob, name);
    const response = await this.fetchFn(this.url("/api/sessions"), {
      method: "POST",
      body: form,
    });
    if (!response.ok) await raise(response);
    const body = (await response.json()) as {
      session_id: string;
      width: number;
      height: number;
      channels: number;
    };
    return {
      sessionId: body.session_id,
      width: body.width,
      height: body.height,
      channels: body.channels,
    };
  }

  async decompose(sessionId: string, schedule: ScheduleSpec): Promise<DecomposeResult> {
    const payload = {
      radii: schedule.radii,
      epsilons: schedule.epsilons,
      color_mode: schedule.colorMode ?? "per-channel",
    };
    const response = await this.fetchFn(this.url(`/api/sessions/${sessionId}/decompose`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) await raise(response);
    const body = (await response.json()) as {
      levels: number;
      per_level: LevelStats[];
      timing_ms: number;
    };
    return { levels: body.levels, perLevel: body.per_level, timingMs: body.timing_ms };
  }

  async recompose(sessionId: string, weights: number[], baseWeight = 1.0): Promise<Uint8Array> {
    const response = await this.fetchFn(this.url(`/api/sessions/${sessionId}/recompose`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ weights, base_weight: baseWeight }),
    });
    if (!response.ok) await raise(response);
    return new Uint8Array(await response.arrayBuffer());
  }

  layerPath(layer: "base" | number): string {
    return layer === "base" ? "/layers/base" : `/layers/${layer}`;
  }

  layerUrl(sessionId: string, layer: "base" | number): string {
    return this.url(`/api/sessions/${sessionId}${this.layerPath(layer)}`);
  }

  async fetchLayer(sessionId: string, layer: "base" | number): Promise<Uint8Array> {
    const response = await this.fetchFn(this.layerUrl(sessionId, layer));
    if (!response.ok) await raise(response);
    return new Uint8Array(await response.arrayBuffer());
  }

  async deleteSession(sessionId: string): Promise<void> {
    const response = await this.fetchFn(this.url(`/api/sessions/${sessionId}`), {
      method: "DELETE",
    });
    if (!response.ok && response.status !== 204) await raise(response);
  }
}
