/**
 * REST client for the two-slit session service.
 *
 * Every method maps to one endpoint; bodies and errors are JSON, with
 * failures surfaced as ApiError carrying the HTTP status and the server's
 * error message.
 */

export interface SlitConfig {
  wavelength: number;
  slit_width: number;
  separation: number;
  screen_distance: number;
  screen_halfwidth: number;
  left_open: boolean;
  right_open: boolean;
  which_path: boolean;
  rate: number;
}

export interface SessionInfo {
  id: string;
  seed: number;
  config: SlitConfig;
}

export interface SessionView extends SessionInfo {
  running: boolean;
  event_count: number;
}

export interface DetectionEvent {
  tick: number;
  x_m: number;
  y_m: number;
}

export interface EventBatch {
  events: DetectionEvent[];
  total: number;
}

export interface SourceRepresentation {
  mode: string;
  state_form: string;
  system_form: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorMessage(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (body && typeof body.error === "string") return body.error;
  } catch {
    // fall through to the generic message
  }
  return `HTTP ${res.status}`;
}

export class ServiceClient {
  constructor(readonly base: string) {}

  private async http<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!res.ok) throw new ApiError(res.status, await errorMessage(res));
    return (await res.json()) as T;
  }

  createSession(seed?: number, config?: Partial<SlitConfig>): Promise<SessionInfo> {
    const body: Record<string, unknown> = {};
    if (seed !== undefined) body.seed = seed;
    if (config !== undefined) body.config = config;
    return this.http<SessionInfo>("/sessions", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getSession(id: string): Promise<SessionView> {
    return this.http<SessionView>(`/sessions/${id}`);
  }

  patchConfig(
    id: string,
    changes: Partial<SlitConfig>,
  ): Promise<{ id: string; config: SlitConfig }> {
    return this.http(`/sessions/${id}/config`, {
      method: "PATCH",
      body: JSON.stringify(changes),
    });
  }

  start(id: string): Promise<{ id: string; running: boolean }> {
    return this.http(`/sessions/${id}/start`, { method: "POST" });
  }

  stop(id: string): Promise<{ id: string; running: boolean }> {
    return this.http(`/sessions/${id}/stop`, { method: "POST" });
  }

  /** Events with tick > since, plus the session's total emitted count. */
  events(id: string, since: number): Promise<EventBatch> {
    return this.http<EventBatch>(`/sessions/${id}/events?since=${since}`);
  }

  source(id: string): Promise<SourceRepresentation> {
    return this.http<SourceRepresentation>(`/sessions/${id}/source`);
  }

  /** Theoretical screen intensity for the current config, as CSV text. */
  async pattern(id: string, grid?: number): Promise<string> {
    const suffix = grid === undefined ? "" : `?grid=${grid}`;
    const res = await fetch(`${this.base}/sessions/${id}/pattern${suffix}`);
    if (!res.ok) throw new ApiError(res.status, await errorMessage(res));
    return res.text();
  }
}
