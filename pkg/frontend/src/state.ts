/**
 * Console state: one bound session, a mirror of the last acknowledged server
 * config, a FIFO of pending control changes, and the event cursor feeding the
 * scatter display.
 *
 * Control changes are queued and sent one at a time, each as its own PATCH;
 * they are never merged. An acknowledged change updates the mirror; a
 * rejected change leaves the mirror untouched, so controls rendered from the
 * mirror revert on their own. Polling keeps at most one request in flight and
 * only ever displays events beyond the cursor, so no event is drawn twice.
 */

import {
  ApiError,
  type DetectionEvent,
  type EventBatch,
  type SessionInfo,
  type SlitConfig,
  type SourceRepresentation,
} from "./client.js";
import { ScatterBuffer, ScreenTransform } from "./render.js";

export const POLL_INTERVAL_MS = 250;
export const MAX_POLL_DELAY_MS = 4000;

/** The slice of the service the console drives; ServiceClient satisfies it. */
export interface SessionService {
  createSession(seed?: number, config?: Partial<SlitConfig>): Promise<SessionInfo>;
  getSession(id: string): Promise<SessionInfo & { running: boolean; event_count: number }>;
  patchConfig(id: string, changes: Partial<SlitConfig>): Promise<{ id: string; config: SlitConfig }>;
  start(id: string): Promise<{ id: string; running: boolean }>;
  stop(id: string): Promise<{ id: string; running: boolean }>;
  events(id: string, since: number): Promise<EventBatch>;
  source(id: string): Promise<SourceRepresentation>;
}

export type SlitSelection = "closed" | "left" | "right" | "both";

export function slitChanges(selection: SlitSelection): Partial<SlitConfig> {
  switch (selection) {
    case "closed":
      return { left_open: false, right_open: false };
    case "left":
      return { left_open: true, right_open: false };
    case "right":
      return { left_open: false, right_open: true };
    case "both":
      return { left_open: true, right_open: true };
  }
}

export function slitSelectionOf(config: SlitConfig): SlitSelection {
  if (config.left_open && config.right_open) return "both";
  if (config.left_open) return "left";
  if (config.right_open) return "right";
  return "closed";
}

/** Intensity knob detents: position k maps to 25 * 2^k events per second. */
export function rateForKnob(position: number): number {
  return 25 * 2 ** position;
}

export function knobForRate(rate: number): number {
  if (!(rate > 0)) return 0;
  return Math.round(Math.log2(rate / 25));
}

function messageOf(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return err.message;
  return String(err);
}

interface ControlRequest {
  changes: Partial<SlitConfig>;
  resolve: (acknowledged: boolean) => void;
}

export class Console {
  session: SessionInfo | null = null;
  /** Last acknowledged server config; controls always render from this. */
  mirror: SlitConfig | null = null;
  source: SourceRepresentation | null = null;
  running = false;
  stale = false;
  banner: string | null = null;
  /** Tick of the newest displayed event. */
  cursor = -1;
  pollDelayMs = POLL_INTERVAL_MS;
  readonly buffer: ScatterBuffer;

  /** Fresh, never-before-displayed events, in tick order. */
  onDisplay: ((events: DetectionEvent[]) => void) | null = null;
  onState: (() => void) | null = null;

  private queue: ControlRequest[] = [];
  private controlInFlight = false;
  private pollInFlight = false;

  constructor(
    readonly client: SessionService,
    readonly transform: ScreenTransform,
  ) {
    this.buffer = new ScatterBuffer(transform.widthPx);
  }

  /**
   * Create a fresh session and reset the display. Returns false (with the
   * banner set) when the service is unreachable or refuses the session.
   */
  async bind(seed?: number): Promise<boolean> {
    this.session = null;
    this.mirror = null;
    this.source = null;
    this.running = false;
    this.cursor = -1;
    this.pollDelayMs = POLL_INTERVAL_MS;
    this.stale = false;
    this.banner = null;
    this.buffer.reset();
    this.queue = [];
    try {
      const info = await this.client.createSession(seed);
      this.session = info;
      this.mirror = info.config;
      this.source = await this.client.source(info.id);
      return true;
    } catch (err) {
      this.banner = messageOf(err);
      this.session = null;
      return false;
    } finally {
      this.onState?.();
    }
  }

  /**
   * Queue one control change. Resolves true once the server acknowledges it
   * (mirror updated) or false if it is rejected (mirror kept, banner set).
   */
  requestControls(changes: Partial<SlitConfig>): Promise<boolean> {
    return new Promise((resolve) => {
      this.queue.push({ changes, resolve });
      void this.pump();
    });
  }

  private async pump(): Promise<void> {
    if (this.controlInFlight || this.session === null) return;
    const request = this.queue.shift();
    if (request === undefined) return;
    this.controlInFlight = true;
    try {
      const ack = await this.client.patchConfig(this.session.id, request.changes);
      this.mirror = ack.config;
      this.source = await this.client.source(this.session.id);
      this.banner = null;
      request.resolve(true);
    } catch (err) {
      this.banner = messageOf(err);
      request.resolve(false);
    } finally {
      this.controlInFlight = false;
      this.onState?.();
      void this.pump();
    }
  }

  async start(): Promise<void> {
    if (this.session === null) return;
    try {
      const ack = await this.client.start(this.session.id);
      this.running = ack.running;
      this.banner = null;
    } catch (err) {
      this.banner = messageOf(err);
    }
    this.onState?.();
  }

  async stop(): Promise<void> {
    if (this.session === null) return;
    try {
      const ack = await this.client.stop(this.session.id);
      this.running = ack.running;
      this.banner = null;
    } catch (err) {
      this.banner = messageOf(err);
    }
    this.onState?.();
  }

  /**
   * Fetch events past the cursor and push them into the display buffer.
   * Returns the newly displayed events. A failed poll marks the console
   * stale and backs the cadence off; a successful one restores it.
   */
  async pollOnce(): Promise<DetectionEvent[]> {
    if (this.pollInFlight || this.session === null) return [];
    this.pollInFlight = true;
    try {
      const batch = await this.client.events(this.session.id, this.cursor);
      const fresh: DetectionEvent[] = [];
      for (const event of batch.events) {
        if (event.tick <= this.cursor) continue;
        this.cursor = event.tick;
        this.buffer.add(this.transform.colFor(event.x_m));
        fresh.push(event);
      }
      this.stale = false;
      this.pollDelayMs = POLL_INTERVAL_MS;
      if (fresh.length > 0) this.onDisplay?.(fresh);
      return fresh;
    } catch {
      this.stale = true;
      this.pollDelayMs = Math.min(this.pollDelayMs * 2, MAX_POLL_DELAY_MS);
      return [];
    } finally {
      this.pollInFlight = false;
      this.onState?.();
    }
  }
}
