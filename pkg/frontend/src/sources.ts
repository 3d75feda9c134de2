/**
 * Input sources feeding the game: all of them normalize to the same
 * ControlEvent shape, so the reducer never knows where a jump came from.
 */

export interface ControlEvent {
  kind: "jump" | "button";
  button?: string;
  tMs: number;
}

export type SourceStatus = "connecting" | "connected" | "disconnected" | "unsupported";

export type EventHandler = (event: ControlEvent) => void;
export type StatusHandler = (status: SourceStatus, detail?: string) => void;

export interface InputSource {
  start(): void;
  stop(): void;
  onEvent(handler: EventHandler): void;
  onStatus(handler: StatusHandler): void;
}

export abstract class BaseSource implements InputSource {
  protected eventHandlers: EventHandler[] = [];
  protected statusHandlers: StatusHandler[] = [];

  onEvent(handler: EventHandler): void {
    this.eventHandlers.push(handler);
  }

  onStatus(handler: StatusHandler): void {
    this.statusHandlers.push(handler);
  }

  protected emit(event: ControlEvent): void {
    for (const handler of this.eventHandlers) handler(event);
  }

  protected setStatus(status: SourceStatus, detail?: string): void {
    for (const handler of this.statusHandlers) handler(status, detail);
  }

  abstract start(): void;
  abstract stop(): void;
}

/** Minimal structural view of a WebSocket, so tests can inject fakes. */
export interface WsLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  close(): void;
}

export type WsFactory = (url: string) => WsLike;

const BACKOFF_BASE_MS = 500;
const BACKOFF_CAP_MS = 8000;

/**
 * Client of the event service: consumes the hello handshake, then maps
 * jump and button frames into control events.  Malformed frames are ignored
 * and never drop the connection; a lost connection retries with exponential
 * backoff.
 */
export class WsSource extends BaseSource {
  private socket: WsLike | null = null;
  private attempts = 0;
  private stopped = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly factory: WsFactory,
  ) {
    super();
  }

  start(): void {
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    this.socket?.close();
    this.socket = null;
  }

  private connect(): void {
    this.setStatus("connecting");
    let socket: WsLike;
    try {
      socket = this.factory(this.url);
    } catch (err) {
      this.scheduleRetry(String(err));
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
    };
    socket.onmessage = (ev) => this.handleFrame(ev.data);
    socket.onerror = () => {
      /* onclose follows; retry handled there */
    };
    socket.onclose = () => {
      this.socket = null;
      if (!this.stopped) this.scheduleRetry("connection closed");
    };
  }

  private scheduleRetry(detail: string): void {
    this.setStatus("disconnected", detail);
    const delay = Math.min(BACKOFF_CAP_MS, BACKOFF_BASE_MS * 2 ** this.attempts);
    this.attempts += 1;
    this.retryTimer = setTimeout(() => {
      this.retryTimer = null;
      if (!this.stopped) this.connect();
    }, delay);
  }

  private handleFrame(data: unknown): void {
    if (typeof data !== "string") return;
    let message: unknown;
    try {
      message = JSON.parse(data);
    } catch {
      return; // malformed frame: ignored, connection stays up
    }
    if (typeof message !== "object" || message === null) return;
    const frame = message as Record<string, unknown>;
    switch (frame.type) {
      case "hello":
        this.setStatus("connected");
        break;
      case "jump":
        if (typeof frame.t_ms === "number") {
          this.emit({ kind: "jump", tMs: frame.t_ms });
        }
        break;
      case "button":
        if (typeof frame.t_ms === "number" && typeof frame.button === "string") {
          this.emit({ kind: "button", button: frame.button, tMs: frame.t_ms });
        }
        break;
      default:
        break; // imu and anything unknown: not game input
    }
  }
}

/**
 * Queue between an input source and the fixed-step game loop: control
 * events accumulate here and each tick drains them into one GameInput.
 */
export class InputQueue {
  private pendingJumps = 0;
  /** total control events that requested a jump, for diagnostics/tests */
  jumpInputsSeen = 0;

  push(event: ControlEvent): void {
    // buttons act as jumps too: any Joy-Con activity makes the dino hop
    this.pendingJumps += 1;
    this.jumpInputsSeen += 1;
  }

  /** One tick's worth of input; consumes at most one queued jump. */
  drain(): { jump: boolean } {
    if (this.pendingJumps > 0) {
      this.pendingJumps -= 1;
      return { jump: true };
    }
    return { jump: false };
  }
}
