/**
 * Headless game client: connects to the event service, runs the real
 * reducer on a virtual 60 Hz clock and reports how many jump inputs the
 * game registered.  Used by the end-to-end test and handy for smoke checks:
 *
 *   node dist/headless.js ws://127.0.0.1:9001/ws
 */

import { GameState, newGame } from "./game.js";
import { FixedStepLoop, TICK_MS } from "./loop.js";
import { InputQueue, WsFactory, WsSource } from "./sources.js";

export interface HeadlessResult {
  jumpInputs: number;
  ticks: number;
  finalState: GameState;
}

export interface HeadlessOptions {
  /** stop after this much wall time even if the stream stays quiet */
  timeoutMs?: number;
  /** stop once no event has arrived for this long after the first one */
  idleMs?: number;
  seed?: number;
}

export async function runHeadlessClient(
  url: string,
  factory: WsFactory,
  options: HeadlessOptions = {},
): Promise<HeadlessResult> {
  const timeoutMs = options.timeoutMs ?? 15000;
  const idleMs = options.idleMs ?? 1500;

  const queue = new InputQueue();
  const loop = new FixedStepLoop(newGame(options.seed ?? 42), () => queue.drain());
  const source = new WsSource(url, factory);

  let lastEventAt: number | null = null;
  let connectedAt: number | null = null;
  source.onEvent((event) => {
    lastEventAt = Date.now();
    queue.push(event);
  });
  source.onStatus((status) => {
    if (status === "connected" && connectedAt === null) connectedAt = Date.now();
  });
  source.start();

  const started = Date.now();
  let ticks = 0;
  await new Promise<void>((resolve) => {
    const interval = setInterval(() => {
      // virtual time: run one tick per interval slice
      loop.advance(TICK_MS);
      ticks += 1;
      const now = Date.now();
      const idleSince = lastEventAt ?? connectedAt;
      const quiet = idleSince !== null && now - idleSince > idleMs;
      if (now - started > timeoutMs || quiet) {
        clearInterval(interval);
        resolve();
      }
    }, 2);
  });
  source.stop();

  return { jumpInputs: queue.jumpInputsSeen, ticks, finalState: loop.state };
}
