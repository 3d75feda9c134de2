/**
 * Fixed-timestep driver: 60 updates per second regardless of display rate,
 * with the leftover fraction exposed for render interpolation.
 */

import { GameInput, GameState, step } from "./game.js";

export const TICK_MS = 1000 / 60;
export const TICK_S = TICK_MS / 1000;
const MAX_CATCHUP_TICKS = 10;

export class FixedStepLoop {
  state: GameState;
  private accumulator = 0;

  constructor(
    initial: GameState,
    private readonly nextInput: () => GameInput,
  ) {
    this.state = initial;
  }

  /** Feed elapsed wall time; runs as many fixed ticks as it covers. */
  advance(elapsedMs: number): void {
    this.accumulator += elapsedMs;
    let ticks = 0;
    while (this.accumulator >= TICK_MS && ticks < MAX_CATCHUP_TICKS) {
      this.state = step(this.state, TICK_S, this.nextInput());
      this.accumulator -= TICK_MS;
      ticks += 1;
    }
    if (ticks === MAX_CATCHUP_TICKS) {
      this.accumulator = 0; // tab was asleep: drop the backlog
    }
  }

  /** Fraction of a tick elapsed since the last update, for interpolation. */
  get alpha(): number {
    return this.accumulator / TICK_MS;
  }
}
