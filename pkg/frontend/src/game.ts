/**
 * Pure game reducer for the endless runner.
 *
 * step(state, dt, input) is deterministic and side-effect free: obstacle
 * spawning runs on a PRNG carried inside the state, so identical input
 * sequences always produce identical state traces regardless of where the
 * inputs came from (WebSocket stream, native HID, keyboard).  Rendering
 * lives elsewhere.
 */

export interface Obstacle {
  x: number;
  width: number;
  height: number;
}

export type GameStatus = "running" | "gameover";

export interface GameState {
  /** pixels above the ground */
  dinoY: number;
  /** pixels per second, positive is up */
  velocityY: number;
  obstacles: Obstacle[];
  score: number;
  status: GameStatus;
  /** horizontal scroll speed, px/s */
  speed: number;
  /** px of scroll left until the next obstacle spawns */
  distanceToNext: number;
  /** 32-bit LCG state for spawn geometry */
  rng: number;
}

export interface GameInput {
  jump: boolean;
}

export const VIEW_WIDTH = 800;
export const VIEW_HEIGHT = 200;
export const GROUND_Y = 20;

export const DINO_X = 50;
export const DINO_WIDTH = 40;
export const DINO_HEIGHT = 46;

export const GRAVITY = -2400; // px/s^2
export const JUMP_IMPULSE = 820; // px/s
export const BASE_SPEED = 320; // px/s
export const MAX_SPEED = 640;
export const SPEED_GAIN = 4; // px/s per second of survival

const MIN_GAP = 260;
const MAX_GAP = 560;
const MIN_OBSTACLE_WIDTH = 16;
const MAX_OBSTACLE_WIDTH = 44;
const MIN_OBSTACLE_HEIGHT = 30;
const MAX_OBSTACLE_HEIGHT = 64;

export function newGame(seed = 1): GameState {
  return {
    dinoY: 0,
    velocityY: 0,
    obstacles: [],
    score: 0,
    status: "running",
    speed: BASE_SPEED,
    distanceToNext: MAX_GAP,
    rng: seed >>> 0,
  };
}

/** 32-bit linear congruential step; returns the new state. */
function lcg(rng: number): number {
  return (Math.imul(rng, 1664525) + 1013904223) >>> 0;
}

/** Uniform integer in [lo, hi] drawn from the LCG; returns [value, rng']. */
function draw(rng: number, lo: number, hi: number): [number, number] {
  const next = lcg(rng);
  return [lo + (next % (hi - lo + 1)), next];
}

function overlaps(dinoY: number, obstacle: Obstacle): boolean {
  const horizontally =
    DINO_X < obstacle.x + obstacle.width && DINO_X + DINO_WIDTH > obstacle.x;
  const vertically = dinoY < obstacle.height;
  return horizontally && vertically;
}

export function step(state: GameState, dt: number, input: GameInput): GameState {
  if (dt <= 0) {
    throw new Error(`dt must be positive, got ${dt}`);
  }
  if (state.status === "gameover") {
    // a jump on the game-over screen starts a fresh run, carrying the rng
    return input.jump ? newGame(state.rng) : state;
  }

  let velocityY = state.velocityY;
  let dinoY = state.dinoY;
  const grounded = dinoY === 0 && velocityY === 0;
  if (input.jump && grounded) {
    velocityY = JUMP_IMPULSE;
  }

  dinoY += velocityY * dt;
  velocityY += GRAVITY * dt;
  if (dinoY <= 0) {
    dinoY = 0;
    velocityY = 0;
  }

  const speed = Math.min(MAX_SPEED, state.speed + SPEED_GAIN * dt);
  const scroll = speed * dt;

  const obstacles: Obstacle[] = [];
  for (const obstacle of state.obstacles) {
    const x = obstacle.x - scroll;
    if (x + obstacle.width > 0) {
      obstacles.push({ ...obstacle, x });
    }
  }

  let rng = state.rng;
  let distanceToNext = state.distanceToNext - scroll;
  if (distanceToNext <= 0) {
    let width: number, height: number, gap: number;
    [width, rng] = draw(rng, MIN_OBSTACLE_WIDTH, MAX_OBSTACLE_WIDTH);
    [height, rng] = draw(rng, MIN_OBSTACLE_HEIGHT, MAX_OBSTACLE_HEIGHT);
    [gap, rng] = draw(rng, MIN_GAP, MAX_GAP);
    obstacles.push({ x: VIEW_WIDTH, width, height });
    distanceToNext = gap;
  }

  const hit = obstacles.some((o) => overlaps(dinoY, o));
  return {
    dinoY,
    velocityY,
    obstacles,
    score: state.score + 1,
    status: hit ? "gameover" : "running",
    speed,
    distanceToNext,
    rng,
  };
}
