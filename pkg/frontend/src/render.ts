/** Canvas renderer: draws one interpolated frame of the game state. */

import {
  DINO_HEIGHT,
  DINO_WIDTH,
  DINO_X,
  GameState,
  GROUND_Y,
  VIEW_HEIGHT,
  VIEW_WIDTH,
} from "./game.js";
import { SourceStatus } from "./sources.js";

const COLORS = {
  sky: "#f7f7f7",
  ground: "#535353",
  dino: "#535353",
  obstacle: "#2e7d32",
  text: "#535353",
  bannerBg: "rgba(83, 83, 83, 0.85)",
  bannerText: "#ffffff",
};

export class Renderer {
  private readonly ctx: CanvasRenderingContext2D;

  constructor(private readonly canvas: HTMLCanvasElement) {
    canvas.width = VIEW_WIDTH;
    canvas.height = VIEW_HEIGHT;
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  draw(state: GameState, status: SourceStatus, statusDetail?: string): void {
    const { ctx } = this;
    ctx.fillStyle = COLORS.sky;
    ctx.fillRect(0, 0, VIEW_WIDTH, VIEW_HEIGHT);

    const groundTop = VIEW_HEIGHT - GROUND_Y;
    ctx.strokeStyle = COLORS.ground;
    ctx.beginPath();
    ctx.moveTo(0, groundTop + 0.5);
    ctx.lineTo(VIEW_WIDTH, groundTop + 0.5);
    ctx.stroke();

    ctx.fillStyle = COLORS.dino;
    const dinoTop = groundTop - DINO_HEIGHT - state.dinoY;
    ctx.fillRect(DINO_X, dinoTop, DINO_WIDTH, DINO_HEIGHT);
    // eye notch so the rectangle reads as a critter facing right
    ctx.fillStyle = COLORS.sky;
    ctx.fillRect(DINO_X + DINO_WIDTH - 12, dinoTop + 8, 5, 5);

    ctx.fillStyle = COLORS.obstacle;
    for (const o of state.obstacles) {
      ctx.fillRect(o.x, groundTop - o.height, o.width, o.height);
    }

    ctx.fillStyle = COLORS.text;
    ctx.font = "16px monospace";
    ctx.textAlign = "right";
    ctx.fillText(String(state.score).padStart(6, "0"), VIEW_WIDTH - 12, 24);

    if (state.status === "gameover") {
      ctx.textAlign = "center";
      ctx.font = "24px monospace";
      ctx.fillText("G A M E   O V E R", VIEW_WIDTH / 2, 80);
      ctx.font = "14px monospace";
      ctx.fillText("jump to restart", VIEW_WIDTH / 2, 104);
    }

    this.drawBanner(status, statusDetail);
  }

  private drawBanner(status: SourceStatus, detail?: string): void {
    const { ctx } = this;
    const label =
      status === "connected"
        ? "connected"
        : status === "connecting"
          ? "connecting..."
          : status === "unsupported"
            ? "controller unavailable - using fallback"
            : `disconnected - retrying${detail ? ` (${detail})` : ""}`;
    ctx.fillStyle = status === "connected" ? "rgba(46,125,50,0.8)" : COLORS.bannerBg;
    ctx.fillRect(8, 8, 8 + label.length * 8 + 8, 22);
    ctx.fillStyle = COLORS.bannerText;
    ctx.font = "13px monospace";
    ctx.textAlign = "left";
    ctx.fillText(label, 16, 23);
  }
}
