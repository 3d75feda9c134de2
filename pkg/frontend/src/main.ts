/**
 * Browser entry point: wires an input source (WebSocket stream by default,
 * native WebHID on user request when the browser supports it), the fixed
 * timestep loop and the canvas renderer.
 *
 * The service address defaults to ws://127.0.0.1:9001/ws and can be
 * overridden with the ?ws=<url> query parameter.
 */

import { newGame } from "./game.js";
import { FixedStepLoop } from "./loop.js";
import { Renderer } from "./render.js";
import { InputQueue, InputSource, SourceStatus, WsSource } from "./sources.js";
import { detectWebHid, WebHidSource } from "./webhid.js";

const DEFAULT_WS_URL = "ws://127.0.0.1:9001/ws";

function serviceUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("ws") ?? DEFAULT_WS_URL;
}

function start(): void {
  const canvas = document.getElementById("game") as HTMLCanvasElement | null;
  if (!canvas) throw new Error("missing #game canvas");
  const renderer = new Renderer(canvas);

  const queue = new InputQueue();
  const loop = new FixedStepLoop(newGame(Date.now() >>> 0), () => queue.drain());

  let status: SourceStatus = "connecting";
  let statusDetail: string | undefined;
  let active: InputSource | null = null;

  const attach = (source: InputSource) => {
    active?.stop();
    active = source;
    source.onEvent((event) => queue.push(event));
    source.onStatus((s, detail) => {
      status = s;
      statusDetail = detail;
    });
    source.start();
  };

  const wsSource = new WsSource(serviceUrl(), (url) => new WebSocket(url));
  attach(wsSource);

  // native WebHID needs a user gesture; falls back to the stream on cancel
  const hidButton = document.getElementById("use-hid") as HTMLButtonElement | null;
  const hid = detectWebHid();
  if (hidButton) {
    if (!hid) {
      hidButton.disabled = true;
      hidButton.textContent = "WebHID not available";
    } else {
      hidButton.addEventListener("click", () => {
        const hidSource = new WebHidSource(hid);
        hidSource.onEvent((event) => queue.push(event));
        hidSource.onStatus((s, detail) => {
          if (s === "unsupported") {
            // chooser cancelled or API refused: stay on the stream source
            status = "connected";
            statusDetail = "stream";
          } else {
            status = s;
            statusDetail = detail;
          }
        });
        hidSource.start();
      });
    }
  }

  // space bar for keyboard play
  window.addEventListener("keydown", (ev) => {
    if (ev.code === "Space") {
      ev.preventDefault();
      queue.push({ kind: "button", button: "Space", tMs: performance.now() });
    }
  });

  let last = performance.now();
  const frame = (now: number) => {
    loop.advance(now - last);
    last = now;
    renderer.draw(loop.state, status, statusDetail);
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

start();
