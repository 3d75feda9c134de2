/**
 * Native WebHID input source, feature-detected.
 *
 * Applies the canonical Joy-Con filters (Nintendo 0x057e, products 0x2006
 * left / 0x2007 right) and decodes simple-mode input reports exactly like
 * the host-side driver: only the right Joy-Con on report id 0x3f, first
 * byte 1/2/4/8 mapping to A/X/B/Y, zero meaning release, anything else
 * dropped.  When the API is missing or the user cancels the chooser, the
 * caller stays on the WebSocket source.
 */

import { BaseSource } from "./sources.js";

export const JOYCON_FILTERS = [
  { vendorId: 0x057e, productId: 0x2006 }, // Joy-Con Left
  { vendorId: 0x057e, productId: 0x2007 }, // Joy-Con Right
];

export const SIMPLE_BUTTON_MAP: Record<number, string> = {
  1: "A",
  2: "X",
  4: "B",
  8: "Y",
};

export const JOYCON_RIGHT_PRODUCT_ID = 0x2007;
export const SIMPLE_MODE_REPORT_ID = 0x3f;

/** Shared decode rule: returns the button name or null for no input. */
export function decodeSimpleButton(
  productId: number,
  reportId: number,
  firstByte: number,
): string | null {
  if (productId !== JOYCON_RIGHT_PRODUCT_ID || reportId !== SIMPLE_MODE_REPORT_ID) {
    return null;
  }
  if (firstByte === 0) return null;
  return SIMPLE_BUTTON_MAP[firstByte] ?? null;
}

// Structural slices of the WebHID surface we touch; lets tests inject fakes
// and keeps the build independent of experimental lib typings.
export interface HidInputReportEvent {
  reportId: number;
  data: { getUint8(offset: number): number; byteLength: number };
  device: HidDeviceLike;
}

export interface HidDeviceLike {
  productId: number;
  vendorId: number;
  opened: boolean;
  open(): Promise<void>;
  addEventListener(type: "inputreport", cb: (ev: HidInputReportEvent) => void): void;
  removeEventListener(type: "inputreport", cb: (ev: HidInputReportEvent) => void): void;
}

export interface HidLike {
  requestDevice(options: {
    filters: { vendorId?: number; productId?: number }[];
  }): Promise<HidDeviceLike[]>;
}

export function detectWebHid(): HidLike | null {
  const nav = globalThis.navigator as unknown as { hid?: HidLike } | undefined;
  return nav && nav.hid ? nav.hid : null;
}

export class WebHidSource extends BaseSource {
  private device: HidDeviceLike | null = null;
  private readonly listener = (ev: HidInputReportEvent) => this.handleReport(ev);

  constructor(private readonly hid: HidLike) {
    super();
  }

  start(): void {
    this.setStatus("connecting");
    this.hid
      .requestDevice({ filters: JOYCON_FILTERS })
      .then(async (devices) => {
        const device = devices[0];
        if (!device) {
          this.setStatus("unsupported", "no device chosen");
          return;
        }
        if (!device.opened) await device.open();
        device.addEventListener("inputreport", this.listener);
        this.device = device;
        this.setStatus("connected");
      })
      .catch((err) => {
        this.setStatus("unsupported", String(err));
      });
  }

  stop(): void {
    this.device?.removeEventListener("inputreport", this.listener);
    this.device = null;
  }

  private handleReport(ev: HidInputReportEvent): void {
    if (ev.data.byteLength < 1) return;
    const button = decodeSimpleButton(
      ev.device.productId,
      ev.reportId,
      ev.data.getUint8(0),
    );
    if (button !== null) {
      this.emit({ kind: "button", button, tMs: Date.now() });
    }
  }
}
