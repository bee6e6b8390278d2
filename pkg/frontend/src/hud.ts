// Live HUD: bitrates, latency terms, and mulsemedia zone bars. Fields show
// an em-dash placeholder until the first metrics message; a stale badge
// appears when updates stop arriving.

import type { MetricsMsg, MulsemediaMsg } from "./types.js";

const PLACEHOLDER = "—";

export class Hud {
  static readonly STALE_MS = 2000;

  private lastUpdate = -Infinity;

  constructor(
    private root: Element,
    private now: () => number = () => Date.now(),
  ) {
    this.ensureField("uplink", "uplink");
    this.ensureField("downlink", "downlink");
    this.ensureField("t2c", "text-to-code");
    this.ensureField("mqtt", "transport");
    this.ensureField("render", "render");
    const zones = document.createElement("div");
    zones.setAttribute("data-hud", "zones");
    this.root.appendChild(zones);
    const badge = document.createElement("span");
    badge.setAttribute("data-hud", "stale");
    badge.textContent = "stale";
    (badge as HTMLElement).style.display = "none";
    this.root.appendChild(badge);
    this.renderValues({});
  }

  private ensureField(id: string, label: string): void {
    const field = document.createElement("div");
    field.setAttribute("data-hud", id);
    field.setAttribute("data-label", label);
    this.root.appendChild(field);
  }

  private set(id: string, text: string): void {
    const el = this.root.querySelector(`[data-hud="${id}"]`);
    if (el) el.textContent = text;
  }

  private renderValues(metrics: MetricsMsg): void {
    const fmt = (v: number | null | undefined, unit: string, scale = 1) =>
      v === null || v === undefined ? PLACEHOLDER : `${(v / scale).toFixed(2)} ${unit}`;
    this.set("uplink", fmt(metrics.uplink_bps, "kbps", 1000));
    this.set("downlink", fmt(metrics.downlink_bps, "kbps", 1000));
    this.set("t2c", fmt(metrics.text_to_code_ms, "ms"));
    this.set("mqtt", fmt(metrics.mqtt_ms, "ms"));
    this.set("render", fmt(metrics.code_rendering_ms, "ms"));
    this.renderZones(metrics.mulse ?? null);
  }

  private renderZones(mulse: MulsemediaMsg | null): void {
    const zones = this.root.querySelector('[data-hud="zones"]');
    if (!zones) return;
    zones.textContent = "";
    if (!mulse) {
      zones.textContent = PLACEHOLDER;
      return;
    }
    for (const [zone, intensity] of Object.entries(mulse.vibro)) {
      const bar = document.createElement("div");
      bar.setAttribute("data-zone", zone);
      bar.setAttribute("data-intensity", String(intensity));
      (bar as HTMLElement).style.width = `${Math.round(intensity * 100)}%`;
      const temp = mulse.thermal[zone];
      bar.textContent = `${zone} ${Math.round(intensity * 100)}%` +
        (temp === undefined ? "" : ` / ${temp.toFixed(1)}C`);
      zones.appendChild(bar);
    }
  }

  update(metrics: MetricsMsg): void {
    this.lastUpdate = this.now();
    this.renderValues(metrics);
    this.refreshStale();
  }

  refreshStale(): void {
    const badge = this.root.querySelector('[data-hud="stale"]') as HTMLElement | null;
    if (!badge) return;
    const stale = this.now() - this.lastUpdate > Hud.STALE_MS;
    badge.style.display = stale ? "" : "none";
  }
}
