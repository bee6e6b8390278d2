// Pilot input loop: keyboard and gamepad state folded into clamped axis
// commands, published at 25 Hz. While the bridge is down commands buffer
// for at most one second, then drop.

import type { BridgeClient } from "./bridge.js";
import type { PilotCommand } from "./types.js";
import { topicCommand } from "./types.js";

export interface InputState {
  roll: number;
  pitch: number;
  yaw: number;
  throttle: number;
  buttons: Record<string, boolean>;
}

const clamp = (v: number): number => Math.max(-1, Math.min(1, v));

export function buildCommand(input: InputState, timestamp: number): PilotCommand {
  return {
    axes: [clamp(input.roll), clamp(input.pitch), clamp(input.yaw), clamp(input.throttle)],
    buttons: { ...input.buttons },
    timestamp,
  };
}

export class KeyboardInput {
  private pressed = new Set<string>();

  attach(target: EventTarget): void {
    target.addEventListener("keydown", (ev) => this.pressed.add((ev as KeyboardEvent).key));
    target.addEventListener("keyup", (ev) => this.pressed.delete((ev as KeyboardEvent).key));
  }

  state(): InputState {
    const axis = (neg: string, pos: string) =>
      (this.pressed.has(pos) ? 1 : 0) - (this.pressed.has(neg) ? 1 : 0);
    return {
      roll: axis("a", "d"),
      pitch: axis("s", "w"),
      yaw: axis("ArrowLeft", "ArrowRight"),
      throttle: axis("ArrowDown", "ArrowUp"),
      buttons: { arm: this.pressed.has(" ") },
    };
  }
}

export function gamepadState(): InputState | null {
  const pads = typeof navigator !== "undefined" && navigator.getGamepads
    ? navigator.getGamepads()
    : [];
  const pad = pads && pads[0];
  if (!pad) return null;
  return {
    roll: pad.axes[0] ?? 0,
    pitch: -(pad.axes[1] ?? 0),
    yaw: pad.axes[2] ?? 0,
    throttle: -(pad.axes[3] ?? 0),
    buttons: { arm: Boolean(pad.buttons[0]?.pressed) },
  };
}

export class CommandLoop {
  static readonly INTERVAL_MS = 40; // 25 Hz
  static readonly BUFFER_MS = 1000;

  sentCount = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  private buffer: PilotCommand[] = [];

  constructor(
    private bridge: BridgeClient,
    private stream: string,
    private readInput: () => InputState,
    private now: () => number = () => Date.now(),
  ) {}

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => this.tick(), CommandLoop.INTERVAL_MS);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  tick(): void {
    const command = buildCommand(this.readInput(), this.now());
    if (this.bridge.connected) {
      for (const buffered of this.buffer) {
        this.bridge.publish(topicCommand(this.stream), JSON.stringify(buffered), 0);
        this.sentCount += 1;
      }
      this.buffer = [];
      this.bridge.publish(topicCommand(this.stream), JSON.stringify(command), 0);
      this.sentCount += 1;
    } else {
      this.buffer.push(command);
      const cutoff = this.now() - CommandLoop.BUFFER_MS;
      this.buffer = this.buffer.filter((c) => c.timestamp >= cutoff);
    }
  }
}
