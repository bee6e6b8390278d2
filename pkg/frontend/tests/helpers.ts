import type { BridgeSocket } from "../src/bridge.js";
import { BridgeClient } from "../src/bridge.js";

export class FakeSocket implements BridgeSocket {
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }

  open(): void {
    this.onopen?.();
  }

  deliver(topic: string, payload: string, tsUs = 0): void {
    this.onmessage?.({
      data: JSON.stringify({ op: "msg", topic, payload, ts_us: tsUs }),
    });
  }
}

export function connectedBridge(): { bridge: BridgeClient; socket: FakeSocket } {
  const socket = new FakeSocket();
  const bridge = new BridgeClient(() => socket);
  bridge.connect();
  socket.open();
  return { bridge, socket };
}

export function publishedOn(socket: FakeSocket, topic: string): string[] {
  return socket.sent
    .map((raw) => JSON.parse(raw))
    .filter((msg) => msg.op === "pub" && msg.topic === topic)
    .map((msg) => msg.payload as string);
}
