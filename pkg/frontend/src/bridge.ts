// Websocket bridge client. The console talks only to the edge bridge, never
// to any generation backend; envelopes are {op: sub|pub|msg, topic, payload}.

export interface BridgeSocket {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
}

export type MessageHandler = (payload: string, tsUs?: number) => void;

export class BridgeClient {
  private socket: BridgeSocket | null = null;
  private handlers = new Map<string, MessageHandler[]>();
  private pendingSubs = new Set<string>();
  connected = false;

  constructor(private makeSocket: () => BridgeSocket) {}

  connect(): void {
    const socket = this.makeSocket();
    this.socket = socket;
    socket.onopen = () => {
      this.connected = true;
      for (const topic of this.handlers.keys()) {
        socket.send(JSON.stringify({ op: "sub", topic }));
      }
    };
    socket.onclose = () => {
      this.connected = false;
    };
    socket.onmessage = (ev) => {
      let msg: { op?: string; topic?: string; payload?: string; ts_us?: number };
      try {
        msg = JSON.parse(ev.data);
      } catch {
        return;
      }
      if (msg.op !== "msg" || !msg.topic) return;
      for (const handler of this.handlers.get(msg.topic) ?? []) {
        handler(msg.payload ?? "", msg.ts_us);
      }
    };
  }

  subscribe(topic: string, handler: MessageHandler): void {
    const list = this.handlers.get(topic) ?? [];
    list.push(handler);
    this.handlers.set(topic, list);
    if (this.connected && this.socket) {
      this.socket.send(JSON.stringify({ op: "sub", topic }));
    }
  }

  publish(topic: string, payload: string, qos = 1): void {
    if (!this.connected || !this.socket) {
      throw new Error("bridge disconnected");
    }
    this.socket.send(JSON.stringify({ op: "pub", topic, payload, qos }));
  }

  close(): void {
    this.socket?.close();
    this.connected = false;
  }
}

export function webSocketFactory(url: string): () => BridgeSocket {
  return () => new WebSocket(url) as unknown as BridgeSocket;
}
