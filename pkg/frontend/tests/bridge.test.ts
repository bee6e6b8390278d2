import { describe, expect, it } from "vitest";

import { BridgeClient } from "../src/bridge.js";
import { FakeSocket, connectedBridge } from "./helpers.js";

describe("BridgeClient", () => {
  it("sends sub envelopes on connect for early subscriptions", () => {
    const socket = new FakeSocket();
    const bridge = new BridgeClient(() => socket);
    bridge.subscribe("semcast/v/code", () => {});
    bridge.connect();
    socket.open();
    expect(socket.sent.map((s) => JSON.parse(s))).toContainEqual({
      op: "sub",
      topic: "semcast/v/code",
    });
  });

  it("routes messages to the right topic handler", () => {
    const { bridge, socket } = connectedBridge();
    const got: string[] = [];
    bridge.subscribe("semcast/v/code", (payload) => got.push(payload));
    bridge.subscribe("semcast/v/telemetry", () => got.push("wrong"));
    socket.deliver("semcast/v/code", "<a-sky></a-sky>");
    expect(got).toEqual(["<a-sky></a-sky>"]);
  });

  it("publish while disconnected throws", () => {
    const socket = new FakeSocket();
    const bridge = new BridgeClient(() => socket);
    expect(() => bridge.publish("t", "x")).toThrow(/disconnected/);
  });

  it("ignores malformed frames", () => {
    const { bridge, socket } = connectedBridge();
    const got: string[] = [];
    bridge.subscribe("t", (payload) => got.push(payload));
    socket.onmessage?.({ data: "not json" });
    socket.deliver("t", "fine");
    expect(got).toEqual(["fine"]);
  });

  it("marks itself disconnected when the socket closes", () => {
    const { bridge, socket } = connectedBridge();
    expect(bridge.connected).toBe(true);
    socket.close();
    expect(bridge.connected).toBe(false);
  });
});
