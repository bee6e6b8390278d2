// Browser entry point: wire the bridge, scene intake, camera follow,
// command loop, and HUD together for one stream.

import { BridgeClient, webSocketFactory } from "./bridge.js";
import { CameraTracker } from "./camera.js";
import { CommandLoop, KeyboardInput, gamepadState } from "./commands.js";
import { Hud } from "./hud.js";
import { SceneRenderer } from "./scene.js";
import type { MetricsMsg, TelemetryMsg } from "./types.js";
import {
  topicCode,
  topicMetrics,
  topicMulsemedia,
  topicTelemetry,
} from "./types.js";

export interface ConsoleOptions {
  stream: string;
  bridgeUrl: string;
  sceneMount: Element;
  hudMount: Element;
}

export function startConsole(options: ConsoleOptions): {
  bridge: BridgeClient;
  renderer: SceneRenderer;
  camera: CameraTracker;
  loop: CommandLoop;
  hud: Hud;
} {
  const bridge = new BridgeClient(webSocketFactory(options.bridgeUrl));
  const hud = new Hud(options.hudMount);

  const rig = document.createElement("a-entity");
  rig.setAttribute("id", "viewer-camera");
  rig.setAttribute("camera", "");
  document.body.appendChild(rig);
  const camera = new CameraTracker(rig);

  const renderer = new SceneRenderer(options.sceneMount, (report) => {
    bridge.publish(
      topicMetrics(options.stream),
      JSON.stringify({ op: "render-report", ...report }),
      0,
    );
  });

  bridge.subscribe(topicCode(options.stream), (payload) => {
    renderer.tryRender(payload);
  });
  bridge.subscribe(topicTelemetry(options.stream), (payload) => {
    const telemetry = JSON.parse(payload) as TelemetryMsg;
    camera.update(telemetry);
  });
  bridge.subscribe(topicMetrics(options.stream), (payload) => {
    const metrics = JSON.parse(payload) as MetricsMsg;
    if ((metrics as { op?: string }).op === "render-report") return; // our own echo
    hud.update(metrics);
  });
  bridge.subscribe(topicMulsemedia(options.stream), (payload) => {
    hud.update({ mulse: JSON.parse(payload) });
  });

  const keyboard = new KeyboardInput();
  keyboard.attach(window);
  const loop = new CommandLoop(bridge, options.stream, () => {
    return gamepadState() ?? keyboard.state();
  });

  bridge.connect();
  loop.start();
  setInterval(() => hud.refreshStale(), 500);
  return { bridge, renderer, camera, loop, hud };
}

declare global {
  interface Window {
    semcastConsole?: ReturnType<typeof startConsole>;
  }
}

if (typeof document !== "undefined" && document.getElementById("scene-root")) {
  const params = new URLSearchParams(window.location.search);
  window.semcastConsole = startConsole({
    stream: params.get("stream") ?? "video-10",
    bridgeUrl: params.get("bridge") ?? `ws://${window.location.hostname}:8765`,
    sceneMount: document.getElementById("scene-root")!,
    hudMount: document.getElementById("hud")!,
  });
}
