import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

import { beforeEach, describe, expect, it } from "vitest";

import { SceneRenderer } from "../src/scene.js";
import type { RenderReport } from "../src/types.js";

const SCENES_DIR = join(__dirname, "..", "..", "src", "semcast", "data", "scenes");

const COMPLIANT =
  '<a-scene><a-sky color="#88bbee"></a-sky>' +
  '<a-box animation="property: rotation; to: 0 360 0; loop: true"></a-box></a-scene>';

describe("SceneRenderer", () => {
  let mount: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="scene-root"></div>';
    mount = document.getElementById("scene-root")!;
  });

  it("renders a compliant scene and reports node count", () => {
    const renderer = new SceneRenderer(mount);
    const report = renderer.render(COMPLIANT);
    expect(report.node_count).toBe(3);
    expect(report.generation).toBe(1);
    expect(mount.querySelector("a-sky")).not.toBeNull();
  });

  it("keeps the previous scene when a forbidden construct arrives", () => {
    const renderer = new SceneRenderer(mount);
    renderer.render(COMPLIANT);
    const before = mount.innerHTML;
    const result = renderer.tryRender("<a-scene><a-assets></a-assets></a-scene>");
    expect(result).toBeNull();
    expect(mount.innerHTML).toBe(before);
    expect(renderer.generation).toBe(1);
  });

  it("rejects non-prefixed and externally linked content defensively", () => {
    const renderer = new SceneRenderer(mount);
    renderer.render(COMPLIANT);
    expect(renderer.tryRender("<div>plain html</div>")).toBeNull();
    expect(
      renderer.tryRender('<a-scene><a-image src="https://x.test/i.png"></a-image></a-scene>'),
    ).toBeNull();
    expect(mount.querySelector("a-box")).not.toBeNull();
  });

  it("renders unknown prefixed tags as placeholder geometry with a warning", () => {
    const renderer = new SceneRenderer(mount);
    const report = renderer.render(
      '<a-scene><a-hologram size="3"></a-hologram></a-scene>',
    );
    expect(report.placeholders).toBe(1);
    const placeholder = mount.querySelector('[data-placeholder-for="a-hologram"]');
    expect(placeholder?.tagName.toLowerCase()).toBe("a-box");
    expect(placeholder?.getAttribute("size")).toBe("3");
    expect(renderer.placeholderWarnings).toContain("a-hologram");
  });

  it("swaps atomically: one mutation batch per update across 100 rapid updates", () => {
    const renderer = new SceneRenderer(mount);
    const observer = new MutationObserver(() => {});
    observer.observe(mount, { childList: true, subtree: false });
    observer.takeRecords();
    for (let i = 0; i < 100; i++) {
      const code =
        `<a-scene id="gen-${i}"><a-sky color="#88bbee"></a-sky>` +
        `<a-box position="${i} 0 -4" animation="property: rotation; to: 0 360 0"></a-box></a-scene>`;
      renderer.render(code);
      const records = observer.takeRecords();
      expect(records.length).toBe(1); // a single replaceChildren per swap
      // the mounted scene is exactly the new generation, never a blend
      expect(mount.children.length).toBe(1);
      expect(mount.firstElementChild!.getAttribute("id")).toBe(`gen-${i}`);
      expect(mount.getAttribute("data-generation")).toBe(String(i + 1));
    }
    expect(renderer.generation).toBe(100);
    observer.disconnect();
  });

  it("produces a render-prep report for every bundled fixture scene", () => {
    const reports: RenderReport[] = [];
    const renderer = new SceneRenderer(mount, (report) => reports.push(report));
    const files = readdirSync(SCENES_DIR).filter((name) => name.endsWith(".html"));
    expect(files.length).toBe(10);
    for (const name of files.sort()) {
      const code = readFileSync(join(SCENES_DIR, name), "utf-8");
      const report = renderer.render(code);
      expect(report.node_count).toBeGreaterThan(0);
      expect(report.prep_ms).toBeGreaterThanOrEqual(0);
      expect(report.placeholders).toBe(0);
    }
    expect(reports.length).toBe(files.length);
    expect(new Set(reports.map((r) => r.generation)).size).toBe(files.length);
  });
});
