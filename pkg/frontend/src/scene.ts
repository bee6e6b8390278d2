// Scene intake: parse received markup, substitute placeholders for unknown
// prefixed tags, and swap the live scene in a single DOM operation so no
// frame ever observes a half-applied scene.

import type { RenderReport } from "./types.js";

export class RenderFailureError extends Error {}

const KNOWN_TAGS = new Set([
  "a-scene", "a-sky", "a-box", "a-sphere", "a-cylinder", "a-cone", "a-plane",
  "a-circle", "a-ring", "a-torus", "a-torus-knot", "a-entity", "a-text",
  "a-octahedron", "a-dodecahedron", "a-tetrahedron", "a-icosahedron",
  "a-triangle", "a-image", "a-curvedimage", "a-camera", "a-cursor",
]);

const FORBIDDEN_TAGS = new Set(["a-assets", "a-light", "a-animation"]);
const FORBIDDEN_ATTRS = new Set(["gltf-model", "glb-model"]);

export class SceneRenderer {
  generation = 0;
  placeholderWarnings: string[] = [];

  constructor(
    private mount: Element,
    private onReport?: (report: RenderReport) => void,
  ) {}

  /** Parse, sanity-check, and atomically display one markup payload. */
  render(code: string): RenderReport {
    const started = performance.now();
    const parsed = new DOMParser().parseFromString(
      `<body>${code}</body>`, "text/html",
    );
    const roots = Array.from(parsed.body.children);
    if (roots.length === 0) {
      throw new RenderFailureError("payload contains no elements");
    }

    const prepared: Element[] = [];
    let nodeCount = 0;
    let placeholders = 0;
    const clone = (el: Element): Element => {
      const tag = el.tagName.toLowerCase();
      if (!tag.startsWith("a-")) {
        throw new RenderFailureError(`non-prefixed element <${tag}> reached the console`);
      }
      if (FORBIDDEN_TAGS.has(tag)) {
        throw new RenderFailureError(`forbidden element <${tag}> reached the console`);
      }
      let outTag = tag;
      if (!KNOWN_TAGS.has(tag)) {
        // Forward compatibility: unknown prefixed tags render as placeholder
        // geometry instead of failing the whole scene.
        outTag = "a-box";
        placeholders += 1;
        this.placeholderWarnings.push(tag);
        console.warn(`unknown element <${tag}>; rendering placeholder geometry`);
      }
      const out = document.createElement(outTag);
      for (const attr of Array.from(el.attributes)) {
        if (FORBIDDEN_ATTRS.has(attr.name)) {
          throw new RenderFailureError(`forbidden attribute ${attr.name} reached the console`);
        }
        if (/https?:\/\//i.test(attr.value)) {
          throw new RenderFailureError(`external link in ${attr.name} reached the console`);
        }
        out.setAttribute(attr.name, attr.value);
      }
      if (outTag !== tag) {
        out.setAttribute("data-placeholder-for", tag);
      }
      nodeCount += 1;
      for (const child of Array.from(el.children)) {
        out.appendChild(clone(child));
      }
      return out;
    };

    for (const root of roots) {
      prepared.push(clone(root));
    }

    // Single DOM operation: the swap is atomic with respect to any observer.
    this.mount.replaceChildren(...prepared);
    this.generation += 1;
    this.mount.setAttribute("data-generation", String(this.generation));

    const report: RenderReport = {
      node_count: nodeCount,
      prep_ms: performance.now() - started,
      placeholders,
      generation: this.generation,
    };
    this.onReport?.(report);
    return report;
  }

  /** Render defensively: on failure keep the previous scene and report it. */
  tryRender(code: string): RenderReport | null {
    try {
      return this.render(code);
    } catch (err) {
      if (err instanceof RenderFailureError) {
        console.error(`scene rejected, keeping previous: ${err.message}`);
        return null;
      }
      throw err;
    }
  }
}
