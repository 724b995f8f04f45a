/** Three-axis front view: a rotatable orthographic projection of the
 * (cc, oi, cd) cloud, plus a two-dimensional pair-plot fallback. */

import type { CandidateDto, InterestDimension } from "./types.js";
import { INTEREST_DIMENSIONS } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Projected {
  x: number;
  y: number;
  depth: number;
}

export interface AxisRange {
  lo: number;
  hi: number;
}

export function axisRanges(candidates: CandidateDto[]): Record<InterestDimension, AxisRange> {
  const ranges = {} as Record<InterestDimension, AxisRange>;
  for (const dim of INTEREST_DIMENSIONS) {
    const values = candidates.map((candidate) => candidate.interest[dim]);
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    ranges[dim] = { lo, hi: hi > lo ? hi : lo + 1 };
  }
  return ranges;
}

export function normalize(value: number, range: AxisRange): number {
  return (value - range.lo) / (range.hi - range.lo);
}

/** Rotate the unit cube by yaw (around y) then pitch (around x) and drop z. */
export function project(x: number, y: number, z: number, yaw: number, pitch: number): Projected {
  const cx = x - 0.5;
  const cy = y - 0.5;
  const cz = z - 0.5;
  const cosYaw = Math.cos(yaw);
  const sinYaw = Math.sin(yaw);
  const x1 = cx * cosYaw + cz * sinYaw;
  const z1 = -cx * sinYaw + cz * cosYaw;
  const cosPitch = Math.cos(pitch);
  const sinPitch = Math.sin(pitch);
  const y2 = cy * cosPitch - z1 * sinPitch;
  const z2 = cy * sinPitch + z1 * cosPitch;
  return { x: x1 + 0.5, y: y2 + 0.5, depth: z2 + 0.5 };
}

export interface ScatterOptions {
  yaw: number;
  pitch: number;
  width?: number;
  height?: number;
  selected?: Set<string>;
  onPick?: (patternId: string) => void;
}

function svgElement(doc: Document, tag: string, attrs: Record<string, string>): SVGElement {
  const element = doc.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [key, value] of Object.entries(attrs)) {
    element.setAttribute(key, value);
  }
  return element;
}

function pointClass(candidate: CandidateDto, selected?: Set<string>): string {
  const classes = ["point", candidate.front ? "front" : "dimmed"];
  if (selected?.has(candidate.id)) {
    classes.push("selected");
  }
  return classes.join(" ");
}

/** Projected 3-axis scatter; front members bright, dominated ones dimmed. */
export function renderScatter(
  container: HTMLElement,
  candidates: CandidateDto[],
  options: ScatterOptions,
): SVGElement {
  const doc = container.ownerDocument;
  const width = options.width ?? 420;
  const height = options.height ?? 320;
  const pad = 24;
  const svg = svgElement(doc, "svg", {
    width: String(width),
    height: String(height),
    viewBox: `0 0 ${width} ${height}`,
    class: "scatter is3d",
    role: "img",
  });
  const ranges = axisRanges(candidates);

  const axes: [InterestDimension, [number, number, number], [number, number, number]][] = [
    ["cc", [0, 0, 0], [1, 0, 0]],
    ["oi", [0, 0, 0], [0, 1, 0]],
    ["cd", [0, 0, 0], [0, 0, 1]],
  ];
  for (const [dim, from, to] of axes) {
    const start = project(...from, options.yaw, options.pitch);
    const stop = project(...to, options.yaw, options.pitch);
    svg.appendChild(
      svgElement(doc, "line", {
        x1: String(pad + start.x * (width - 2 * pad)),
        y1: String(height - pad - start.y * (height - 2 * pad)),
        x2: String(pad + stop.x * (width - 2 * pad)),
        y2: String(height - pad - stop.y * (height - 2 * pad)),
        class: "axis",
        "data-axis": dim,
      }),
    );
    const label = svgElement(doc, "text", {
      x: String(pad + stop.x * (width - 2 * pad)),
      y: String(height - pad - stop.y * (height - 2 * pad)),
      class: "axis-label",
    });
    label.textContent = dim;
    svg.appendChild(label);
  }

  const decorated = candidates.map((candidate) => {
    const projected = project(
      normalize(candidate.interest.cc, ranges.cc),
      normalize(candidate.interest.oi, ranges.oi),
      normalize(candidate.interest.cd, ranges.cd),
      options.yaw,
      options.pitch,
    );
    return { candidate, projected };
  });
  decorated.sort((a, b) => a.projected.depth - b.projected.depth);

  for (const { candidate, projected } of decorated) {
    const circle = svgElement(doc, "circle", {
      cx: String(pad + projected.x * (width - 2 * pad)),
      cy: String(height - pad - projected.y * (height - 2 * pad)),
      r: candidate.front ? "6" : "4",
      class: pointClass(candidate, options.selected),
      "data-pattern-id": candidate.id,
    });
    const title = svgElement(doc, "title", {});
    title.textContent = `${candidate.id} cc=${candidate.interest.cc} oi=${candidate.interest.oi} cd=${candidate.interest.cd}`;
    circle.appendChild(title);
    if (options.onPick) {
      circle.addEventListener("click", () => options.onPick?.(candidate.id));
    }
    svg.appendChild(circle);
  }

  container.replaceChildren(svg);
  return svg;
}

/** 2-D fallback: one panel per dimension pair. */
export function renderPairPlot(
  container: HTMLElement,
  candidates: CandidateDto[],
  options: Pick<ScatterOptions, "selected" | "onPick">,
): void {
  const doc = container.ownerDocument;
  const ranges = axisRanges(candidates);
  const pairs: [InterestDimension, InterestDimension][] = [
    ["cc", "oi"],
    ["cc", "cd"],
    ["oi", "cd"],
  ];
  const wrapper = doc.createElement("div");
  wrapper.className = "pair-plot";
  for (const [dimX, dimY] of pairs) {
    const size = 170;
    const pad = 18;
    const svg = svgElement(doc, "svg", {
      width: String(size),
      height: String(size),
      viewBox: `0 0 ${size} ${size}`,
      class: "scatter pair",
      "data-pair": `${dimX}-${dimY}`,
    });
    const label = svgElement(doc, "text", { x: "4", y: "12", class: "axis-label" });
    label.textContent = `${dimX} vs ${dimY}`;
    svg.appendChild(label);
    for (const candidate of candidates) {
      const x = normalize(candidate.interest[dimX], ranges[dimX]);
      const y = normalize(candidate.interest[dimY], ranges[dimY]);
      const circle = svgElement(doc, "circle", {
        cx: String(pad + x * (size - 2 * pad)),
        cy: String(size - pad - y * (size - 2 * pad)),
        r: candidate.front ? "5" : "3",
        class: pointClass(candidate, options.selected),
        "data-pattern-id": candidate.id,
      });
      if (options.onPick) {
        circle.addEventListener("click", () => options.onPick?.(candidate.id));
      }
      svg.appendChild(circle);
    }
    wrapper.appendChild(svg);
  }
  container.replaceChildren(wrapper);
}
