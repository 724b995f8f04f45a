/** Dashboard charts. Every rendered figure is a plain re-plot of a
 * DashboardDto field; nothing is recomputed client-side. */

import { fmtPercent, valueSpan } from "./format.js";
import type { CohortHistogramsDto, CohortProportionsDto } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const TAU = Math.PI * 2;

function svgEl(doc: Document, tag: string, attrs: Record<string, string>): SVGElement {
  const element = doc.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [key, value] of Object.entries(attrs)) {
    element.setAttribute(key, value);
  }
  return element;
}

function arcPath(cx: number, cy: number, r0: number, r1: number, a0: number, a1: number): string {
  const large = a1 - a0 > Math.PI ? 1 : 0;
  const p = (r: number, a: number): string => `${cx + r * Math.sin(a)},${cy - r * Math.cos(a)}`;
  return [
    `M ${p(r0, a0)}`,
    `A ${r0} ${r0} 0 ${large} 1 ${p(r0, a1)}`,
    `L ${p(r1, a1)}`,
    `A ${r1} ${r1} 0 ${large} 0 ${p(r1, a0)}`,
    "Z",
  ].join(" ");
}

/**
 * Double-ring pie: inner ring = with-pattern cohort, outer ring = the rest.
 * Categories are ordered by name so both rings align.
 */
export function renderTwoRingPie(
  container: HTMLElement,
  attribute: string,
  proportions: CohortProportionsDto,
): void {
  const doc = container.ownerDocument;
  const size = 180;
  const cx = size / 2;
  const cy = size / 2;
  const svg = svgEl(doc, "svg", {
    width: String(size),
    height: String(size),
    class: "pie",
    "data-attribute": attribute,
  });
  const categories = Array.from(
    new Set([...Object.keys(proportions.in), ...Object.keys(proportions.out)]),
  ).sort();

  const rings: ["in" | "out", number, number][] = [
    ["in", 14, 44],
    ["out", 50, 80],
  ];
  for (const [cohort, r0, r1] of rings) {
    let angle = 0;
    categories.forEach((category, index) => {
      const share = proportions[cohort][category] ?? 0;
      if (share <= 0) {
        return;
      }
      const next = angle + share * TAU;
      const slice = svgEl(doc, "path", {
        d: arcPath(cx, cy, r1, r0, angle, Math.min(next, TAU - 1e-9)),
        class: `slice c${index % 8} ${cohort}`,
        "data-cohort": cohort,
        "data-category": category,
        "data-value": String(proportions[cohort][category]),
      });
      const title = svgEl(doc, "title", {});
      title.textContent = `${category} (${cohort === "in" ? "with" : "without"} pattern): ${fmtPercent(share)}`;
      slice.appendChild(title);
      svg.appendChild(slice);
      angle = next;
    });
  }

  const legend = doc.createElement("ul");
  legend.className = "legend";
  categories.forEach((category, index) => {
    const item = doc.createElement("li");
    item.className = `c${index % 8}`;
    item.append(`${category}: `);
    item.appendChild(valueSpan(doc, proportions.in[category] ?? 0));
    item.append(" in / ");
    item.appendChild(valueSpan(doc, proportions.out[category] ?? 0));
    item.append(" out");
    legend.appendChild(item);
  });

  const block = doc.createElement("figure");
  block.className = "chart categorical";
  block.dataset.attribute = attribute;
  const caption = doc.createElement("figcaption");
  caption.textContent = attribute;
  block.append(caption, svg, legend);
  container.appendChild(block);
}

/** Overlaid per-cohort histograms sharing the API's bin edges. */
export function renderHistogramOverlay(
  container: HTMLElement,
  attribute: string,
  histograms: CohortHistogramsDto,
): void {
  const doc = container.ownerDocument;
  const width = 260;
  const height = 120;
  const pad = 10;
  const svg = svgEl(doc, "svg", {
    width: String(width),
    height: String(height),
    class: "histogram",
    "data-attribute": attribute,
  });
  const peak = Math.max(1, ...histograms.in.bin_counts, ...histograms.out.bin_counts);
  const bins = Math.max(histograms.in.bin_counts.length, histograms.out.bin_counts.length, 1);
  const barW = (width - 2 * pad) / bins;

  const cohorts: ["out" | "in", number[]][] = [
    ["out", histograms.out.bin_counts],
    ["in", histograms.in.bin_counts],
  ];
  for (const [cohort, counts] of cohorts) {
    counts.forEach((count, index) => {
      if (count === 0) {
        return;
      }
      const barH = (count / peak) * (height - 2 * pad);
      svg.appendChild(
        svgEl(doc, "rect", {
          x: String(pad + index * barW),
          y: String(height - pad - barH),
          width: String(Math.max(barW - 1, 1)),
          height: String(barH),
          class: `bar ${cohort}`,
          "data-cohort": cohort,
          "data-bin": String(index),
          "data-value": String(count),
        }),
      );
    });
  }

  const block = doc.createElement("figure");
  block.className = "chart numeric";
  block.dataset.attribute = attribute;
  const caption = doc.createElement("figcaption");
  caption.textContent = attribute;
  const medians = doc.createElement("div");
  medians.className = "medians";
  medians.append("median in ");
  medians.appendChild(valueSpan(doc, histograms.in.median));
  medians.append(" / out ");
  medians.appendChild(valueSpan(doc, histograms.out.median));
  block.append(caption, svg, medians);
  container.appendChild(block);
}

/** Kaplan-Meier step curves for both cohorts, drawn from the API points. */
export function renderKaplanMeier(
  container: HTMLElement,
  kmIn: [number, number][],
  kmOut: [number, number][],
): void {
  const doc = container.ownerDocument;
  const width = 360;
  const height = 180;
  const pad = 24;
  const svg = svgEl(doc, "svg", {
    width: String(width),
    height: String(height),
    class: "km",
  });
  const maxTime = Math.max(1e-9, ...kmIn.map(([t]) => t), ...kmOut.map(([t]) => t));
  const x = (t: number): number => pad + (t / maxTime) * (width - 2 * pad);
  const y = (s: number): number => pad + (1 - s) * (height - 2 * pad);

  const curves: ["in" | "out", [number, number][]][] = [
    ["out", kmOut],
    ["in", kmIn],
  ];
  for (const [cohort, points] of curves) {
    let path = `M ${pad},${y(1)}`;
    for (const [time, survival] of points) {
      path += ` H ${x(time)} V ${y(survival)}`;
    }
    path += ` H ${width - pad}`;
    svg.appendChild(
      svgEl(doc, "path", {
        d: path,
        class: `km-curve ${cohort}`,
        fill: "none",
        "data-cohort": cohort,
        "data-points": String(points.length),
      }),
    );
  }

  for (const tick of [0, 0.5, 1]) {
    const label = svgEl(doc, "text", {
      x: "2",
      y: String(y(tick) + 4),
      class: "axis-label",
    });
    label.textContent = tick.toFixed(1);
    svg.appendChild(label);
  }

  container.appendChild(svg);
}
