/** Left-to-right layered layout of a pattern DAG.
 *
 * A node's layer is its longest direct/eventual path depth, so concurrent
 * nodes land on the same layer and stack vertically.
 */

import type { PatternDto, RelationKind } from "./types.js";

export interface LaidOutNode {
  id: number;
  label: string;
  layer: number;
  row: number;
}

export interface LaidOutEdge {
  from: number;
  to: number;
  kind: RelationKind;
}

export interface DagLayout {
  nodes: LaidOutNode[];
  edges: LaidOutEdge[];
  layerCount: number;
  maxRows: number;
}

export function layoutPattern(pattern: PatternDto): DagLayout {
  const successors = new Map<number, number[]>();
  const indegree = new Map<number, number>();
  for (const node of pattern.nodes) {
    successors.set(node.id, []);
    indegree.set(node.id, 0);
  }
  for (const rel of pattern.relations) {
    if (rel.kind === "concurrent") {
      continue;
    }
    successors.get(rel.from)!.push(rel.to);
    indegree.set(rel.to, (indegree.get(rel.to) ?? 0) + 1);
  }

  const layer = new Map<number, number>();
  const queue = pattern.nodes
    .filter((node) => (indegree.get(node.id) ?? 0) === 0)
    .map((node) => node.id)
    .sort((a, b) => a - b);
  for (const id of queue) {
    layer.set(id, 0);
  }
  const pending = new Map(indegree);
  while (queue.length > 0) {
    const id = queue.shift()!;
    for (const next of successors.get(id) ?? []) {
      layer.set(next, Math.max(layer.get(next) ?? 0, (layer.get(id) ?? 0) + 1));
      pending.set(next, (pending.get(next) ?? 0) - 1);
      if (pending.get(next) === 0) {
        queue.push(next);
      }
    }
  }

  const rows = new Map<number, number>();
  const nodes: LaidOutNode[] = pattern.nodes
    .slice()
    .sort((a, b) => a.id - b.id)
    .map((node) => {
      const nodeLayer = layer.get(node.id) ?? 0;
      const row = rows.get(nodeLayer) ?? 0;
      rows.set(nodeLayer, row + 1);
      return { id: node.id, label: node.label, layer: nodeLayer, row };
    });

  const edges: LaidOutEdge[] = pattern.relations
    .filter((rel) => rel.kind !== "concurrent")
    .map((rel) => ({ from: rel.from, to: rel.to, kind: rel.kind }));

  return {
    nodes,
    edges,
    layerCount: Math.max(...nodes.map((node) => node.layer)) + 1,
    maxRows: Math.max(...[...rows.values()], 1),
  };
}

const SVG_NS = "http://www.w3.org/2000/svg";

/** Small SVG rendering of the laid-out DAG (solid direct, dashed eventual). */
export function renderPatternDag(container: HTMLElement, pattern: PatternDto): void {
  const doc = container.ownerDocument;
  const layout = layoutPattern(pattern);
  const cellW = 110;
  const cellH = 52;
  const width = layout.layerCount * cellW + 20;
  const height = layout.maxRows * cellH + 20;
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("class", "pattern-dag");

  const center = (node: LaidOutNode): [number, number] => [
    20 + node.layer * cellW + 40,
    20 + node.row * cellH + 14,
  ];
  const byId = new Map(layout.nodes.map((node) => [node.id, node]));

  for (const edge of layout.edges) {
    const [x1, y1] = center(byId.get(edge.from)!);
    const [x2, y2] = center(byId.get(edge.to)!);
    const line = doc.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(x1 + 34));
    line.setAttribute("y1", String(y1));
    line.setAttribute("x2", String(x2 - 34));
    line.setAttribute("y2", String(y2));
    line.setAttribute("class", `dag-edge ${edge.kind}`);
    if (edge.kind === "eventual") {
      line.setAttribute("stroke-dasharray", "5,4");
    }
    line.setAttribute("marker-end", "url(#dag-arrow)");
    svg.appendChild(line);
  }

  const defs = doc.createElementNS(SVG_NS, "defs");
  const marker = doc.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "dag-arrow");
  marker.setAttribute("markerWidth", "8");
  marker.setAttribute("markerHeight", "8");
  marker.setAttribute("refX", "7");
  marker.setAttribute("refY", "3");
  marker.setAttribute("orient", "auto");
  const arrow = doc.createElementNS(SVG_NS, "path");
  arrow.setAttribute("d", "M0,0 L7,3 L0,6 Z");
  marker.appendChild(arrow);
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const node of layout.nodes) {
    const [x, y] = center(node);
    const group = doc.createElementNS(SVG_NS, "g");
    group.setAttribute("class", "dag-node");
    group.setAttribute("data-node-id", String(node.id));
    const rect = doc.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(x - 34));
    rect.setAttribute("y", String(y - 14));
    rect.setAttribute("width", "68");
    rect.setAttribute("height", "28");
    rect.setAttribute("rx", "6");
    group.appendChild(rect);
    const text = doc.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(x));
    text.setAttribute("y", String(y + 4));
    text.setAttribute("text-anchor", "middle");
    text.textContent = node.label;
    group.appendChild(text);
    svg.appendChild(group);
  }

  container.replaceChildren(svg);
}
