// Layered layout and SVG rendering for the invariant decomposition
// tree. Pure string output, no DOM dependency.

import type { Decomposition, IrmModel } from "./types.js";

const BOX_W = 168;
const BOX_H = 46;
const GAP_X = 18;
const GAP_Y = 64;

export interface GraphNode {
  id: number;
  type: string;
  label: string;
  detail: string;
  systemOutput: boolean;
  x: number;
  y: number;
}

export interface GraphEdge {
  from: number;
  to: number;
  mode: "AND" | "OR";
}

export interface Layout {
  nodes: GraphNode[];
  edges: GraphEdge[];
  width: number;
  height: number;
  orAlternatives: number[];
}

function childMap(decomps: Decomposition[]): Map<number, Decomposition> {
  const map = new Map<number, Decomposition>();
  for (const d of decomps) {
    map.set(d.parent, d);
  }
  return map;
}

export function layoutModel(model: IrmModel): Layout {
  const byId = new Map(model.invariants.map((inv) => [inv.id, inv]));
  const decomps = childMap(model.decompositions);
  const childIds = new Set(
    model.decompositions.flatMap((d) => d.children),
  );
  const roots = model.invariants
    .map((inv) => inv.id)
    .filter((id) => !childIds.has(id));

  const widths = new Map<number, number>();
  const measure = (id: number): number => {
    const kids = decomps.get(id)?.children ?? [];
    const w = kids.length
      ? kids.map(measure).reduce((a, b) => a + b, 0)
      : 1;
    widths.set(id, w);
    return w;
  };
  roots.forEach(measure);

  const nodes: GraphNode[] = [];
  const edges: GraphEdge[] = [];
  let depthMax = 0;

  const place = (id: number, offset: number, depth: number) => {
    depthMax = Math.max(depthMax, depth);
    const inv = byId.get(id);
    const span = widths.get(id) ?? 1;
    const xCenter = (offset + span / 2) * (BOX_W + GAP_X);
    nodes.push({
      id,
      type: inv?.type ?? "?",
      label: `${id} ${inv?.type ?? ""}`.trim(),
      detail: inv?.signature || inv?.text || "",
      systemOutput: Boolean(inv?.system_output),
      x: xCenter - BOX_W / 2,
      y: depth * (BOX_H + GAP_Y),
    });
    const decomp = decomps.get(id);
    if (decomp) {
      let childOffset = offset;
      for (const kid of decomp.children) {
        edges.push({ from: id, to: kid, mode: decomp.mode });
        place(kid, childOffset, depth + 1);
        childOffset += widths.get(kid) ?? 1;
      }
    }
  };

  let offset = 0;
  for (const root of roots) {
    place(root, offset, 0);
    offset += widths.get(root) ?? 1;
  }

  return {
    nodes,
    edges,
    width: Math.max(1, offset) * (BOX_W + GAP_X),
    height: (depthMax + 1) * (BOX_H + GAP_Y),
    orAlternatives: model.decompositions
      .filter((d) => d.mode === "OR")
      .map((d) => d.children.length),
  };
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function clip(text: string, max: number): string {
  return text.length > max ? text.slice(0, max - 1) + "…" : text;
}

export function renderSvg(layout: Layout): string {
  const byId = new Map(layout.nodes.map((n) => [n.id, n]));
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ${layout.height}" ` +
      `width="${layout.width}" height="${layout.height}" class="model-graph">`,
  );
  for (const edge of layout.edges) {
    const from = byId.get(edge.from);
    const to = byId.get(edge.to);
    if (!from || !to) {
      continue;
    }
    const x1 = from.x + BOX_W / 2;
    const y1 = from.y + BOX_H;
    const x2 = to.x + BOX_W / 2;
    const y2 = to.y;
    const dash = edge.mode === "OR" ? ' stroke-dasharray="6 4"' : "";
    parts.push(
      `<line class="edge edge-${edge.mode.toLowerCase()}" x1="${x1}" y1="${y1}" ` +
        `x2="${x2}" y2="${y2}" stroke="#667"${dash}/>`,
    );
    if (edge.mode === "OR") {
      const mx = (x1 + x2) / 2;
      const my = (y1 + y2) / 2;
      parts.push(
        `<text class="edge-label" x="${mx}" y="${my}" text-anchor="middle">OR</text>`,
      );
    }
  }
  for (const node of layout.nodes) {
    const cls = `node node-${node.type.toLowerCase()}` +
      (node.systemOutput ? " node-output" : "");
    parts.push(`<g class="${cls}" data-id="${node.id}">`);
    parts.push(
      `<rect x="${node.x}" y="${node.y}" width="${BOX_W}" height="${BOX_H}" rx="6"/>`,
    );
    parts.push(
      `<text x="${node.x + 8}" y="${node.y + 18}" class="node-title">${esc(node.label)}</text>`,
    );
    parts.push(
      `<text x="${node.x + 8}" y="${node.y + 36}" class="node-detail">${esc(clip(node.detail, 26))}</text>`,
    );
    parts.push("</g>");
  }
  parts.push("</svg>");
  return parts.join("");
}
