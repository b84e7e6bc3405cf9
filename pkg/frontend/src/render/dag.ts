// Interactive causal DAG: dual knobs per variable, coefficient-weighted
// edges (thickness by magnitude, red when negative), intervention blur with
// a cancel affordance, and a two-bar outcome chart.
//
// Renders to an SVG string: identical payloads produce identical markup,
// which the snapshot tests pin down.

import { knobView } from "../knob.js";
import { DagLayout } from "../layout.js";
import type { ProfileId, SessionState } from "../types.js";

const NODE_RADIUS = 44;
const GREEN = "#2e8540";
const ORANGE = "#e08020";
const POSITIVE = "#4a6fa5";
const NEGATIVE = "#c23b22";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(value: number): string {
  return Math.abs(value) >= 1000 ? value.toFixed(0) : value.toPrecision(4);
}

function edgeKey(src: string, dst: string): string {
  return `${src}->${dst}`;
}

function arc(x1: number, y1: number, x2: number, y2: number, r: number): string {
  const dx = x2 - x1;
  const dy = y2 - y1;
  const len = Math.hypot(dx, dy) || 1;
  const sx = x1 + (dx / len) * r;
  const sy = y1 + (dy / len) * r;
  const tx = x2 - (dx / len) * (r + 10);
  const ty = y2 - (dy / len) * (r + 10);
  return `M ${sx.toFixed(1)} ${sy.toFixed(1)} L ${tx.toFixed(1)} ${ty.toFixed(1)}`;
}

function knobArc(cx: number, cy: number, radius: number, fraction: number, color: string,
                 cls: string): string {
  const start = 0.75 * 2 * Math.PI; // dial starts at the bottom-left
  const sweep = fraction * 1.5 * Math.PI;
  const x1 = cx + radius * Math.cos(start);
  const y1 = cy + radius * Math.sin(start);
  const end = start + sweep;
  const x2 = cx + radius * Math.cos(end);
  const y2 = cy + radius * Math.sin(end);
  const large = sweep > Math.PI ? 1 : 0;
  return `<path class="${cls}" d="M ${x1.toFixed(1)} ${y1.toFixed(1)} ` +
    `A ${radius} ${radius} 0 ${large} 1 ${x2.toFixed(1)} ${y2.toFixed(1)}" ` +
    `stroke="${color}" fill="none" stroke-width="6" stroke-linecap="round"/>`;
}

export interface DagRenderInput {
  state: SessionState;
  layout: DagLayout;
  selectedProfile: ProfileId;
}

export function renderDag(input: DagRenderInput): string {
  const { state, layout } = input;
  const model = state.model;
  const profileA = state.profiles.A;
  if (!model || !profileA) {
    return `<svg class="dag" role="img"><text x="20" y="40">No fitted model yet.</text></svg>`;
  }
  const profileB = state.profiles.B;
  const blurred = new Set(profileA.prediction.inactive_edges.map(([s, t]) => edgeKey(s, t)));
  const maxBeta = Math.max(...model.edges.map((e) => Math.abs(e.beta)), 1e-9);
  const varsByName = Object.fromEntries(model.variables.map((v) => [v.name, v]));
  const changed = new Set<string>();
  if (profileB) {
    for (const node of Object.keys(profileA.prediction.values)) {
      if (profileA.prediction.values[node] !== profileB.prediction.values[node]) {
        changed.add(node);
      }
    }
  }

  const parts: string[] = [];
  parts.push(
    `<svg class="dag" viewBox="0 0 ${layout.width} ${layout.height}" ` +
    `width="${layout.width}" height="${layout.height}" role="img">`,
  );
  parts.push(
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ` +
    `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
    `<path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/></marker></defs>`,
  );

  for (const edge of [...model.edges].sort((a, b) =>
    edgeKey(a.src, a.dst).localeCompare(edgeKey(b.src, b.dst)))) {
    const from = layout.positions[edge.src];
    const to = layout.positions[edge.dst];
    const width = 1.5 + 6 * (Math.abs(edge.beta) / maxBeta);
    const color = edge.beta < 0 ? NEGATIVE : POSITIVE;
    const isBlurred = blurred.has(edgeKey(edge.src, edge.dst));
    parts.push(
      `<path class="edge${isBlurred ? " blurred" : ""}" ` +
      `data-edge="${esc(edgeKey(edge.src, edge.dst))}" ` +
      `d="${arc(from.x, from.y, to.x, to.y, NODE_RADIUS)}" ` +
      `stroke="${color}" stroke-width="${width.toFixed(2)}" fill="none" ` +
      `opacity="${isBlurred ? "0.18" : "0.9"}" marker-end="url(#arrow)">` +
      `<title>${esc(edge.src)} → ${esc(edge.dst)}: β = ${fmt(edge.beta)}</title>` +
      `</path>`,
    );
  }

  for (const name of Object.keys(layout.positions).sort()) {
    const pos = layout.positions[name];
    const record = varsByName[name];
    if (!record) continue;
    const isOutcome = name === model.outcome;
    const intervenedA = profileA.interventions.includes(name);
    const intervenedB = profileB?.interventions.includes(name) ?? false;
    const valueA = profileA.prediction.values[name];
    const valueB = profileB ? profileB.prediction.values[name] : null;

    parts.push(`<g class="node${isOutcome ? " outcome" : ""}" data-node="${esc(name)}" ` +
      `transform="translate(${pos.x} ${pos.y})">`);

    if (isOutcome) {
      // Two-bar outcome chart inside a rounded card.
      const span = record.max - record.min || 1;
      const hA = 58 * Math.min(1, Math.max(0, (valueA - record.min) / span));
      parts.push(`<rect class="outcome-card" x="-52" y="-52" width="104" height="104" rx="10"/>`);
      parts.push(`<rect class="bar bar-a" x="-30" y="${(40 - hA).toFixed(1)}" width="24" ` +
        `height="${hA.toFixed(1)}" fill="${GREEN}"/>`);
      if (valueB != null) {
        const hB = 58 * Math.min(1, Math.max(0, (valueB - record.min) / span));
        parts.push(`<rect class="bar bar-b" x="6" y="${(40 - hB).toFixed(1)}" width="24" ` +
          `height="${hB.toFixed(1)}" fill="${ORANGE}"/>`);
      }
      parts.push(`<text class="value value-a" x="-18" y="52" text-anchor="middle">` +
        `${fmt(valueA)}</text>`);
      if (valueB != null) {
        parts.push(`<text class="value value-b" x="18" y="64" text-anchor="middle">` +
          `${fmt(valueB)}</text>`);
      }
    } else {
      const knobA = knobView(valueA, record.min, record.max);
      parts.push(`<circle class="node-face" r="${NODE_RADIUS}"/>`);
      parts.push(knobArc(0, 0, NODE_RADIUS - 6, knobA.position, GREEN, "knob knob-a"));
      if (valueB != null) {
        const knobB = knobView(valueB, record.min, record.max);
        parts.push(knobArc(0, 0, NODE_RADIUS - 13, knobB.position, ORANGE, "knob knob-b"));
      }
      // grey drag handle at the green knob's position
      const angle = 0.75 * 2 * Math.PI + knobA.position * 1.5 * Math.PI;
      const hx = (NODE_RADIUS - 6) * Math.cos(angle);
      const hy = (NODE_RADIUS - 6) * Math.sin(angle);
      parts.push(`<circle class="handle" data-node="${esc(name)}" ` +
        `cx="${hx.toFixed(1)}" cy="${hy.toFixed(1)}" r="7"/>`);
      parts.push(`<text class="value value-a${knobA.pinned ? " pinned" : ""}" y="6" ` +
        `text-anchor="middle">${fmt(knobA.typed)}</text>`);
      if (valueB != null) {
        parts.push(`<text class="value value-b" y="20" text-anchor="middle">${fmt(valueB)}</text>`);
      }
      if (intervenedA || intervenedB) {
        parts.push(`<g class="clear-intervention" data-node="${esc(name)}" ` +
          `transform="translate(${NODE_RADIUS - 6} ${-NODE_RADIUS + 6})">` +
          `<circle r="9"/><text y="4" text-anchor="middle">×</text></g>`);
      }
      if (changed.has(name)) {
        parts.push(`<path class="change-arrow" d="M -8 -58 L 0 -70 L 8 -58 Z" fill="#2f6fd0">` +
          `<title>changed in comparison profile</title></path>`);
      }
    }
    parts.push(`<text class="label" y="${isOutcome ? -62 : -52}" text-anchor="middle">` +
      `${esc(name)}</text>`);
    parts.push(`</g>`);
  }
  parts.push(`</svg>`);
  return parts.join("");
}
