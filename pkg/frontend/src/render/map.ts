// Neighbor map: scatter of dataset rows near profile A's outcome, colored by
// outcome value, with the two live profiles as larger disks.

import type { MapPayload } from "../types.js";

const WIDTH = 380;
const HEIGHT = 300;
const PAD = 30;

function colorFor(t: number): string {
  // blue (low) -> yellow (high), perceptually adequate for a small legend
  const r = Math.round(40 + 210 * t);
  const g = Math.round(60 + 160 * t);
  const b = Math.round(200 - 160 * t);
  return `rgb(${r},${g},${b})`;
}

export function renderMap(payload: MapPayload | null): string {
  if (!payload || payload.points.length === 0) {
    return `<svg class="map" width="${WIDTH}" height="${HEIGHT}">` +
      `<text x="16" y="36">No neighbors at this radius.</text></svg>`;
  }
  const xs = payload.points.map((p) => p.x);
  const ys = payload.points.map((p) => p.y);
  const outs = payload.points.map((p) => p.outcome);
  const profiles = [payload.profiles.A, payload.profiles.B].filter(
    (c): c is [number, number] => c != null);
  const minX = Math.min(...xs, ...profiles.map((c) => c[0]));
  const maxX = Math.max(...xs, ...profiles.map((c) => c[0]));
  const minY = Math.min(...ys, ...profiles.map((c) => c[1]));
  const maxY = Math.max(...ys, ...profiles.map((c) => c[1]));
  const minO = Math.min(...outs);
  const maxO = Math.max(...outs);
  const sx = (x: number) =>
    PAD + ((x - minX) / Math.max(maxX - minX, 1e-12)) * (WIDTH - 2 * PAD - 60);
  const sy = (y: number) =>
    HEIGHT - PAD - ((y - minY) / Math.max(maxY - minY, 1e-12)) * (HEIGHT - 2 * PAD);
  const so = (o: number) => (o - minO) / Math.max(maxO - minO, 1e-12);

  const parts: string[] = [];
  parts.push(`<svg class="map" width="${WIDTH}" height="${HEIGHT}" role="img">`);
  for (const point of payload.points) {
    parts.push(
      `<circle class="map-point" data-row="${point.row}" ` +
      `cx="${sx(point.x).toFixed(1)}" cy="${sy(point.y).toFixed(1)}" r="4" ` +
      `fill="${colorFor(so(point.outcome))}" opacity="0.85">` +
      `<title>row ${point.row}: outcome ${point.outcome.toPrecision(5)}</title></circle>`,
    );
  }
  const disks: [string, [number, number] | null][] = [
    ["#2e8540", payload.profiles.A],
    ["#e08020", payload.profiles.B],
  ];
  for (const [color, coords] of disks) {
    if (coords) {
      parts.push(`<circle class="profile-disk" cx="${sx(coords[0]).toFixed(1)}" ` +
        `cy="${sy(coords[1]).toFixed(1)}" r="9" fill="${color}" stroke="#222"/>`);
    }
  }
  // color legend
  const steps = 8;
  for (let i = 0; i < steps; i++) {
    parts.push(`<rect x="${WIDTH - 42}" y="${PAD + ((steps - 1 - i) * 160) / steps}" ` +
      `width="14" height="${160 / steps + 1}" fill="${colorFor(i / (steps - 1))}"/>`);
  }
  parts.push(`<text class="legend" x="${WIDTH - 46}" y="${PAD - 8}" text-anchor="end">` +
    `${maxO.toPrecision(4)}</text>`);
  parts.push(`<text class="legend" x="${WIDTH - 46}" y="${PAD + 172}" text-anchor="end">` +
    `${minO.toPrecision(4)}</text>`);
  parts.push(`</svg>`);
  return parts.join("");
}
