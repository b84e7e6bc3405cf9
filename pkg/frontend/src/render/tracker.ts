// Evolution tracker: one line per profile over saved states; click a point
// to jump back to it.

import type { TrackerPayload } from "../types.js";

const WIDTH = 380;
const HEIGHT = 180;
const PAD = 28;

export function renderTracker(tracker: TrackerPayload): string {
  if (tracker.entries.length === 0) {
    return `<svg class="tracker" width="${WIDTH}" height="${HEIGHT}">` +
      `<text x="16" y="36">No saved states. Use "Save Profiles".</text></svg>`;
  }
  const valuesA = tracker.entries.map((e) => e.outcome_a);
  const valuesB = tracker.entries.map((e) => e.outcome_b).filter((v): v is number => v != null);
  const all = [...valuesA, ...valuesB];
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const sx = (i: number) =>
    PAD + (tracker.entries.length === 1
      ? (WIDTH - 2 * PAD) / 2
      : (i / (tracker.entries.length - 1)) * (WIDTH - 2 * PAD));
  const sy = (v: number) =>
    HEIGHT - PAD - ((v - lo) / Math.max(hi - lo, 1e-12)) * (HEIGHT - 2 * PAD);

  const parts: string[] = [];
  parts.push(`<svg class="tracker" width="${WIDTH}" height="${HEIGHT}" role="img">`);
  const lineFor = (series: (number | null)[], color: string, cls: string) => {
    const coords = series
      .map((v, i) => (v == null ? null : `${sx(i).toFixed(1)},${sy(v).toFixed(1)}`))
      .filter((c): c is string => c != null);
    if (coords.length > 1) {
      parts.push(`<polyline class="${cls}" points="${coords.join(" ")}" ` +
        `fill="none" stroke="${color}" stroke-width="2"/>`);
    }
  };
  lineFor(valuesA, "#2e8540", "line-a");
  lineFor(tracker.entries.map((e) => e.outcome_b), "#e08020", "line-b");
  tracker.entries.forEach((entry, i) => {
    const selected = i === tracker.cursor;
    parts.push(`<circle class="tracker-point${selected ? " selected" : ""}" data-index="${i}" ` +
      `cx="${sx(i).toFixed(1)}" cy="${sy(entry.outcome_a).toFixed(1)}" r="${selected ? 7 : 5}" ` +
      `fill="#2e8540" stroke="#222"><title>state ${i}: ${entry.outcome_a.toPrecision(5)}</title>` +
      `</circle>`);
    if (entry.outcome_b != null) {
      parts.push(`<circle class="tracker-point${selected ? " selected" : ""}" data-index="${i}" ` +
        `cx="${sx(i).toFixed(1)}" cy="${sy(entry.outcome_b).toFixed(1)}" r="${selected ? 7 : 5}" ` +
        `fill="#e08020" stroke="#222"><title>state ${i}: ${entry.outcome_b.toPrecision(5)}` +
        `</title></circle>`);
    }
  });
  parts.push(`<text class="axis" x="${PAD}" y="${HEIGHT - 8}">saved state →</text>`);
  parts.push(`</svg>`);
  return parts.join("");
}
