// Realism meter: a horizontal band from Rare to Common with a needle at the
// profile's score and the density-percentile mode underneath.

import type { RealismPayload } from "../types.js";

const WIDTH = 380;
const HEIGHT = 110;
const BAND_X = 20;
const BAND_W = WIDTH - 40;

export function renderMeter(reading: RealismPayload | null): string {
  if (!reading) {
    return `<svg class="meter" width="${WIDTH}" height="${HEIGHT}">` +
      `<text x="16" y="36">Realism unavailable (no mixture model).</text></svg>`;
  }
  const x = BAND_X + reading.meter_position * BAND_W;
  const tx = BAND_X + reading.typicality * BAND_W;
  const color = reading.profile === "A" ? "#2e8540" : "#e08020";
  return [
    `<svg class="meter" width="${WIDTH}" height="${HEIGHT}" role="img">`,
    `<defs><linearGradient id="meterband" x1="0" x2="1">` +
    `<stop offset="0" stop-color="#d9534f"/><stop offset="0.5" stop-color="#f0ad4e"/>` +
    `<stop offset="1" stop-color="#5cb85c"/></linearGradient></defs>`,
    `<rect x="${BAND_X}" y="26" width="${BAND_W}" height="16" rx="8" fill="url(#meterband)"/>`,
    `<path class="needle" d="M ${x.toFixed(1)} 22 l -6 -12 l 12 0 z" fill="${color}"/>`,
    `<text class="band-label" x="${BAND_X}" y="58">Rare</text>`,
    `<text class="band-label" x="${WIDTH / 2}" y="58" text-anchor="middle">Moderately Common</text>`,
    `<text class="band-label" x="${WIDTH - 20}" y="58" text-anchor="end">Common</text>`,
    `<text class="reading" x="${BAND_X}" y="78">score ${reading.score.toFixed(3)} — ` +
    `${reading.label}</text>`,
    `<circle cx="${tx.toFixed(1)}" cy="92" r="4" fill="${color}" opacity="0.6"/>`,
    `<text class="reading" x="${BAND_X}" y="106">typicality (density percentile) ` +
    `${reading.typicality.toFixed(3)}</text>`,
    `</svg>`,
  ].join("");
}
