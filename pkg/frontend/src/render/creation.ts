// Creation screens: upload, algorithm dropdown, edge-edit toolbar, fit
// measures, coefficient table, and the held-out accuracy chart.

import type { AlgorithmDescriptor, SessionState } from "../types.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderControlPanel(algorithms: AlgorithmDescriptor[],
                                   state: SessionState | null): string {
  const options = algorithms
    .map((a) => `<option value="${esc(a.name)}">${esc(a.name)}</option>`)
    .join("");
  const datasetLine = state?.dataset
    ? `<p class="dataset-line">${state.dataset.n} rows · ` +
      `${state.dataset.columns.length} columns` +
      (state.dataset.dropped_rows.length
        ? ` · ${state.dataset.dropped_rows.length} dropped` : "") + `</p>`
    : `<p class="dataset-line">No data uploaded.</p>`;
  return [
    `<section class="panel control-panel">`,
    `<h2>Control panel</h2>`,
    datasetLine,
    `<label class="upload">Upload CSV <input type="file" id="csv-upload" accept=".csv"/></label>`,
    `<label>Algorithm <select id="algorithm">${options}</select></label>`,
    `<button id="run-search">Run search</button>`,
    `<label>Outcome <input id="outcome-name" placeholder="outcome column"/></label>`,
    `<button id="run-fit">Finalize &amp; fit</button>`,
    `<button id="save-model">Save model</button>`,
    `</section>`,
  ].join("");
}

export function renderEditToolbar(state: SessionState | null): string {
  const graph = state?.graph;
  const edgeCount = graph ? graph.directed_edges.length + graph.undirected_edges.length : 0;
  const undirected = graph?.undirected_edges ?? [];
  return [
    `<section class="panel edit-toolbar">`,
    `<h2>Edge edits</h2>`,
    `<p>${edgeCount} edges` +
    (undirected.length ? ` (${undirected.length} undirected)` : "") + `</p>`,
    `<label>From <input id="edit-src" size="12"/></label>`,
    `<label>To <input id="edit-dst" size="12"/></label>`,
    `<span class="actions">`,
    `<button class="edit-action" data-action="add">Add</button>`,
    `<button class="edit-action" data-action="direct">Direct</button>`,
    `<button class="edit-action" data-action="remove">Remove</button>`,
    `<button class="edit-action" data-action="reverse">Reverse</button>`,
    `</span>`,
    undirected.length
      ? `<p class="hint">Undirected: ${undirected.map(([a, b]) =>
          `${esc(a)} — ${esc(b)}`).join(", ")}</p>`
      : "",
    `</section>`,
  ].join("");
}

export function renderFitPanel(state: SessionState | null): string {
  const fit = state?.model?.fit;
  const rows = fit
    ? [
        ["chi-square", fit.chi_square.toFixed(3)],
        ["df", String(fit.df)],
        ["CFI", fit.cfi == null ? "saturated" : fit.cfi.toFixed(3)],
        ["GFI", fit.gfi == null ? "saturated" : fit.gfi.toFixed(3)],
        ["AGFI", fit.agfi == null ? "saturated" : fit.agfi.toFixed(3)],
        ["RMSEA", fit.rmsea == null ? "saturated" : fit.rmsea.toFixed(4)],
        ["n", String(fit.n_used)],
      ]
    : [];
  return [
    `<section class="panel fit-panel">`,
    `<h2>Model fit</h2>`,
    fit
      ? `<table class="fit-table">${rows.map(([k, v]) =>
          `<tr><th>${k}</th><td>${v}</td></tr>`).join("")}</table>`
      : `<p>Fit a model to see the measures.</p>`,
    `</section>`,
  ].join("");
}

export function renderCoefficientTable(state: SessionState | null): string {
  const model = state?.model;
  if (!model) {
    return `<section class="panel coef-panel"><h2>Parameter estimates</h2>` +
      `<p>No fitted model.</p></section>`;
  }
  const rows = [...model.edges]
    .sort((a, b) => `${a.src}>${a.dst}`.localeCompare(`${b.src}>${b.dst}`))
    .map((e) =>
      `<tr><td>${esc(e.src)} → ${esc(e.dst)}</td>` +
      `<td class="${e.beta < 0 ? "neg" : "pos"}">${e.beta.toFixed(3)}</td></tr>`)
    .join("");
  return [
    `<section class="panel coef-panel">`,
    `<h2>Parameter estimates</h2>`,
    `<table class="coef-table"><tr><th>edge</th><th>β</th></tr>${rows}</table>`,
    `</section>`,
  ].join("");
}

export function renderAccuracyChart(state: SessionState | null): string {
  const accuracy = state?.model?.accuracy;
  if (!accuracy || accuracy.actual.length === 0) {
    return `<section class="panel accuracy-panel"><h2>Test accuracy</h2>` +
      `<p>No held-out evaluation.</p></section>`;
  }
  const width = 380;
  const height = 160;
  const pad = 24;
  const n = accuracy.actual.length;
  const all = [...accuracy.actual, ...accuracy.predicted];
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const sx = (i: number) => pad + (i / Math.max(n - 1, 1)) * (width - 2 * pad);
  const sy = (v: number) =>
    height - pad - ((v - lo) / Math.max(hi - lo, 1e-12)) * (height - 2 * pad);
  const line = (values: number[], color: string) =>
    `<polyline points="${values.map((v, i) =>
      `${sx(i).toFixed(1)},${sy(v).toFixed(1)}`).join(" ")}" ` +
    `fill="none" stroke="${color}" stroke-width="1.5"/>`;
  return [
    `<section class="panel accuracy-panel">`,
    `<h2>Test accuracy</h2>`,
    `<svg width="${width}" height="${height}" role="img">`,
    line(accuracy.actual, "#888"),
    line(accuracy.predicted, "#2f6fd0"),
    `</svg>`,
    `<p>rmse ${accuracy.rmse.toFixed(3)} · r² ${accuracy.r_squared.toFixed(3)} ` +
    `<span class="legend-grey">actual</span> <span class="legend-blue">predicted</span></p>`,
    `</section>`,
  ].join("");
}
