// Application wiring: one ViewStore, one ApiClient, string renderers per
// panel, and a single-in-flight mutation queue with stale-response discard.

import { ApiClient, ServiceError } from "./api.js";
import { debounced, valueAtPosition } from "./knob.js";
import { DagLayout, layoutFromLayers } from "./layout.js";
import {
  renderAccuracyChart,
  renderCoefficientTable,
  renderControlPanel,
  renderEditToolbar,
  renderFitPanel,
} from "./render/creation.js";
import { renderDag } from "./render/dag.js";
import { renderMap } from "./render/map.js";
import { renderMeter } from "./render/meter.js";
import { renderTracker } from "./render/tracker.js";
import { ViewStore } from "./store.js";
import { markTutorialSeen, shouldShowTutorial, tutorialHtml } from "./tutorial.js";
import type {
  AlgorithmDescriptor,
  MapPayload,
  ProfileId,
  RealismPayload,
  SessionState,
} from "./types.js";

const api = new ApiClient();
const store = new ViewStore();
let algorithms: AlgorithmDescriptor[] = [];
let mapPayload: MapPayload | null = null;
let realismPayload: RealismPayload | null = null;
let layout: DagLayout | null = null;
let banner = "";

// One mutation on the wire at a time; later calls queue behind it.
let chain: Promise<unknown> = Promise.resolve();

function mutate(run: () => Promise<SessionState>): Promise<void> {
  const seq = store.begin();
  const step = chain.then(async () => {
    try {
      const state = await run();
      if (store.apply(seq, state)) {
        await refreshSidePanels();
      }
    } catch (error) {
      banner = error instanceof ServiceError ? error.message : String(error);
      renderAll();
    }
  });
  chain = step;
  return step as Promise<void>;
}

async function refreshSidePanels(): Promise<void> {
  const state = store.state;
  mapPayload = null;
  realismPayload = null;
  if (state?.model && state.profiles.A) {
    if (state.dataset) {
      try {
        mapPayload = await api.neighborsMap(state.session_id, store.radius);
      } catch {
        mapPayload = null;
      }
    }
    if (state.model.has_gmm) {
      try {
        realismPayload = await api.realism(state.session_id, store.selectedProfile);
      } catch {
        realismPayload = null;
      }
    }
  }
  renderAll();
}

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found;
}

export function renderAll(): void {
  const state = store.viewState();
  if (state?.model) {
    layout = layoutFromLayers(state.model.layers);
  }
  el("creation").innerHTML = [
    renderControlPanel(algorithms, state),
    renderEditToolbar(state),
    renderFitPanel(state),
    renderCoefficientTable(state),
    renderAccuracyChart(state),
  ].join("");
  el("dag-panel").innerHTML = state?.model && layout
    ? renderDag({ state, layout, selectedProfile: store.selectedProfile })
    : `<p class="placeholder">Upload data, search, edit, and fit to explore the model.</p>`;
  el("comparison-controls").innerHTML = state?.model
    ? [
        `<button id="init-comparison">Initialize Comparison</button>`,
        store.comparisonActive() ? `<button id="exit-comparison">Exit comparison</button>` : "",
        `<label>Editing profile `,
        `<select id="profile-select">`,
        `<option value="A"${store.selectedProfile === "A" ? " selected" : ""}>A (green)</option>`,
        store.comparisonActive()
          ? `<option value="B"${store.selectedProfile === "B" ? " selected" : ""}>B (orange)</option>`
          : "",
        `</select></label>`,
        `<button id="save-profiles">Save Profiles</button>`,
      ].join("")
    : "";
  el("map-panel").innerHTML = state?.dataset && state?.model
    ? `<label>Radius <input type="range" id="radius" min="0" step="0.1" ` +
      `max="${radiusCeiling(state)}" value="${store.radius}"/> ` +
      `<span>${store.radius.toFixed(1)}</span></label>` + renderMap(mapPayload) +
      `<p class="hover-compare" id="hover-compare"></p>`
    : "";
  el("tracker-panel").innerHTML = state ? renderTracker(state.tracker) : "";
  el("meter-panel").innerHTML = state?.model ? renderMeter(realismPayload) : "";
  el("banner").innerHTML = [
    banner ? `<p class="error">${banner}</p>` : "",
    state?.warning ? `<p class="warning">${state.warning}</p>` : "",
    store.tooManyNodes()
      ? `<p class="warning">This model has more than 9 variables; the view may get crowded.</p>`
      : "",
  ].join("");
  wireKnobEditor();
}

function radiusCeiling(state: SessionState): number {
  const outcome = state.model?.variables.find((v) => v.name === state.model?.outcome);
  return outcome ? Math.max(1, +(outcome.max - outcome.min).toFixed(1)) : 10;
}

let editing: string | null = null;

function wireKnobEditor(): void {
  const state = store.state;
  const host = el("knob-editor");
  if (!state?.model || !editing || editing === state.model.outcome) {
    host.innerHTML = "";
    return;
  }
  const record = state.model.variables.find((v) => v.name === editing);
  const profile = state.profiles[store.selectedProfile];
  if (!record || !profile) {
    host.innerHTML = "";
    return;
  }
  const current = profile.prediction.values[editing];
  host.innerHTML = [
    `<div class="knob-editor-card">`,
    `<h3>${editing}</h3>`,
    `<p>observed range ${record.min} … ${record.max}</p>`,
    `<input type="number" id="typed-value" step="any" value="${current}"/>`,
    `<button id="apply-typed">Set</button>`,
    `<button id="close-editor">Close</button>`,
    `</div>`,
  ].join("");
}

function setValueFor(node: string, value: number): Promise<void> {
  const state = store.state;
  if (!state) return Promise.resolve();
  return mutate(() => api.setValue(state.session_id, store.selectedProfile, node, value));
}

const dragSender = debounced<{ node: string; value: number }>(({ node, value }) => {
  void setValueFor(node, value);
});

function attachEvents(): void {
  document.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const state = store.state;
    banner = "";

    if (target.id === "tutorial-dismiss") {
      markTutorialSeen();
      document.getElementById("tutorial")?.remove();
      return;
    }
    if (target.id === "run-search" && state) {
      const algorithm = (el("algorithm") as HTMLSelectElement).value;
      void chain.then(async () => {
        try {
          await api.runSearch(state.session_id, algorithm);
          store.applyRead(await api.getState(state.session_id));
          await refreshSidePanels();
        } catch (error) {
          banner = error instanceof ServiceError ? error.message : String(error);
          renderAll();
        }
      });
      return;
    }
    if (target.classList.contains("edit-action") && state) {
      const action = target.dataset.action!;
      const src = (el("edit-src") as HTMLInputElement).value.trim();
      const dst = (el("edit-dst") as HTMLInputElement).value.trim();
      void chain.then(async () => {
        try {
          await api.applyEdit(state.session_id, action, src, dst);
          store.applyRead(await api.getState(state.session_id));
          await refreshSidePanels();
        } catch (error) {
          banner = error instanceof ServiceError ? error.message : String(error);
          renderAll();
        }
      });
      return;
    }
    if (target.id === "run-fit" && state) {
      const outcome = (el("outcome-name") as HTMLInputElement).value.trim();
      void mutate(() => api.fit(state.session_id, outcome));
      return;
    }
    if (target.id === "save-model" && state) {
      void api.downloadModel(state.session_id).then((model) => {
        const blob = new Blob([JSON.stringify(model, null, 2)], { type: "application/json" });
        const link = document.createElement("a");
        link.href = URL.createObjectURL(blob);
        link.download = "model.json";
        link.click();
        URL.revokeObjectURL(link.href);
      });
      return;
    }
    if (target.id === "init-comparison" && state) {
      store.comparisonHidden = false;
      void mutate(() => api.initComparison(state.session_id));
      return;
    }
    if (target.id === "exit-comparison") {
      // Purely a view change: B stays on the server, the panels hide it.
      store.comparisonHidden = true;
      store.selectedProfile = "A";
      void refreshSidePanels();
      return;
    }
    if (target.id === "save-profiles" && state) {
      void mutate(() => api.trackerSave(state.session_id));
      return;
    }
    const clearHost = target.closest?.(".clear-intervention") as HTMLElement | null;
    if (clearHost?.dataset.node && state) {
      const node = clearHost.dataset.node;
      void mutate(() => api.clearIntervention(state.session_id, store.selectedProfile, node));
      return;
    }
    const nodeHost = target.closest?.(".node") as HTMLElement | null;
    if (nodeHost?.dataset.node && state?.model) {
      editing = nodeHost.dataset.node;
      wireKnobEditor();
      return;
    }
    const mapPoint = target.closest?.(".map-point") as HTMLElement | null;
    if (mapPoint?.dataset.row && state) {
      const row = Number(mapPoint.dataset.row);
      void mutate(() => api.pick(state.session_id, store.radius, row));
      return;
    }
    const trackerPoint = target.closest?.(".tracker-point") as HTMLElement | null;
    if (trackerPoint?.dataset.index && state) {
      const index = Number(trackerPoint.dataset.index);
      store.selectedTrackerIndex = index;
      void mutate(() => api.trackerRestore(state.session_id, index));
      return;
    }
    if (target.id === "apply-typed" && editing) {
      const typed = Number((el("typed-value") as HTMLInputElement).value);
      if (Number.isFinite(typed)) {
        void setValueFor(editing, typed); // verbatim, even out of range
      }
      return;
    }
    if (target.id === "close-editor") {
      editing = null;
      wireKnobEditor();
      return;
    }
  });

  document.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "profile-select") {
      store.selectedProfile = (target as HTMLSelectElement).value as ProfileId;
      void refreshSidePanels();
    }
    if (target.id === "csv-upload") {
      const input = target as HTMLInputElement;
      const file = input.files?.[0];
      if (!file) return;
      void file.text().then(async (csv) => {
        try {
          const state = store.state
            ? await api.replaceDataset(store.state.session_id, csv)
            : await api.createSession({ csv });
          store.apply(store.begin(), state);
          await refreshSidePanels();
        } catch (error) {
          banner = error instanceof ServiceError ? error.message : String(error);
          renderAll();
        }
      });
    }
  });

  document.addEventListener("input", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "radius") {
      store.radius = Number((target as HTMLInputElement).value);
      void refreshSidePanels();
    }
  });

  // Hovering a map point shows a transient comparison against profile A.
  document.addEventListener("pointerover", (event) => {
    const point = (event.target as HTMLElement).closest?.(".map-point") as HTMLElement | null;
    const host = document.getElementById("hover-compare");
    if (!host) return;
    const state = store.state;
    if (point?.dataset.row && state?.profiles.A && mapPayload) {
      const row = Number(point.dataset.row);
      const found = mapPayload.points.find((p) => p.row === row);
      if (found) {
        const mine = state.profiles.A.prediction.outcome;
        const delta = found.outcome - mine;
        host.textContent =
          `row ${row}: outcome ${found.outcome.toPrecision(5)} ` +
          `(${delta >= 0 ? "+" : ""}${delta.toPrecision(3)} vs profile A) — click to compare`;
      }
    } else if (!point) {
      host.textContent = "";
    }
  });

  // Knob drags: pointer events on the grey handle, debounced, flush on release.
  let dragging: { node: string; min: number; max: number } | null = null;
  document.addEventListener("pointerdown", (event) => {
    const handle = (event.target as HTMLElement).closest?.(".handle") as HTMLElement | null;
    const record = handle?.dataset.node
      ? store.state?.model?.variables.find((v) => v.name === handle.dataset.node)
      : null;
    if (handle?.dataset.node && record) {
      dragging = { node: handle.dataset.node, min: record.min, max: record.max };
      event.preventDefault();
    }
  });
  document.addEventListener("pointermove", (event) => {
    if (!dragging) return;
    const nodeGroup = document.querySelector(`g.node[data-node="${dragging.node}"]`);
    const rect = (nodeGroup as SVGGElement | null)?.getBoundingClientRect();
    if (!rect) return;
    const cx = rect.left + rect.width / 2;
    const cy = rect.top + rect.height / 2;
    // angle over the 270-degree dial starting at the bottom-left
    let angle = Math.atan2(event.clientY - cy, event.clientX - cx) - 0.75 * 2 * Math.PI;
    while (angle < 0) angle += 2 * Math.PI;
    const fraction = Math.min(1, angle / (1.5 * Math.PI));
    dragSender.push({
      node: dragging.node,
      value: valueAtPosition(fraction, dragging.min, dragging.max),
    });
  });
  document.addEventListener("pointerup", () => {
    if (dragging) {
      dragSender.flush(); // the release always sends the final value
      dragging = null;
    }
  });
}

export function boot(): void {
  attachEvents();
  void api.algorithms().then((list) => {
    algorithms = list;
    renderAll();
  }).catch(() => renderAll());
  if (shouldShowTutorial()) {
    document.body.insertAdjacentHTML("beforeend", tutorialHtml());
  }
  renderAll();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
