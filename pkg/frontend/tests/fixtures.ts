// Hand-built session payloads for store/render tests.

import type { PredictionPayload, ProfilePayload, SessionState } from "../src/types.js";

export function prediction(overrides: Partial<PredictionPayload> = {}): PredictionPayload {
  return {
    values: { A: 0, B: 0, C: 0, D: 0, E: 0 },
    outcome: 0,
    inactive_edges: [],
    non_impacting: [],
    ...overrides,
  };
}

export function profile(id: "A" | "B", overrides: Partial<ProfilePayload> = {}): ProfilePayload {
  return {
    id,
    values: { A: 0, B: 0 },
    interventions: [],
    prediction: prediction(),
    ...overrides,
  };
}

export function sessionState(overrides: Partial<SessionState> = {}): SessionState {
  return {
    session_id: "s1",
    created: "2026-01-01T00:00:00Z",
    updated: "2026-01-01T00:00:00Z",
    dataset: { columns: ["A", "B", "C", "D", "E"], n: 100, dropped_rows: [] },
    graph: null,
    outcome: "E",
    model: {
      outcome: "E",
      variables: [
        { name: "A", role: "exogenous", mean: 0, std: 1, min: -3, max: 3 },
        { name: "B", role: "exogenous", mean: 0, std: 1, min: -3, max: 3 },
        { name: "C", role: "endogenous", mean: 0, std: 1, min: -3, max: 3 },
        { name: "D", role: "endogenous", mean: 0, std: 1, min: -3, max: 3 },
        { name: "E", role: "endogenous", mean: 0, std: 1, min: -3, max: 3 },
      ],
      edges: [
        { src: "A", dst: "C", beta: 0.5 },
        { src: "B", dst: "C", beta: 0.3 },
        { src: "B", dst: "D", beta: 0.6 },
        { src: "C", dst: "E", beta: 0.4 },
        { src: "D", dst: "E", beta: -0.5 },
      ],
      layers: [["A", "B"], ["C", "D"], ["E"]],
      fit: { chi_square: 3.2, df: 6, cfi: 0.999, gfi: 0.998, agfi: 0.995,
             rmsea: 0.004, n_used: 100 },
      accuracy: { predicted: [1, 2], actual: [1.1, 1.9], rmse: 0.1, r_squared: 0.98 },
      has_gmm: true,
    },
    profiles: { A: profile("A"), B: null },
    tracker: { cursor: -1, entries: [] },
    ...overrides,
  };
}
