// Thin typed client over the service. The only place the UI talks HTTP.
//
// Values are transmitted exactly as typed: display clamping never touches
// what goes over the wire.

import type {
  AlgorithmDescriptor,
  ApiError,
  MapPayload,
  ProfileId,
  RealismPayload,
  SessionState,
  TrackerPayload,
} from "./types.js";

export class ServiceError extends Error {
  constructor(public status: number, public payload: ApiError) {
    super(payload.message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string = "/api/v1",
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ServiceError(response.status, parsed as ApiError);
    }
    return parsed as T;
  }

  algorithms(): Promise<AlgorithmDescriptor[]> {
    return this.request("GET", "/algorithms");
  }

  createSession(body: { csv?: string; model?: unknown; delimiter?: string }): Promise<SessionState> {
    return this.request("POST", "/sessions", body);
  }

  getState(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${sessionId}/state`);
  }

  replaceDataset(sessionId: string, csv: string): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/dataset`, { csv });
  }

  runSearch(sessionId: string, algorithm: string, params: Record<string, number> = {}) {
    return this.request<{ graph: SessionState["graph"]; params: Record<string, number> }>(
      "POST", `/sessions/${sessionId}/search`, { algorithm, params });
  }

  applyEdit(sessionId: string, action: string, src: string, dst: string, outcome?: string) {
    return this.request<{ graph: SessionState["graph"]; fit_preview: unknown }>(
      "POST", `/sessions/${sessionId}/edits`, { action, src, dst, outcome });
  }

  fit(sessionId: string, outcome: string, options: Partial<{
    test_fraction: number; seed: number; stats_scope: string; gmm_k: number;
  }> = {}): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/fit`, { outcome, ...options });
  }

  downloadModel(sessionId: string): Promise<unknown> {
    return this.request("GET", `/sessions/${sessionId}/model`);
  }

  loadModel(sessionId: string, model: unknown): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/model`, model);
  }

  // The typed value goes out verbatim, even when outside [min, max].
  setValue(sessionId: string, profile: ProfileId, node: string, value: number): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/profiles/${profile}/values`,
      { node, value });
  }

  clearIntervention(sessionId: string, profile: ProfileId, node: string): Promise<SessionState> {
    return this.request("DELETE",
      `/sessions/${sessionId}/profiles/${profile}/interventions/${node}`);
  }

  initComparison(sessionId: string): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/compare/init`);
  }

  neighborsMap(sessionId: string, radius: number): Promise<MapPayload> {
    return this.request("GET", `/sessions/${sessionId}/map?radius=${radius}`);
  }

  pick(sessionId: string, radius: number, row: number): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/map/pick?radius=${radius}`, { row });
  }

  realism(sessionId: string, profile: ProfileId): Promise<RealismPayload> {
    return this.request("GET", `/sessions/${sessionId}/realism?profile=${profile}`);
  }

  trackerSave(sessionId: string): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/tracker`);
  }

  trackerRead(sessionId: string): Promise<TrackerPayload> {
    return this.request("GET", `/sessions/${sessionId}/tracker`);
  }

  trackerRestore(sessionId: string, index: number): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/tracker/${index}/restore`);
  }
}
