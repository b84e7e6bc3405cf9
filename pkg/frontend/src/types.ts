// Payload shapes of the /api/v1 service. The UI renders these verbatim and
// never re-derives model math locally.

export type ProfileId = "A" | "B";

export interface VariableRecord {
  name: string;
  role: "exogenous" | "endogenous";
  mean: number;
  std: number;
  min: number;
  max: number;
}

export interface EdgeRecord {
  src: string;
  dst: string;
  beta: number;
}

export interface FitReportPayload {
  chi_square: number;
  df: number;
  cfi: number | null;
  gfi: number | null;
  agfi: number | null;
  rmsea: number | null;
  n_used: number;
}

export interface AccuracyPayload {
  predicted: number[];
  actual: number[];
  rmse: number;
  r_squared: number;
}

export interface ModelSummary {
  outcome: string;
  variables: VariableRecord[];
  edges: EdgeRecord[];
  layers: string[][];
  fit: FitReportPayload | null;
  accuracy: AccuracyPayload | null;
  has_gmm: boolean;
}

export interface PredictionPayload {
  values: Record<string, number>;
  outcome: number;
  inactive_edges: [string, string][];
  non_impacting: string[];
}

export interface ProfilePayload {
  id: ProfileId;
  values: Record<string, number>;
  interventions: string[];
  prediction: PredictionPayload;
}

export interface GraphPayload {
  nodes: string[];
  directed_edges: [string, string][];
  undirected_edges: [string, string][];
}

export interface TrackerPayload {
  cursor: number;
  entries: { outcome_a: number; outcome_b: number | null }[];
}

export interface SessionState {
  session_id: string;
  created: string;
  updated: string;
  dataset: { columns: string[]; n: number; dropped_rows: [number, string][] } | null;
  graph: GraphPayload | null;
  outcome: string | null;
  model: ModelSummary | null;
  profiles: { A: ProfilePayload | null; B: ProfilePayload | null };
  tracker: TrackerPayload;
  warning?: string;
}

export interface MapPointPayload {
  x: number;
  y: number;
  outcome: number;
  row: number;
}

export interface MapPayload {
  radius: number;
  feature_columns: string[];
  axes: number[][];
  explained_variance: number[];
  points: MapPointPayload[];
  profiles: { A: [number, number] | null; B: [number, number] | null };
}

export interface RealismPayload {
  profile: ProfileId;
  score: number;
  component: number;
  label: "Rare" | "Moderately Common" | "Common";
  meter_position: number;
  typicality: number;
}

export interface AlgorithmDescriptor {
  name: string;
  params: Record<string, number>;
}

export interface ApiError {
  code: string;
  message: string;
  details: Record<string, unknown>;
}
