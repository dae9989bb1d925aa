/**
 * Response and request shapes of the bloomlab HTTP API.
 *
 * These mirror the service JSON exactly; the UI never reshapes numbers,
 * it only formats fields that appear here.
 */

/** Map from node state to its probability, in the node's state order. */
export type Posterior = Record<string, number>;

export interface ModelSummary {
  id: string;
  kind: string;
  queryable: boolean;
  scenarios: string[];
}

export interface ModelsResponse {
  models: ModelSummary[];
  datasets: string[];
}

export interface NodeInfo {
  name: string;
  states: string[];
  parents: string[];
}

export interface NodesResponse {
  model: string;
  nodes: NodeInfo[];
}

export interface QueryResponse {
  model: string;
  target: string;
  evidence: Record<string, string>;
  posterior: Posterior;
}

export interface ScenarioResponse {
  model: string;
  scenario: string;
  target: string;
  posterior: Posterior;
  baseline: Posterior;
  delta: Record<string, number>;
}

export interface SensitivityResponse {
  model: string;
  target: string;
  /** [node name, mutual information], already sorted best first. */
  entries: [string, number][];
}

export interface InterventionRequest {
  practice_overrides: Record<string, string>;
  landuse_overrides: Record<string, string>;
  extra_evidence?: Record<string, string>;
  label: string;
}

export interface PipelineRunRequest {
  catalogue?: string;
  model?: string;
  target?: string;
  intervention: InterventionRequest;
}

export interface PipelineResponse {
  catalogue: string;
  model: string;
  label: string;
  load: Record<string, number>;
  total_index: number;
  evidence: Record<string, string>;
  posterior: Posterior;
  baseline: Posterior;
  delta: Record<string, number>;
  conflicts: string[][];
}

export interface ProbitFitRequest {
  dataset: string;
  iterations?: number;
  seed?: number;
  prior_scale?: number;
  burn_in?: number;
}

export interface ProbitModelRow {
  gamma: string;
  probability: number;
  se: number;
}

export interface ProbitResult {
  dataset: string;
  seed: number;
  iterations: number;
  columns: string[];
  models: ProbitModelRow[];
  inclusion: Record<string, { probability: number; se: number }>;
  n_samples: number;
}

export interface JobStatusResponse {
  job_id: string;
  status: 'queued' | 'running' | 'done' | 'failed';
  result?: ProbitResult;
  error?: string;
}

/** Catalogue document as served by GET /models/{id} for kind "catalogue". */
export interface CatalogueSource {
  id: string;
  kind: string;
  category: string;
  area_or_capacity: number;
  soil_ph: number;
  soil_type: string;
  distance_m: number;
  emissions: Record<string, Record<string, number>>;
}

export interface CatalogueBody {
  sources: CatalogueSource[];
  profiles: Record<string, Record<string, Record<string, number>>>;
  shares: Record<string, number>;
  link: {
    nodes: Record<string, string>;
    thresholds: Record<string, [number, number]>;
    states: string[];
  };
}

export interface CatalogueDocument {
  format_version: number;
  kind: string;
  body: CatalogueBody;
}

export interface ErrorEnvelope {
  error: { code: string; message: string };
}
