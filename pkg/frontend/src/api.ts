/**
 * Typed client for the bloomlab service plus the request gate that keeps
 * a single-user view consistent under overlapping requests.
 */

import type {
  CatalogueDocument,
  ErrorEnvelope,
  JobStatusResponse,
  ModelsResponse,
  NodesResponse,
  PipelineResponse,
  PipelineRunRequest,
  ProbitFitRequest,
  QueryResponse,
  ScenarioResponse,
  SensitivityResponse,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Service-reported failure; `code` matches the error envelope codes. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
    this.code = code;
  }
}

export class ServiceClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = '', fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, '');
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, 'unreachable', String(err));
    }
    if (!res.ok) {
      let code = 'error';
      let message = `HTTP ${res.status}`;
      try {
        const body = (await res.json()) as ErrorEnvelope;
        if (body && body.error) {
          code = body.error.code;
          message = body.error.message;
        }
      } catch {
        // non-JSON error body; keep the HTTP status message
      }
      throw new ApiError(res.status, code, message);
    }
    return (await res.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  models(): Promise<ModelsResponse> {
    return this.request('/models');
  }

  catalogue(id: string): Promise<CatalogueDocument> {
    return this.request(`/models/${encodeURIComponent(id)}`);
  }

  nodes(id: string): Promise<NodesResponse> {
    return this.request(`/models/${encodeURIComponent(id)}/nodes`);
  }

  query(id: string, target: string, evidence: Record<string, string>): Promise<QueryResponse> {
    return this.post(`/models/${encodeURIComponent(id)}/query`, { target, evidence });
  }

  scenarioByName(id: string, name: string, target: string): Promise<ScenarioResponse> {
    return this.post(`/models/${encodeURIComponent(id)}/scenario`, { target, name });
  }

  scenarioInline(
    id: string,
    evidence: Record<string, string>,
    target: string,
  ): Promise<ScenarioResponse> {
    return this.post(`/models/${encodeURIComponent(id)}/scenario`, { target, evidence });
  }

  sensitivity(id: string, target: string): Promise<SensitivityResponse> {
    return this.request(
      `/models/${encodeURIComponent(id)}/sensitivity?target=${encodeURIComponent(target)}`,
    );
  }

  runPipeline(payload: PipelineRunRequest): Promise<PipelineResponse> {
    return this.post('/pipeline/run', payload);
  }

  probitFit(payload: ProbitFitRequest): Promise<{ job_id: string }> {
    return this.post('/probit/fit', payload);
  }

  probitJob(id: string): Promise<JobStatusResponse> {
    return this.request(`/probit/jobs/${encodeURIComponent(id)}`);
  }
}

/**
 * Orders overlapping requests for a single-user view.
 *
 * Two rules, straight from the concurrency model:
 *  - identical requests (same `key`) share one in-flight promise;
 *  - each new request on a `channel` takes the next sequence number, and
 *    a response whose channel has since issued a newer request resolves
 *    to null so callers drop it instead of clobbering fresher state.
 *
 * Stale failures also resolve to null: an outdated error should not
 * replace the result of the request that superseded it.
 */
export class RequestGate {
  private inflight = new Map<string, Promise<unknown>>();
  private latest = new Map<string, number>();
  private counter = 0;

  run<T>(channel: string, key: string, issue: () => Promise<T>): Promise<T | null> {
    const existing = this.inflight.get(key);
    if (existing) return existing as Promise<T | null>;
    const ticket = ++this.counter;
    this.latest.set(channel, ticket);
    const settled = issue().then(
      (value) => {
        this.inflight.delete(key);
        return this.latest.get(channel) === ticket ? value : null;
      },
      (err) => {
        this.inflight.delete(key);
        if (this.latest.get(channel) === ticket) throw err;
        return null;
      },
    );
    this.inflight.set(key, settled);
    return settled;
  }
}

/** Canonical request key: channel plus params with sorted object keys. */
export const requestKey = (channel: string, params: unknown): string =>
  `${channel}:${stableStringify(params)}`;

const stableStringify = (value: unknown): string => {
  if (Array.isArray(value)) return `[${value.map(stableStringify).join(',')}]`;
  if (value && typeof value === 'object') {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${stableStringify(v)}`);
    return `{${entries.join(',')}}`;
  }
  return JSON.stringify(value);
};
