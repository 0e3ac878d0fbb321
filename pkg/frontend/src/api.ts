/**
 * Thin typed client for the relex service. The fetch implementation is
 * injectable so tests can replay recorded responses without a server.
 */

import type {
  BaselineResponse,
  EntityHit,
  ExploreRequest,
  ExploreResponse,
  FacetCounts,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async explore(req: ExploreRequest, signal?: AbortSignal): Promise<ExploreResponse> {
    return this.request<ExploreResponse>('/explore', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(req),
      signal,
    });
  }

  async entities(q: string, limit = 20): Promise<EntityHit[]> {
    const params = new URLSearchParams({ q, limit: String(limit) });
    const body = await this.request<{ results: EntityHit[] }>(`/entities?${params}`);
    return body.results;
  }

  async facets(): Promise<FacetCounts> {
    const body = await this.request<{ relationship_types: FacetCounts }>('/facets');
    return body.relationship_types;
  }

  async baseline(e1: string, e2: string): Promise<BaselineResponse> {
    const params = new URLSearchParams({ e1, e2 });
    return this.request<BaselineResponse>(`/baseline?${params}`);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      if (err instanceof DOMException && err.name === 'AbortError') throw err;
      throw new ApiError(`service unreachable: ${String(err)}`);
    }
    if (!resp.ok) {
      throw new ApiError(`HTTP ${resp.status}`, resp.status);
    }
    return (await resp.json()) as T;
  }
}
