/**
 * Explorer state container: one source of truth for the slider, facets,
 * entity pins, and the last completed result list.
 *
 * Concurrency contract: at most one in-flight explore request. Requests
 * carry a sequence number; a response is applied only if it is newer than
 * the newest applied one, so a slow early response can never clobber a
 * later result. Slider and search input are debounced.
 */

import { ApiClient } from './api';
import type { BaselineResponse, ContextDraft, ExploreRequest, ResultItem } from './types';
import { DEFAULT_URL_STATE, UrlState, queryToState, stateToQuery } from './url';

export interface ExplorerState {
  alpha: number;
  k: number;
  entity1: string | null;
  entity2: string | null;
  query: string;
  context: ContextDraft;
  facetTypes: string[];
  scoreMin: number | null;
  scoreMax: number | null;
  results: ResultItem[];
  selected: number | null;
  requestInFlight: boolean;
  error: string | null;
}

type Listener = (state: ExplorerState) => void;
type TimerHandle = unknown;

export interface StoreOptions {
  debounceMs?: number;
  schedule?: (fn: () => void, ms: number) => TimerHandle;
  cancel?: (handle: TimerHandle) => void;
}

const ALPHA_STEP = 0.01;

export class ExplorerStore {
  readonly state: ExplorerState;
  private seq = 0;
  private applied = 0;
  private timer: TimerHandle | null = null;
  private controller: AbortController | null = null;
  private listeners: Listener[] = [];
  private readonly debounceMs: number;
  private readonly schedule: (fn: () => void, ms: number) => TimerHandle;
  private readonly cancelTimer: (handle: TimerHandle) => void;

  constructor(
    private readonly api: ApiClient,
    options: StoreOptions = {},
    initial: Partial<UrlState> = {},
  ) {
    this.debounceMs = options.debounceMs ?? 250;
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.cancelTimer = options.cancel ?? ((handle) => clearTimeout(handle as number));
    const url = { ...DEFAULT_URL_STATE, ...initial };
    this.state = {
      alpha: url.alpha,
      k: url.k,
      entity1: url.entity1,
      entity2: url.entity2,
      query: url.query,
      context: { search_history: [], expertise: '', interests: [] },
      facetTypes: [...url.facetTypes],
      scoreMin: url.scoreMin,
      scoreMax: url.scoreMax,
      results: [],
      selected: null,
      requestInFlight: false,
      error: null,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  /** Quantize to the slider step so float drift never causes spurious requests. */
  setAlpha(alpha: number): void {
    const clamped = Math.min(1, Math.max(0, alpha));
    const stepped = Math.round(clamped / ALPHA_STEP) * ALPHA_STEP;
    if (stepped === this.state.alpha) return;
    this.state.alpha = stepped;
    this.notify();
    this.debouncedExplore();
  }

  setK(k: number): void {
    const next = Math.max(0, Math.round(k));
    if (next === this.state.k) return;
    this.state.k = next;
    this.notify();
    this.debouncedExplore();
  }

  setContext(context: ContextDraft): void {
    this.state.context = context;
    this.notify();
    this.debouncedExplore();
  }

  pinEntities(entity1: string | null, entity2: string | null): void {
    this.state.entity1 = entity1;
    this.state.entity2 = entity2;
    this.notify();
    this.debouncedExplore();
  }

  /** Facets narrow the already-fetched list; the ranking is never re-requested. */
  toggleTypeFacet(relationshipType: string): void {
    const active = this.state.facetTypes;
    const index = active.indexOf(relationshipType);
    if (index >= 0) active.splice(index, 1);
    else active.push(relationshipType);
    this.state.selected = null;
    this.notify();
  }

  setScoreRange(min: number | null, max: number | null): void {
    this.state.scoreMin = min;
    this.state.scoreMax = max;
    this.state.selected = null;
    this.notify();
  }

  clearFacets(): void {
    this.state.facetTypes = [];
    this.state.scoreMin = null;
    this.state.scoreMax = null;
    this.state.selected = null;
    this.notify();
  }

  visibleResults(): ResultItem[] {
    let out = this.state.results;
    if (this.state.facetTypes.length) {
      out = out.filter((r) => this.state.facetTypes.includes(r.relationship_type));
    }
    if (this.state.scoreMin !== null) {
      out = out.filter((r) => r.breakdown.score >= (this.state.scoreMin as number));
    }
    if (this.state.scoreMax !== null) {
      out = out.filter((r) => r.breakdown.score <= (this.state.scoreMax as number));
    }
    return out;
  }

  select(index: number | null): void {
    this.state.selected = index;
    this.notify();
  }

  async fetchBaseline(item: ResultItem): Promise<BaselineResponse> {
    return this.api.baseline(item.entity1, item.entity2);
  }

  toUrlQuery(): string {
    return stateToQuery({
      alpha: this.state.alpha,
      k: this.state.k,
      entity1: this.state.entity1,
      entity2: this.state.entity2,
      query: this.state.query,
      facetTypes: this.state.facetTypes,
      scoreMin: this.state.scoreMin,
      scoreMax: this.state.scoreMax,
    });
  }

  static fromUrlQuery(api: ApiClient, queryString: string, options: StoreOptions = {}): ExplorerStore {
    return new ExplorerStore(api, options, queryToState(queryString));
  }

  private debouncedExplore(): void {
    if (this.timer !== null) this.cancelTimer(this.timer);
    this.timer = this.schedule(() => {
      this.timer = null;
      void this.explore();
    }, this.debounceMs);
  }

  async explore(): Promise<void> {
    const n = ++this.seq;
    if (this.controller) this.controller.abort();
    this.controller = typeof AbortController !== 'undefined' ? new AbortController() : null;
    this.state.requestInFlight = true;
    this.notify();
    const request: ExploreRequest = {
      context: this.state.context,
      alpha: this.state.alpha,
      k: this.state.k,
    };
    if (this.state.entity1) request.entity1 = this.state.entity1;
    if (this.state.entity2) request.entity2 = this.state.entity2;
    try {
      const response = await this.api.explore(request, this.controller?.signal);
      if (n <= this.applied) return; // a newer response already landed
      this.applied = n;
      this.state.results = response.results;
      this.state.selected = null;
      this.state.error = null;
    } catch (err) {
      if (err instanceof DOMException && err.name === 'AbortError') return;
      if (n <= this.applied) return;
      this.applied = n;
      // keep the previous result list so the user's view survives a blip
      this.state.error = err instanceof Error ? err.message : String(err);
    } finally {
      if (n === this.seq) this.state.requestInFlight = false;
      this.notify();
    }
  }
}
