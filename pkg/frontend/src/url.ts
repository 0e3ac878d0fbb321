/**
 * Shareable-state <-> query-string mapping. Every knob that changes what
 * the user sees (alpha, k, pinned entities, search text, facets) lives in
 * the URL so a reload or a pasted link restores the view.
 */

export interface UrlState {
  alpha: number;
  k: number;
  entity1: string | null;
  entity2: string | null;
  query: string;
  facetTypes: string[];
  scoreMin: number | null;
  scoreMax: number | null;
}

export const DEFAULT_URL_STATE: UrlState = {
  alpha: 0.5,
  k: 10,
  entity1: null,
  entity2: null,
  query: '',
  facetTypes: [],
  scoreMin: null,
  scoreMax: null,
};

export function stateToQuery(state: UrlState): string {
  const params = new URLSearchParams();
  if (state.alpha !== DEFAULT_URL_STATE.alpha) params.set('alpha', state.alpha.toFixed(2));
  if (state.k !== DEFAULT_URL_STATE.k) params.set('k', String(state.k));
  if (state.entity1) params.set('e1', state.entity1);
  if (state.entity2) params.set('e2', state.entity2);
  if (state.query) params.set('q', state.query);
  if (state.facetTypes.length) params.set('types', state.facetTypes.join(','));
  if (state.scoreMin !== null) params.set('smin', String(state.scoreMin));
  if (state.scoreMax !== null) params.set('smax', String(state.scoreMax));
  return params.toString();
}

function parseBounded(raw: string | null, lo: number, hi: number): number | null {
  if (raw === null || raw === '') return null;
  const value = Number(raw);
  if (!Number.isFinite(value)) return null;
  return Math.min(hi, Math.max(lo, value));
}

export function queryToState(queryString: string): UrlState {
  const params = new URLSearchParams(queryString);
  const alpha = parseBounded(params.get('alpha'), 0, 1);
  const k = parseBounded(params.get('k'), 0, 1000);
  const types = params.get('types');
  return {
    alpha: alpha ?? DEFAULT_URL_STATE.alpha,
    k: k !== null ? Math.round(k) : DEFAULT_URL_STATE.k,
    entity1: params.get('e1'),
    entity2: params.get('e2'),
    query: params.get('q') ?? '',
    facetTypes: types ? types.split(',').filter((t) => t.length > 0) : [],
    scoreMin: parseBounded(params.get('smin'), -1, 1),
    scoreMax: parseBounded(params.get('smax'), -1, 1),
  };
}
