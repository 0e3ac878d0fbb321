import { describe, expect, it } from 'vitest';

import { DEFAULT_URL_STATE, queryToState, stateToQuery } from '../src/url';

describe('query-string state', () => {
  it('defaults produce an empty query string', () => {
    expect(stateToQuery(DEFAULT_URL_STATE)).toBe('');
  });

  it('round-trips a fully populated state', () => {
    const state = {
      alpha: 0.8,
      k: 3,
      entity1: 'http://www.wikidata.org/entity/Q5582',
      entity2: null,
      query: 'van gogh',
      facetTypes: ['born_in', 'works_in'],
      scoreMin: 0.25,
      scoreMax: 0.9,
    };
    const parsed = queryToState(stateToQuery(state));
    expect(parsed.alpha).toBeCloseTo(0.8, 10);
    expect(parsed.k).toBe(3);
    expect(parsed.entity1).toBe(state.entity1);
    expect(parsed.entity2).toBeNull();
    expect(parsed.query).toBe('van gogh');
    expect(parsed.facetTypes).toEqual(state.facetTypes);
    expect(parsed.scoreMin).toBe(0.25);
    expect(parsed.scoreMax).toBe(0.9);
  });

  it('clamps out-of-range numbers instead of propagating them', () => {
    const parsed = queryToState('alpha=7&smin=-9');
    expect(parsed.alpha).toBe(1);
    expect(parsed.scoreMin).toBe(-1);
  });

  it('ignores malformed numbers', () => {
    const parsed = queryToState('alpha=banana&k=');
    expect(parsed.alpha).toBe(DEFAULT_URL_STATE.alpha);
    expect(parsed.k).toBe(DEFAULT_URL_STATE.k);
  });

  it('treats an empty types parameter as no facets', () => {
    expect(queryToState('types=').facetTypes).toEqual([]);
  });
});
